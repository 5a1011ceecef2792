#pragma once

// Pre-Fatou coverings tau, explicit lifts F with the principal-branch log,
// Abel-limit linearizers, and the numerical Fatou coordinate Phi with its
// residual machinery.  The sigma-end (bottom) variants share the same code
// path: a context is parameterized by which fixed point anchors the covering
// and by the drift (+1 at the 0-end, -1 at the sigma-end).

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "pararenorm/config.hpp"
#include "pararenorm/errors.hpp"
#include "pararenorm/maps.hpp"
#include "pararenorm/numerics.hpp"

namespace pararenorm::fatou {

enum class End { Zero, Sigma };
enum class FatouMode { Model, Refined };

// h(z) = z + z (z - sigma) u(z).  For the model families u is rational with
// an explicit small numerator; sampled maps get a finite-difference fallback.
struct UField {
  std::function<ComplexVal(ComplexVal)> val;
  std::function<ComplexVal(ComplexVal)> deriv;
};

inline UField make_u_field(const maps::MapSpec& spec, ComplexVal sigma) {
  ComplexVal E = maps::rot(maps::rotation_of(spec));
  if (std::get_if<maps::Quadratic>(&spec)) {
    ComplexVal u0 = (27.0 / 16.0) * E * E;
    return {[u0](ComplexVal) { return u0; }, [](ComplexVal) { return ComplexVal(0.0, 0.0); }};
  }
  ComplexVal c = std::get<maps::MoebiusIS>(spec).c;
  // bracket(z) = E(1+(1+c)Ez)^2 - (1+cEz)^3 = (z - sigma) q(z); divide out
  // the root so u = q / (1+cEz)^3 evaluates without cancellation.
  std::array<ComplexVal, 4> br{
      E - 1.0,
      2.0 * (1.0 + c) * E * E - 3.0 * c * E,
      (1.0 + c) * (1.0 + c) * E * E * E - 3.0 * c * c * E * E,
      -c * c * c * E * E * E,
  };
  std::array<ComplexVal, 3> q{};
  ComplexVal carry = br[3];
  for (int i = 3; i-- > 0;) {
    q[i] = carry;
    carry = br[i] + sigma * carry;
  }
  if (std::abs(carry) > 1e-9)
    fail(ErrorCode::PreconditionViolated, "sigma is not a root of the bracket");
  ComplexVal cE = c * E;
  auto num = [q](ComplexVal z) { return (q[2] * z + q[1]) * z + q[0]; };
  auto nump = [q](ComplexVal z) { return 2.0 * q[2] * z + q[1]; };
  return {[=](ComplexVal z) {
            ComplexVal d = 1.0 + cE * z;
            return num(z) / (d * d * d);
          },
          [=](ComplexVal z) {
            ComplexVal d = 1.0 + cE * z;
            return (nump(z) * d - 3.0 * cE * num(z)) / (d * d * d * d);
          }};
}

// u from a sampled map: direct quotient away from {0, sigma}, derivative by
// central difference.  lambda0 supplies the z -> 0 limit.
inline UField make_u_field_sampled(std::function<ComplexVal(ComplexVal)> f,
                                   ComplexVal sigma, ComplexVal lambda0) {
  auto val = [f, sigma, lambda0](ComplexVal z) -> ComplexVal {
    if (std::abs(z) < 1e-7 * (1.0 + std::abs(sigma)))
      return (lambda0 - 1.0) / (0.0 - sigma);
    return (f(z) - z) / (z * (z - sigma));
  };
  auto dv = [val](ComplexVal z) {
    double h = 1e-6 * (1.0 + std::abs(z));
    return (val(z + h) - val(z - h)) / (2.0 * h);
  };
  return {val, dv};
}

struct LiftContext {
  std::function<ComplexVal(ComplexVal)> f;  // the map being lifted
  End end = End::Zero;
  int drift = +1;          // translation of F at the anchored end
  ComplexVal sigma{0.0, 0.0};
  ComplexVal alpha{0.0, 0.0};  // rotation at the anchored end (alpha or beta)
  double inner_radius = 0.3;   // Theta exclusion around the pole lattice n/alpha
  UField u;
  // All finite preimages of a point under the map, when they have closed
  // forms; empty means inverse steps fall back to Newton on the lift.
  std::function<std::vector<ComplexVal>(ComplexVal)> preimages;
  // Log branches are principal per evaluation; continuity across calls is
  // recovered by the (0,1) strip normalization of tau_inv, so no shared
  // branch state exists.
};

inline LiftContext make_lift_context_generic(
    std::function<ComplexVal(ComplexVal)> f, ComplexVal sigma,
    ComplexVal alpha, End end, double inner_radius, UField u,
    double sigma_tol = 1e-9) {
  if (!(inner_radius > 0.0))
    fail(ErrorCode::OutOfRange, "inner_radius must be positive");
  if (std::abs(alpha) == 0.0) fail(ErrorCode::ZeroInput, "zero rotation");
  if (std::abs(f(sigma) - sigma) > sigma_tol)
    fail(ErrorCode::PreconditionViolated, "sigma is not fixed by the map");
  LiftContext ctx;
  ctx.f = std::move(f);
  ctx.end = end;
  ctx.drift = (end == End::Zero) ? +1 : -1;
  ctx.sigma = sigma;
  ctx.alpha = alpha;
  ctx.inner_radius = inner_radius;
  ctx.u = std::move(u);
  return ctx;
}

inline LiftContext make_lift_context(const maps::MapSpec& spec, End end,
                                     double inner_radius,
                                     const RunConfig& cfg = {}) {
  maps::FixedPointData fp = maps::fixed_point_data(spec, cfg);
  ComplexVal rho = (end == End::Zero) ? maps::rotation_of(spec) : fp.beta;
  auto f = [spec](ComplexVal z) { return maps::map_eval(spec, z); };
  LiftContext ctx = make_lift_context_generic(
      f, fp.sigma, rho, end, inner_radius, make_u_field(spec, fp.sigma), 1e-10);
  ctx.preimages = [spec](ComplexVal z) { return maps::preimages(spec, z); };
  return ctx;
}

// Distance from w to the pole lattice {n/alpha}.
inline double theta_distance(const LiftContext& ctx, ComplexVal w) {
  ComplexVal aw = ctx.alpha * w;
  double n0 = std::round(aw.real());
  double best = std::numeric_limits<double>::infinity();
  for (double n : {n0 - 1.0, n0, n0 + 1.0})
    best = std::min(best, std::abs(aw - n));
  return best / std::abs(ctx.alpha);
}

inline bool in_theta(const LiftContext& ctx, ComplexVal w) {
  return theta_distance(ctx, w) > ctx.inner_radius;
}

inline ComplexVal tau(const LiftContext& ctx, ComplexVal w) {
  ComplexVal X = std::exp(ComplexVal(0.0, -kTwoPi) * ctx.alpha * w);
  ComplexVal d = 1.0 - X;
  if (std::abs(d) < 1e-300) fail(ErrorCode::SingularInput, "tau pole");
  return ctx.sigma / d;
}

inline ComplexVal tau_prime(const LiftContext& ctx, ComplexVal w) {
  ComplexVal X = std::exp(ComplexVal(0.0, -kTwoPi) * ctx.alpha * w);
  ComplexVal d = 1.0 - X;
  if (std::abs(d) < 1e-300) fail(ErrorCode::SingularInput, "tau pole");
  return ComplexVal(0.0, -kTwoPi) * ctx.alpha * ctx.sigma * X / (d * d);
}

// Inverse branch normalized so Re(alpha w) lies in (0, 1): the fundamental
// component separating the two fixed points.
inline ComplexVal tau_inv(const LiftContext& ctx, ComplexVal z) {
  require_finite(z, "tau_inv input");
  if (std::abs(z) == 0.0 || std::abs(z - ctx.sigma) == 0.0)
    fail(ErrorCode::SingularInput, "tau_inv at a fixed point");
  ComplexVal ratio = z / (z - ctx.sigma);
  double t = std::arg(ratio) / kTwoPi;  // = Re(alpha w) before normalization
  if (std::abs(t) < 1e-14)
    fail(ErrorCode::BranchAmbiguity, "point on the covering cut");
  ComplexVal w = std::log(ratio) / (ComplexVal(0.0, kTwoPi) * ctx.alpha);
  if (t < 0.0) w += 1.0 / ctx.alpha;
  return w;
}

// F(w) = w + (1/2pi i alpha) Log g(tau(w)) with g = 1 - sigma u/(1 + z u);
// principal branch, Im Log in (-pi, pi).
namespace detail {
inline ComplexVal lift_g(const LiftContext& ctx, ComplexVal z) {
  ComplexVal uv = ctx.u.val(z);
  ComplexVal den = 1.0 + z * uv;
  if (std::abs(den) < 1e-300) fail(ErrorCode::SingularInput, "lift pole");
  ComplexVal g = 1.0 - ctx.sigma * uv / den;
  if (std::abs(g) < 1e-300) fail(ErrorCode::SingularInput, "lift log singularity");
  if (g.real() <= 0.0 && std::abs(g.imag()) <= 1e-12 * (1.0 + std::abs(g.real())))
    fail(ErrorCode::BranchCutHit, "lift log argument on the negative axis");
  return g;
}

struct PsiTerm {
  ComplexVal psi;   // F(w) - (w + drift)
  ComplexVal dpsi;  // dpsi/dw = F'(w) - 1
};

// Step deviation evaluated from A = alpha*w directly.  Long orbits only grow
// A linearly, so the exp/log round-off stays relative to the deviation itself
// instead of scaling with |w|.
inline PsiTerm lift_psi(const LiftContext& ctx, ComplexVal A) {
  ComplexVal X = std::exp(ComplexVal(0.0, -kTwoPi) * A);
  ComplexVal dX = 1.0 - X;
  if (std::abs(dX) < 1e-300) fail(ErrorCode::SingularInput, "tau pole");
  ComplexVal z = ctx.sigma / dX;
  ComplexVal uv = ctx.u.val(z), up = ctx.u.deriv(z);
  ComplexVal den = 1.0 + z * uv;
  if (std::abs(den) < 1e-300) fail(ErrorCode::SingularInput, "lift pole");
  ComplexVal g = 1.0 - ctx.sigma * uv / den;
  if (std::abs(g) < 1e-300) fail(ErrorCode::SingularInput, "lift log singularity");
  if (g.real() <= 0.0 && std::abs(g.imag()) <= 1e-12 * (1.0 + std::abs(g.real())))
    fail(ErrorCode::BranchCutHit, "lift log argument on the negative axis");
  ComplexVal itpa = ComplexVal(0.0, kTwoPi) * ctx.alpha;
  ComplexVal gp = ctx.sigma * (uv * uv - up) / (den * den);
  ComplexVal taup = -itpa * ctx.sigma * X / (dX * dX);
  return {std::log(g) / itpa - static_cast<double>(ctx.drift),
          (gp / g) * taup / itpa};
}
}  // namespace detail

inline ComplexVal lift_F(const LiftContext& ctx, ComplexVal w) {
  if (!in_theta(ctx, w))
    fail(ErrorCode::OutsideTheta, "w inside a Theta exclusion ball");
  ComplexVal g = detail::lift_g(ctx, tau(ctx, w));
  return w + std::log(g) / (ComplexVal(0.0, kTwoPi) * ctx.alpha);
}

inline ComplexVal lift_F_prime(const LiftContext& ctx, ComplexVal w) {
  ComplexVal z = tau(ctx, w);
  ComplexVal uv = ctx.u.val(z), up = ctx.u.deriv(z);
  ComplexVal den = 1.0 + z * uv;
  ComplexVal g = detail::lift_g(ctx, z);
  ComplexVal gp = ctx.sigma * (uv * uv - up) / (den * den);
  return 1.0 + (gp / g) * tau_prime(ctx, w) / (ComplexVal(0.0, kTwoPi) * ctx.alpha);
}

// Newton solve F(x) = w from a translation seed.
inline ComplexVal lift_F_inverse(const LiftContext& ctx, ComplexVal w) {
  ComplexVal x = w - static_cast<double>(ctx.drift);
  for (int it = 0; it < 30; ++it) {
    ComplexVal g = lift_F(ctx, x) - w;
    if (std::abs(g) < 1e-13 * (1.0 + std::abs(w))) return x;
    ComplexVal d = lift_F_prime(ctx, x);
    if (std::abs(d) < 1e-14)
      fail(ErrorCode::NewtonDivergence, "flat derivative in inverse lift");
    x -= g / d;
  }
  fail(ErrorCode::NewtonDivergence, "inverse lift Newton stalled");
}

struct AbelResult {
  ComplexVal value{0.0, 0.0};
  ComplexVal deriv{1.0, 0.0};
  long iters = 0;
  double last_increment = 0.0;
  double tail_ratio = 0.0;  // measured geometric ratio of the increments
};

// L(w) = lim (F^n(w) - n d) along the direction in which the orbit escapes
// to the anchored end (forward iff Im alpha > 0); satisfies L(F(w)) = L(w)+d
// and L(w + 1/alpha) = L(w) + 1/alpha.  The orbit is tracked in alpha*w
// coordinates with the per-step deviations summed separately, and the
// geometric tail (complex ratio e^{2 pi i alpha dir}) is closed off in each
// candidate value; iteration stops once consecutive candidates settle below
// tol relative to |1 - ratio^2|, which certifies the remaining error.
//
// Inverse branches of F nearly merge where a low orbit scallops past a
// lifted critical point, and there a Newton basin can leak across the merge
// and silently reroute the orbit toward the opposite end.  Inverse steps
// therefore use the map's exact preimages whenever the family provides
// them: each preimage is lifted to the deck copy nearest the translation
// seed and the candidate closest to that seed continues the orbit; Newton
// on the lift remains the fallback for sampled maps.  An orbit that
// regresses half a lattice unit from its best height is drifting to the
// opposite end and fails fast instead of burning the whole iteration
// budget.
inline AbelResult abel_linearizer_full(const LiftContext& ctx, ComplexVal w,
                                       double tol, const RunConfig& cfg = {}) {
  if (ctx.alpha.imag() == 0.0)
    fail(ErrorCode::PreconditionViolated,
         "Abel limit needs a rotation with nonzero imaginary part");
  if (!(tol > 0.0)) fail(ErrorCode::OutOfRange, "tolerance must be positive");
  const bool forward = ctx.alpha.imag() > 0.0;
  const double dir = forward ? 1.0 : -1.0;
  const double d = static_cast<double>(ctx.drift);
  const double guard = ctx.inner_radius * std::abs(ctx.alpha);
  const ComplexVal rho = std::exp(ComplexVal(0.0, kTwoPi) * dir * ctx.alpha);
  const double ratio_model = std::abs(rho);
  const ComplexVal tail_gain = rho / (1.0 - rho);
  const double settle_stop = 0.5 * tol * std::abs(1.0 - rho * rho);

  auto clearance = [](ComplexVal A) {
    return std::abs(A - std::round(A.real()));
  };
  // Progress toward the anchored end: up for the 0-end, down for sigma.
  const double s_end = ctx.end == End::Zero ? 1.0 : -1.0;
  auto height = [s_end](ComplexVal A) { return s_end * A.imag(); };

  ComplexVal A = ctx.alpha * w;
  if (clearance(A) <= guard)
    fail(ErrorCode::OutsideTheta, "Abel start inside a Theta exclusion ball");
  AbelResult out;
  double best = height(A);
  ComplexVal S(0.0, 0.0), prev_L(0.0, 0.0);
  double prev_inc = 0.0, ratio_acc = 0.0;
  int ratio_n = 0, calm = 0;
  for (long n = 1; n <= cfg.iter_cap; ++n) {
    ComplexVal psi_n;
    if (forward) {
      detail::PsiTerm t = detail::lift_psi(ctx, A);
      out.deriv *= 1.0 + t.dpsi;
      psi_n = t.psi;
      A += ctx.alpha * (d + t.psi);
    } else {
      const ComplexVal seed = A - ctx.alpha * d;
      bool stepped = false;
      if (ctx.preimages) {
        // Exact inverse step: lift every z-plane preimage to the deck copy
        // nearest the seed and continue along the closest candidate.
        ComplexVal z_cur =
            ctx.sigma / (1.0 - std::exp(ComplexVal(0.0, -kTwoPi) * A));
        ComplexVal pick;
        double pick_dist = std::numeric_limits<double>::infinity();
        for (ComplexVal x : ctx.preimages(z_cur)) {
          ComplexVal X = 1.0 - ctx.sigma / x;
          if (!is_finite(X) || std::abs(X) < 1e-300) continue;
          ComplexVal Ax = std::log(X) / ComplexVal(0.0, -kTwoPi);
          Ax += std::round(seed.real() - Ax.real());
          double dist = std::abs(Ax - seed);
          if (dist < pick_dist) {
            pick = Ax;
            pick_dist = dist;
          }
        }
        if (pick_dist < std::numeric_limits<double>::infinity()) {
          detail::PsiTerm t = detail::lift_psi(ctx, pick);
          ComplexVal r = pick - A + ctx.alpha * (d + t.psi);
          double deck = std::round(r.real());  // psi is deck-periodic
          pick -= deck;
          r -= deck;
          if (std::abs(r) <= 1e-8 * (1.0 + std::abs(A))) {
            out.deriv /= 1.0 + t.dpsi;
            psi_n = t.psi;
            A = pick;
            stepped = true;
          }
        }
      }
      if (!stepped) {
        // Newton on the lift equation x + d + psi(x) = w_n, seeded with the
        // pure translation.
        ComplexVal Ax = seed;
        detail::PsiTerm t = detail::lift_psi(ctx, Ax);
        bool hit = false;
        for (int it = 0; it < 40; ++it) {
          ComplexVal r = Ax - A + ctx.alpha * (d + t.psi);
          if (std::abs(r) <= 1e-13 * (0.1 + std::abs(A))) {
            hit = true;
            break;
          }
          ComplexVal Fp = 1.0 + t.dpsi;
          if (std::abs(Fp) < 1e-14)
            fail(ErrorCode::NewtonDivergence, "flat derivative in inverse lift");
          Ax -= r / Fp;
          t = detail::lift_psi(ctx, Ax);
        }
        if (!hit)
          fail(ErrorCode::NewtonDivergence, "inverse lift Newton stalled");
        out.deriv /= 1.0 + t.dpsi;
        psi_n = t.psi;
        A = Ax;
      }
    }
    if (clearance(A) <= guard)
      fail(ErrorCode::OrbitLeftDomain, "Abel orbit entered a Theta ball");
    best = std::max(best, height(A));
    if (height(A) < best - 0.5)
      fail(ErrorCode::OrbitLeftDomain,
           "orbit is not drifting to the anchored end");
    S += psi_n;
    double inc = std::abs(psi_n);
    if (n > 1 && prev_inc > 0.0) {
      ratio_acc += inc / prev_inc;
      ++ratio_n;
    }
    prev_inc = inc;
    out.iters = n;
    out.last_increment = inc;
    ComplexVal L = w + dir * (S + psi_n * tail_gain);
    out.value = L;
    calm = (n >= 4 && std::abs(L - prev_L) <= settle_stop) ? calm + 1 : 0;
    if (calm >= 2 || inc * (1.0 + std::abs(tail_gain)) <= 0.5 * tol) {
      out.tail_ratio = ratio_n ? ratio_acc / ratio_n : ratio_model;
      return out;
    }
    prev_L = L;
  }
  fail(ErrorCode::NonConvergence, "Abel limit did not converge within the cap");
}

inline ComplexVal abel_linearizer(const LiftContext& ctx, ComplexVal w,
                                  double tol, const RunConfig& cfg = {}) {
  return abel_linearizer_full(ctx, w, tol, cfg).value;
}

struct ResidualStats {
  double max = 0.0;
  double mean = 0.0;
  int count = 0;
};

// One perturbed-rotation coordinate used by the real-alpha extrapolation.
struct EpsLeg {
  LiftContext ctx;
  ComplexVal cpw{0.0, 0.0};
  ComplexVal base{0.0, 0.0};
};

struct FatouApprox {
  FatouMode mode = FatouMode::Refined;
  bool richardson = false;  // real rotation: extrapolated from +/- eps legs
  double eps_imag = 0.0;
  double tol = 1e-9;
  RunConfig cfg;
  std::function<ComplexVal(ComplexVal)> f;  // target map
  ComplexVal map_alpha{0.0, 0.0};  // rotation of the target at the chosen end
  ComplexVal sigma{0.0, 0.0};
  ComplexVal cp{0.0, 0.0};  // normalization anchor in the z-plane
  LiftContext ctx_full;     // working context (alpha + i eps when richardson)
  ComplexVal base_full{0.0, 0.0}, cpw_full{0.0, 0.0};
  std::optional<EpsLeg> minus_full, plus_half, minus_half;  // richardson legs
  ResidualStats residual_stats;
};

namespace detail {

inline ComplexVal context_base(const LiftContext& ctx, ComplexVal anchor_w,
                               FatouMode mode, double tol,
                               const RunConfig& cfg) {
  return mode == FatouMode::Refined ? abel_linearizer(ctx, anchor_w, tol, cfg)
                                    : anchor_w;
}

inline ComplexVal phi_one(const LiftContext& ctx, ComplexVal base,
                          FatouMode mode, double tol, const RunConfig& cfg,
                          ComplexVal z) {
  ComplexVal w = tau_inv(ctx, z);
  ComplexVal L = mode == FatouMode::Refined
                     ? abel_linearizer(ctx, w, tol, cfg)
                     : w;
  return static_cast<double>(ctx.drift) * (L - base);
}

}  // namespace detail

// Build the coordinate for one of the model families.  For real alpha the
// rotation is perturbed into both half-planes: the average of the alpha +/-
// i eps coordinates is even in eps, and the eps, eps/2 levels Richardson the
// eps^2 term away.  Each leg keeps its natural escape direction, so no orbit
// is ever run against the pole belt.
inline FatouApprox make_fatou(const maps::MapSpec& spec, FatouMode mode,
                              End end = End::Zero, const RunConfig& cfg = {}) {
  FatouApprox fa;
  fa.mode = mode;
  fa.cfg = cfg;
  fa.tol = (mode == FatouMode::Refined) ? cfg.abel_tol_refined : cfg.abel_tol_model;
  fa.f = [spec](ComplexVal z) { return maps::map_eval(spec, z); };
  fa.cp = maps::critical_point(spec);

  maps::FixedPointData fp = maps::fixed_point_data(spec, cfg);
  fa.sigma = fp.sigma;
  fa.map_alpha = (end == End::Zero) ? maps::rotation_of(spec) : fp.beta;

  auto build = [&](const maps::MapSpec& s) -> EpsLeg {
    LiftContext ctx = make_lift_context(s, end, cfg.pole_safety, cfg);
    // The zero end is normalized at the critical point of the map under
    // study -- every perturbed leg anchors at that same z, so the combined
    // coordinate vanishes there exactly.  The sigma end anchors at a strip
    // point on its own side of the pole belt (the lifted critical orbit can
    // graze the Theta walls there, and everything downstream is conjugation-
    // invariant anyway).
    ComplexVal cpw = end == End::Zero ? tau_inv(ctx, fa.cp)
                                      : ComplexVal(0.45, -0.1) / ctx.alpha;
    ComplexVal base = detail::context_base(ctx, cpw, mode, fa.tol, cfg);
    return {std::move(ctx), cpw, base};
  };

  if (fa.map_alpha.imag() != 0.0 || mode == FatouMode::Model) {
    // Model mode never iterates, so a real rotation is fine there too.
    EpsLeg leg = build(spec);
    fa.ctx_full = std::move(leg.ctx);
    fa.cpw_full = leg.cpw;
    fa.base_full = leg.base;
    if (end == End::Sigma) fa.cp = tau(fa.ctx_full, fa.cpw_full);
    return fa;
  }

  if (end == End::Sigma)
    fail(ErrorCode::PreconditionViolated,
         "sigma-end rotation on the unit circle: no drifting orbit");
  double a = fa.map_alpha.real();
  if (a == 0.0) fail(ErrorCode::ZeroInput, "zero rotation");
  fa.richardson = true;
  fa.eps_imag = std::min(cfg.eps_imag, std::abs(a) / 10.0);
  auto at = [&](double e) {
    return build(maps::with_rotation(spec, ComplexVal(a, e)));
  };
  EpsLeg plus = at(fa.eps_imag);
  fa.ctx_full = std::move(plus.ctx);
  fa.cpw_full = plus.cpw;
  fa.base_full = plus.base;
  fa.minus_full = at(-fa.eps_imag);
  fa.plus_half = at(fa.eps_imag / 2.0);
  fa.minus_half = at(-fa.eps_imag / 2.0);
  return fa;
}

// Sampled-map constructor for tower levels: normalization anchors at a strip
// point instead of a critical point (renormalization data is conjugation-
// invariant, so the base choice is immaterial there).
inline FatouApprox make_fatou_generic(std::function<ComplexVal(ComplexVal)> f,
                                      ComplexVal sigma, ComplexVal lambda0,
                                      ComplexVal rho, End end, FatouMode mode,
                                      const RunConfig& cfg = {}) {
  if (rho.imag() == 0.0)
    fail(ErrorCode::PreconditionViolated,
         "sampled-map coordinate needs Im(rotation) != 0");
  FatouApprox fa;
  fa.mode = mode;
  fa.cfg = cfg;
  fa.tol = (mode == FatouMode::Refined) ? cfg.abel_tol_refined : cfg.abel_tol_model;
  fa.f = f;
  fa.sigma = sigma;
  fa.map_alpha = rho;
  double inner = std::min(cfg.pole_safety, 0.25 / std::abs(rho));
  fa.ctx_full = make_lift_context_generic(
      f, sigma, rho, end, inner, make_u_field_sampled(f, sigma, lambda0));
  // Anchor mid-strip on the anchored end's side of the pole belt.
  fa.cpw_full = ComplexVal(0.45, end == End::Zero ? 0.1 : -0.1) / rho;
  fa.cp = tau(fa.ctx_full, fa.cpw_full);
  fa.base_full = detail::context_base(fa.ctx_full, fa.cpw_full, mode, fa.tol, cfg);
  return fa;
}

namespace detail {

// Even-in-eps combination of one +/- leg pair.
inline ComplexVal phi_level(const FatouApprox& fa, const LiftContext& plus_ctx,
                            ComplexVal plus_base, const EpsLeg& minus,
                            ComplexVal z) {
  ComplexVal a = phi_one(plus_ctx, plus_base, fa.mode, fa.tol, fa.cfg, z);
  ComplexVal b = phi_one(minus.ctx, minus.base, fa.mode, fa.tol, fa.cfg, z);
  return 0.5 * (a + b);
}

}  // namespace detail

inline ComplexVal fatou_coord(const FatouApprox& fa, ComplexVal z) {
  if (!fa.richardson)
    return detail::phi_one(fa.ctx_full, fa.base_full, fa.mode, fa.tol, fa.cfg, z);
  ComplexVal g_full =
      detail::phi_level(fa, fa.ctx_full, fa.base_full, *fa.minus_full, z);
  ComplexVal g_half = detail::phi_level(fa, fa.plus_half->ctx,
                                        fa.plus_half->base, *fa.minus_half, z);
  return (4.0 * g_half - g_full) / 3.0;
}

// The two eps-level values behind a Richardson evaluation (diagnostics).
inline std::pair<ComplexVal, ComplexVal> fatou_eps_values(const FatouApprox& fa,
                                                          ComplexVal z) {
  if (!fa.richardson)
    fail(ErrorCode::ModeMismatch, "not a real-rotation coordinate");
  return {detail::phi_level(fa, fa.ctx_full, fa.base_full, *fa.minus_full, z),
          detail::phi_level(fa, fa.plus_half->ctx, fa.plus_half->base,
                            *fa.minus_half, z)};
}

namespace detail {

// Solve L(w) = target in the lift plane (well-conditioned: L ~ w + const).
inline ComplexVal invert_linearizer(const LiftContext& ctx, ComplexVal target,
                                    FatouMode mode, double tol,
                                    const RunConfig& cfg, ComplexVal seed) {
  if (mode == FatouMode::Model) return target;
  ComplexVal w = seed;
  for (int it = 0; it < 40; ++it) {
    AbelResult r = abel_linearizer_full(ctx, w, tol, cfg);
    ComplexVal g = r.value - target;
    if (std::abs(g) < 1e-10 * (1.0 + std::abs(target))) return w;
    if (std::abs(r.deriv) < 1e-10)
      fail(ErrorCode::NewtonDivergence, "flat linearizer derivative");
    ComplexVal step = g / r.deriv;
    // L is close to linear only away from the critical lift; keep each move
    // under a quarter lattice cell so an overshoot cannot cross the belt.
    double span = std::abs(ctx.alpha * step);
    if (span > 0.25) step *= 0.25 / span;
    w -= step;
  }
  fail(ErrorCode::NewtonDivergence, "linearizer inversion stalled");
}

}  // namespace detail

// Phi^{-1}: w-plane Newton for the working context; Richardson adds a short
// z-plane polish against the extrapolated coordinate itself.
inline ComplexVal fatou_inverse(const FatouApprox& fa, ComplexVal xi,
                                std::optional<ComplexVal> w_hint = {}) {
  auto invert_ctx = [&](const LiftContext& ctx, ComplexVal base, ComplexVal cpw) {
    ComplexVal target = base + static_cast<double>(ctx.drift) * xi;
    ComplexVal seed =
        w_hint ? *w_hint : cpw + static_cast<double>(ctx.drift) * xi;
    return tau(ctx, detail::invert_linearizer(ctx, target, fa.mode, fa.tol,
                                              fa.cfg, seed));
  };
  if (!fa.richardson) return invert_ctx(fa.ctx_full, fa.base_full, fa.cpw_full);
  // Seed from the forward-iterating leg (a stray Newton iterate there only
  // ever launches a climbing orbit), then polish against the extrapolated
  // coordinate.
  ComplexVal z = invert_ctx(fa.plus_half->ctx, fa.plus_half->base,
                            fa.plus_half->cpw);
  for (int it = 0; it < 20; ++it) {
    ComplexVal g = fatou_coord(fa, z) - xi;
    if (std::abs(g) < 1e-9 * (1.0 + std::abs(xi))) return z;
    double h = 1e-7 * (1.0 + std::abs(z));
    ComplexVal d = (fatou_coord(fa, z + h) - fatou_coord(fa, z)) / h;
    if (std::abs(d) < 1e-12)
      fail(ErrorCode::NewtonDivergence, "flat coordinate derivative");
    z -= g / d;
  }
  fail(ErrorCode::NewtonDivergence, "coordinate inversion stalled");
}

// Petal sampling nodes: a rectangle in alpha*w coordinates on the anchored
// end's side of the pole lattice, kept clear of the Theta balls, of the
// anchor height, and of the strip walls so both z and f(z) evaluate cold
// without wrapping.
inline std::vector<ComplexVal> petal_grid_nodes(const FatouApprox& fa, int n) {
  if (n < 2) fail(ErrorCode::OutOfRange, "grid needs at least 2 points per side");
  const LiftContext& ctx = fa.richardson ? fa.plus_half->ctx : fa.ctx_full;
  ComplexVal cpw = fa.richardson ? fa.plus_half->cpw : fa.cpw_full;
  double re_a = std::abs(ctx.alpha.real());
  double a_lo = 0.15, a_hi = std::min(0.66, 0.93 - re_a);
  if (a_hi <= a_lo)
    fail(ErrorCode::OutOfRange, "rotation too large for the validation strip");
  double s = ctx.end == End::Zero ? 1.0 : -1.0;
  double rb = ctx.inner_radius * std::abs(ctx.alpha);
  double b0 = (ctx.alpha * cpw).imag();
  double d_lo = std::max(s * b0, 2.5 * rb), d_hi = 0.3;
  if (d_lo >= d_hi)
    fail(ErrorCode::OutOfRange, "no belt-free depth band for this rotation");
  // The box is the part of the strip where the translation model is honest:
  // raise the floor until the per-step deviation along the bottom edge fits
  // the model budget.  This also keeps refined-mode orbits cheap.
  auto edge_dev = [&](double dd) {
    double worst = 0.0;
    for (int i = 0; i < 9; ++i) {
      double a = a_lo + (a_hi - a_lo) * i / 8.0;
      worst = std::max(
          worst, std::abs(detail::lift_psi(ctx, ComplexVal(a, s * dd)).psi));
    }
    return worst;
  };
  while (d_lo < d_hi - 0.05 && edge_dev(d_lo) > 0.8 * fa.cfg.fatou_residual_model)
    d_lo *= 1.15;
  d_lo = std::min(d_lo, d_hi - 0.05);
  std::vector<ComplexVal> nodes;
  nodes.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double a = a_lo + (a_hi - a_lo) * i / (n - 1);
      double d = d_lo + (d_hi - d_lo) * j / (n - 1);
      nodes.push_back(tau(ctx, ComplexVal(a, s * d) / ctx.alpha));
    }
  return nodes;
}

// Equivariance residual |Phi(f(z)) - Phi(z) - 1| over an n x n petal grid;
// stores the stats on the approximation.
inline ResidualStats validate_grid(FatouApprox& fa, int n) {
  ResidualStats st;
  double sum = 0.0;
  for (ComplexVal z : petal_grid_nodes(fa, n)) {
    ComplexVal r = fatou_coord(fa, fa.f(z)) - fatou_coord(fa, z) - 1.0;
    double a = std::abs(r);
    st.max = std::max(st.max, a);
    sum += a;
    ++st.count;
  }
  st.mean = st.count ? sum / st.count : 0.0;
  fa.residual_stats = st;
  return st;
}

struct PetalWidthReport {
  double width = 0.0;
  double re_inv_alpha = 0.0;
  double x_lo = 0.0, x_hi = 0.0;
  bool margin_ok = false;
  int steps = 0;
};

// March fatou_inverse along the horizontal extent of the coordinate image
// until the machinery gives out on either side; the measured extent tracks
// Re(1/alpha) up to the margin.  One deck cell is long along the 1/alpha
// direction, so the march follows that spine -- the constant-height line of
// the lift -- at a half-unit offset above the real axis (the axis itself
// runs along the edge of the inverse-orbit domains).
inline PetalWidthReport petal_width_probe(const FatouApprox& fa,
                                          const RunConfig& cfg = {},
                                          double step = 0.5) {
  if (fa.mode != FatouMode::Refined)
    fail(ErrorCode::ModeMismatch, "width probe needs the refined coordinate");
  PetalWidthReport rep;
  rep.re_inv_alpha = (1.0 / fa.map_alpha).real();
  if (std::abs(rep.re_inv_alpha) < 1e-12)
    fail(ErrorCode::OutOfRange, "width probe needs Re(1/alpha) != 0");
  const double shear = (1.0 / fa.map_alpha).imag() / rep.re_inv_alpha;
  int cap = static_cast<int>(4.0 * std::abs(rep.re_inv_alpha) / step) + 200;
  auto march = [&](double dir) {
    double x = 0.0, last = 0.0;
    std::optional<ComplexVal> hint;
    for (int i = 0; i < cap; ++i) {
      ComplexVal xi(x, shear * x + 0.5);
      try {
        ComplexVal z = fatou_inverse(fa, xi, hint);
        ComplexVal back = fatou_coord(fa, z);
        if (std::abs(back - xi) > 1e-6) break;
        last = x;
        if (!fa.richardson)
          hint = tau_inv(fa.ctx_full, z) +
                 dir * step * ComplexVal(1.0, shear) *
                     static_cast<double>(fa.ctx_full.drift);
      } catch (const Error&) {
        break;
      }
      x += dir * step;
      ++rep.steps;
    }
    return last;
  };
  rep.x_hi = march(+1.0);
  rep.x_lo = march(-1.0);
  rep.width = rep.x_hi - rep.x_lo;
  rep.margin_ok = std::abs(rep.width - rep.re_inv_alpha) <= cfg.petal_margin;
  return rep;
}

struct SpiralReport {
  std::vector<std::pair<double, double>> samples;  // (xi2, compensated arg)
  double limit_estimate = 0.0;
  double c_f = 0.0;
  double bound = 0.0;
  bool within_bound = false;
  double settle = 0.0;  // |last - midpoint| convergence measure
};

// Track arg Phi^{-1}(xi1 + i xi2) + 2 pi xi2 Im(alpha) with continuous
// unwrapping up to xi2_max; the drift-compensated argument settles to
// arg sigma + 2 pi xi1 Re(alpha) + c_f.  Sampling starts half a unit off the
// real axis: the axis itself runs along the edge of the perturbed legs'
// inverse-orbit domains when the rotation is real.
inline SpiralReport spiral_probe(const FatouApprox& fa, double xi1,
                                 double xi2_max, const RunConfig& cfg = {},
                                 double step = 0.5) {
  if (fa.mode != FatouMode::Refined)
    fail(ErrorCode::ModeMismatch, "spiral probe needs the refined coordinate");
  if (!(xi2_max > 1.0)) fail(ErrorCode::OutOfRange, "xi2_max must exceed 1");
  SpiralReport rep;
  double im_a = fa.map_alpha.imag(), re_a = fa.map_alpha.real();
  std::optional<ComplexVal> hint;
  double prev_arg = 0.0;
  bool first = true;
  for (double xi2 = 0.5; xi2 <= xi2_max + 1e-12; xi2 += step) {
    ComplexVal z = fatou_inverse(fa, ComplexVal(xi1, xi2), hint);
    if (!fa.richardson) {
      ComplexVal w = tau_inv(fa.ctx_full, z);
      hint = w + ComplexVal(0.0, step) * static_cast<double>(fa.ctx_full.drift);
    }
    double raw = std::arg(z);
    if (!first) {
      raw += kTwoPi * std::round((prev_arg - raw) / kTwoPi);
      if (std::abs(raw - prev_arg) > 2.6)
        fail(ErrorCode::ArgumentTrackingLost, "argument jump between samples");
    }
    first = false;
    prev_arg = raw;
    rep.samples.emplace_back(xi2, raw + kTwoPi * xi2 * im_a);
  }
  std::size_t m = rep.samples.size();
  std::size_t tail = std::max<std::size_t>(1, m / 10);
  double acc = 0.0;
  for (std::size_t i = m - tail; i < m; ++i) acc += rep.samples[i].second;
  rep.limit_estimate = acc / tail;
  rep.settle = std::abs(rep.samples[m - 1].second - rep.samples[m / 2].second);
  rep.c_f = rep.limit_estimate - std::arg(fa.sigma) - kTwoPi * xi1 * re_a;
  rep.bound = cfg.spiral_kprime * (1.0 - std::log(std::abs(fa.map_alpha)));
  rep.within_bound = std::abs(rep.c_f) <= rep.bound;
  return rep;
}

}  // namespace pararenorm::fatou
