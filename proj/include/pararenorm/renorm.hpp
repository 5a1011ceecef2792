#pragma once

// Fatou-plane sectors, the Ecalle return map via the lift identity
// value = F^k(w) - 1/rho, exp-projections, and ring-sampled top/bottom
// renormalizations with derivative and well-definedness certificates.

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "pararenorm/config.hpp"
#include "pararenorm/errors.hpp"
#include "pararenorm/fatou.hpp"
#include "pararenorm/gauss.hpp"
#include "pararenorm/numerics.hpp"

namespace pararenorm::renorm {

struct SectorSpec {
  double re_lo = 0.5;
  double re_hi = 1.5;
  double im_split = 2.0;
};

enum class RegionClass { A, B, C, Outside };

inline const char* region_name(RegionClass r) {
  switch (r) {
    case RegionClass::A: return "A";
    case RegionClass::B: return "B";
    case RegionClass::C: return "C";
    case RegionClass::Outside: return "Outside";
  }
  return "?";
}

// Rotation recursion shared by both ends: the sawed reciprocal.
inline ComplexVal renorm_rotation_top(ComplexVal a) { return gauss::gauss_step(a); }
inline ComplexVal renorm_rotation_bottom(ComplexVal b) { return gauss::gauss_step(b); }
inline Rational renorm_rotation_top(const Rational& a) { return gauss::gauss_step(a); }
inline Rational renorm_rotation_bottom(const Rational& b) { return gauss::gauss_step(b); }

namespace detail {

inline void require_plain_refined(const fatou::FatouApprox& fa, const char* who) {
  if (fa.mode != fatou::FatouMode::Refined)
    fail(ErrorCode::ModeMismatch, std::string(who) + " needs the refined coordinate");
  if (fa.richardson)
    fail(ErrorCode::ModeMismatch,
         std::string(who) + " needs Im(rotation) != 0 (sample off the axis)");
}

inline ComplexVal phi_of_w(const fatou::FatouApprox& fa, ComplexVal w) {
  return static_cast<double>(fa.ctx_full.drift) *
         (fatou::abel_linearizer(fa.ctx_full, w, fa.tol, fa.cfg) - fa.base_full);
}

inline ComplexVal w_of_phi(const fatou::FatouApprox& fa, ComplexVal xi) {
  double d = static_cast<double>(fa.ctx_full.drift);
  return fatou::detail::invert_linearizer(fa.ctx_full, fa.base_full + d * xi,
                                          fa.mode, fa.tol, fa.cfg,
                                          fa.cpw_full + d * xi);
}

}  // namespace detail

struct EcalleValue {
  ComplexVal value{0.0, 0.0};
  int k = 0;
};

// Return count is a per-map constant: the smallest k >= 1 placing the
// translated sector anchor Re = 1/2 back into the base strip Re in (0, 2).
inline int ecalle_return_count(const fatou::FatouApprox& fa,
                               const RunConfig& cfg = {},
                               const SectorSpec& sector = {}) {
  double shift = (static_cast<double>(fa.ctx_full.drift) / fa.ctx_full.alpha).real();
  int k = std::max(1, static_cast<int>(std::floor(shift - sector.re_lo)) + 1);
  if (k > cfg.ecalle_k_cap)
    fail(ErrorCode::IterationCapExceeded, "Ecalle return count above cap");
  return k;
}

inline EcalleValue ecale_lift(const fatou::FatouApprox& fa, ComplexVal w,
                              const RunConfig& cfg = {},
                              const SectorSpec& sector = {}) {
  detail::require_plain_refined(fa, "ecale_lift");
  const fatou::LiftContext& ctx = fa.ctx_full;
  ComplexVal rho_inv = 1.0 / ctx.alpha;
  int k = ecalle_return_count(fa, cfg, sector);
  // The input must sit over the sector (one deck translation of slack keeps
  // the map's translation equivariance checkable).
  double x = detail::phi_of_w(fa, w).real();
  if (!(x > sector.re_lo - 1.0 && x < sector.re_hi + 1.0))
    fail(ErrorCode::OrbitLeftDomain,
         "strip position outside the lifted sector");
  ComplexVal v = w;
  for (int j = 0; j < k; ++j) {
    try {
      v = fatou::lift_F(ctx, v);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::OutsideTheta)
        fail(ErrorCode::OrbitLeftDomain, "Ecalle orbit entered a Theta ball");
      throw;
    }
  }
  return {v - rho_inv, k};
}

// exp-projections; the sign of the exponent matches the end's drift.
inline ComplexVal ex_project(const fatou::FatouApprox& fa, ComplexVal w) {
  double d = static_cast<double>(fa.ctx_full.drift);
  return (-4.0 / 27.0) * std::exp(ComplexVal(0.0, d * kTwoPi) * w);
}

inline ComplexVal ex_unproject(const fatou::FatouApprox& fa, ComplexVal z) {
  if (std::abs(z) == 0.0) fail(ErrorCode::ZeroInput, "projection is never 0");
  double d = static_cast<double>(fa.ctx_full.drift);
  ComplexVal v = std::log(z * (-27.0 / 4.0)) / (ComplexVal(0.0, d * kTwoPi));
  v += std::ceil(0.5 - v.real());  // representative with Re in (1/2, 3/2]
  return v;
}

// One projected-plane evaluation of the renormalized map.
inline ComplexVal renorm_eval(const fatou::FatouApprox& fa, ComplexVal z,
                              const RunConfig& cfg = {}) {
  ComplexVal xi = ex_unproject(fa, z);
  ComplexVal w = detail::w_of_phi(fa, xi);
  EcalleValue ev = ecale_lift(fa, w, cfg);
  return ex_project(fa, detail::phi_of_w(fa, ev.value));
}

struct RenormSample {
  std::vector<std::pair<ComplexVal, ComplexVal>> grid;  // (z, R(z))
  ComplexVal derivative_at_0{0.0, 0.0};
  ComplexVal c2{0.0, 0.0};  // quadratic coefficient of the ring fit
  ComplexVal target{0.0, 0.0};
  double rel_error = 0.0;
  bool deriv_ok = false;
  int k_iterates = 0;
  std::map<int, int> k_histogram;
  fatou::ResidualStats residuals;  // relative fit residuals
  double scale = 1.0;              // ring shrink factor 1/max(1, |target|)
  double well_def_residual = 0.0;
};

// Ring-sample R = ex o E o ex^{-1}.  The nominal ring 1e-4..1e-2 is scaled
// by 1/|target| when the asymptotic multiplier exceeds 1, keeping the
// samples inside the linearization scale of R.
inline RenormSample renorm_sample(const fatou::FatouApprox& fa, fatou::End end,
                                  const RunConfig& cfg = {}) {
  detail::require_plain_refined(fa, "renorm_sample");
  if (fa.ctx_full.end != end)
    fail(ErrorCode::ModeMismatch, "coordinate was built for the other end");
  RenormSample out;
  ComplexVal rho = fa.ctx_full.alpha;
  out.target = std::exp(ComplexVal(0.0, -kTwoPi) / rho);
  out.scale = std::min(1.0, 1.0 / std::abs(out.target));

  int nr = std::max(2, cfg.ring_radii), na = std::max(4, cfg.ring_angles);
  std::vector<ComplexVal> zs, ys;
  double r_lo = 1e-4 * out.scale, r_hi = 1e-2 * out.scale;
  for (int i = 0; i < nr; ++i) {
    double r = r_lo * std::pow(r_hi / r_lo, double(i) / (nr - 1));
    for (int j = 0; j < na; ++j) {
      ComplexVal z = r * cis(kTwoPi * (j + 0.3) / na);
      ComplexVal xi = ex_unproject(fa, z);
      ComplexVal w = detail::w_of_phi(fa, xi);
      EcalleValue ev = ecale_lift(fa, w, cfg);
      out.k_iterates = std::max(out.k_iterates, ev.k);
      ++out.k_histogram[ev.k];
      ComplexVal R = ex_project(fa, detail::phi_of_w(fa, ev.value));
      out.grid.emplace_back(z, R);
      zs.push_back(z);
      ys.push_back(R / z);
    }
  }

  // Least squares y = lambda + c z.
  std::size_t n = zs.size();
  ComplexVal sz{0, 0}, szz{0, 0}, sy{0, 0}, szy{0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    sz += zs[i];
    szz += std::conj(zs[i]) * zs[i];
    sy += ys[i];
    szy += std::conj(zs[i]) * ys[i];
  }
  ComplexVal det = double(n) * szz - std::conj(sz) * sz;
  if (std::abs(det) == 0.0) fail(ErrorCode::SingularInput, "degenerate ring");
  out.derivative_at_0 = (szz * sy - sz * szy) / det;
  out.c2 = (double(n) * szy - std::conj(sz) * sy) / det;
  out.rel_error = std::abs(out.derivative_at_0 - out.target) / std::abs(out.target);
  out.deriv_ok = out.rel_error <= cfg.renorm_deriv_tol;

  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = std::abs(ys[i] - out.derivative_at_0 - out.c2 * zs[i]) /
               std::abs(out.derivative_at_0);
    out.residuals.max = std::max(out.residuals.max, r);
    acc += r;
    ++out.residuals.count;
  }
  out.residuals.mean = acc / double(n);

  // Well-definedness: the +1-translated preimage must project to the same
  // image point.
  std::size_t pairs = std::min<std::size_t>(20, n);
  for (std::size_t i = 0; i < pairs; ++i) {
    std::size_t idx = i * n / pairs;
    ComplexVal xi = ex_unproject(fa, zs[idx]) + 1.0;
    ComplexVal w = detail::w_of_phi(fa, xi);
    EcalleValue ev = ecale_lift(fa, w, cfg);
    ComplexVal R2 = ex_project(fa, detail::phi_of_w(fa, ev.value));
    double rel = std::abs(R2 - out.grid[idx].second) /
                 std::max(std::abs(out.grid[idx].second), 1e-300);
    out.well_def_residual = std::max(out.well_def_residual, rel);
  }
  if (out.well_def_residual > cfg.projection_tol)
    fail(ErrorCode::ProjectionInconsistency,
         "translated preimages disagree after projection");
  return out;
}

// The renormalized map as a reusable closure over the projected plane.
inline std::function<ComplexVal(ComplexVal)> make_sampled_renorm(
    const fatou::FatouApprox& fa, const RunConfig& cfg = {}) {
  auto held = std::make_shared<fatou::FatouApprox>(fa);
  RunConfig c = cfg;
  return [held, c](ComplexVal z) { return renorm_eval(*held, z, c); };
}

struct SectorRegions {
  fatou::FatouApprox fa;
  SectorSpec spec;

  std::pair<RegionClass, ComplexVal> classify(ComplexVal z) const {
    ComplexVal phi = fatou::fatou_coord(fa, z);
    if (phi.real() < spec.re_lo || phi.real() > spec.re_hi)
      return {RegionClass::Outside, phi};
    if (phi.imag() >= spec.im_split) return {RegionClass::A, phi};
    if (phi.imag() <= -spec.im_split) return {RegionClass::B, phi};
    return {RegionClass::C, phi};
  }
};

inline SectorRegions sector_regions(const fatou::FatouApprox& fa,
                                    const SectorSpec& spec = {}) {
  if (fa.mode != fatou::FatouMode::Refined)
    fail(ErrorCode::ModeMismatch, "sector regions need the refined coordinate");
  return {fa, spec};
}

}  // namespace pararenorm::renorm
