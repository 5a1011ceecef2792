#pragma once

// The model families: the normalized quadratic Q_a(z) = e^{2πia} z +
// (27/16) e^{4πia} z^2 and the Moebius-precomposed cubic model
// P(phi^{-1}(z e^{2πia})) with phi(z) = z/(1 - cz).  Fixed-point data
// (sigma, beta, holomorphic index), periodic cycles with multipliers,
// class-domain membership, and multiplier-bound disks.

#include <Eigen/Eigenvalues>
#include <array>
#include <complex>
#include <optional>
#include <variant>
#include <vector>

#include "pararenorm/config.hpp"
#include "pararenorm/errors.hpp"
#include "pararenorm/gauss.hpp"
#include "pararenorm/numerics.hpp"

namespace pararenorm::maps {

using gauss::ply_disk;

inline ComplexVal rot(ComplexVal alpha) {
  return std::exp(ComplexVal(0.0, kTwoPi) * alpha);
}

// (1/2πi) log(lambda) with Re of the result normalized into (-1/2, 1/2]
// (the principal argument supplies exactly that branch).
inline ComplexVal rotation_number(ComplexVal lambda) {
  if (std::abs(lambda) == 0.0)
    fail(ErrorCode::SingularInput, "rotation number of zero multiplier");
  return ComplexVal(std::arg(lambda) / kTwoPi, -std::log(std::abs(lambda)) / kTwoPi);
}

struct Quadratic {
  ComplexVal alpha{0.0, 0.0};
};

struct MoebiusIS {
  ComplexVal alpha{0.0, 0.0};
  ComplexVal c{0.0, 0.0};  // |c| <= 0.05 keeps the pole far from the dynamics
};

using MapSpec = std::variant<Quadratic, MoebiusIS>;

inline ComplexVal rotation_of(const MapSpec& spec) {
  return std::visit([](const auto& s) { return s.alpha; }, spec);
}

inline MapSpec with_rotation(const MapSpec& spec, ComplexVal alpha) {
  MapSpec out = spec;
  std::visit([&](auto& s) { s.alpha = alpha; }, out);
  return out;
}

inline MapSpec conjugate_spec(const MapSpec& spec) {
  return std::visit(
      [](const auto& s) -> MapSpec {
        auto t = s;
        t.alpha = std::conj(t.alpha);
        if constexpr (requires { t.c; }) t.c = std::conj(t.c);
        return t;
      },
      spec);
}

inline ComplexVal map_eval(const MapSpec& spec, ComplexVal z) {
  if (const auto* q = std::get_if<Quadratic>(&spec)) {
    ComplexVal E = rot(q->alpha);
    return E * z + (27.0 / 16.0) * E * E * z * z;
  }
  const auto& m = std::get<MoebiusIS>(spec);
  ComplexVal y = rot(m.alpha) * z;
  ComplexVal d = 1.0 + m.c * y;
  if (std::abs(d) < 1e-14) fail(ErrorCode::PoleHit, "map pole");
  return y * std::pow(1.0 + (1.0 + m.c) * y, 2) / (d * d * d);
}

inline ComplexVal map_deriv(const MapSpec& spec, ComplexVal z) {
  if (const auto* q = std::get_if<Quadratic>(&spec)) {
    ComplexVal E = rot(q->alpha);
    return E + (27.0 / 8.0) * E * E * z;
  }
  const auto& m = std::get<MoebiusIS>(spec);
  ComplexVal E = rot(m.alpha);
  ComplexVal y = E * z;
  ComplexVal d = 1.0 + m.c * y;
  if (std::abs(d) < 1e-14) fail(ErrorCode::PoleHit, "map pole");
  ComplexVal s = y / d;
  return E * (1.0 + s) * (1.0 + 3.0 * s) / (d * d);
}

// Derivative-zero critical point; both families share critical value -4/27.
inline ComplexVal critical_point(const MapSpec& spec) {
  if (const auto* q = std::get_if<Quadratic>(&spec))
    return -(8.0 / 27.0) * std::exp(ComplexVal(0.0, -kTwoPi) * q->alpha);
  const auto& m = std::get<MoebiusIS>(spec);
  return -std::exp(ComplexVal(0.0, -kTwoPi) * m.alpha) / (3.0 + m.c);
}

inline constexpr double kCriticalValueRe = -4.0 / 27.0;
inline ComplexVal critical_value() { return {kCriticalValueRe, 0.0}; }

// --- class-domain membership -------------------------------------------------

// Ellipse bound for the reference domain: value <= 1 means inside.
inline double ellipse_value(ComplexVal w) {
  double x = (w.real() + 0.18) / 1.24;
  double y = w.imag() / 1.04;
  return x * x + y * y;
}

// z lies in V = g(C^ \ E) with g(w) = -4w/(1+w)^2 iff some preimage root of
// z w^2 + (2z+4) w + z = 0 lies strictly outside the ellipse (preimages come
// in pairs w, 1/w since g(w) = g(1/w)).
inline bool contains_in_V(ComplexVal z) {
  require_finite(z, "contains_in_V input");
  if (std::abs(z) == 0.0) return true;  // preimage at infinity
  ComplexVal a = z, b = 2.0 * z + 4.0, c = z;
  ComplexVal disc = std::sqrt(b * b - 4.0 * a * c);
  // Stable quadratic: pick the larger-magniture numerator first.
  ComplexVal qq = (std::abs(b + disc) >= std::abs(b - disc)) ? -(b + disc) / 2.0
                                                             : -(b - disc) / 2.0;
  ComplexVal w1 = qq / a;
  ComplexVal w2 = c / qq;  // product of roots = c/a
  return ellipse_value(w1) > 1.0 || ellipse_value(w2) > 1.0;
}

// --- small polynomial roots (companion matrix) -------------------------------

// Roots of sum_k coef[k] z^k via the Frobenius companion matrix.  Intended
// for modest degrees; leading zeros are trimmed first.
inline std::vector<ComplexVal> companion_roots(std::vector<ComplexVal> coef) {
  while (!coef.empty() && std::abs(coef.back()) == 0.0) coef.pop_back();
  if (coef.size() < 2) return {};
  const int n = static_cast<int>(coef.size()) - 1;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) M(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) M(i, n - 1) = -coef[i] / coef[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::RootFindingFailure, "companion eigensolver failed");
  std::vector<ComplexVal> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = es.eigenvalues()(i);
  return roots;
}

// Nonzero fixed points of the map: roots of the "bracket" polynomial
// (h_a(z) - z) / z, degree 1 for the quadratic and up to 3 for MoebiusIS.
inline std::vector<ComplexVal> nonzero_fixed_points(const MapSpec& spec) {
  ComplexVal E = rot(rotation_of(spec));
  if (std::get_if<Quadratic>(&spec)) {
    return {16.0 * (1.0 - E) / (27.0 * E * E)};
  }
  const auto& m = std::get<MoebiusIS>(spec);
  ComplexVal c = m.c;
  // E(1+(1+c)Ez)^2 - (1+cEz)^3 expanded in z.
  std::vector<ComplexVal> coef(4);
  coef[0] = E - 1.0;
  coef[1] = 2.0 * (1.0 + c) * E * E - 3.0 * c * E;
  coef[2] = (1.0 + c) * (1.0 + c) * E * E * E - 3.0 * c * c * E * E;
  coef[3] = -c * c * c * E * E * E;
  auto roots = companion_roots(coef);
  // Polish on the actual map.
  for (auto& z : roots)
    for (int it = 0; it < 6; ++it) {
      ComplexVal g = map_eval(spec, z) - z, gp = map_deriv(spec, z) - 1.0;
      if (std::abs(gp) < 1e-14) break;
      z -= g / gp;
    }
  return roots;
}

// All finite preimages of z: two closed-form roots for the quadratic, three
// cubic roots (companion matrix plus a short Newton polish) for MoebiusIS.
inline std::vector<ComplexVal> preimages(const MapSpec& spec, ComplexVal z) {
  require_finite(z, "preimages input");
  ComplexVal E = rot(rotation_of(spec));
  if (std::get_if<Quadratic>(&spec)) {
    ComplexVal u0 = (27.0 / 16.0) * E * E;
    ComplexVal disc = std::sqrt(E * E + 4.0 * u0 * z);
    // Stable quadratic: big-numerator root first, mate from the product.
    ComplexVal big = (std::abs(E + disc) >= std::abs(E - disc)) ? -(E + disc)
                                                                : -(E - disc);
    ComplexVal x1 = big / (2.0 * u0);
    return {x1, -z / (u0 * x1)};
  }
  const auto& m = std::get<MoebiusIS>(spec);
  ComplexVal c = m.c;
  // y (1 + (1+c) y)^2 - z (1 + c y)^3 = 0 in y = E x, expanded by powers.
  std::vector<ComplexVal> coef{-z, 1.0 - 3.0 * z * c,
                               2.0 * (1.0 + c) - 3.0 * z * c * c,
                               (1.0 + c) * (1.0 + c) - z * c * c * c};
  std::vector<ComplexVal> out;
  for (ComplexVal y : companion_roots(coef)) {
    ComplexVal x = y / E;
    for (int it = 0; it < 4; ++it) {
      if (std::abs(1.0 + c * E * x) < 1e-8) break;  // drifted onto the pole
      ComplexVal g = map_eval(spec, x) - z;
      ComplexVal gp = map_deriv(spec, x);
      if (std::abs(gp) < 1e-14) break;
      x -= g / gp;
    }
    if (std::abs(1.0 + c * E * x) > 1e-8) out.push_back(x);
  }
  return out;
}

// --- fixed-point data ----------------------------------------------------------

struct FixedPointData {
  ComplexVal alpha{0.0, 0.0};
  ComplexVal sigma{0.0, 0.0};        // Newton-refined nonzero fixed point
  ComplexVal sigma_seed{0.0, 0.0};   // closed-form / leading-order seed
  ComplexVal lambda_zero{0.0, 0.0};  // multiplier at 0 (= e^{2πia})
  ComplexVal lambda_sigma{0.0, 0.0};
  ComplexVal beta{0.0, 0.0};  // (1/2πi) log lambda_sigma, Re in (-1/2, 1/2]
  ComplexVal index_value{0.0, 0.0};
  ComplexVal index_closed_form{0.0, 0.0};
  double index_quadrature_err = 0.0;
  double index_residual = 0.0;  // |contour - closed form|
  double newton_residual = 0.0;
  Disk contour;
};

inline ComplexVal quadratic_sigma_closed_form(ComplexVal alpha) {
  ComplexVal E = rot(alpha);
  return 16.0 * (1.0 - E) / (27.0 * E * E);
}

inline ComplexVal quadratic_beta_closed_form(ComplexVal alpha) {
  return rotation_number(2.0 - rot(alpha));
}

inline ComplexVal quadratic_alpha_from_beta(ComplexVal beta) {
  return rotation_number(2.0 - rot(beta));
}

inline FixedPointData fixed_point_data(const MapSpec& spec,
                                       const RunConfig& cfg = {}) {
  ComplexVal alpha = rotation_of(spec);
  ComplexVal E = rot(alpha);
  if (std::abs(E - 1.0) < 1e-14)
    fail(ErrorCode::SingularInput, "parabolic rotation: fixed points merge");

  FixedPointData out;
  out.alpha = alpha;
  out.lambda_zero = E;
  if (std::get_if<Quadratic>(&spec)) {
    out.sigma_seed = quadratic_sigma_closed_form(alpha);
  } else {
    ComplexVal c = std::get<MoebiusIS>(spec).c;
    out.sigma_seed = (1.0 - E) / (E * E * (2.0 - c));
  }

  // Newton on h(z) - z from the seed.
  ComplexVal z = out.sigma_seed;
  for (int it = 0; it < 60; ++it) {
    ComplexVal g = map_eval(spec, z) - z;
    ComplexVal gp = map_deriv(spec, z) - 1.0;
    if (std::abs(gp) < 1e-15)
      fail(ErrorCode::NewtonDivergence, "degenerate Newton step at sigma");
    ComplexVal step = g / gp;
    z -= step;
    if (std::abs(step) < 1e-16 * (1.0 + std::abs(z))) break;
  }
  out.sigma = z;
  out.newton_residual = std::abs(map_eval(spec, z) - z);
  if (!(out.newton_residual < 1e-9))
    fail(ErrorCode::NewtonDivergence, "sigma Newton did not converge");
  out.lambda_sigma = map_deriv(spec, out.sigma);
  out.beta = rotation_number(out.lambda_sigma);

  // Holomorphic index over a circle holding exactly the two fixed points.
  out.contour = {out.sigma / 2.0, std::max(0.1, 1.5 * std::abs(out.sigma))};
  for (ComplexVal fp : nonzero_fixed_points(spec)) {
    bool inside = std::abs(fp - out.contour.center) < out.contour.radius;
    bool is_sigma = std::abs(fp - out.sigma) <= 1e-6 * (1.0 + std::abs(fp));
    if (inside && !is_sigma)
      fail(ErrorCode::ContourEnclosureFailure,
           "extra fixed point inside index contour");
  }
  auto integrand = [&](ComplexVal w) { return 1.0 / (w - map_eval(spec, w)); };
  IntegralResult ig = contour_integral_circle(integrand, out.contour.center,
                                              out.contour.radius, cfg.contour_n);
  out.index_value = ig.value;
  out.index_quadrature_err = ig.err_est;
  out.index_closed_form =
      1.0 / (1.0 - out.lambda_zero) + 1.0 / (1.0 - out.lambda_sigma);
  out.index_residual = std::abs(out.index_value - out.index_closed_form);
  return out;
}

// --- periodic points -----------------------------------------------------------

struct CycleData {
  int period = 0;
  std::vector<ComplexVal> points;  // one full orbit, in dynamical order
  ComplexVal multiplier{0.0, 0.0};
  double residual = 0.0;  // max |f^q(z) - z| over the orbit
};

struct PeriodicPointsResult {
  int period = 0;
  std::vector<CycleData> cycles;
  bool complete = true;  // false for the heuristic fallback paths
};

namespace detail {

using LD = std::complex<long double>;
using LPoly = std::vector<LD>;  // ascending coefficients

// Coefficients of the q-fold iterate of w^2 + E w (monic, degree 2^q):
// p_{k+1} = p_k^2 + E p_k.
inline LPoly iterate_poly(LD E, int q) {
  LPoly p{LD(0), E, LD(1)};
  for (int k = 1; k < q; ++k) {
    LPoly sq(2 * p.size() - 1, LD(0));
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < p.size(); ++j) sq[i + j] += p[i] * p[j];
    for (std::size_t i = 0; i < p.size(); ++i) sq[i] += E * p[i];
    p = std::move(sq);
  }
  return p;
}

inline LD eval_poly(const LPoly& p, LD w) {
  LD acc(0);
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * w + p[i];
  return acc;
}

inline LD eval_poly_deriv(const LPoly& p, LD w) {
  LD acc(0);
  for (std::size_t i = p.size(); i-- > 1;)
    acc = acc * w + p[i] * static_cast<long double>(i);
  return acc;
}

// Divide p by (w - zeta) in place; the (discarded) remainder is ~0 when zeta
// is a root.
inline void deflate_root(LPoly& p, LD zeta) {
  LPoly q(p.size() - 1);
  LD carry = p.back();
  for (std::size_t i = p.size() - 1; i-- > 0;) {
    q[i] = carry;
    carry = p[i] + zeta * carry;
  }
  p = std::move(q);
}

// Aberth–Ehrlich simultaneous iteration for monic-ish polynomials beyond the
// comfortable companion range.
inline std::vector<ComplexVal> aberth_roots(const LPoly& poly) {
  LPoly p = poly;
  LD lead = p.back();
  for (auto& c : p) c /= lead;
  const int n = static_cast<int>(p.size()) - 1;
  long double r = 0.0L;
  for (int k = 0; k < n; ++k)
    r = std::max(r, std::pow(std::abs(p[k]), 1.0L / (n - k)));
  r = std::min(r + 1.0L, 8.0L);  // periodic points stay in a small disk
  std::vector<LD> w(n);
  for (int j = 0; j < n; ++j) {
    long double t = 2.0L * static_cast<long double>(kPi) * (j + 0.3L) / n;
    long double rr = r * (0.55L + 0.4L * ((j * 2654435761u % 997u) / 997.0L));
    w[j] = LD(rr * std::cos(t), rr * std::sin(t));
  }
  for (int sweep = 0; sweep < 400; ++sweep) {
    long double worst = 0.0L;
    for (int i = 0; i < n; ++i) {
      LD pv = eval_poly(p, w[i]);
      LD dv = eval_poly_deriv(p, w[i]);
      if (std::abs(dv) == 0.0L) continue;
      LD newton = pv / dv;
      LD sum(0);
      for (int j = 0; j < n; ++j)
        if (j != i) sum += LD(1) / (w[i] - w[j]);
      LD denom = LD(1) - newton * sum;
      LD step = (std::abs(denom) == 0.0L) ? newton : newton / denom;
      w[i] -= step;
      worst = std::max(worst, std::abs(step) / (1.0L + std::abs(w[i])));
    }
    if (worst < 1e-15L) break;
  }
  std::vector<ComplexVal> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = ComplexVal(static_cast<double>(w[i].real()),
                        static_cast<double>(w[i].imag()));
  return out;
}

// Aberth–Ehrlich on p(w) = F^q(w) - w for F(w) = w^2 + Ew, with p and p'
// evaluated by iterating the map (chain rule).  The composed polynomial's
// coefficients overflow their usable precision long before q = 5 once
// |E| > 1, while iteration keeps the relative error of each evaluation small.
inline std::vector<ComplexVal> iterate_orbit_roots(LD E, int q) {
  const int n = 1 << q;
  auto p_and_dp = [&](LD w) {
    LD v = w, d(1);
    for (int j = 0; j < q; ++j) {
      d *= LD(2) * v + E;
      v = v * v + E * v;
    }
    return std::pair{v - w, d - LD(1)};
  };
  // All periodic points satisfy |w| <= 1 + |E| (outside, |F(w)| > |w|).
  const long double R = 1.0L + std::abs(E);
  std::vector<LD> w(n);
  for (int j = 0; j < n; ++j) {
    long double t = 2.0L * static_cast<long double>(kPi) * (j + 0.3L) / n;
    long double rr = R * (0.25L + 0.65L * ((j * 2654435761u % 997u) / 997.0L));
    w[j] = LD(rr * std::cos(t), rr * std::sin(t));
  }
  for (int sweep = 0; sweep < 600; ++sweep) {
    long double worst = 0.0L;
    for (int i = 0; i < n; ++i) {
      auto [pv, dv] = p_and_dp(w[i]);
      if (std::abs(dv) == 0.0L) continue;
      LD newton = pv / dv;
      LD sum(0);
      for (int j = 0; j < n; ++j)
        if (j != i) sum += LD(1) / (w[i] - w[j]);
      LD denom = LD(1) - newton * sum;
      LD step = (std::abs(denom) == 0.0L) ? newton : newton / denom;
      w[i] -= step;
      worst = std::max(worst, std::abs(step) / (1.0L + std::abs(w[i])));
    }
    if (worst < 1e-15L) break;
  }
  std::vector<ComplexVal> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = ComplexVal(static_cast<double>(w[i].real()),
                        static_cast<double>(w[i].imag()));
  return out;
}

inline std::vector<ComplexVal> poly_roots(const LPoly& p) {
  if (p.size() <= 65) {
    std::vector<ComplexVal> coef(p.size());
    LD lead = p.back();
    for (std::size_t i = 0; i < p.size(); ++i) {
      LD c = p[i] / lead;
      coef[i] = ComplexVal(static_cast<double>(c.real()),
                           static_cast<double>(c.imag()));
    }
    return companion_roots(coef);
  }
  return aberth_roots(p);
}

inline std::vector<int> proper_maximal_divisors(int q) {
  std::vector<int> out;
  for (int p = 2; p <= q; ++p)
    if (q % p == 0) {
      bool prime = true;
      for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) prime = false;
      if (prime) out.push_back(q / p);
    }
  return out;
}

}  // namespace detail

// (f^q)'(z) evaluated through the iterated polynomial in scaled coordinates;
// an independent cross-check of the orbit-product multiplier.
inline ComplexVal iterate_derivative_via_poly(ComplexVal alpha, int q,
                                              ComplexVal z) {
  if (q < 1 || q > 12) fail(ErrorCode::PeriodTooLarge, "period outside [1,12]");
  ComplexVal E = rot(alpha);
  ComplexVal gamma = 16.0 / (27.0 * E * E);
  detail::LPoly p = detail::iterate_poly(detail::LD(E.real(), E.imag()), q);
  ComplexVal wz = z / gamma;
  detail::LD w(wz.real(), wz.imag());
  detail::LD d = detail::eval_poly_deriv(p, w);
  return {static_cast<double>(d.real()), static_cast<double>(d.imag())};
}

// All cycles of minimal period q for the quadratic member: iterate in scaled
// coordinates (w^2 + Ew, monic), deflate every lower-period point, root the
// quotient (companion matrix up to degree 64, Aberth beyond), then Newton-
// polish in map coordinates and regroup into orbits.  MoebiusIS members and
// q > 12 fall back to multi-start Newton without a completeness guarantee.
inline PeriodicPointsResult periodic_points(const MapSpec& spec, int q,
                                            bool heuristic_roots = false,
                                            const RunConfig& cfg = {}) {
  if (q < 1) fail(ErrorCode::OutOfRange, "period must be >= 1");
  if (q > 12 && !heuristic_roots)
    fail(ErrorCode::PeriodTooLarge, "period cap is 12 (use heuristic mode)");

  ComplexVal alpha = rotation_of(spec);
  ComplexVal E = rot(alpha);

  PeriodicPointsResult result;
  result.period = q;

  auto iter_val_deriv = [&](ComplexVal z, int n) {
    ComplexVal v = z, d = 1.0;
    for (int j = 0; j < n; ++j) {
      d *= map_deriv(spec, v);
      v = map_eval(spec, v);
    }
    return std::pair{v, d};
  };
  auto newton_polish = [&](ComplexVal z) -> std::optional<ComplexVal> {
    for (int it = 0; it < 40; ++it) {
      auto [v, d] = iter_val_deriv(z, q);
      ComplexVal g = v - z, gp = d - 1.0;
      if (!is_finite(g)) return std::nullopt;
      if (std::abs(g) < 1e-13 * (1.0 + std::abs(z))) return z;
      if (std::abs(gp) < 1e-12) return z;  // near-parabolic: keep as-is
      z -= g / gp;
      if (std::abs(z) > 1e3) return std::nullopt;
    }
    return z;
  };
  auto minimal_period_ok = [&](ComplexVal z) {
    ComplexVal v = z;
    for (int j = 1; j < q; ++j) {
      v = map_eval(spec, v);
      if (std::abs(v - z) < 1e-7 * (1.0 + std::abs(z))) return false;
    }
    return true;
  };

  std::vector<ComplexVal> candidates;
  if (std::get_if<Quadratic>(&spec) && !heuristic_roots) {
    if (q == 1) {
      candidates = nonzero_fixed_points(spec);
      candidates.push_back({0.0, 0.0});
    } else {
      // All 2^q fixed points of the iterate; lower periods fall out of the
      // minimal-period filter below.
      detail::LD Eld(E.real(), E.imag());
      ComplexVal gamma = 16.0 / (27.0 * E * E);
      for (ComplexVal w : detail::iterate_orbit_roots(Eld, q))
        candidates.push_back(gamma * w);
    }
    result.complete = true;
  } else {
    // Heuristic fallback: multi-start Newton on a ring/grid of seeds.
    result.complete = false;
    const int n_seeds = 160 + 40 * q;
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int s = 0; s < n_seeds; ++s) {
      double rr = 0.9 * std::sqrt((s + 0.5) / n_seeds);
      candidates.push_back(rr * cis(golden * s) - ComplexVal(0.15, 0.0));
    }
  }

  // Polish, filter minimal period, dedupe, group into orbits.
  std::vector<ComplexVal> pts;
  for (ComplexVal z0 : candidates) {
    auto z = newton_polish(z0);
    if (!z) continue;
    auto [v, d] = iter_val_deriv(*z, q);
    if (std::abs(v - *z) > 1e-8 * (1.0 + std::abs(*z))) continue;
    if (!minimal_period_ok(*z)) continue;
    bool dup = false;
    for (ComplexVal s : pts)
      if (std::abs(*z - s) < 1e-7 * (1.0 + std::abs(s))) dup = true;
    if (!dup) pts.push_back(*z);
  }
  if (result.complete && !pts.empty() &&
      static_cast<int>(pts.size()) % q != 0)
    fail(ErrorCode::RootFindingFailure,
         "periodic point count is not a multiple of the period");

  std::vector<bool> used(pts.size(), false);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (used[i]) continue;
    CycleData cyc;
    cyc.period = q;
    ComplexVal z = pts[i];
    ComplexVal mult = 1.0;
    double res = 0.0;
    for (int j = 0; j < q; ++j) {
      // Mark the matching stored point as consumed.
      for (std::size_t t = 0; t < pts.size(); ++t)
        if (!used[t] && std::abs(pts[t] - z) < 1e-6 * (1.0 + std::abs(z))) {
          used[t] = true;
          break;
        }
      cyc.points.push_back(z);
      mult *= map_deriv(spec, z);
      ComplexVal next = map_eval(spec, z);
      auto [v, d] = iter_val_deriv(z, q);
      res = std::max(res, std::abs(v - z));
      z = next;
    }
    cyc.multiplier = mult;
    cyc.residual = res;
    result.cycles.push_back(std::move(cyc));
  }
  (void)cfg;
  return result;
}

// --- multiplier-bound disk test ---------------------------------------------

struct DividingMultiplierReport {
  ComplexVal nu{0.0, 0.0};  // (1/2πi) log rho, Re in (-1/2, 1/2]
  Disk disk;
  bool member = false;
  double boundary_distance = 0.0;  // | |nu - center| - radius |
  bool ambiguous = false;          // several period-k cycles fit the disk
};

// For k = 1 the dividing point is the sigma fixed point and rho has the
// closed form 2 - e^{2πia}; for k >= 2 every period-k cycle is tried and the
// one whose rotation number sits deepest in the disk is reported.
inline DividingMultiplierReport dividing_multiplier_check(
    ComplexVal alpha, const Rational& pq, const BigInt& k,
    const RunConfig& cfg = {}) {
  if (pq > Rational(1, 2) || pq <= Rational(-1, 2))
    fail(ErrorCode::OutOfRange, "combinatorial rotation outside (-1/2, 1/2]");
  DividingMultiplierReport rep;
  rep.disk = ply_disk(pq, k);
  auto assess = [&](ComplexVal rho) {
    ComplexVal nu = rotation_number(rho);
    double dist = std::abs(nu - rep.disk.center);
    return std::pair{nu, dist};
  };
  if (k == 1) {
    auto [nu, dist] = assess(2.0 - rot(alpha));
    rep.nu = nu;
    rep.member = dist <= rep.disk.radius + 1e-12;
    rep.boundary_distance = std::abs(dist - rep.disk.radius);
    return rep;
  }
  if (k > 12) fail(ErrorCode::PeriodTooLarge, "dividing period cap is 12");
  int kk = k.convert_to<int>();
  auto cycles = periodic_points(Quadratic{alpha}, kk, false, cfg);
  if (cycles.cycles.empty())
    fail(ErrorCode::RootFindingFailure, "no cycles with the requested period");
  double best = std::numeric_limits<double>::infinity();
  int inside_count = 0;
  for (const auto& cyc : cycles.cycles) {
    auto [nu, dist] = assess(cyc.multiplier);
    if (dist <= rep.disk.radius + 1e-12) ++inside_count;
    if (dist < best) {
      best = dist;
      rep.nu = nu;
    }
  }
  rep.member = best <= rep.disk.radius + 1e-12;
  rep.boundary_distance = std::abs(best - rep.disk.radius);
  rep.ambiguous = inside_count > 1;
  return rep;
}

// --- satellite-component parameters ------------------------------------------

struct SatelliteParameter {
  ComplexVal alpha{0.0, 0.0};
  ComplexVal mu{0.0, 0.0};  // achieved cycle multiplier
  double residual = 0.0;    // |mu - target|
};

// Parameter with period-q cycle multiplier equal to `target` (|target| < 1),
// continued from the satellite root at internal angle p/q of the sigma fixed
// point.  Newton in alpha with local cycle tracking.
inline SatelliteParameter satellite_parameter(int p, int q, ComplexVal target,
                                              const RunConfig& cfg = {}) {
  if (q < 2 || q > 12) fail(ErrorCode::PeriodTooLarge, "satellite period");
  if (std::abs(target) >= 1.0)
    fail(ErrorCode::OutOfRange, "target multiplier must lie in the unit disk");
  ComplexVal root_alpha =
      rotation_number(2.0 - rot(ComplexVal(double(p) / q, 0.0)));

  // Global seed just off the root; grab the cycle whose multiplier is
  // nearest 1 (the orbit born at the bifurcation).
  ComplexVal alpha = root_alpha + ComplexVal(0.0, -2e-3);
  auto seed_cycles = periodic_points(Quadratic{alpha}, q, false, cfg);
  if (seed_cycles.cycles.empty())
    fail(ErrorCode::RootFindingFailure, "no seed cycle near satellite root");
  const CycleData* best = &seed_cycles.cycles.front();
  for (const auto& cyc : seed_cycles.cycles)
    if (std::abs(cyc.multiplier - 1.0) < std::abs(best->multiplier - 1.0))
      best = &cyc;
  std::vector<ComplexVal> orbit = best->points;

  auto refine_orbit = [&](ComplexVal a, std::vector<ComplexVal>& pts) {
    MapSpec spec = Quadratic{a};
    ComplexVal z = pts.front();
    for (int it = 0; it < 30; ++it) {
      ComplexVal v = z, d = 1.0;
      for (int j = 0; j < q; ++j) {
        d *= map_deriv(spec, v);
        v = map_eval(spec, v);
      }
      ComplexVal g = v - z, gp = d - 1.0;
      if (std::abs(gp) < 1e-13) break;
      z -= g / gp;
      if (std::abs(g) < 1e-14 * (1.0 + std::abs(z))) break;
    }
    pts.clear();
    ComplexVal mult = 1.0, v = z;
    for (int j = 0; j < q; ++j) {
      pts.push_back(v);
      mult *= map_deriv(spec, v);
      v = map_eval(spec, v);
    }
    return mult;
  };

  ComplexVal mu = refine_orbit(alpha, orbit);
  // Walk the multiplier target from near 1 out to the requested value.
  const int stages = 8;
  for (int s = 1; s <= stages; ++s) {
    ComplexVal t = (1.0 - double(s) / stages) * mu + (double(s) / stages) * target;
    for (int it = 0; it < 50; ++it) {
      ComplexVal g = mu - t;
      if (std::abs(g) < 1e-11) break;
      ComplexVal h = 1e-7 * (1.0 + std::abs(alpha));
      auto orbit2 = orbit;
      ComplexVal mu2 = refine_orbit(alpha + h, orbit2);
      ComplexVal dmu = (mu2 - mu) / h;
      if (std::abs(dmu) < 1e-12)
        fail(ErrorCode::NewtonDivergence, "flat multiplier response");
      alpha -= g / dmu;
      mu = refine_orbit(alpha, orbit);
    }
  }
  SatelliteParameter out;
  out.alpha = alpha;
  out.mu = mu;
  out.residual = std::abs(mu - target);
  if (out.residual > 1e-8)
    fail(ErrorCode::NewtonDivergence, "satellite continuation stalled");
  return out;
}

}  // namespace pararenorm::maps
