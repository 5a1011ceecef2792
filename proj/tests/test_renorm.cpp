#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "pararenorm/renorm.hpp"

using namespace pararenorm;
using fatou::End;
using fatou::FatouMode;

namespace {

fatou::FatouApprox top_fa(ComplexVal alpha, const RunConfig& cfg = {}) {
  return fatou::make_fatou(maps::Quadratic{alpha}, FatouMode::Refined,
                           End::Zero, cfg);
}

// Independent return path: iterate in the z plane and track the lift by
// picking the deck representative closest to the expected translation.
ComplexVal tracked_return(const fatou::FatouApprox& fa, ComplexVal w, int k) {
  const fatou::LiftContext& ctx = fa.ctx_full;
  ComplexVal z = fatou::tau(ctx, w);
  ComplexVal cur = w;
  for (int j = 0; j < k; ++j) {
    z = fa.f(z);
    ComplexVal raw = fatou::tau_inv(ctx, z);
    ComplexVal target = cur + 1.0;  // F ~ translation by one at this end
    double n = std::round(((target - raw) * ctx.alpha).real());
    cur = raw + n / ctx.alpha;
  }
  return cur - 1.0 / ctx.alpha;
}

}  // namespace

TEST_CASE("rotation recursion steps") {
  CHECK(renorm::renorm_rotation_top(Rational(1, 7)) == Rational(0));
  CHECK(renorm::renorm_rotation_top(Rational(5, 13)) == Rational(2, 5));
  ComplexVal g = renorm::renorm_rotation_top(ComplexVal(0.1, 0.05));
  CHECK(std::abs(g - ComplexVal(0.0, 4.0)) < 1e-12);
  ComplexVal gb = renorm::renorm_rotation_bottom(ComplexVal(0.1, 0.05));
  CHECK(std::abs(gb - ComplexVal(0.0, 4.0)) < 1e-12);
}

TEST_CASE("exponential chart round trip") {
  fatou::FatouApprox fa = top_fa(ComplexVal(0.05, -0.01));
  for (ComplexVal v : {ComplexVal(0.7, 0.4), ComplexVal(1.5, -0.3),
                       ComplexVal(1.2, 2.0)}) {
    ComplexVal z = renorm::ex_project(fa, v);
    ComplexVal back = renorm::ex_unproject(fa, z);
    CHECK(back.real() > 0.5);
    CHECK(back.real() <= 1.5 + 1e-12);
    // recovered value differs from v by an exact integer
    double shift = (v - back).real();
    CHECK(std::abs(shift - std::round(shift)) < 1e-10);
    CHECK(std::abs((v - back).imag()) < 1e-10);
  }
  CHECK_THROWS_AS(renorm::ex_unproject(fa, ComplexVal(0, 0)), Error);
}

TEST_CASE("return count is a fixed per-map constant") {
  fatou::FatouApprox fa = top_fa(ComplexVal(0.05, -0.01));
  int k = renorm::ecalle_return_count(fa, RunConfig{});
  CHECK(k >= 1);
  // orbit leaves and re-enters after about Re(1/alpha) steps
  CHECK(k <= 2 + static_cast<int>(std::abs((1.0 / fa.map_alpha).real())));
}

TEST_CASE("lifted return map agrees with tracked z-plane iteration") {
  fatou::FatouApprox fa = top_fa(ComplexVal(0.05, -0.01));
  RunConfig cfg;
  for (int j = 0; j < 5; ++j) {
    ComplexVal xi(0.15 + 0.2 * j, 0.5 + 0.25 * j);
    ComplexVal w = renorm::detail::w_of_phi(fa, xi);
    renorm::EcalleValue ev = renorm::ecale_lift(fa, w, cfg);
    ComplexVal other = tracked_return(fa, w, ev.k);
    CHECK(std::abs(ev.value - other) < 1e-7);
  }
}

TEST_CASE("return map commutes with unit translation") {
  fatou::FatouApprox fa = top_fa(ComplexVal(0.05, -0.01));
  RunConfig cfg;
  auto E = [&](ComplexVal xi) {
    ComplexVal w = renorm::detail::w_of_phi(fa, xi);
    renorm::EcalleValue ev = renorm::ecale_lift(fa, w, cfg);
    return renorm::detail::phi_of_w(fa, ev.value);
  };
  for (ComplexVal xi : {ComplexVal(0.3, 0.8), ComplexVal(0.7, 1.4)}) {
    ComplexVal a = E(xi);
    ComplexVal b = E(xi + 1.0);
    CHECK(std::abs(b - a - 1.0) < 1e-8);
  }
}

TEST_CASE("top renormalization derivative matches the rotation target") {
  RunConfig cfg;
  cfg.ring_radii = 2;
  cfg.ring_angles = 6;
  fatou::FatouApprox fa = top_fa(ComplexVal(0.08, -0.03), cfg);
  renorm::RenormSample rs = renorm::renorm_sample(fa, End::Zero, cfg);
  ComplexVal target = std::exp(ComplexVal(0, -kTwoPi) / ComplexVal(0.08, -0.03));
  CHECK(std::abs(rs.target - target) < 1e-12 * std::abs(target));
  CHECK(rs.deriv_ok);
  CHECK(rs.rel_error <= 1e-2);
  CHECK(rs.well_def_residual <= cfg.projection_tol);
  CHECK(!rs.k_histogram.empty());
  CHECK(rs.residuals.max < 0.5);  // the linear jet describes the ring data
}

TEST_CASE("bottom renormalization uses the sigma-end rotation") {
  RunConfig cfg;
  cfg.ring_radii = 2;
  cfg.ring_angles = 6;
  ComplexVal alpha(0.05, 0.02);
  fatou::FatouApprox fa = fatou::make_fatou(maps::Quadratic{alpha},
                                            FatouMode::Refined, End::Sigma, cfg);
  ComplexVal beta = maps::quadratic_beta_closed_form(alpha);
  CHECK(std::abs(fa.map_alpha - beta) < 1e-10);
  renorm::RenormSample rs = renorm::renorm_sample(fa, End::Sigma, cfg);
  ComplexVal target = std::exp(ComplexVal(0, -kTwoPi) / beta);
  CHECK(std::abs(rs.target - target) < 1e-10 * std::abs(target));
  CHECK(rs.rel_error <= 1e-2);
}

TEST_CASE("sampled renormalization behaves like its fitted jet near 0") {
  RunConfig cfg;
  cfg.ring_radii = 2;
  cfg.ring_angles = 6;
  fatou::FatouApprox fa = top_fa(ComplexVal(0.08, -0.03), cfg);
  renorm::RenormSample rs = renorm::renorm_sample(fa, End::Zero, cfg);
  auto f2 = renorm::make_sampled_renorm(fa, cfg);
  double s = 1e-3 * rs.scale;
  ComplexVal z(s, 0.35 * s);
  ComplexVal ratio = f2(z) / z;
  CHECK(std::abs(ratio - rs.derivative_at_0) <
        2e-2 * std::abs(rs.derivative_at_0));
}

TEST_CASE("sector classification by the coordinate bands") {
  fatou::FatouApprox fa = top_fa(ComplexVal(0.05, -0.01));
  renorm::SectorRegions sr = renorm::sector_regions(fa);
  auto cls = [&](ComplexVal xi) {
    return sr.classify(fatou::fatou_inverse(fa, xi)).first;
  };
  CHECK(cls(ComplexVal(1.0, 0.5)) == renorm::RegionClass::C);
  CHECK(cls(ComplexVal(1.0, 3.0)) == renorm::RegionClass::A);
  CHECK(cls(ComplexVal(1.0, -3.0)) == renorm::RegionClass::B);
  CHECK(cls(ComplexVal(3.2, 0.5)) == renorm::RegionClass::Outside);
}

TEST_CASE("renormalization rejects model-grade input") {
  fatou::FatouApprox fm = fatou::make_fatou(maps::Quadratic{ComplexVal(0.05, -0.01)},
                                            FatouMode::Model);
  CHECK_THROWS_AS(renorm::renorm_sample(fm, End::Zero, RunConfig{}), Error);
  CHECK_THROWS_AS(renorm::sector_regions(fm), Error);
}
