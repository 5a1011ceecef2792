#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "pararenorm/maps.hpp"

using namespace pararenorm;

namespace {
const std::vector<ComplexVal> kAlphas = {
    {0.05, -0.01}, {0.08, -0.03}, {0.05, 0.02}, {-0.1, 0.04}, {0.12, 0.0}};
}

TEST_CASE("critical point and value of the quadratic") {
  for (ComplexVal a : kAlphas) {
    maps::MapSpec spec = maps::Quadratic{a};
    ComplexVal cp = maps::critical_point(spec);
    CHECK(std::abs(maps::map_deriv(spec, cp)) < 1e-14);
    CHECK(std::abs(maps::map_eval(spec, cp) - maps::critical_value()) < 1e-14);
  }
}

TEST_CASE("sigma closed form is a fixed point and matches Newton") {
  for (ComplexVal a : kAlphas) {
    maps::MapSpec spec = maps::Quadratic{a};
    ComplexVal s = maps::quadratic_sigma_closed_form(a);
    CHECK(std::abs(maps::map_eval(spec, s) - s) < 1e-13);
    maps::FixedPointData fp = maps::fixed_point_data(spec);
    CHECK(std::abs(fp.sigma - s) < 1e-12 * std::max(1.0, std::abs(s)));
    // multiplier at sigma is 2 - E
    CHECK(std::abs(fp.lambda_sigma - (2.0 - maps::rot(a))) < 1e-10);
    CHECK(std::abs(fp.lambda_zero - maps::rot(a)) < 1e-14);
  }
}

TEST_CASE("beta two paths agree") {
  for (ComplexVal a : kAlphas) {
    maps::FixedPointData fp = maps::fixed_point_data(maps::Quadratic{a});
    ComplexVal closed = maps::quadratic_beta_closed_form(a);
    CHECK(std::abs(fp.beta - closed) < 1e-10);
    // and the recursion inverts: alpha_from_beta(beta(alpha)) has the same
    // multiplier data as alpha itself.
    ComplexVal back = maps::quadratic_alpha_from_beta(closed);
    CHECK(std::abs(maps::rot(back) - (2.0 - (2.0 - maps::rot(a)))) < 1e-10);
  }
}

TEST_CASE("index sum vanishes for the quadratic") {
  for (ComplexVal a : kAlphas) {
    maps::FixedPointData fp = maps::fixed_point_data(maps::Quadratic{a});
    CHECK(std::abs(fp.index_closed_form) < 1e-13);
    CHECK(std::abs(fp.index_value) < 1e-8);
    CHECK(fp.index_residual < 1e-8);
    CHECK(fp.newton_residual < 1e-9);
  }
}

TEST_CASE("fixed point data rejects the parabolic center") {
  CHECK_THROWS_AS(maps::fixed_point_data(maps::Quadratic{ComplexVal(0, 0)}),
                  Error);
}

TEST_CASE("reference domain membership") {
  CHECK(maps::contains_in_V(ComplexVal(0.0, 0.0)));
  CHECK(maps::contains_in_V(ComplexVal(-1.0 / 3, 0.0)));
  CHECK_FALSE(maps::contains_in_V(ComplexVal(-1.0, 0.0)));
  // critical value sits inside
  CHECK(maps::contains_in_V(maps::critical_value()));
}

TEST_CASE("nonzero fixed points solve the fixed point equation") {
  for (ComplexVal a : kAlphas) {
    maps::MapSpec spec = maps::Quadratic{a};
    for (ComplexVal z : maps::nonzero_fixed_points(spec))
      CHECK(std::abs(maps::map_eval(spec, z) - z) < 1e-12);
  }
}

TEST_CASE("periodic points of low period close up") {
  maps::MapSpec spec = maps::Quadratic{ComplexVal(0.35, 0.02)};
  for (int q : {1, 2, 3}) {
    maps::PeriodicPointsResult pr = maps::periodic_points(spec, q, false);
    CHECK(pr.complete);
    for (const maps::CycleData& c : pr.cycles) {
      REQUIRE(!c.points.empty());
      CHECK(c.residual < 1e-8);
      // multiplier equals the chain-rule product along the orbit
      ComplexVal prod(1.0, 0.0);
      for (ComplexVal z : c.points) prod *= maps::map_deriv(spec, z);
      CHECK(std::abs(prod - c.multiplier) <
            1e-8 * std::max(1.0, std::abs(prod)));
    }
  }
}

TEST_CASE("dividing multiplier at a parabolic root sits on the boundary") {
  for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 3}, {1, 4}, {2, 5}}) {
    Rational pq(p, q);
    ComplexVal a_root = maps::quadratic_alpha_from_beta(
        ComplexVal(double(p) / q, 0.0));
    maps::DividingMultiplierReport rep =
        maps::dividing_multiplier_check(a_root, pq, BigInt(1));
    CHECK(rep.boundary_distance < 1e-10);
    CHECK(std::abs(rep.nu - ComplexVal(double(p) / q, 0.0)) < 1e-12);
  }
}

TEST_CASE("satellite parameters realize the requested multiplier") {
  for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 3}, {2, 5}}) {
    for (ComplexVal t : {ComplexVal(0.5, 0.0), ComplexVal(0.2, 0.3)}) {
      maps::SatelliteParameter sp = maps::satellite_parameter(p, q, t);
      CHECK(sp.residual < 1e-8);
      // the sigma multiplier then lies strictly inside the dividing disk
      maps::DividingMultiplierReport rep =
          maps::dividing_multiplier_check(sp.alpha, Rational(p, q), BigInt(1));
      CHECK(rep.member);
    }
  }
  CHECK_THROWS_AS(maps::satellite_parameter(1, 3, ComplexVal(1.5, 0.0)), Error);
}

TEST_CASE("moebius model shares the normalization") {
  maps::MapSpec m = maps::MoebiusIS{ComplexVal(0.05, -0.01), ComplexVal(0.0, 0.0)};
  ComplexVal cp = maps::critical_point(m);
  CHECK(std::abs(maps::map_deriv(m, cp)) < 1e-12);
  CHECK(std::abs(maps::map_eval(m, ComplexVal(1e-9, 0)) -
                 maps::rot(ComplexVal(0.05, -0.01)) * 1e-9) < 1e-17);
}
