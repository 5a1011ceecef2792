#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "pararenorm/numerics.hpp"

using namespace pararenorm;

TEST_CASE("closest integer on doubles uses the (k-1/2, k+1/2] convention") {
  CHECK(closest_integer(0.4) == 0);
  CHECK(closest_integer(0.5) == 0);   // right-closed interval keeps the tie
  CHECK(closest_integer(0.50000001) == 1);
  CHECK(closest_integer(-0.5) == 0);  // mirror: [k-1/2, k+1/2) for x < 0
  CHECK(closest_integer(-0.50000001) == -1);
  CHECK(closest_integer(2.5) == 2);
  CHECK(closest_integer(-2.5) == -2);
  CHECK(closest_integer(-7.0) == -7);
}

TEST_CASE("closest integer on rationals matches the double convention") {
  CHECK(closest_integer(Rational(1, 2)) == BigInt(0));
  CHECK(closest_integer(Rational(-1, 2)) == BigInt(0));
  CHECK(closest_integer(Rational(5, 2)) == BigInt(2));
  CHECK(closest_integer(Rational(-5, 2)) == BigInt(-2));
  CHECK(closest_integer(Rational(5, 13)) == BigInt(0));
  CHECK(closest_integer(Rational(18, 13)) == BigInt(1));
  CHECK(closest_integer(Rational(-18, 13)) == BigInt(-1));
  // Large arguments stay exact; positive ties land on the lower neighbour.
  Rational big = Rational(BigInt("123456789123456789123456787"), BigInt(2));
  CHECK(closest_integer(big) ==
        (BigInt("123456789123456789123456787") - 1) / 2);
}

TEST_CASE("rational_from_double is the exact dyadic value") {
  CHECK(rational_from_double(0.5) == Rational(1, 2));
  CHECK(rational_from_double(-0.375) == Rational(-3, 8));
  CHECK(rational_from_double(3.0) == Rational(3, 1));
  Rational r = rational_from_double(0.1);
  CHECK(r != Rational(1, 10));  // 0.1 is not representable
  CHECK(std::abs(to_double(r) - 0.1) == 0.0);
  CHECK_THROWS_AS(rational_from_double(std::nan("")), Error);
}

TEST_CASE("sector membership: boundaries in, origin out") {
  double r = 0.15;
  CHECK(in_sector(ComplexVal(0.1, 0.0), r));
  CHECK(in_sector(ComplexVal(0.1, 0.1), r));    // Re = |Im| boundary
  CHECK(in_sector(ComplexVal(-0.1, 0.1), r));   // mirrored half
  CHECK(in_sector(ComplexVal(0.15, 0.0), r));   // |alpha| = r boundary
  CHECK_FALSE(in_sector(ComplexVal(0.0, 0.0), r));
  CHECK_FALSE(in_sector(ComplexVal(0.0, 0.1), r));   // strictly above cone
  CHECK_FALSE(in_sector(ComplexVal(0.2, 0.0), r));
  CHECK(sector_classify(ComplexVal(0.1, -0.05), r) == SectorClass::APlus);
  CHECK(sector_classify(ComplexVal(-0.1, -0.05), r) == SectorClass::AMinus);
  CHECK(sector_classify(ComplexVal(0.0, 0.1), r) == SectorClass::Outside);
}

TEST_CASE("disk membership with slack") {
  Disk d{ComplexVal(1.0, 0.0), 0.5};
  CHECK(d.contains(ComplexVal(1.2, 0.0)));
  CHECK(d.contains(ComplexVal(1.5, 0.0)));  // boundary in
  CHECK_FALSE(d.contains(ComplexVal(1.5 + 1e-9, 0.0)));
  CHECK(d.contains(ComplexVal(1.5 + 1e-9, 0.0), 1e-8));
  CHECK(d.inflated(0.1).radius == Catch::Approx(0.5 * 1.1 + 0.1 * 1.0));
}

TEST_CASE("moebius composition, inverse, and disk image") {
  MoebiusMap m{ComplexVal(0, 0), ComplexVal(1, 0), ComplexVal(1, 0),
               ComplexVal(3, 0)};  // z -> 1/(z+3)
  ComplexVal z(0.25, -0.5);
  CHECK(std::abs(m.apply(z) - 1.0 / (z + 3.0)) < 1e-15);
  CHECK(std::abs(m.inverse().apply(m.apply(z)) - z) < 1e-14);
  MoebiusMap id = m.inverse().after(m);
  CHECK(std::abs(id.apply(z) - z) < 1e-14);

  // Image of a disk strictly avoiding the pole is the exact disk through the
  // images of diameter endpoints against the inversion symmetry.
  Disk d{ComplexVal(0.0, 0.0), 1.0};
  Disk img = mobius_image_disk(m, d);
  for (int k = 0; k < 12; ++k) {
    double t = 2.0 * 3.14159265358979 * k / 12;
    ComplexVal w = m.apply(d.center + d.radius * ComplexVal(std::cos(t), std::sin(t)));
    CHECK(std::abs(std::abs(w - img.center) - img.radius) < 1e-12);
  }
  Disk hits_pole{ComplexVal(-3.0, 0.0), 0.5};
  CHECK_THROWS_AS(mobius_image_disk(m, hits_pole), Error);
}

TEST_CASE("contour integral reproduces residues") {
  // f(z) = 1/z around the unit circle: integral / (2 pi i) = 1.
  auto f = [](ComplexVal z) { return 1.0 / z; };
  IntegralResult r = contour_integral_circle(f, ComplexVal(0, 0), 1.0, 256);
  CHECK(std::abs(r.value - 1.0) < 1e-12);
  // Shifted pole, non-unit radius.
  auto g = [](ComplexVal z) { return 3.0 / (z - ComplexVal(0.25, 0.125)); };
  r = contour_integral_circle(g, ComplexVal(0.25, 0.0), 0.5, 512);
  CHECK(std::abs(r.value - 3.0) < 1e-11);
  // Analytic integrand integrates to zero.
  auto h = [](ComplexVal z) { return z * z + 2.0; };
  r = contour_integral_circle(h, ComplexVal(0, 0), 1.0, 64);
  CHECK(std::abs(r.value) < 1e-13);
  CHECK_THROWS_AS(contour_integral_circle(f, ComplexVal(0, 0), 1.0, 7), Error);
}
