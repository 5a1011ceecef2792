#pragma once

// Scalar/geometry substrate shared by every other header: exact rationals,
// the closest-integer convention, sector classification, disks, Moebius
// transforms, and trapezoid contour integration.

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>

#include "pararenorm/errors.hpp"

namespace pararenorm {

using ComplexVal = std::complex<double>;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline ComplexVal cis(double t) { return {std::cos(t), std::sin(t)}; }

inline bool is_finite(ComplexVal z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline void require_finite(ComplexVal z, const char* what) {
  if (!is_finite(z)) fail(ErrorCode::NonFinite, what);
}

inline BigInt num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt den(const Rational& r) { return boost::multiprecision::denominator(r); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Exact dyadic representation of a finite double.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) fail(ErrorCode::NonFinite, "rational_from_double input");
  if (x == 0.0) return Rational(0);
  int e = 0;
  double m = std::frexp(x, &e);  // x = m 2^e with |m| in [1/2, 1)
  auto n = static_cast<std::int64_t>(std::ldexp(m, 53));
  int shift = e - 53;
  Rational r(n);
  if (shift >= 0) return r * Rational(BigInt(1) << shift);
  return r / Rational(BigInt(1) << -shift);
}

// Signed nearest-integer bracket: for x > 0 the representative interval is
// (k - 1/2, k + 1/2], for x < 0 it is [k - 1/2, k + 1/2), so that the bracket
// commutes with negation: [-x] = -[x] for every x, half-integers included.
inline std::int64_t closest_integer(double x) {
  if (!std::isfinite(x)) fail(ErrorCode::NonFinite, "closest_integer input");
  if (std::abs(x) > 9.0e15)
    fail(ErrorCode::OutOfRange, "closest_integer input exceeds exact range");
  if (x == 0.0) return 0;
  double k = (x > 0.0) ? std::ceil(x - 0.5) : std::floor(x + 0.5);
  return static_cast<std::int64_t>(k);
}

namespace detail {
// Floor division for cpp_int (b > 0).
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b, r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}
inline BigInt ceil_div(const BigInt& a, const BigInt& b) {
  return -floor_div(-a, b);
}
}  // namespace detail

inline BigInt closest_integer(const Rational& x) {
  if (x == 0) return 0;
  BigInt n = num(x), d = den(x);  // d > 0 by cpp_rational invariant
  if (x > 0) return detail::ceil_div(2 * n - d, 2 * d);
  return detail::floor_div(2 * n + d, 2 * d);
}

// --- sectors -------------------------------------------------------------

enum class SectorClass { APlus, AMinus, Outside };

inline const char* sector_name(SectorClass s) {
  switch (s) {
    case SectorClass::APlus: return "APlus";
    case SectorClass::AMinus: return "AMinus";
    case SectorClass::Outside: return "Outside";
  }
  return "?";
}

// A+(r): 0 < |a| <= r and Re a >= |Im a|; A-(r) mirrors across the imaginary
// axis.  Boundaries belong to the sector; 0 never does.
inline SectorClass sector_classify(ComplexVal alpha, double r) {
  require_finite(alpha, "sector_classify input");
  if (r <= 0.0) fail(ErrorCode::OutOfRange, "sector radius must be positive");
  double m = std::abs(alpha);
  if (m == 0.0 || m > r) return SectorClass::Outside;
  double ai = std::abs(alpha.imag());
  if (alpha.real() >= ai) return SectorClass::APlus;
  if (alpha.real() <= -ai) return SectorClass::AMinus;
  return SectorClass::Outside;
}

inline bool in_sector(ComplexVal alpha, double r) {
  return sector_classify(alpha, r) != SectorClass::Outside;
}

// --- disks & Moebius maps ------------------------------------------------

struct Disk {
  ComplexVal center{0.0, 0.0};
  double radius = 0.0;

  bool contains(ComplexVal z, double slack = 0.0) const {
    return std::abs(z - center) <= radius + slack;
  }
  // Conservative outward rounding for lemma-style containment checks.
  Disk inflated(double rel) const {
    return {center, radius * (1.0 + rel) + rel * std::abs(center)};
  }
};

struct MoebiusMap {
  // z -> (a z + b) / (c z + d), ad - bc != 0.
  ComplexVal a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};

  ComplexVal apply(ComplexVal z) const {
    ComplexVal denom = c * z + d;
    if (std::abs(denom) == 0.0) fail(ErrorCode::PoleHit, "Moebius pole");
    return (a * z + b) / denom;
  }
  ComplexVal det() const { return a * d - b * c; }
  MoebiusMap inverse() const { return {d, -b, -c, a}; }
  MoebiusMap after(const MoebiusMap& g) const {  // this o g
    return {a * g.a + b * g.c, a * g.b + b * g.d,
            c * g.a + d * g.c, c * g.b + d * g.d};
  }
};

// Exact image of a closed disk under a Moebius map whose pole lies strictly
// outside the disk.  For an affine map the image is the scaled translate; the
// general case reduces to inversion, whose disk image has center
// conj(m)/(|m|^2 - r^2) and radius r/(|m|^2 - r^2) for a source disk B(m, r)
// not containing 0.
inline Disk mobius_image_disk(const MoebiusMap& f, const Disk& disk) {
  if (std::abs(f.det()) == 0.0)
    fail(ErrorCode::SingularInput, "degenerate Moebius map");
  if (disk.radius < 0.0) fail(ErrorCode::OutOfRange, "negative disk radius");
  if (std::abs(f.c) == 0.0) {
    ComplexVal scale = f.a / f.d;
    return {f.a / f.d * disk.center + f.b / f.d,
            std::abs(scale) * disk.radius};
  }
  ComplexVal pole = -f.d / f.c;
  ComplexVal m = disk.center - pole;
  double mm = std::norm(m);
  double s = mm - disk.radius * disk.radius;
  if (s <= 0.0 || std::abs(m) <= disk.radius)
    fail(ErrorCode::PoleInsideDisk, "Moebius pole inside closed disk");
  ComplexVal A = f.a / f.c;
  ComplexVal B = (f.b * f.c - f.a * f.d) / (f.c * f.c);
  Disk out{A + B * std::conj(m) / s, std::abs(B) * disk.radius / s};
  require_finite(out.center, "mobius_image_disk center");
  return out;
}

// --- contour integration -------------------------------------------------

struct IntegralResult {
  ComplexVal value{0.0, 0.0};
  double err_est = 0.0;  // |I(n) - I(n/2)|, spectral for analytic integrands
  int n = 0;
};

// (1/2πi) ∮ f(z) dz over the circle |z - center| = radius, trapezoid rule
// with n nodes.  The half-resolution estimate reuses the even-index nodes, so
// n must be even.
inline IntegralResult contour_integral_circle(
    const std::function<ComplexVal(ComplexVal)>& f, ComplexVal center,
    double radius, int n = 512) {
  if (n < 8 || (n % 2) != 0)
    fail(ErrorCode::OutOfRange, "contour node count must be even and >= 8");
  if (!(radius > 0.0)) fail(ErrorCode::OutOfRange, "contour radius");
  ComplexVal sum_all{0.0, 0.0}, sum_even{0.0, 0.0};
  for (int j = 0; j < n; ++j) {
    ComplexVal w = cis(kTwoPi * j / n);
    ComplexVal fz = f(center + radius * w);
    require_finite(fz, "contour integrand");
    ComplexVal term = w * fz;
    sum_all += term;
    if ((j % 2) == 0) sum_even += term;
  }
  ComplexVal full = sum_all * (radius / static_cast<double>(n));
  ComplexVal half = sum_even * (radius / static_cast<double>(n / 2));
  return {full, std::abs(full - half), n};
}

}  // namespace pararenorm
