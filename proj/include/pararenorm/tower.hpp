#pragma once

// Renormalization towers over type sequences: exact rotation recursions for
// rational and periodic-CF seeds, PLY-disk towers for block sequences,
// analytic towers over sampled renormalizations, real-slice Cantor component
// bisection, and the growth-class inclusion pipeline.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pararenorm/config.hpp"
#include "pararenorm/errors.hpp"
#include "pararenorm/fatou.hpp"
#include "pararenorm/gauss.hpp"
#include "pararenorm/maps.hpp"
#include "pararenorm/mcf.hpp"
#include "pararenorm/numerics.hpp"
#include "pararenorm/renorm.hpp"

namespace pararenorm::tower {

enum class TowerMode { Exact, PlyDisk, Analytic };
enum class TowerStatus { Alive, TerminatedParabolic, ExitedSector, DepthReached };
enum class LevelSource { Exact, PlyDisk, Analytic };

inline const char* tower_status_name(TowerStatus s) {
  switch (s) {
    case TowerStatus::Alive: return "alive";
    case TowerStatus::TerminatedParabolic: return "terminated_parabolic";
    case TowerStatus::ExitedSector: return "exited_sector";
    case TowerStatus::DepthReached: return "depth_reached";
  }
  return "?";
}

inline const char* level_source_name(LevelSource s) {
  switch (s) {
    case LevelSource::Exact: return "exact";
    case LevelSource::PlyDisk: return "ply-disk";
    case LevelSource::Analytic: return "analytic";
  }
  return "?";
}

// A type word over {t, b}; with repeat set it continues cyclically.
struct TypeSeq {
  std::string word = "t";
  bool repeat = true;

  char at(std::size_t i) const {
    if (word.empty()) fail(ErrorCode::InvalidPrefix, "empty type word");
    if (i < word.size()) return word[i];
    if (!repeat)
      fail(ErrorCode::DepthExceedsPrefix, "type word shorter than the tower");
    return word[i % word.size()];
  }

  static TypeSeq parse(std::string s) {
    TypeSeq out;
    out.repeat = false;
    if (!s.empty() && s.back() == '*') {
      out.repeat = true;
      s.pop_back();
    }
    if (s.empty()) fail(ErrorCode::InvalidPrefix, "empty type word");
    for (char c : s)
      if (c != 't' && c != 'b')
        fail(ErrorCode::InvalidPrefix, "type word characters must be t or b");
    out.word = s;
    return out;
  }
};

// The rotation whose CF expansion repeats `block` cyclically, read from
// position `shift`, with an overall sign.  Its value is the quadratic root
// of the block's convergent recursion that lies in the closed-integer
// fundamental domain.
struct PeriodicCF {
  mcf::SignedCF block;
  std::size_t shift = 0;
  int sign = 1;
};

using TowerSeed = std::variant<Rational, PeriodicCF, ComplexVal, mcf::RationalSeq>;

namespace detail {

inline void validate_periodic_block(const mcf::SignedCF& block) {
  if (block.empty()) fail(ErrorCode::InvalidPrefix, "empty periodic block");
  for (std::size_t j = 0; j < block.size(); ++j) {
    if (block[j].b < 2) fail(ErrorCode::InvalidPrefix, "entries must be >= 2");
    int next_eps = block[(j + 1) % block.size()].eps;
    if (block[j].b == 2 && next_eps != 1)
      fail(ErrorCode::InvalidPrefix,
           "entry 2 must be followed by a + sign (cyclically)");
  }
}

// Fixed point of the block's tail recursion: q_{m-1} x^2 + (q_m - p_{m-1}) x
// - p_m = 0, root inside [-1/2, 1/2].
inline double periodic_value(const mcf::SignedCF& block) {
  mcf::Convergents cv = mcf::convergents(block);
  std::size_t m = block.size();
  double a = cv.q[m - 1].convert_to<double>();
  double b = (cv.q[m] - cv.p[m - 1]).convert_to<double>();
  double c = -cv.p[m].convert_to<double>();
  double disc = b * b - 4.0 * a * c;
  if (!(disc > 0.0))
    fail(ErrorCode::RootFindingFailure, "periodic block has no real value");
  double sq = std::sqrt(disc);
  double qq = -0.5 * (b + (b >= 0 ? sq : -sq));  // larger-|.| root numerator
  double x1 = qq / a, x2 = (qq != 0.0) ? c / qq : 0.0;
  double x = (std::abs(x1) <= std::abs(x2)) ? x1 : x2;
  if (std::abs(x) > 0.5 + 1e-9)
    fail(ErrorCode::RecursionMismatch,
         "periodic value escapes the fundamental domain");
  return x;
}

inline mcf::SignedCF rotate_block(const mcf::SignedCF& block, std::size_t j) {
  std::vector<mcf::SignedPair> out;
  out.reserve(block.size());
  for (std::size_t i = 0; i < block.size(); ++i)
    out.push_back(block[(j + i) % block.size()]);
  return mcf::SignedCF(std::move(out));
}

}  // namespace detail

struct TowerLevel {
  char kappa = 't';
  ComplexVal alpha{0.0, 0.0};
  std::optional<ComplexVal> beta;
  bool in_sector = false;
  LevelSource source = LevelSource::Exact;
  double residual = 0.0;  // per-level numeric budget actually consumed
  double margin = 0.0;    // worst sector margin over the level's samples
  std::optional<Rational> exact_alpha;
};

struct TowerState {
  TowerMode mode = TowerMode::Exact;
  double r = 0.1;
  TowerStatus status = TowerStatus::Alive;
  std::string kappa_word;  // the word actually used, one char per level
  std::vector<TowerLevel> levels;
};

namespace detail {

inline bool real_in_sector(double x, double r) { return x != 0.0 && std::abs(x) <= r; }

// --- exact mode --------------------------------------------------------------

inline TowerState run_exact(const TowerSeed& seed, const TypeSeq& kappa,
                            int depth, double r) {
  TowerState st;
  st.mode = TowerMode::Exact;
  st.r = r;
  for (int n = 0; n < depth; ++n)
    if (kappa.at(static_cast<std::size_t>(n)) != 't')
      fail(ErrorCode::ModeMismatch, "exact towers follow all-t type words");

  auto push = [&](ComplexVal a, std::optional<Rational> exact, bool parabolic) {
    TowerLevel lv;
    lv.kappa = 't';
    lv.alpha = a;
    lv.source = LevelSource::Exact;
    lv.exact_alpha = std::move(exact);
    lv.in_sector = !parabolic && in_sector(a, r);
    lv.margin = parabolic ? -r : r - std::abs(a);
    st.kappa_word.push_back('t');
    st.levels.push_back(std::move(lv));
    if (parabolic) {
      st.status = TowerStatus::TerminatedParabolic;
      return false;
    }
    if (!st.levels.back().in_sector) {
      st.status = TowerStatus::ExitedSector;
      return false;
    }
    return true;
  };

  if (std::holds_alternative<Rational>(seed)) {
    Rational x = std::get<Rational>(seed);
    for (int n = 0; n < depth; ++n) {
      bool parabolic = (num(x) == 0);
      if (!push(ComplexVal(to_double(x), 0.0), x, parabolic)) return st;
      x = gauss::gauss_step(x);
    }
  } else if (std::holds_alternative<PeriodicCF>(seed)) {
    const PeriodicCF& p = std::get<PeriodicCF>(seed);
    validate_periodic_block(p.block);
    std::size_t m = p.block.size(), idx = p.shift % m;
    double sign = (p.sign < 0) ? -1.0 : 1.0;
    for (int n = 0; n < depth; ++n) {
      double x = sign * periodic_value(rotate_block(p.block, idx));
      if (!push(ComplexVal(x, 0.0), std::nullopt, false)) return st;
      sign *= -static_cast<double>(p.block[idx].eps);
      idx = (idx + 1) % m;
    }
  } else if (std::holds_alternative<ComplexVal>(seed)) {
    ComplexVal z = std::get<ComplexVal>(seed);
    for (int n = 0; n < depth; ++n) {
      bool parabolic = (z == ComplexVal(0.0, 0.0));
      if (!push(z, std::nullopt, parabolic)) return st;
      z = gauss::gauss_step(z);
    }
  } else {
    fail(ErrorCode::ModeMismatch, "exact towers take a number seed");
  }
  st.status = TowerStatus::DepthReached;
  return st;
}

// --- ply-disk mode -----------------------------------------------------------

inline TowerState run_ply(const mcf::RationalSeq& seq, int depth, double r,
                          const RunConfig& cfg) {
  TowerState st;
  st.mode = TowerMode::PlyDisk;
  st.r = r;
  mcf::KappaPrefix kp = mcf::kappa_type(seq, static_cast<std::size_t>(depth));
  st.kappa_word = kp.word;
  const double slack = 1e-12;

  int level = 0;
  for (std::size_t k = 1; k <= seq.size() && level < depth; ++k) {
    Rational pq = mcf::evaluate(seq[k - 1]);
    BigInt kper = mcf::periods_k(seq, k).back();
    Disk disk = gauss::ply_disk(pq, kper);
    auto samples =
        gauss::disk_samples(disk, cfg.boundary_samples, cfg.interior_samples);
    ComplexVal center = disk.center;
    std::int64_t m = static_cast<std::int64_t>(seq[k - 1].size());
    for (std::int64_t j = 0; j < m && level < depth; ++j, ++level) {
      bool need_cone = (j <= m - 2);
      TowerLevel lv;
      lv.kappa = kp.word[static_cast<std::size_t>(level)];
      lv.source = LevelSource::PlyDisk;
      lv.alpha = center;
      if (j == 0) lv.beta = disk.center;
      double margin = std::numeric_limits<double>::infinity();
      for (ComplexVal s : samples) {
        double mm = r - std::abs(s);
        if (need_cone) mm = std::min(mm, std::abs(s.real()) - std::abs(s.imag()));
        margin = std::min(margin, mm);
      }
      lv.margin = margin;
      lv.in_sector = margin >= -slack;
      st.levels.push_back(lv);
      if (!st.levels.back().in_sector) {
        st.status = TowerStatus::ExitedSector;
        return st;
      }
      if (j < m - 1) {
        for (ComplexVal& s : samples) s = gauss::gauss_step(s);
        center = gauss::gauss_step(center);
      }
    }
  }
  if (level < depth)
    fail(ErrorCode::DepthExceedsPrefix, "block sequence shorter than depth");
  st.status = TowerStatus::DepthReached;
  return st;
}

// --- analytic mode -----------------------------------------------------------

inline std::optional<ComplexVal> sigma_newton(
    const std::function<ComplexVal(ComplexVal)>& f, ComplexVal seed) {
  ComplexVal z = seed;
  try {
    for (int it = 0; it < 30; ++it) {
      ComplexVal g = f(z) - z;
      if (std::abs(g) < 1e-7 * (1.0 + std::abs(z))) return z;
      double h = 1e-5 * (1.0 + std::abs(z));
      ComplexVal d = (f(z + h) - f(z)) / h - 1.0;
      if (std::abs(d) < 1e-10) return std::nullopt;
      z -= g / d;
    }
  } catch (const Error&) {
    return std::nullopt;
  }
  return std::nullopt;
}

inline TowerState run_analytic(ComplexVal alpha1, const TypeSeq& kappa,
                               int depth, double r, const RunConfig& cfg) {
  if (depth > 3)
    fail(ErrorCode::ModeMismatch, "analytic towers are depth-capped at 3");
  if (alpha1.imag() == 0.0)
    fail(ErrorCode::ModeMismatch,
         "analytic towers need Im(rotation) != 0 at the base");
  TowerState st;
  st.mode = TowerMode::Analytic;
  st.r = r;

  // Deeper levels run over sampled maps whose evaluations carry the inner
  // Abel tolerance as noise; the outer machinery must not chase below it.
  RunConfig deep = cfg;
  deep.abel_tol_refined = std::max(cfg.abel_tol_refined, 1e-5);
  deep.projection_tol = std::max(cfg.projection_tol, 1e-4);

  maps::MapSpec base = maps::Quadratic{alpha1};
  maps::FixedPointData fp = maps::fixed_point_data(base, cfg);

  // Level-n working state: the map as a callable plus its local data.
  std::function<ComplexVal(ComplexVal)> f = [base](ComplexVal z) {
    return maps::map_eval(base, z);
  };
  ComplexVal alpha = alpha1, lambda0 = fp.lambda_zero, sigma = fp.sigma;
  std::optional<ComplexVal> beta = fp.beta;
  double residual = fp.newton_residual;

  for (int n = 0; n < depth; ++n) {
    char kn = kappa.at(static_cast<std::size_t>(n));
    TowerLevel lv;
    lv.kappa = kn;
    lv.alpha = alpha;
    lv.beta = beta;
    lv.source = LevelSource::Analytic;
    lv.residual = residual;
    lv.in_sector = in_sector(alpha, r);
    lv.margin = r - std::abs(alpha);
    st.kappa_word.push_back(kn);
    st.levels.push_back(lv);
    if (n + 1 == depth) break;

    ComplexVal rho;
    fatou::End end;
    if (kn == 't') {
      rho = alpha;
      end = fatou::End::Zero;
    } else {
      if (!beta)
        fail(ErrorCode::ModeMismatch,
             "b-step requested but the level has no sigma rotation");
      rho = *beta;
      end = fatou::End::Sigma;
    }
    if (rho.imag() == 0.0)
      fail(ErrorCode::ModeMismatch, "analytic step needs Im(rotation) != 0");

    const RunConfig& level_cfg = (n == 0) ? cfg : deep;
    fatou::FatouApprox fa =
        (n == 0) ? fatou::make_fatou(base, fatou::FatouMode::Refined, end, cfg)
                 : fatou::make_fatou_generic(f, sigma, lambda0, rho, end,
                                             fatou::FatouMode::Refined, deep);
    renorm::RenormSample rs = renorm::renorm_sample(fa, end, level_cfg);
    f = renorm::make_sampled_renorm(fa, level_cfg);
    alpha = gauss::gauss_step(rho);
    lambda0 = rs.derivative_at_0;
    residual = rs.rel_error;
    beta.reset();
    sigma = ComplexVal(0.0, 0.0);
    if (std::abs(rs.c2) > 1e-12) {
      ComplexVal seed = (1.0 - rs.derivative_at_0) / rs.c2;
      if (auto s = sigma_newton(f, seed)) {
        sigma = *s;
        double h = 1e-5 * (1.0 + std::abs(sigma));
        try {
          ComplexVal d = (f(sigma + h) - f(sigma - h)) / (2.0 * h);
          beta = maps::rotation_number(d);
        } catch (const Error&) {
          beta.reset();
        }
      }
    }
  }
  st.status = TowerStatus::DepthReached;
  return st;
}

}  // namespace detail

// Runs a tower.  Exact mode follows the rotation recursion literally
// (rational / periodic-CF / floating seeds); ply-disk mode drives whole PLY
// disks of a block sequence level by level (the type word is derived from
// the blocks); analytic mode renormalizes sampled maps, depth-capped at 3.
inline TowerState tower_run(const TowerSeed& seed, const TypeSeq& kappa,
                            int depth, TowerMode mode, double r,
                            const RunConfig& cfg = {}) {
  if (depth < 1) fail(ErrorCode::OutOfRange, "depth must be >= 1");
  if (!(r > 0.0)) fail(ErrorCode::OutOfRange, "sector radius must be positive");
  switch (mode) {
    case TowerMode::Exact:
      return detail::run_exact(seed, kappa, depth, r);
    case TowerMode::PlyDisk:
      if (!std::holds_alternative<mcf::RationalSeq>(seed))
        fail(ErrorCode::ModeMismatch, "ply-disk towers take a block sequence");
      return detail::run_ply(std::get<mcf::RationalSeq>(seed), depth, r, cfg);
    case TowerMode::Analytic:
      if (!std::holds_alternative<ComplexVal>(seed))
        fail(ErrorCode::ModeMismatch, "analytic towers take a complex seed");
      return detail::run_analytic(std::get<ComplexVal>(seed), kappa, depth, r,
                                  cfg);
  }
  fail(ErrorCode::UsageError, "unknown tower mode");
}

// True iff the first n tower rotations all lie in A(r).
inline bool lambda_membership(const TowerSeed& seed, const TypeSeq& kappa,
                              int n, double r, const RunConfig& cfg = {}) {
  TowerState st = tower_run(seed, kappa, n, TowerMode::Exact, r, cfg);
  if (st.status != TowerStatus::DepthReached) return false;
  for (const TowerLevel& lv : st.levels)
    if (!lv.in_sector) return false;
  return true;
}

// --- Cantor component bisection ----------------------------------------------

struct CantorComponent {
  int depth = 0;
  Rational lo{0}, hi{0};
  double diameter = 0.0;
};

namespace detail {

inline bool cantor_member(const Rational& x, int depth, double r) {
  Rational rr = rational_from_double(r);
  Rational v = x;
  for (int i = 0; i < depth; ++i) {
    if (num(v) == 0) return false;
    if (abs(num(v)) * den(rr) > abs(num(rr)) * den(v)) return false;
    v = gauss::gauss_step(v);
  }
  return true;
}

// Exact dyadic bisection of the membership boundary along direction dir.
inline Rational cantor_edge(const Rational& anchor, int depth, double r,
                            int dir) {
  Rational h(1, BigInt(1) << 40);
  Rational inside = anchor;
  int guard = 0;
  while (cantor_member(anchor + dir * h, depth, r)) {
    inside = anchor + dir * h;
    h *= 2;
    if (++guard > 200)
      fail(ErrorCode::NonConvergence, "component edge walk ran away");
  }
  Rational outside = anchor + dir * h;
  for (int it = 0; it < 120; ++it) {
    Rational mid = (inside + outside) / 2;
    if (cantor_member(mid, depth, r))
      inside = mid;
    else
      outside = mid;
  }
  return inside;
}

}  // namespace detail

// Real-slice components of depth-d sector membership around a seed, by exact
// rational G-iteration and dyadic bisection.  Periodic-CF seeds anchor at a
// convergent of order depth + 2.
inline std::vector<CantorComponent> cantor_bisect(
    const std::variant<Rational, PeriodicCF>& seed, int n, double r,
    const RunConfig& cfg = {}) {
  if (n < 1) fail(ErrorCode::OutOfRange, "depth must be >= 1");
  if (!(r > 0.0 && r < 0.5)) fail(ErrorCode::OutOfRange, "need 0 < r < 1/2");
  Rational anchor;
  if (std::holds_alternative<Rational>(seed)) {
    anchor = std::get<Rational>(seed);
  } else {
    const PeriodicCF& p = std::get<PeriodicCF>(seed);
    detail::validate_periodic_block(p.block);
    std::vector<mcf::SignedPair> word;
    for (std::size_t i = 0; i < static_cast<std::size_t>(n) + 2; ++i)
      word.push_back(p.block[(p.shift + i) % p.block.size()]);
    anchor = mcf::evaluate(mcf::SignedCF(std::move(word)));
    if (p.sign < 0) anchor = -anchor;
  }
  if (!detail::cantor_member(anchor, n, r))
    fail(ErrorCode::SeedNotMember, "seed's orbit leaves the real sector");

  std::vector<CantorComponent> out;
  double prev_diam = 0.0;
  for (int d = 1; d <= n; ++d) {
    CantorComponent c;
    c.depth = d;
    c.lo = detail::cantor_edge(anchor, d, r, -1);
    c.hi = detail::cantor_edge(anchor, d, r, +1);
    c.diameter = to_double(c.hi - c.lo);
    if (d >= 2) {
      if (!(c.lo >= out.back().lo && c.hi <= out.back().hi))
        fail(ErrorCode::RecursionMismatch, "components failed to nest");
      if (!(c.diameter <= cfg.cantor_mu_proxy * prev_diam))
        fail(ErrorCode::SampleViolation,
             "component decay slower than the contraction proxy");
    }
    prev_diam = c.diameter;
    out.push_back(std::move(c));
  }
  return out;
}

// --- growth-class inclusion pipeline ------------------------------------------

struct QgBlockReport {
  std::size_t block = 0;
  gauss::QgDiskReport disk;
  int beta_gate_checked = 0;  // samples inside A(r5), each mapped through
  int beta_gate_vacuous = 0;  // samples outside A(r5): implication holds empty
  bool beta_gate_pass = true;
  ComplexVal gate_witness{0.0, 0.0};
  bool pass = true;
};

struct QgInclusionReport {
  bool pass = true;
  std::vector<QgBlockReport> blocks;
  double b1 = 0.0;  // empirical index bound over the sampled sector
  int b1_samples = 0;
};

// Largest holomorphic-index modulus of the quadratic family over a sector
// sample; the two-fixed-point index cancels exactly, so this measures the
// quadrature floor.
inline double b1_empirical(const RunConfig& cfg = {}, double r_lo = 0.01,
                           double r_hi = 0.15, int n = 24) {
  if (!(0.0 < r_lo && r_lo < r_hi)) fail(ErrorCode::OutOfRange, "bad b1 range");
  double best = 0.0;
  int radial = std::max(2, n / 6);
  for (int i = 0; i < radial; ++i) {
    double rad = r_lo * std::pow(r_hi / r_lo, double(i) / (radial - 1));
    for (int j = 0; j < 3; ++j) {
      double th = (-0.6 + 0.6 * j) * (kPi / 4.0);
      for (double side : {1.0, -1.0}) {
        ComplexVal a = side * rad * cis(th);
        if (!in_sector(a, r_hi)) continue;
        maps::FixedPointData fp =
            maps::fixed_point_data(maps::Quadratic{a}, cfg);
        best = std::max(best, std::abs(fp.index_value));
      }
    }
  }
  return best;
}

// Pipeline: gate the sequence through qg_check, drive each block's PLY disk
// through the Gauss map with the sector bounds, and check the sigma-to-zero
// rotation implication (a sample in A(r5) must map into A(r3)) on every disk
// sample, reporting the empirical index bound alongside.
inline QgInclusionReport qg_inclusion_check(const mcf::RationalSeq& seq,
                                            std::int64_t N,
                                            std::size_t depth_k,
                                            double r3_proxy, double r5_proxy,
                                            const RunConfig& cfg = {}) {
  mcf::QgCheckResult gate = mcf::qg_check(seq, N);
  if (!gate.pass)
    fail(ErrorCode::PreconditionViolated,
         "sequence fails the growth gate: " + gate.reason);
  if (depth_k < 1 || depth_k > seq.size())
    fail(ErrorCode::DepthExceedsPrefix, "depth_k out of range");

  QgInclusionReport rep;
  double r = std::min(r3_proxy, r5_proxy);
  for (std::size_t k = 1; k <= depth_k; ++k) {
    QgBlockReport br;
    br.block = k;
    br.disk = gauss::qg_disk_check(seq, k, r, cfg.boundary_samples,
                                   cfg.interior_samples);
    Disk disk =
        gauss::ply_disk(mcf::evaluate(seq[k - 1]), mcf::periods_k(seq, k).back());
    for (ComplexVal nu :
         gauss::disk_samples(disk, cfg.boundary_samples, cfg.interior_samples)) {
      if (!in_sector(nu, r5_proxy)) {
        ++br.beta_gate_vacuous;
        continue;
      }
      ++br.beta_gate_checked;
      ComplexVal a = maps::quadratic_alpha_from_beta(nu);
      if (!in_sector(a, r3_proxy)) {
        br.beta_gate_pass = false;
        br.gate_witness = nu;
      }
    }
    br.pass = br.disk.pass && br.beta_gate_pass;
    rep.pass = rep.pass && br.pass;
    rep.blocks.push_back(std::move(br));
  }
  rep.b1 = b1_empirical(cfg, 0.01, 0.15);
  rep.b1_samples = 24;
  return rep;
}

}  // namespace pararenorm::tower
