// Acceptance gate: one line per criterion, [PASS]/[FAIL], tolerances pinned
// here in code.  Exit 0 iff every criterion passes.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pararenorm/cli.hpp"
#include "pararenorm/fatou.hpp"
#include "pararenorm/gauss.hpp"
#include "pararenorm/maps.hpp"
#include "pararenorm/mcf.hpp"
#include "pararenorm/renorm.hpp"
#include "pararenorm/tower.hpp"

using namespace pararenorm;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string note;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<Rational> corpus_q200() {
  std::vector<Rational> out;
  for (long q = 2; q <= 200; ++q)
    for (long p = 1; 2 * p <= q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      out.emplace_back(p, q);
      out.emplace_back(-p, q);
    }
  return out;
}

// ---------------------------------------------------------------------------
Outcome criterion_1() {
  auto t0 = Clock::now();
  auto corpus = corpus_q200();
  long bad = 0;
  for (const Rational& x : corpus)
    if (mcf::evaluate(mcf::expand(x)) != x) ++bad;
  double el = seconds_since(t0);
  std::ostringstream ss;
  ss << corpus.size() << " cases, " << bad << " mismatches, " << el << " s";
  return {bad == 0 && el < 5.0, ss.str()};
}

Outcome criterion_2() {
  long bad = 0, n = 0;
  for (const Rational& x : corpus_q200()) {
    mcf::SignedCF cf = mcf::expand(x);
    mcf::Convergents cv = mcf::convergents(cf);
    Rational tp = mcf::tail_product(cf);
    bool ok = cv.q.back() == den(x) &&
              abs(tp) == Rational(1) / Rational(den(x)) &&
              cv.final_value() == x;
    if (!ok) ++bad;
    ++n;
  }
  std::ostringstream ss;
  ss << n << " cases exact, " << bad << " mismatches";
  return {bad == 0, ss.str()};
}

Outcome criterion_3() {
  long bad = 0, n = 0;
  for (const Rational& x : corpus_q200()) {
    mcf::SignedCF cf = mcf::expand(x);
    gauss::ShiftedCF sh = gauss::gauss_shift(cf);
    if (gauss::gauss_step(x) != Rational(sh.sign) * mcf::evaluate(sh.tail))
      ++bad;
    ++n;
  }
  std::ostringstream ss;
  ss << n << " cases exact, " << bad << " mismatches";
  return {bad == 0, ss.str()};
}

Outcome criterion_4() {
  std::mt19937 rng(987654321u);
  std::uniform_int_distribution<int> len_d(1, 6), b_d(2, 50), coin(0, 1);
  long violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<mcf::SignedPair> pairs;
    int n = len_d(rng);
    for (int j = 0; j < n; ++j) {
      mcf::SignedPair pr;
      pr.b = b_d(rng);
      // Adjacent twos leave the sandwich's domain (next-level ball exceeds
      // the half-radius base ball); redraw those entries.
      while (j > 0 && pairs.back().b == 2 && pr.b == 2) pr.b = b_d(rng);
      int sign = coin(rng) ? +1 : -1;
      pr.eps = (j > 0 && pairs.back().b == 2) ? +1 : sign;
      pairs.push_back(pr);
    }
    gauss::SampleCheckReport r = gauss::cone_check(mcf::SignedCF{pairs}, 64, 16);
    if (!r.pass) ++violations;
    worst = std::min({worst, r.worst_lower_margin, r.worst_upper_margin,
                      r.worst_cone_margin});
  }
  std::ostringstream ss;
  ss << "500 expansions, " << violations << " violations, worst margin "
     << worst;
  return {violations == 0, ss.str()};
}

std::vector<ComplexVal> alpha_grid_200() {
  std::vector<ComplexVal> out;
  for (int i = 0; i < 100; ++i) {
    double r = 0.03 + 0.12 * (i / 99.0);
    double th = (-1.0 + 2.0 * ((i % 10) + 0.5) / 10.0) * (kPi / 4.0);
    ComplexVal plus = r * ComplexVal(std::cos(th), std::sin(th));
    out.push_back(plus);                              // A+
    out.push_back(ComplexVal(-plus.real(), plus.imag()));  // mirrored into A-
  }
  return out;
}

Outcome criterion_5() {
  long bad = 0, n = 0;
  double worst = 0.0;
  for (ComplexVal a : alpha_grid_200()) {
    maps::FixedPointData fp = maps::fixed_point_data(maps::Quadratic{a});
    double v = std::abs(fp.index_value);
    double gap = std::abs(fp.index_value - fp.index_closed_form);
    worst = std::max({worst, v, gap});
    if (v > 1e-8 || gap > 1e-8) ++bad;
    ++n;
  }
  std::ostringstream ss;
  ss << n << " rotations, worst |index| deviation " << worst;
  return {bad == 0 && n == 200, ss.str()};
}

Outcome criterion_6() {
  long bad = 0;
  double worst_sigma = 0.0, worst_beta = 0.0;
  for (ComplexVal a : alpha_grid_200()) {
    maps::MapSpec spec = maps::Quadratic{a};
    maps::FixedPointData fp = maps::fixed_point_data(spec);
    double ds = std::abs(fp.sigma - maps::quadratic_sigma_closed_form(a));
    ComplexVal beta_numeric =
        maps::rotation_number(maps::map_deriv(spec, fp.sigma));
    double db = std::abs(beta_numeric - maps::quadratic_beta_closed_form(a));
    worst_sigma = std::max(worst_sigma, ds);
    worst_beta = std::max(worst_beta, db);
    if (ds > 1e-12 || db > 1e-10) ++bad;
  }
  std::ostringstream ss;
  ss << "worst sigma gap " << worst_sigma << ", worst beta gap " << worst_beta;
  return {bad == 0, ss.str()};
}

Outcome criterion_7() {
  const ComplexVal alphas[] = {{0.05, -0.01}, {0.08, -0.03}, {0.05, 0.02}};
  std::ostringstream ss;
  bool ok = true;
  for (ComplexVal a : alphas) {
    auto t0 = Clock::now();
    fatou::FatouApprox fa =
        fatou::make_fatou(maps::Quadratic{a}, fatou::FatouMode::Refined);
    double cp_gap = std::abs(fatou::fatou_coord(fa, fa.cp));
    double cv_gap =
        std::abs(fatou::fatou_coord(fa, maps::critical_value()) - 1.0);
    fatou::ResidualStats st = fatou::validate_grid(fa, 20);
    double el = seconds_since(t0);
    bool here = cp_gap <= 1e-8 && cv_gap <= 1e-6 && st.max <= 1e-6 &&
                st.count == 400 && el < 60.0;
    ok = ok && here;
    ss << "[cp " << cp_gap << " cv " << cv_gap << " grid " << st.max << " in "
       << el << " s] ";
  }
  return {ok, ss.str()};
}

// Independent Ecalle path: z-plane iteration with nearest-deck lift tracking.
ComplexVal tracked_return(const fatou::FatouApprox& fa, ComplexVal w, int k) {
  const fatou::LiftContext& ctx = fa.ctx_full;
  ComplexVal z = fatou::tau(ctx, w);
  ComplexVal cur = w;
  for (int j = 0; j < k; ++j) {
    z = fa.f(z);
    ComplexVal raw = fatou::tau_inv(ctx, z);
    ComplexVal target = cur + 1.0;
    double n = std::round(((target - raw) * ctx.alpha).real());
    cur = raw + n / ctx.alpha;
  }
  return cur - 1.0 / ctx.alpha;
}

Outcome criterion_8() {
  fatou::FatouApprox fa = fatou::make_fatou(
      maps::Quadratic{ComplexVal(0.05, -0.01)}, fatou::FatouMode::Refined);
  RunConfig cfg;
  double worst_two_path = 0.0, worst_commute = 0.0;
  for (int j = 0; j < 50; ++j) {
    ComplexVal xi(0.1 + 0.32 * (j % 7), 0.35 + 0.3 * (j / 7));
    ComplexVal w = renorm::detail::w_of_phi(fa, xi);
    renorm::EcalleValue ev = renorm::ecale_lift(fa, w, cfg);
    ComplexVal other = tracked_return(fa, w, ev.k);
    worst_two_path = std::max(worst_two_path, std::abs(ev.value - other));
  }
  auto E = [&](ComplexVal xi) {
    ComplexVal w = renorm::detail::w_of_phi(fa, xi);
    return renorm::detail::phi_of_w(fa, renorm::ecale_lift(fa, w, cfg).value);
  };
  for (int j = 0; j < 10; ++j) {
    ComplexVal xi(0.08 + 0.13 * j, 0.5 + 0.17 * j);
    worst_commute = std::max(worst_commute,
                             std::abs(E(xi + 1.0) - E(xi) - 1.0));
  }
  std::ostringstream ss;
  ss << "two-path gap " << worst_two_path << " (tol 1e-7), commutation gap "
     << worst_commute << " (tol 1e-8)";
  return {worst_two_path <= 1e-7 && worst_commute <= 1e-8, ss.str()};
}

Outcome criterion_9() {
  const ComplexVal alphas[] = {{0.05, -0.01}, {0.08, -0.03}, {0.05, 0.02}};
  RunConfig cfg;
  std::ostringstream ss;
  bool ok = true;
  for (ComplexVal a : alphas) {
    fatou::FatouApprox ft = fatou::make_fatou(
        maps::Quadratic{a}, fatou::FatouMode::Refined, fatou::End::Zero, cfg);
    renorm::RenormSample top = renorm::renorm_sample(ft, fatou::End::Zero, cfg);
    fatou::FatouApprox fb = fatou::make_fatou(
        maps::Quadratic{a}, fatou::FatouMode::Refined, fatou::End::Sigma, cfg);
    renorm::RenormSample bot = renorm::renorm_sample(fb, fatou::End::Sigma, cfg);
    bool here = top.rel_error <= 1e-2 && bot.rel_error <= 1e-2;
    ok = ok && here;
    ss << "[top " << top.rel_error << " bottom " << bot.rel_error << "] ";
  }
  return {ok, ss.str()};
}

Outcome criterion_10() {
  const std::pair<int, int> pqs[] = {{1, 3}, {1, 4}, {2, 5}};
  std::ostringstream ss;
  bool ok = true;
  for (auto [p, q] : pqs) {
    Rational pq(p, q);
    ComplexVal root =
        maps::quadratic_alpha_from_beta(ComplexVal(double(p) / q, 0.0));
    maps::DividingMultiplierReport at_root =
        maps::dividing_multiplier_check(root, pq, BigInt(1));
    long misses = 0;
    for (int m = 0; m < 100; ++m) {
      double rr = 0.08 + 0.84 * (m / 10) / 9.0;
      double u = kTwoPi * ((m % 10) + 0.37) / 10.0;
      ComplexVal t = rr * ComplexVal(std::cos(u), std::sin(u));
      maps::SatelliteParameter sp = maps::satellite_parameter(p, q, t);
      maps::DividingMultiplierReport rep =
          maps::dividing_multiplier_check(sp.alpha, pq, BigInt(1));
      if (!rep.member) ++misses;
    }
    bool here = at_root.boundary_distance <= 1e-10 && misses == 0;
    ok = ok && here;
    ss << "[" << p << "/" << q << " boundary " << at_root.boundary_distance
       << ", misses " << misses << "] ";
  }
  return {ok, ss.str()};
}

Outcome criterion_11() {
  auto t0 = Clock::now();
  mcf::RationalSeq seq = {
      mcf::SignedCF({mcf::SignedPair{20, +1}}),
      mcf::SignedCF({mcf::SignedPair{400, +1}}),
      mcf::SignedCF({mcf::SignedPair{160000, +1}}),
  };
  bool gate = mcf::qg_check(seq, 20).pass;
  bool disks = true;
  int samples = 0;
  for (std::size_t i = 1; i <= 3; ++i) {
    gauss::QgDiskReport r = gauss::qg_disk_check(seq, i, 0.2, 64, 16);
    disks = disks && r.pass;
    samples += r.samples_used;
  }
  double el = seconds_since(t0);
  std::ostringstream ss;
  ss << "gate " << (gate ? "ok" : "FAIL") << ", disks "
     << (disks ? "ok" : "FAIL") << ", " << samples << " samples, " << el
     << " s";
  return {gate && disks && samples == 240 && el < 10.0, ss.str()};
}

Outcome criterion_12() {
  tower::PeriodicCF star{mcf::parse_signed_cf("(7,-)"), 0, +1};
  auto comps = tower::cantor_bisect(
      std::variant<Rational, tower::PeriodicCF>(star), 4, 0.15);
  bool ok = comps.size() == 4;
  std::ostringstream ss;
  ss << "ratios";
  for (std::size_t d = 1; d < comps.size(); ++d) {
    bool nested = comps[d].lo >= comps[d - 1].lo &&
                  comps[d].hi <= comps[d - 1].hi &&
                  comps[d].diameter < comps[d - 1].diameter;
    double ratio = comps[d].diameter / comps[d - 1].diameter;
    ss << " " << ratio;
    ok = ok && nested && ratio <= 0.1;
  }
  return {ok, ss.str()};
}

Outcome criterion_13() {
  const std::string bin = PARA_RENORM_BIN;
  const std::string f1 = "accept_selftest_1.json", f2 = "accept_selftest_2.json";
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  int rc1 = std::system((bin + " selftest --out " + f1).c_str());
  int rc2 = std::system((bin + " selftest --out " + f2).c_str());
  std::string a = slurp(f1), b = slurp(f2);
  std::remove(f1.c_str());
  std::remove(f2.c_str());
  std::ostringstream ss;
  ss << "exit " << rc1 << "/" << rc2 << ", " << a.size() << " bytes, "
     << (a == b ? "identical" : "DIFFER");
  return {rc1 == 0 && rc2 == 0 && !a.empty() && a == b, ss.str()};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* label;
    std::function<Outcome()> fn;
  };
  const Entry entries[] = {
      {1, "cf round trip (q<=200, <5s)", criterion_1},
      {2, "convergent/product identity (exact)", criterion_2},
      {3, "gauss shift law (exact)", criterion_3},
      {4, "cylinder sandwich + cone (500 random)", criterion_4},
      {5, "contour index vanishes (200 rotations, 1e-8)", criterion_5},
      {6, "sigma 1e-12 / beta 1e-10 oracles", criterion_6},
      {7, "fatou normalization + 20x20 grid (1e-6, <60s)", criterion_7},
      {8, "ecalle two-path 1e-7 / commutation 1e-8", criterion_8},
      {9, "renorm derivative vs rotation target (1e-2)", criterion_9},
      {10, "ply boundary 1e-10 + satellite membership", criterion_10},
      {11, "qg pipeline flagship (r=0.2, <10s)", criterion_11},
      {12, "cantor decay ratios <= 0.1 (depths 1-4)", criterion_12},
      {13, "selftest byte determinism", criterion_13},
  };
  int failures = 0;
  for (const Entry& e : entries) {
    Outcome oc;
    try {
      oc = e.fn();
    } catch (const std::exception& ex) {
      oc = {false, std::string("exception: ") + ex.what()};
    }
    if (!oc.pass) ++failures;
    std::cout << (oc.pass ? "[PASS]" : "[FAIL]") << " criterion " << e.id
              << ": " << e.label << " -- " << oc.note << "\n";
  }
  std::cout << (failures == 0 ? "ACCEPTANCE OK" : "ACCEPTANCE FAILED") << " ("
            << (13 - failures) << "/13)\n";
  return failures == 0 ? 0 : 1;
}
