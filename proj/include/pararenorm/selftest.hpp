#pragma once

// Fixed smoke battery over every module, producing a deterministic report:
// fixed inputs, fixed iteration order, round-trip-stable number formatting,
// no timestamps.  Running it twice must give byte-identical output.

#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "pararenorm/config.hpp"
#include "pararenorm/fatou.hpp"
#include "pararenorm/gauss.hpp"
#include "pararenorm/maps.hpp"
#include "pararenorm/mcf.hpp"
#include "pararenorm/numerics.hpp"
#include "pararenorm/renorm.hpp"
#include "pararenorm/report.hpp"
#include "pararenorm/tower.hpp"

namespace pararenorm::selftest {

namespace detail {

inline mcf::SignedCF make_cf(std::vector<mcf::SignedPair> pairs) {
  return mcf::SignedCF(std::move(pairs));
}

inline void add_check(Json& checks, const std::string& name, bool pass,
                      Json data) {
  Json j;
  j["name"] = name;
  j["pass"] = pass;
  j["data"] = std::move(data);
  checks.push_back(std::move(j));
}

}  // namespace detail

inline Json run_selftest(const RunConfig& cfg = {}) {
  Json rep = make_report("selftest");
  Json checks = Json::array();
  bool all = true;
  auto check = [&](const std::string& name, bool pass, Json data) {
    all = all && pass;
    detail::add_check(checks, name, pass, std::move(data));
  };

  // --- continued fractions ---------------------------------------------------
  {
    mcf::SignedCF got = mcf::expand(Rational(5, 13));
    mcf::SignedCF want = detail::make_cf({{3, 1}, {2, -1}, {2, 1}});
    check("cf-expand-5-13", got == want, json_cf(got));
  }
  {
    long cases = 0, bad = 0;
    for (std::int64_t q = 2; q <= 60; ++q)
      for (std::int64_t p = 1; 2 * p <= q; ++p) {
        if (std::gcd(p, q) != 1) continue;
        for (int s : {1, -1}) {
          Rational x(s * p, q);
          ++cases;
          mcf::SignedCF cf = mcf::expand(x);
          if (mcf::evaluate(cf) != x || mcf::convergents(cf).final_value() != x)
            ++bad;
          if (mcf::tail_product(cf) != Rational(1, q)) ++bad;
        }
      }
    check("cf-roundtrip-q60", bad == 0, Json{{"cases", cases}, {"bad", bad}});
  }
  {
    long cases = 0, bad = 0;
    for (std::int64_t q = 3; q <= 60; ++q)
      for (std::int64_t p = 1; 2 * p <= q; ++p) {
        if (std::gcd(p, q) != 1) continue;
        Rational x(p, q);
        mcf::SignedCF cf = mcf::expand(x);
        if (cf.size() < 2) continue;
        ++cases;
        Rational lhs = gauss::gauss_step(x);
        Rational rhs = Rational(-cf[0].eps) * mcf::evaluate(cf.tail());
        if (lhs != rhs) ++bad;
      }
    check("gauss-shift-law", bad == 0, Json{{"cases", cases}, {"bad", bad}});
  }

  // --- cylinder balls ----------------------------------------------------------
  {
    auto close = [](const Disk& d, double cre, double cim, double r) {
      return std::abs(d.center - ComplexVal(cre, cim)) <= 1e-15 &&
             std::abs(d.radius - r) <= 1e-15;
    };
    Disk d1 = gauss::cylinder_ball(detail::make_cf({{3, 1}}));
    Disk d2 = gauss::cylinder_ball(detail::make_cf({{2, -1}}));
    Disk d3 = gauss::cylinder_ball(detail::make_cf({{3, 1}, {2, 1}}));
    bool ok = close(d1, 12.0 / 35.0, 0.0, 2.0 / 35.0) &&
              close(d2, -8.0 / 15.0, 0.0, 2.0 / 15.0) &&
              close(d3, 53.0 / 187.0, 0.0, 2.0 / 187.0);
    Json data;
    data["F1(3,+)"] = json_disk(d1);
    data["F1(2,-)"] = json_disk(d2);
    data["F2(3,+)(2,+)"] = json_disk(d3);
    check("gauss-cylinder-balls", ok, std::move(data));
  }
  {
    bool ok = true;
    Json worst = Json::array();
    for (auto& cf : {detail::make_cf({{3, 1}, {2, -1}, {2, 1}}),
                     detail::make_cf({{5, -1}, {4, 1}}),
                     detail::make_cf({{2, 1}, {2, 1}, {3, -1}})}) {
      gauss::SampleCheckReport r = gauss::cone_check(cf, 32, 8);
      ok = ok && r.pass;
      worst.push_back(Json{{"pass", r.pass}});
    }
    check("gauss-cone-sandwich", ok, std::move(worst));
  }

  // --- map family ----------------------------------------------------------------
  {
    bool ok = true;
    Json rows = Json::array();
    for (ComplexVal a : {ComplexVal(0.05, -0.01), ComplexVal(-0.1, 0.04),
                         ComplexVal(0.12, 0.0)}) {
      maps::FixedPointData fp = maps::fixed_point_data(maps::Quadratic{a}, cfg);
      double ds = std::abs(fp.sigma - maps::quadratic_sigma_closed_form(a));
      double db = std::abs(fp.beta - maps::quadratic_beta_closed_form(a));
      double ix = std::abs(fp.index_value);
      bool row_ok = ds <= 1e-12 && db <= 1e-10 && ix <= 1e-8;
      ok = ok && row_ok;
      rows.push_back(Json{{"alpha", json_complex(a)},
                          {"sigma_gap", ds},
                          {"beta_gap", db},
                          {"index_mod", ix}});
    }
    check("maps-sigma-beta-index", ok, std::move(rows));
  }
  {
    bool ok = maps::contains_in_V({0.0, 0.0}) &&
              maps::contains_in_V({-1.0 / 3.0, 0.0}) &&
              !maps::contains_in_V({-1.0, 0.0});
    check("maps-v-membership", ok, Json::object());
  }

  // --- Fatou coordinate --------------------------------------------------------
  {
    ComplexVal a(0.05, -0.01);
    fatou::FatouApprox fa =
        fatou::make_fatou(maps::Quadratic{a}, fatou::FatouMode::Refined,
                          fatou::End::Zero, cfg);
    ComplexVal at_cp = fatou::fatou_coord(fa, fa.cp);
    ComplexVal at_cv = fatou::fatou_coord(fa, maps::critical_value());
    fatou::ResidualStats st = fatou::validate_grid(fa, 6);
    bool ok = std::abs(at_cp) <= 1e-8 && std::abs(at_cv - 1.0) <= 1e-6 &&
              st.max <= 1e-6;
    check("fatou-normalization", ok,
          Json{{"phi_cp_mod", std::abs(at_cp)},
               {"phi_cv_gap", std::abs(at_cv - 1.0)},
               {"grid_residual_max", st.max}});
  }

  // --- renormalization ---------------------------------------------------------
  {
    ComplexVal a(0.08, -0.03);
    RunConfig small = cfg;
    small.ring_radii = 2;
    small.ring_angles = 6;
    fatou::FatouApprox fa =
        fatou::make_fatou(maps::Quadratic{a}, fatou::FatouMode::Refined,
                          fatou::End::Zero, small);
    renorm::RenormSample rs = renorm::renorm_sample(fa, fatou::End::Zero, small);
    bool ok = rs.deriv_ok && rs.well_def_residual <= small.projection_tol;
    check("renorm-top-derivative", ok,
          Json{{"rel_error", rs.rel_error},
               {"well_def_residual", rs.well_def_residual},
               {"k", rs.k_iterates}});
  }

  // --- towers --------------------------------------------------------------------
  {
    tower::PeriodicCF star{detail::make_cf({{7, -1}}), 0, 1};
    tower::TowerState st =
        tower::tower_run(star, tower::TypeSeq{}, 10, tower::TowerMode::Exact,
                         0.15, cfg);
    bool ok = st.status == tower::TowerStatus::DepthReached &&
              st.levels.size() == 10;
    for (const auto& lv : st.levels)
      ok = ok && lv.in_sector && lv.alpha == st.levels.front().alpha;
    check("tower-fixed-point", ok,
          Json{{"alpha1", json_complex(st.levels.front().alpha)},
               {"levels", st.levels.size()},
               {"status", tower::tower_status_name(st.status)}});
  }
  {
    tower::TowerState st =
        tower::tower_run(Rational(1, 7), tower::TypeSeq{}, 5,
                         tower::TowerMode::Exact, 0.15, cfg);
    bool ok = st.status == tower::TowerStatus::TerminatedParabolic &&
              st.levels.size() == 2 &&
              st.levels.back().alpha == ComplexVal(0.0, 0.0);
    check("tower-rational-termination", ok,
          Json{{"levels", st.levels.size()},
               {"status", tower::tower_status_name(st.status)}});
  }
  {
    tower::PeriodicCF star{detail::make_cf({{7, -1}}), 0, 1};
    auto comps = tower::cantor_bisect(star, 3, 0.15, cfg);
    bool ok = comps.size() == 3;
    Json rows = Json::array();
    for (std::size_t i = 0; i < comps.size(); ++i) {
      double ratio =
          i ? comps[i].diameter / comps[i - 1].diameter : 0.0;
      if (i) ok = ok && ratio <= 0.1;
      rows.push_back(Json{{"depth", comps[i].depth},
                          {"diameter", comps[i].diameter},
                          {"ratio", ratio}});
    }
    check("cantor-decay", ok, std::move(rows));
  }
  {
    mcf::RationalSeq seq{detail::make_cf({{20, 1}}),
                         detail::make_cf({{400, 1}}),
                         detail::make_cf({{160000, 1}})};
    bool gate = mcf::qg_check(seq, 20).pass;
    gauss::QgDiskReport r = gauss::qg_disk_check(seq, 1, 0.2, 16, 4);
    check("qg-mini", gate && r.pass,
          Json{{"gate", gate}, {"block1_pass", r.pass}});
  }

  rep["pass"] = all;
  rep["checks"] = std::move(checks);
  Json conf;
  cfg.for_each_entry([&](const char* k, const auto& v) { conf[k] = v; });
  rep["config"] = std::move(conf);
  return rep;
}

}  // namespace pararenorm::selftest
