#pragma once

// Subcommand orchestration: parses argv, loads configuration (file, env,
// --set overrides), runs one operation, and emits a deterministic report.
// Exit codes: 0 pass, 1 assertion/ numeric failure, 2 usage error.

#include <cctype>
#include <complex>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "pararenorm/config.hpp"
#include "pararenorm/errors.hpp"
#include "pararenorm/fatou.hpp"
#include "pararenorm/gauss.hpp"
#include "pararenorm/maps.hpp"
#include "pararenorm/mcf.hpp"
#include "pararenorm/numerics.hpp"
#include "pararenorm/renorm.hpp"
#include "pararenorm/report.hpp"
#include "pararenorm/selftest.hpp"
#include "pararenorm/tower.hpp"

namespace pararenorm::cli {

namespace detail {

// Rewraps parse failures of command-line values as usage errors so they land
// on exit code 2 rather than 1.
template <class F>
auto arg(F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UsageError) throw;
    fail(ErrorCode::UsageError, e.what());
  }
}

inline double stod_all(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    fail(ErrorCode::UsageError, "cannot parse number '" + s + "'");
  }
  if (pos != s.size())
    fail(ErrorCode::UsageError, "trailing characters in number '" + s + "'");
  return v;
}

// Accepts "a", "bi", "a+bi", "a-bi", "i", "-i", and "(a,b)".
inline ComplexVal parse_complex(const std::string& in) {
  std::string s;
  for (char c : in)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) fail(ErrorCode::UsageError, "empty complex literal");
  if (s.front() == '(') {
    if (s.back() != ')') fail(ErrorCode::UsageError, "unbalanced parentheses");
    std::string body = s.substr(1, s.size() - 2);
    auto comma = body.find(',');
    if (comma == std::string::npos)
      fail(ErrorCode::UsageError, "expected (re,im)");
    return {stod_all(body.substr(0, comma)), stod_all(body.substr(comma + 1))};
  }
  if (s.back() != 'i' && s.back() != 'I') return {stod_all(s), 0.0};
  s.pop_back();
  if (s.empty() || s == "+") return {0.0, 1.0};
  if (s == "-") return {0.0, -1.0};
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    char c = s[k];
    if ((c == '+' || c == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, stod_all(s)};
  std::string re = s.substr(0, split), im = s.substr(split);
  if (im == "+") im = "1";
  if (im == "-") im = "-1";
  return {stod_all(re), stod_all(im)};
}

inline fatou::End parse_end(const std::string& s) {
  if (s == "zero" || s == "top") return fatou::End::Zero;
  if (s == "sigma" || s == "bottom") return fatou::End::Sigma;
  fail(ErrorCode::UsageError, "end must be zero|top or sigma|bottom");
}

inline fatou::FatouMode parse_mode(const std::string& s) {
  if (s == "refined") return fatou::FatouMode::Refined;
  if (s == "model") return fatou::FatouMode::Model;
  fail(ErrorCode::UsageError, "mode must be refined or model");
}

inline tower::TowerMode parse_tower_mode(const std::string& s) {
  if (s == "exact") return tower::TowerMode::Exact;
  if (s == "ply-disk" || s == "ply") return tower::TowerMode::PlyDisk;
  if (s == "analytic") return tower::TowerMode::Analytic;
  fail(ErrorCode::UsageError, "mode must be exact, ply-disk, or analytic");
}

inline tower::PeriodicCF parse_periodic(std::string rest) {
  tower::PeriodicCF p;
  if (!rest.empty() && rest.front() == '-') {
    p.sign = -1;
    rest.erase(rest.begin());
  }
  auto at = rest.find('@');
  if (at != std::string::npos) {
    p.shift = static_cast<std::size_t>(std::stoul(rest.substr(at + 1)));
    rest = rest.substr(0, at);
  }
  p.block = mcf::parse_signed_cf(rest);
  return p;
}

inline tower::TowerSeed parse_seed(const std::string& s) {
  if (s.rfind("periodic:", 0) == 0) return parse_periodic(s.substr(9));
  if (s.find('(') != std::string::npos || s.find(';') != std::string::npos)
    return mcf::parse_rational_seq(s);
  if (s.find('/') != std::string::npos) return mcf::parse_rational(s);
  return parse_complex(s);
}

inline std::variant<Rational, tower::PeriodicCF> parse_real_seed(
    const std::string& s) {
  if (s.rfind("periodic:", 0) == 0) return parse_periodic(s.substr(9));
  return mcf::parse_rational(s);
}

inline void emit_text(const std::string& body, const std::string& out_path) {
  if (out_path.empty())
    std::cout << body;
  else
    write_text_file(out_path, body);
}

inline void emit(const Json& j, const std::string& out_path) {
  emit_text(dump_report(j), out_path);
}

inline Json json_fp(const maps::FixedPointData& fp) {
  Json j;
  j["alpha"] = json_complex(fp.alpha);
  j["sigma"] = json_complex(fp.sigma);
  j["sigma_seed"] = json_complex(fp.sigma_seed);
  j["lambda_zero"] = json_complex(fp.lambda_zero);
  j["lambda_sigma"] = json_complex(fp.lambda_sigma);
  j["beta"] = json_complex(fp.beta);
  j["index_value"] = json_complex(fp.index_value);
  j["index_closed_form"] = json_complex(fp.index_closed_form);
  j["index_residual"] = fp.index_residual;
  j["index_quadrature_err"] = fp.index_quadrature_err;
  j["newton_residual"] = fp.newton_residual;
  j["contour"] = json_disk(fp.contour);
  return j;
}

inline Json json_tower(const tower::TowerState& st) {
  Json j = make_report("tower-run");
  j["mode"] = st.mode == tower::TowerMode::Exact
                  ? "exact"
                  : (st.mode == tower::TowerMode::PlyDisk ? "ply-disk"
                                                          : "analytic");
  j["r"] = st.r;
  j["status"] = tower::tower_status_name(st.status);
  j["kappa"] = st.kappa_word;
  Json levels = Json::array();
  for (const auto& lv : st.levels) {
    Json l;
    l["kappa"] = std::string(1, lv.kappa);
    l["alpha"] = json_complex(lv.alpha);
    l["beta"] = lv.beta ? json_complex(*lv.beta) : Json(nullptr);
    l["in_sector"] = lv.in_sector;
    l["source"] = tower::level_source_name(lv.source);
    l["residual"] = lv.residual;
    l["margin"] = lv.margin;
    l["exact"] =
        lv.exact_alpha ? Json(mcf::format_rational(*lv.exact_alpha)) : Json(nullptr);
    levels.push_back(std::move(l));
  }
  j["levels"] = std::move(levels);
  return j;
}

}  // namespace detail

inline int dispatch(int argc, const char* const* argv) {
  CLI::App app{"near-parabolic renormalization toolkit"};
  app.fallthrough();
  app.require_subcommand(1);
  std::string config_path, out_path;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--set", overrides, "config override key=value");
  app.add_option("--out", out_path, "write the report to a file");

  // cf ------------------------------------------------------------------------
  auto* cf = app.add_subcommand("cf", "signed continued fractions");
  std::string cf_x, cf_cf, cf_seq;
  std::int64_t cf_n = 20;
  auto* cf_expand = cf->add_subcommand("expand", "expansion of a rational");
  cf_expand->add_option("value", cf_x)->required();
  auto* cf_eval = cf->add_subcommand("eval", "value of an expansion");
  cf_eval->add_option("cf", cf_cf)->required();
  auto* cf_conv = cf->add_subcommand("convergents", "convergent table");
  cf_conv->add_option("value", cf_x)->required();
  auto* cf_qg = cf->add_subcommand("qg-check", "growth-condition gate");
  cf_qg->add_option("--seq", cf_seq)->required();
  cf_qg->add_option("--N", cf_n);

  // gauss ----------------------------------------------------------------------
  auto* ga = app.add_subcommand("gauss", "Gauss map dynamics");
  std::string ga_z, ga_cf, ga_seq;
  int ga_n = 10;
  std::size_t ga_block = 1;
  double ga_r = 0.1;
  auto* ga_orbit = ga->add_subcommand("orbit", "iterated Gauss map");
  ga_orbit->add_option("value", ga_z)->required();
  ga_orbit->add_option("--n", ga_n);
  auto* ga_ball = ga->add_subcommand("ball", "cylinder ball of a prefix");
  ga_ball->add_option("cf", ga_cf)->required();
  auto* ga_cone = ga->add_subcommand("cone-check", "sandwich/cone sweep");
  ga_cone->add_option("cf", ga_cf)->required();
  auto* ga_qg = ga->add_subcommand("qg-disk", "drive a block's PLY disk");
  ga_qg->add_option("--seq", ga_seq)->required();
  ga_qg->add_option("--block", ga_block);
  ga_qg->add_option("--r", ga_r);

  // maps -----------------------------------------------------------------------
  auto* mp = app.add_subcommand("maps", "quadratic / Moebius model maps");
  std::string mp_alpha, mp_pq, mp_target;
  int mp_q = 1, mp_p = 1;
  std::int64_t mp_k = 1;
  bool mp_heuristic = false;
  auto* mp_fp = mp->add_subcommand("fixed-point", "sigma, beta, index data");
  mp_fp->add_option("--alpha", mp_alpha)->required();
  auto* mp_per = mp->add_subcommand("periodic", "periodic points of period q");
  mp_per->add_option("--alpha", mp_alpha)->required();
  mp_per->add_option("--q", mp_q)->required();
  mp_per->add_flag("--heuristic", mp_heuristic);
  auto* mp_div = mp->add_subcommand("dividing", "PLY disk membership");
  mp_div->add_option("--alpha", mp_alpha)->required();
  mp_div->add_option("--pq", mp_pq)->required();
  mp_div->add_option("--k", mp_k);
  auto* mp_sat = mp->add_subcommand("satellite", "parameter with cycle multiplier");
  mp_sat->add_option("--p", mp_p)->required();
  mp_sat->add_option("--q", mp_q)->required();
  mp_sat->add_option("--target", mp_target)->required();

  // fatou ----------------------------------------------------------------------
  auto* fa_cmd = app.add_subcommand("fatou", "Fatou coordinates");
  std::string fa_alpha, fa_z, fa_mode = "refined", fa_end = "zero";
  int fa_n = 20;
  double fa_xi1 = 0.5, fa_xi2 = 30.0;
  auto* fa_coord = fa_cmd->add_subcommand("coord", "evaluate the coordinate");
  fa_coord->add_option("--alpha", fa_alpha)->required();
  fa_coord->add_option("--z", fa_z)->required();
  fa_coord->add_option("--mode", fa_mode);
  fa_coord->add_option("--end", fa_end);
  auto* fa_grid = fa_cmd->add_subcommand("grid", "petal grid CSV");
  fa_grid->add_option("--alpha", fa_alpha)->required();
  fa_grid->add_option("--n", fa_n);
  fa_grid->add_option("--mode", fa_mode);
  auto* fa_width = fa_cmd->add_subcommand("width", "petal width probe");
  fa_width->add_option("--alpha", fa_alpha)->required();
  auto* fa_spiral = fa_cmd->add_subcommand("spiral", "argument drift probe");
  fa_spiral->add_option("--alpha", fa_alpha)->required();
  fa_spiral->add_option("--xi1", fa_xi1);
  fa_spiral->add_option("--xi2max", fa_xi2);

  // renorm ---------------------------------------------------------------------
  auto* rn = app.add_subcommand("renorm", "sampled renormalizations");
  std::string rn_alpha, rn_z, rn_end = "top";
  auto* rn_rot = rn->add_subcommand("rotation", "rotation recursion step");
  rn_rot->add_option("--alpha", rn_alpha)->required();
  auto* rn_sample = rn->add_subcommand("sample", "ring-sampled renormalization");
  rn_sample->add_option("--alpha", rn_alpha)->required();
  rn_sample->add_option("--end", rn_end);
  auto* rn_reg = rn->add_subcommand("regions", "sector classification");
  rn_reg->add_option("--alpha", rn_alpha)->required();
  rn_reg->add_option("--z", rn_z)->required();

  // tower ----------------------------------------------------------------------
  auto* tw = app.add_subcommand("tower", "renormalization towers");
  std::string tw_seed, tw_kappa = "t*", tw_mode = "exact", tw_seq;
  int tw_depth = 10;
  double tw_r = 0.1, tw_r3 = 0.1, tw_r5 = 0.05;
  std::int64_t tw_n = 20;
  std::size_t tw_depth_k = 0;
  auto* tw_run = tw->add_subcommand("run", "run a tower");
  tw_run->add_option("--seed", tw_seed)->required();
  tw_run->add_option("--kappa", tw_kappa);
  tw_run->add_option("--mode", tw_mode);
  tw_run->add_option("--depth", tw_depth);
  tw_run->add_option("--r", tw_r);
  auto* tw_cantor = tw->add_subcommand("cantor", "real-slice component bisection");
  tw_cantor->add_option("--seed", tw_seed)->required();
  tw_cantor->add_option("--depth", tw_depth);
  tw_cantor->add_option("--r", tw_r);
  auto* tw_qg = tw->add_subcommand("qg-check", "growth-class inclusion pipeline");
  tw_qg->add_option("--seq", tw_seq)->required();
  tw_qg->add_option("--N", tw_n);
  tw_qg->add_option("--depth", tw_depth_k);
  tw_qg->add_option("--r3", tw_r3);
  tw_qg->add_option("--r5", tw_r5);

  // selftest / config ------------------------------------------------------------
  auto* st_cmd = app.add_subcommand("selftest", "fixed smoke battery");
  auto* cfg_cmd = app.add_subcommand("config", "configuration");
  auto* cfg_show = cfg_cmd->add_subcommand("show", "print effective config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    RunConfig cfg = RunConfig::from_environment();
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const std::string& kv : overrides) {
      auto eq = kv.find('=');
      if (eq == std::string::npos)
        fail(ErrorCode::UsageError, "--set expects key=value");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }

    // --- cf ---
    if (cf_expand->parsed()) {
      mcf::SignedCF cf1 =
          detail::arg([&] { return mcf::expand(mcf::parse_rational(cf_x)); });
      detail::emit_text(json_cf(cf1).dump() + "\n", out_path);
      return 0;
    }
    if (cf_eval->parsed()) {
      mcf::SignedCF cf1 = detail::arg([&] { return mcf::parse_signed_cf(cf_cf); });
      detail::emit_text(mcf::format_rational(mcf::evaluate(cf1)) + "\n", out_path);
      return 0;
    }
    if (cf_conv->parsed()) {
      mcf::SignedCF cf1 =
          detail::arg([&] { return mcf::expand(mcf::parse_rational(cf_x)); });
      mcf::Convergents cv = mcf::convergents(cf1);
      Json j = make_report("cf-convergents");
      j["cf"] = json_cf(cf1);
      Json ps = Json::array(), qs = Json::array();
      for (const auto& v : cv.p) ps.push_back(v.str());
      for (const auto& v : cv.q) qs.push_back(v.str());
      j["p"] = std::move(ps);
      j["q"] = std::move(qs);
      detail::emit(j, out_path);
      return 0;
    }
    if (cf_qg->parsed()) {
      mcf::RationalSeq seq =
          detail::arg([&] { return mcf::parse_rational_seq(cf_seq); });
      mcf::QgCheckResult res = mcf::qg_check(seq, cf_n);
      Json j = make_report("cf-qg-check");
      j["pass"] = res.pass;
      j["i"] = res.i;
      j["j"] = res.j;
      j["reason"] = res.reason;
      detail::emit(j, out_path);
      return res.pass ? 0 : 1;
    }

    // --- gauss ---
    if (ga_orbit->parsed()) {
      Json j = make_report("gauss-orbit");
      Json arr = Json::array();
      if (ga_z.find('/') != std::string::npos) {
        Rational x = detail::arg([&] { return mcf::parse_rational(ga_z); });
        for (const Rational& v : gauss::gauss_orbit(x, ga_n))
          arr.push_back(mcf::format_rational(v));
      } else {
        for (ComplexVal v :
             gauss::gauss_orbit(detail::parse_complex(ga_z), ga_n))
          arr.push_back(json_complex(v));
      }
      j["orbit"] = std::move(arr);
      detail::emit(j, out_path);
      return 0;
    }
    if (ga_ball->parsed()) {
      mcf::SignedCF cf1 = detail::arg([&] { return mcf::parse_signed_cf(ga_cf); });
      Json j = make_report("gauss-ball");
      j["disk"] = json_disk(gauss::cylinder_ball(cf1));
      detail::emit(j, out_path);
      return 0;
    }
    if (ga_cone->parsed()) {
      mcf::SignedCF cf1 = detail::arg([&] { return mcf::parse_signed_cf(ga_cf); });
      gauss::SampleCheckReport r =
          gauss::cone_check(cf1, cfg.boundary_samples, cfg.interior_samples);
      Json j = make_report("gauss-cone-check");
      j["pass"] = r.pass;
      j["worst_lower_margin"] = r.worst_lower_margin;
      j["worst_upper_margin"] = r.worst_upper_margin;
      j["worst_cone_margin"] = r.worst_cone_margin;
      j["samples"] = r.samples_used;
      detail::emit(j, out_path);
      return r.pass ? 0 : 1;
    }
    if (ga_qg->parsed()) {
      mcf::RationalSeq seq =
          detail::arg([&] { return mcf::parse_rational_seq(ga_seq); });
      gauss::QgDiskReport r = gauss::qg_disk_check(
          seq, ga_block, ga_r, cfg.boundary_samples, cfg.interior_samples);
      Json j = make_report("gauss-qg-disk");
      j["pass"] = r.pass;
      j["block"] = r.block;
      j["m"] = r.m;
      j["part_a_modulus_margin"] = r.part_a_modulus_margin;
      j["part_a_cone_margin"] = r.part_a_cone_margin;
      j["part_b_modulus_margin"] = r.part_b_modulus_margin;
      j["part_a_vacuous"] = r.part_a_vacuous;
      j["samples"] = r.samples_used;
      detail::emit(j, out_path);
      return r.pass ? 0 : 1;
    }

    // --- maps ---
    if (mp_fp->parsed()) {
      maps::FixedPointData fp = maps::fixed_point_data(
          maps::Quadratic{detail::parse_complex(mp_alpha)}, cfg);
      Json j = make_report("maps-fixed-point");
      j.update(detail::json_fp(fp));
      detail::emit(j, out_path);
      return 0;
    }
    if (mp_per->parsed()) {
      maps::PeriodicPointsResult pr = maps::periodic_points(
          maps::Quadratic{detail::parse_complex(mp_alpha)}, mp_q, mp_heuristic,
          cfg);
      Json j = make_report("maps-periodic");
      j["period"] = pr.period;
      j["complete"] = pr.complete;
      Json cycles = Json::array();
      for (const auto& c : pr.cycles) {
        Json cj;
        cj["period"] = c.period;
        cj["multiplier"] = json_complex(c.multiplier);
        cj["residual"] = c.residual;
        Json pts = Json::array();
        for (ComplexVal z : c.points) pts.push_back(json_complex(z));
        cj["points"] = std::move(pts);
        cycles.push_back(std::move(cj));
      }
      j["cycles"] = std::move(cycles);
      detail::emit(j, out_path);
      return 0;
    }
    if (mp_div->parsed()) {
      Rational pq = detail::arg([&] { return mcf::parse_rational(mp_pq); });
      maps::DividingMultiplierReport r = maps::dividing_multiplier_check(
          detail::parse_complex(mp_alpha), pq, mp_k, cfg);
      Json j = make_report("maps-dividing");
      j["nu"] = json_complex(r.nu);
      j["disk"] = json_disk(r.disk);
      j["member"] = r.member;
      j["boundary_distance"] = r.boundary_distance;
      j["ambiguous"] = r.ambiguous;
      detail::emit(j, out_path);
      return r.member ? 0 : 1;
    }
    if (mp_sat->parsed()) {
      maps::SatelliteParameter sp = maps::satellite_parameter(
          mp_p, mp_q, detail::parse_complex(mp_target), cfg);
      Json j = make_report("maps-satellite");
      j["alpha"] = json_complex(sp.alpha);
      j["mu"] = json_complex(sp.mu);
      j["residual"] = sp.residual;
      detail::emit(j, out_path);
      return 0;
    }

    // --- fatou ---
    if (fa_coord->parsed()) {
      fatou::FatouApprox fa = fatou::make_fatou(
          maps::Quadratic{detail::parse_complex(fa_alpha)},
          detail::parse_mode(fa_mode), detail::parse_end(fa_end), cfg);
      Json j = make_report("fatou-coord");
      j["phi"] = json_complex(fatou::fatou_coord(fa, detail::parse_complex(fa_z)));
      detail::emit(j, out_path);
      return 0;
    }
    if (fa_grid->parsed()) {
      fatou::FatouApprox fa = fatou::make_fatou(
          maps::Quadratic{detail::parse_complex(fa_alpha)},
          detail::parse_mode(fa_mode), fatou::End::Zero, cfg);
      std::string csv = "z_re,z_im,phi_re,phi_im,residual\n";
      for (ComplexVal z : fatou::petal_grid_nodes(fa, fa_n)) {
        ComplexVal phi = fatou::fatou_coord(fa, z);
        ComplexVal res = fatou::fatou_coord(fa, fa.f(z)) - phi - 1.0;
        csv += format_double(z.real()) + "," + format_double(z.imag()) + "," +
               format_double(phi.real()) + "," + format_double(phi.imag()) +
               "," + format_double(std::abs(res)) + "\n";
      }
      detail::emit_text(csv, out_path);
      return 0;
    }
    if (fa_width->parsed()) {
      fatou::FatouApprox fa = fatou::make_fatou(
          maps::Quadratic{detail::parse_complex(fa_alpha)},
          fatou::FatouMode::Refined, fatou::End::Zero, cfg);
      fatou::PetalWidthReport r = fatou::petal_width_probe(fa, cfg);
      Json j = make_report("fatou-width");
      j["width"] = r.width;
      j["re_inv_alpha"] = r.re_inv_alpha;
      j["x_lo"] = r.x_lo;
      j["x_hi"] = r.x_hi;
      j["margin_ok"] = r.margin_ok;
      j["steps"] = r.steps;
      detail::emit(j, out_path);
      return r.margin_ok ? 0 : 1;
    }
    if (fa_spiral->parsed()) {
      fatou::FatouApprox fa = fatou::make_fatou(
          maps::Quadratic{detail::parse_complex(fa_alpha)},
          fatou::FatouMode::Refined, fatou::End::Zero, cfg);
      fatou::SpiralReport r = fatou::spiral_probe(fa, fa_xi1, fa_xi2, cfg);
      Json j = make_report("fatou-spiral");
      j["samples"] = r.samples;
      j["limit_estimate"] = r.limit_estimate;
      j["c_f"] = r.c_f;
      j["bound"] = r.bound;
      j["within_bound"] = r.within_bound;
      j["settle"] = r.settle;
      detail::emit(j, out_path);
      return r.within_bound ? 0 : 1;
    }

    // --- renorm ---
    if (rn_rot->parsed()) {
      Json j = make_report("renorm-rotation");
      if (rn_alpha.find('/') != std::string::npos) {
        Rational x = detail::arg([&] { return mcf::parse_rational(rn_alpha); });
        j["next"] = mcf::format_rational(renorm::renorm_rotation_top(x));
      } else {
        j["next"] = json_complex(
            renorm::renorm_rotation_top(detail::parse_complex(rn_alpha)));
      }
      detail::emit(j, out_path);
      return 0;
    }
    if (rn_sample->parsed()) {
      fatou::End end = detail::parse_end(rn_end);
      fatou::FatouApprox fa = fatou::make_fatou(
          maps::Quadratic{detail::parse_complex(rn_alpha)},
          fatou::FatouMode::Refined, end, cfg);
      renorm::RenormSample rs = renorm::renorm_sample(fa, end, cfg);
      Json j = make_report("renorm-sample");
      j["derivative_at_0"] = json_complex(rs.derivative_at_0);
      j["target"] = json_complex(rs.target);
      j["rel_error"] = rs.rel_error;
      j["deriv_ok"] = rs.deriv_ok;
      j["c2"] = json_complex(rs.c2);
      j["k_max"] = rs.k_iterates;
      Json hist;
      for (const auto& [k, n] : rs.k_histogram) hist[std::to_string(k)] = n;
      j["k_histogram"] = std::move(hist);
      j["scale"] = rs.scale;
      j["fit_residual_max"] = rs.residuals.max;
      j["well_def_residual"] = rs.well_def_residual;
      detail::emit(j, out_path);
      return rs.deriv_ok ? 0 : 1;
    }
    if (rn_reg->parsed()) {
      fatou::FatouApprox fa = fatou::make_fatou(
          maps::Quadratic{detail::parse_complex(rn_alpha)},
          fatou::FatouMode::Refined, fatou::End::Zero, cfg);
      renorm::SectorRegions sr = renorm::sector_regions(fa);
      auto [cls, phi] = sr.classify(detail::parse_complex(rn_z));
      Json j = make_report("renorm-regions");
      j["class"] = renorm::region_name(cls);
      j["phi"] = json_complex(phi);
      detail::emit(j, out_path);
      return 0;
    }

    // --- tower ---
    if (tw_run->parsed()) {
      tower::TowerSeed seed = detail::arg([&] { return detail::parse_seed(tw_seed); });
      tower::TypeSeq kappa =
          detail::arg([&] { return tower::TypeSeq::parse(tw_kappa); });
      tower::TowerState st = tower::tower_run(
          seed, kappa, tw_depth, detail::parse_tower_mode(tw_mode), tw_r, cfg);
      detail::emit(detail::json_tower(st), out_path);
      return st.status == tower::TowerStatus::DepthReached ? 0 : 1;
    }
    if (tw_cantor->parsed()) {
      auto seed = detail::arg([&] { return detail::parse_real_seed(tw_seed); });
      auto comps = tower::cantor_bisect(seed, tw_depth, tw_r, cfg);
      Json j = make_report("tower-cantor");
      Json arr = Json::array();
      for (const auto& c : comps) {
        Json cj;
        cj["depth"] = c.depth;
        cj["lo"] = mcf::format_rational(c.lo);
        cj["hi"] = mcf::format_rational(c.hi);
        cj["diameter"] = c.diameter;
        arr.push_back(std::move(cj));
      }
      j["components"] = std::move(arr);
      detail::emit(j, out_path);
      return 0;
    }
    if (tw_qg->parsed()) {
      mcf::RationalSeq seq =
          detail::arg([&] { return mcf::parse_rational_seq(tw_seq); });
      std::size_t dk = tw_depth_k == 0 ? seq.size() : tw_depth_k;
      tower::QgInclusionReport r =
          tower::qg_inclusion_check(seq, tw_n, dk, tw_r3, tw_r5, cfg);
      Json j = make_report("tower-qg-check");
      j["pass"] = r.pass;
      Json blocks = Json::array();
      for (const auto& b : r.blocks) {
        Json bj;
        bj["block"] = b.block;
        bj["disk_pass"] = b.disk.pass;
        bj["part_a_modulus_margin"] = b.disk.part_a_modulus_margin;
        bj["part_a_cone_margin"] = b.disk.part_a_cone_margin;
        bj["part_b_modulus_margin"] = b.disk.part_b_modulus_margin;
        bj["beta_gate_checked"] = b.beta_gate_checked;
        bj["beta_gate_vacuous"] = b.beta_gate_vacuous;
        bj["beta_gate_pass"] = b.beta_gate_pass;
        bj["pass"] = b.pass;
        blocks.push_back(std::move(bj));
      }
      j["blocks"] = std::move(blocks);
      j["b1"] = r.b1;
      j["b1_samples"] = r.b1_samples;
      detail::emit(j, out_path);
      return r.pass ? 0 : 1;
    }

    // --- selftest / config ---
    if (st_cmd->parsed()) {
      Json j = selftest::run_selftest(cfg);
      bool pass = j["pass"].get<bool>();
      detail::emit(j, out_path);
      return pass ? 0 : 1;
    }
    if (cfg_show->parsed() || cfg_cmd->parsed()) {
      Json j = make_report("config");
      Json entries;
      cfg.for_each_entry([&](const char* k, const auto& v) { entries[k] = v; });
      j["entries"] = std::move(entries);
      detail::emit(j, out_path);
      return 0;
    }

    fail(ErrorCode::UsageError, "no operation selected");
  } catch (const Error& e) {
    Json j;
    j["error"] = error_code_name(e.code());
    j["what"] = e.what();
    std::cerr << j.dump() << "\n";
    return e.code() == ErrorCode::UsageError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "{\"error\":\"unhandled\",\"what\":\"" << e.what() << "\"}\n";
    return 1;
  }
}

}  // namespace pararenorm::cli
