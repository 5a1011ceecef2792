#pragma once

// Run-wide knobs: tolerances, empirical constants, sampling densities,
// output options.  Defaults are pinned here; a key=value file named by
// PARA_RENORM_CONFIG (or --config) overrides individual entries.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "pararenorm/errors.hpp"

namespace pararenorm {

struct RunConfig {
  // Sector radii used by the proof-pipeline shadows.
  double r3_proxy = 0.1;
  double r5_proxy = 0.05;
  std::int64_t N_default = 20;

  // Empirical constants (growth/distortion/petal geometry).
  double growth_C = 2.0;
  double distortion_C1 = 50.0;
  double d5_proxy = 2.0;      // Theta exclusion radius for lift domains
  double pole_safety = 0.3;   // hard exclusion around covering poles
  double petal_margin = 10.0; // expected |width - Re(1/alpha)| bound

  // Abel-limit / Newton iteration controls.
  double abel_tol_refined = 1e-9;
  double abel_tol_model = 5e-3;
  double newton_tol = 1e-11;
  double eps_imag = 1e-3;  // imaginary perturbation for real rotations
  std::int64_t iter_cap = 1000000;
  int ecalle_k_cap = 100;

  // Quadrature / sampling densities.
  int contour_n = 512;
  int boundary_samples = 64;
  int interior_samples = 16;
  int ring_radii = 4;
  int ring_angles = 12;

  // Residual gates.
  double fatou_residual_refined = 1e-6;
  double fatou_residual_model = 0.3;
  double renorm_deriv_tol = 1e-2;  // relative multiplier agreement
  double projection_tol = 1e-7;    // exp-projection well-definedness
  double spiral_kprime = 3.0;      // |c_f| <= kprime (1 - log|alpha|)
  double cantor_mu_proxy = 0.1;    // per-depth diameter contraction bound

  // Output / execution.
  int workers = 1;
  std::string out_format = "json";

  template <typename Fn>
  void for_each_entry(Fn&& fn) const {
    fn("r3_proxy", r3_proxy);
    fn("r5_proxy", r5_proxy);
    fn("N_default", N_default);
    fn("growth_C", growth_C);
    fn("distortion_C1", distortion_C1);
    fn("d5_proxy", d5_proxy);
    fn("pole_safety", pole_safety);
    fn("petal_margin", petal_margin);
    fn("abel_tol_refined", abel_tol_refined);
    fn("abel_tol_model", abel_tol_model);
    fn("newton_tol", newton_tol);
    fn("eps_imag", eps_imag);
    fn("iter_cap", iter_cap);
    fn("ecalle_k_cap", ecalle_k_cap);
    fn("contour_n", contour_n);
    fn("boundary_samples", boundary_samples);
    fn("interior_samples", interior_samples);
    fn("ring_radii", ring_radii);
    fn("ring_angles", ring_angles);
    fn("fatou_residual_refined", fatou_residual_refined);
    fn("fatou_residual_model", fatou_residual_model);
    fn("renorm_deriv_tol", renorm_deriv_tol);
    fn("projection_tol", projection_tol);
    fn("spiral_kprime", spiral_kprime);
    fn("cantor_mu_proxy", cantor_mu_proxy);
    fn("workers", workers);
    fn("out_format", out_format);
  }

  void set(const std::string& key, const std::string& value) {
    auto as_d = [&] { return std::stod(value); };
    auto as_i = [&] { return std::stoll(value); };
    try {
      if (key == "r3_proxy") r3_proxy = as_d();
      else if (key == "r5_proxy") r5_proxy = as_d();
      else if (key == "N_default") N_default = as_i();
      else if (key == "growth_C") growth_C = as_d();
      else if (key == "distortion_C1") distortion_C1 = as_d();
      else if (key == "d5_proxy") d5_proxy = as_d();
      else if (key == "pole_safety") pole_safety = as_d();
      else if (key == "petal_margin") petal_margin = as_d();
      else if (key == "abel_tol_refined") abel_tol_refined = as_d();
      else if (key == "abel_tol_model") abel_tol_model = as_d();
      else if (key == "newton_tol") newton_tol = as_d();
      else if (key == "eps_imag") eps_imag = as_d();
      else if (key == "iter_cap") iter_cap = as_i();
      else if (key == "ecalle_k_cap") ecalle_k_cap = static_cast<int>(as_i());
      else if (key == "contour_n") contour_n = static_cast<int>(as_i());
      else if (key == "boundary_samples") boundary_samples = static_cast<int>(as_i());
      else if (key == "interior_samples") interior_samples = static_cast<int>(as_i());
      else if (key == "ring_radii") ring_radii = static_cast<int>(as_i());
      else if (key == "ring_angles") ring_angles = static_cast<int>(as_i());
      else if (key == "fatou_residual_refined") fatou_residual_refined = as_d();
      else if (key == "fatou_residual_model") fatou_residual_model = as_d();
      else if (key == "renorm_deriv_tol") renorm_deriv_tol = as_d();
      else if (key == "projection_tol") projection_tol = as_d();
      else if (key == "spiral_kprime") spiral_kprime = as_d();
      else if (key == "cantor_mu_proxy") cantor_mu_proxy = as_d();
      else if (key == "workers") workers = static_cast<int>(as_i());
      else if (key == "out_format") out_format = value;
      else fail(ErrorCode::UsageError, "unknown config key '" + key + "'");
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail(ErrorCode::UsageError, "bad value for config key '" + key + "'");
    }
  }

  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open config file '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
      if (!key.empty()) set(key, val);
    }
  }

  static RunConfig from_environment() {
    RunConfig cfg;
    if (const char* path = std::getenv("PARA_RENORM_CONFIG"))
      if (*path) cfg.load_file(path);
    return cfg;
  }
};

}  // namespace pararenorm
