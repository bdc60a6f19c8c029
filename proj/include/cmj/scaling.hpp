#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cmj {

struct ScalingConfig {
  std::string law = "geometric";
  std::vector<double> p = {1e3, 1e4};
  std::vector<double> t = {1.0};
  std::size_t replicates = 50;
  std::uint64_t seed = 1;
  /// eps_p = p^-e; defaults to 1/2, or 1 - 1/alpha for the stable families.
  std::optional<double> eps_exponent;
  double u = 0.5, v = 1.0;  // interval for the contour minima
  double horizon = 1.0;     // rescaled window for the max-increment diagnostic
  std::optional<double> mean_ystar;
  std::size_t ystar_samples = 100000;
};

/// key = value lines, '#' starts a comment. Errors name the line.
ScalingConfig parse_scaling_config(std::string_view text);

struct ScalingRow {
  double p = 0.0, t = 0.0;
  std::size_t replicate = 0;
  double Hp = 0.0, Hcalp = 0.0, Cp = 0.0, Sp = 0.0, phip = 0.0, phibarp = 0.0;
  double deltaH = 0.0, deltaC = 0.0, epsDelta = 0.0;
  double H_at_phi_inf = 0.0;  // eps H([pt / 2 beta])
  double v_phibar = 0.0;
  bool delta_formula_ok = true;
};

struct ScalingExtra {
  double p = 0.0;
  std::size_t replicate = 0;
  std::size_t sticks = 0;
  double minC = 0.0, minCcal = 0.0, maxinc = 0.0;
  int heights_equal = -1;  // -1 when the law does not force equality
  int contour_equal = -1;
};

struct ScalingResult {
  ScalingConfig config;
  double beta_star = 0.0;
  double alpha_star = 0.0, alpha_star_se = 0.0;
  bool alpha_exact = false;
  double eps_exponent = 0.5;
  std::vector<ScalingRow> rows;      // sorted by (p, replicate, t)
  std::vector<ScalingExtra> extras;  // sorted by (p, replicate)
  std::size_t height_failures = 0, contour_failures = 0, delta_failures = 0;

  bool ok() const { return height_failures == 0 && contour_failures == 0 && delta_failures == 0; }
};

ScalingResult run_scaling(const ScalingConfig& cfg, unsigned workers = 1);

std::string rows_csv(const ScalingResult& r);
std::string extras_csv(const ScalingResult& r);
std::string summary_json(const ScalingResult& r);

}  // namespace cmj
