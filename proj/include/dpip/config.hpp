#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>

namespace dpip {

/// Desk-scale widening of the retrieval check bands. The asymptotic
/// analysis hides constants in the (1 +- tau) tolerances and absorbs an
/// additive noise term; these knobs make both explicit. band_scale
/// multiplies the relative tolerance and *_noise_allowance adds that many
/// noise scales of absolute slack. (1, 0, 0) reproduces the written-down
/// checks verbatim.
struct RetrievalCalibration {
  std::size_t s = 64;
  double band_scale = 1.0;
  double pair_noise_allowance = 0.0;
  double triple_noise_allowance = 0.0;
};

struct DeskConfig {
  // Identity tester schedule s = ceil(coeff * sqrt(N) / sigma^2) and the
  // null quantile used when calibrating its acceptance threshold.
  double identity_coeff = 48.0;
  double identity_null_quantile = 11.0 / 12.0;
  std::size_t identity_calibration_draws = 3000;

  // Argument protocol: committed-oracle openings per identity round are
  // s / opening_divisor, and the output set size.
  std::size_t argument_opening_divisor = 8;
  std::size_t argument_output_samples = 64;

  // Tag-quality acceptance thresholds: honest heavy error <= c1 * sigma^3,
  // accepted-adversary heavy error <= c2 * sigma.
  double tag_quality_c1 = 1.0;
  double tag_quality_c2 = 2.0;

  // Calibrated retrieval entries keyed by
  // (private?, N, round(sigma*1e6), round(eps*1e6), round(delta*1e9)).
  using RetrievalKey =
      std::tuple<bool, std::size_t, std::int64_t, std::int64_t, std::int64_t>;
  std::map<RetrievalKey, RetrievalCalibration> retrieval_table;

  RetrievalCalibration retrieval_calibration(bool private_variant,
                                             std::size_t n, double sigma,
                                             double eps, double delta) const;
};

/// Process-wide configuration; defaults carry the calibrated desk values.
DeskConfig& desk_config();

/// Replaces fields present in the JSON file; unknown keys are rejected.
void load_desk_config(const std::string& path);

}  // namespace dpip
