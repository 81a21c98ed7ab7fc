#include "dpip/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace dpip {

namespace {

std::int64_t quantize(double x, double scale) {
  return static_cast<std::int64_t>(std::llround(x * scale));
}

DeskConfig::RetrievalKey make_key(bool private_variant, std::size_t n,
                                  double sigma, double eps, double delta) {
  return {private_variant, n, quantize(sigma, 1e6), quantize(eps, 1e6),
          quantize(delta, 1e9)};
}

DeskConfig make_default_config() {
  DeskConfig cfg;
  // Calibration sweep results for the desk test points (powers of two in s,
  // smallest achieving >= 0.75 honest acceptance while the adversary pool
  // stays <= 0.25).
  cfg.retrieval_table[make_key(true, 256, 0.3, 1.0, 1e-4)] =
      RetrievalCalibration{64, 2.0, 3.0, 3.0};
  cfg.retrieval_table[make_key(true, 64, 0.3, 1.0, 1e-4)] =
      RetrievalCalibration{32, 2.0, 3.0, 3.0};
  cfg.retrieval_table[make_key(false, 256, 0.3, 0.0, 0.0)] =
      RetrievalCalibration{256, 200000.0, 0.0, 0.0};
  cfg.retrieval_table[make_key(false, 64, 0.3, 0.0, 0.0)] =
      RetrievalCalibration{64, 200000.0, 0.0, 0.0};
  return cfg;
}

}  // namespace

RetrievalCalibration DeskConfig::retrieval_calibration(bool private_variant,
                                                       std::size_t n,
                                                       double sigma, double eps,
                                                       double delta) const {
  // Non-private entries are keyed with eps = delta = 0.
  const auto it = retrieval_table.find(
      make_key(private_variant, n, sigma, private_variant ? eps : 0.0,
               private_variant ? delta : 0.0));
  if (it != retrieval_table.end()) return it->second;
  // Fallback heuristic: seed size near N^(3/4) (power of two) keeps the
  // over-3 collision rejection rare; bands as in the nearest desk point.
  RetrievalCalibration cal;
  double s = std::pow(static_cast<double>(n), 0.75);
  std::size_t pow2 = 16;
  while (pow2 * 2 <= static_cast<std::size_t>(s) && pow2 < 4096) pow2 *= 2;
  cal.s = pow2;
  if (private_variant) {
    cal.band_scale = 2.0;
    cal.pair_noise_allowance = 3.0;
    cal.triple_noise_allowance = 3.0;
  } else {
    cal.band_scale = 200000.0;
  }
  return cal;
}

DeskConfig& desk_config() {
  static DeskConfig cfg = make_default_config();
  return cfg;
}

void load_desk_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  DeskConfig& cfg = desk_config();
  for (const auto& [key, value] : j.items()) {
    if (key == "identity_coeff") {
      cfg.identity_coeff = value.get<double>();
    } else if (key == "identity_null_quantile") {
      cfg.identity_null_quantile = value.get<double>();
    } else if (key == "identity_calibration_draws") {
      cfg.identity_calibration_draws = value.get<std::size_t>();
    } else if (key == "argument_opening_divisor") {
      cfg.argument_opening_divisor = value.get<std::size_t>();
    } else if (key == "argument_output_samples") {
      cfg.argument_output_samples = value.get<std::size_t>();
    } else if (key == "tag_quality_c1") {
      cfg.tag_quality_c1 = value.get<double>();
    } else if (key == "tag_quality_c2") {
      cfg.tag_quality_c2 = value.get<double>();
    } else if (key == "retrieval") {
      for (const auto& entry : value) {
        RetrievalCalibration cal;
        cal.s = entry.at("s").get<std::size_t>();
        cal.band_scale = entry.value("band_scale", 1.0);
        cal.pair_noise_allowance = entry.value("pair_noise_allowance", 0.0);
        cal.triple_noise_allowance =
            entry.value("triple_noise_allowance", 0.0);
        const bool priv = entry.at("private").get<bool>();
        cfg.retrieval_table[make_key(
            priv, entry.at("n").get<std::size_t>(),
            entry.at("sigma").get<double>(),
            priv ? entry.at("eps").get<double>() : 0.0,
            priv ? entry.at("delta").get<double>() : 0.0)] = cal;
      }
    } else {
      throw std::runtime_error("unknown config key: " + key);
    }
  }
}

}  // namespace dpip
