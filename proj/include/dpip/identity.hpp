#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dpip/distribution.hpp"
#include "dpip/noise.hpp"
#include "dpip/protocol.hpp"

namespace dpip {

/// A sampling tester: the decision depends only on the drawn sample (and
/// fresh randomness), never on how the sample was obtained.
struct TesterSpec {
  std::size_t sample_size = 0;
  double error_prob = 1.0 / 6.0;
  std::function<bool(std::span<const std::int64_t>, NoiseSource&)> decide;
};

/// Calibrated sample schedule s(N, sigma) = ceil(coeff * sqrt(N) / sigma^2).
std::size_t identity_sample_size(std::size_t n, double sigma);

/// Acceptance threshold on the empirical-TV statistic for sample size s
/// against a reference over [N]: the configured null quantile of the
/// statistic under a uniform source, estimated once by Monte Carlo with a
/// deterministic seed and cached.
double identity_threshold(std::size_t n, double sigma, std::size_t s);

/// Same, for the two-sample statistic tv(emp(sample), emp(reference
/// sample)) with sizes (s, s_ref).
double two_sample_threshold(std::size_t n, std::size_t s, std::size_t s_ref);

/// Empirical distribution distance to a known pmf; elements outside the
/// domain count as pure extra mass.
double empirical_tv_statistic(std::span<const std::int64_t> sample,
                              const Distribution& q);
double empirical_two_sample_tv(std::span<const std::int64_t> sample,
                               std::span<const std::int64_t> reference,
                               std::size_t n);

/// Plug-in identity tester: accept iff the empirical TV distance to q stays
/// below the calibrated threshold. Accepts with probability >= 5/6 under q
/// and rejects >= 5/6 when the source is sigma-far, at the calibrated
/// sample size.
bool identity_test_nonprivate(std::span<const std::int64_t> sample,
                              const Distribution& q, double sigma);

/// Generic privatization wrapper: draw ceil(6/eps) * s samples, run the
/// inner tester on a uniformly chosen block, flip the answer with
/// probability 1/6. The result is eps-DP with error at most 1/3.
TesterSpec privatize_tester(const TesterSpec& inner, double epsilon);

/// Convenience composition of the two: requires sample.size() >=
/// ceil(6/eps) * s(N, sigma).
bool dp_identity_test(std::span<const std::int64_t> sample,
                      const Distribution& q, double sigma, double epsilon,
                      NoiseSource& rng);
std::size_t dp_identity_sample_size(std::size_t n, double sigma,
                                    double epsilon);

/// AM tester: data-independent communication already reduced to a
/// transcript, then a sampling decision.
struct AmTesterSpec {
  std::size_t sample_size = 0;
  double error_prob = 1.0 / 6.0;
  std::function<bool(const std::vector<Message>&,
                     std::span<const std::int64_t>, NoiseSource&)>
      decide;
};

/// The same wrapper lifted to AM protocols: transcript schema and
/// communication are untouched; only the sample inflates and the final
/// answer flips with probability 1/6. With an empty transcript this is
/// exactly privatize_tester.
AmTesterSpec privatize_am_tester(const AmTesterSpec& inner, double epsilon);

/// Calibration table persistence: CSV rows
/// (kind, n, sigma, s, s_ref, threshold). Thresholds not present in the
/// table are computed on demand (deterministically) and cached.
std::string calibration_table_csv();
void load_calibration_table_csv(const std::string& text);
void clear_calibration_cache();

}  // namespace dpip
