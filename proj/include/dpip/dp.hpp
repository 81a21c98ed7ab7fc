#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dpip/noise.hpp"

namespace dpip {

struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 0.0;
};

/// Checks epsilon > 0 and 0 <= delta < 1; throws std::invalid_argument.
void validate(const PrivacyParams& params);

/// value + Lap(0, scale). A deterministic passthrough handles the
/// zero-noise limit (scale < 1e-15).
double laplace_release(double value, double scale, NoiseSource& rng);

enum class PtrOutcome { pass, reject };

/// Propose-test-release gate on a sensitivity-1 statistic: reject iff
/// stat + Lap(0, 1/eps) > delta_bound - log(1/delta)/eps.
/// The proposed bound must exceed the noise margin log(1/delta)/eps.
PtrOutcome ptr_gate(double stat, double delta_bound,
                    const PrivacyParams& params, NoiseSource& rng);

/// Basic composition: sums of epsilons and deltas.
PrivacyParams compose(const std::vector<double>& eps_list,
                      const std::vector<double>& delta_list);

/// Decision mechanism under audit: dataset plus fresh randomness to a
/// single accept/reject bit.
using DecisionMechanism =
    std::function<bool(const std::vector<std::int64_t>&, NoiseSource&)>;

struct AuditReport {
  double p_hat = 0.0;        // Pr[accept | x]
  double p_hat_prime = 0.0;  // Pr[accept | x']
  double bound = 0.0;        // worst slack across the four checks; > 0 flags
  bool violated = false;
  std::size_t trials = 0;
  std::string to_json() const;
};

/// Empirical check of the e^eps bound over adjacent datasets: estimates
/// acceptance probabilities on x and x' and flags a violation when
/// p > e^eps q + delta + 4 * (combined standard error), in both directions
/// and for both outcomes. A test utility, not a proof.
AuditReport audit_dp_decision(const DecisionMechanism& mechanism,
                              const std::vector<std::int64_t>& x,
                              const std::vector<std::int64_t>& x_prime,
                              const PrivacyParams& params, std::size_t trials,
                              NoiseSource& rng);

}  // namespace dpip
