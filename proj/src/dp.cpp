#include "dpip/dp.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace dpip {

void validate(const PrivacyParams& params) {
  if (!(params.epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  if (!(params.delta >= 0.0 && params.delta < 1.0)) {
    throw std::invalid_argument("delta must lie in [0,1)");
  }
}

double laplace_release(double value, double scale, NoiseSource& rng) {
  if (!(scale >= 0.0)) throw std::invalid_argument("scale must be positive");
  if (scale < 1e-15) return value;
  return value + rng.laplace(scale);
}

PtrOutcome ptr_gate(double stat, double delta_bound,
                    const PrivacyParams& params, NoiseSource& rng) {
  validate(params);
  if (!(params.delta > 0.0)) {
    throw std::invalid_argument("ptr_gate requires delta > 0");
  }
  if (!(stat >= 0.0)) throw std::invalid_argument("stat must be non-negative");
  const double margin = std::log(1.0 / params.delta) / params.epsilon;
  if (!(delta_bound > margin)) {
    throw std::invalid_argument("proposed bound does not exceed noise margin");
  }
  const double noisy = stat + rng.laplace(1.0 / params.epsilon);
  return noisy > delta_bound - margin ? PtrOutcome::reject : PtrOutcome::pass;
}

PrivacyParams compose(const std::vector<double>& eps_list,
                      const std::vector<double>& delta_list) {
  if (eps_list.empty() || eps_list.size() != delta_list.size()) {
    throw std::invalid_argument("compose: non-empty equal-length lists required");
  }
  PrivacyParams total{0.0, 0.0};
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) {
      throw std::invalid_argument("compose: epsilons must be positive");
    }
    total.epsilon += eps_list[i];
    total.delta += delta_list[i];
  }
  return total;
}

std::string AuditReport::to_json() const {
  nlohmann::json j;
  j["p_hat"] = p_hat;
  j["p_hat_prime"] = p_hat_prime;
  j["bound"] = bound;
  j["violated"] = violated;
  j["trials"] = trials;
  return j.dump();
}

namespace {

std::size_t count_diffs(const std::vector<std::int64_t>& x,
                        const std::vector<std::int64_t>& y) {
  std::size_t diffs = 0;
  for (std::size_t i = 0; i < x.size(); ++i) diffs += x[i] != y[i];
  return diffs;
}

}  // namespace

AuditReport audit_dp_decision(const DecisionMechanism& mechanism,
                              const std::vector<std::int64_t>& x,
                              const std::vector<std::int64_t>& x_prime,
                              const PrivacyParams& params, std::size_t trials,
                              NoiseSource& rng) {
  validate(params);
  if (x.size() != x_prime.size() || count_diffs(x, x_prime) != 1) {
    throw std::invalid_argument("audit requires adjacent datasets (swap-one)");
  }
  if (trials < 10000) {
    throw std::invalid_argument("audit requires at least 10^4 trials");
  }

  std::size_t accepts_x = 0, accepts_xp = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    NoiseSource trial_rng = rng.split(2 * t);
    accepts_x += mechanism(x, trial_rng) ? 1 : 0;
    NoiseSource trial_rng_p = rng.split(2 * t + 1);
    accepts_xp += mechanism(x_prime, trial_rng_p) ? 1 : 0;
  }

  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(accepts_x) / n;
  const double q = static_cast<double>(accepts_xp) / n;
  const double e_eps = std::exp(params.epsilon);

  // Slack of one direction of the e^eps bound: positive means violated
  // beyond Monte-Carlo error. Combined SE folds the e^eps scaling of the
  // right-hand side estimate.
  auto slack = [&](double lhs, double rhs) {
    const double se_l = std::sqrt(lhs * (1.0 - lhs) / n);
    const double se_r = std::sqrt(rhs * (1.0 - rhs) / n);
    const double se = std::sqrt(se_l * se_l + e_eps * e_eps * se_r * se_r);
    return lhs - (e_eps * rhs + params.delta + 4.0 * se);
  };

  AuditReport report;
  report.p_hat = p;
  report.p_hat_prime = q;
  report.trials = trials;
  double worst = slack(p, q);
  worst = std::max(worst, slack(q, p));
  worst = std::max(worst, slack(1.0 - p, 1.0 - q));
  worst = std::max(worst, slack(1.0 - q, 1.0 - p));
  report.bound = worst;
  report.violated = worst > 0.0;
  return report;
}

}  // namespace dpip
