#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "dpip/distribution.hpp"
#include "dpip/protocol.hpp"

namespace dpip {

/// Verifier message algorithm A(S, r): deterministic in the sample and the
/// seed, over an explicitly enumerable seed space.
struct MessageAlg {
  std::size_t sample_size = 0;
  std::size_t seed_space = 16;  // |R|, capped at 2^16
  std::function<std::int64_t(std::span<const std::int64_t>, std::uint64_t)>
      message;
};

/// Decision algorithm A'(T, S, r, r'): deterministic given all four inputs;
/// r' is the fresh randomness drawn for the decision, passed as a seed.
struct DecisionAlg {
  std::function<bool(std::int64_t m, std::int64_t m_prime,
                     std::span<const std::int64_t>, std::uint64_t r,
                     std::uint64_t r_prime)>
      decide;
};

/// One-round private-coin protocol shape: verifier sends m = A(S, r), the
/// honest prover replies m' = f(m, D), the verifier decides A'(T, S, r, r').
struct PrivateCoinProtocol {
  MessageAlg message_alg;
  std::function<std::int64_t(std::int64_t, const Distribution&)> honest_reply;
  DecisionAlg decision_alg;
};

struct ReplicabilityEstimate {
  double rho_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
};

/// Empirical estimate of Pr[A(S,r) != A(S',r)] over fresh sample pairs and
/// uniform seeds, with a Wilson interval.
ReplicabilityEstimate measure_replicability(const MessageAlg& alg,
                                            const Distribution& d,
                                            std::size_t sample_size,
                                            std::size_t trials,
                                            NoiseSource& rng);

/// The derandomized decision: enumerate every seed r, restrict to those
/// with A(S, r) = m, and accept iff at least half of them accept under A'.
/// An empty condition rejects.
bool derandomized_decision(std::int64_t m, std::int64_t m_prime,
                           std::span<const std::int64_t> s,
                           std::uint64_t r_prime, const MessageAlg& alg,
                           const DecisionAlg& decision);

/// One honest execution of the private-coin protocol.
bool run_private_protocol(const PrivateCoinProtocol& p, const Distribution& d,
                          NoiseSource& rng);

/// The public-coin conversion: the verifier sends only the seed r; the
/// prover draws its own sample, recomputes the verifier message and its
/// reply; the verifier rejects on any message mismatch with its own
/// A(S, r) and otherwise applies the derandomized decision. When the
/// source protocol meets a 0.99/0.01 contract, completeness is at least
/// 0.98 - rho and soundness at most 0.02.
class ReplicableAmProtocol : public Protocol {
 public:
  explicit ReplicableAmProtocol(PrivateCoinProtocol p);
  std::string name() const override { return "replicable-am"; }
  Transcript run(const Distribution& d, ProverStrategy& prover,
                 NoiseSource& rng) const override;
  const PrivateCoinProtocol& source() const { return p_; }

 private:
  PrivateCoinProtocol p_;
};

std::unique_ptr<ProverStrategy> make_honest_am_strategy(
    PrivateCoinProtocol p);
std::vector<std::unique_ptr<ProverStrategy>> make_am_adversary_pool(
    PrivateCoinProtocol p);

/// Concrete fixture exercising the reduction: A reports the heavy element
/// of its sample when one clears an r-jittered frequency threshold, the
/// honest prover confirms the element's mass, and the decision rechecks
/// the frequency on the verifier's own sample. Calibrated to 0.99/0.01 on
/// the instance pair from toy_instances.
PrivateCoinProtocol toy_private_protocol(std::size_t n, double sigma);

/// (satisfying instance, far instance) for the fixture: a distribution
/// with one dominant element, and uniform.
std::pair<Distribution, Distribution> toy_instances(std::size_t n,
                                                    double sigma);

}  // namespace dpip
