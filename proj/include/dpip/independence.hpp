#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "dpip/distribution.hpp"
#include "dpip/protocol.hpp"

namespace dpip {

struct IndependenceInstance {
  ProductDomain dom;
  Distribution d;  // flattened
  double sigma = 0.3;
};

/// Exact marginals of the true distribution, as the honest prover sends.
Marginals honest_marginal_prover(const Distribution& d,
                                 const ProductDomain& dom);

/// One-message protocol: prover sends concatenated marginals, verifier
/// builds the induced product distribution and runs the eps-DP identity
/// test against it on a fresh sample. Malformed marginals reject.
/// Completeness >= 0.75 for product distributions with the honest prover;
/// soundness <= 0.25 acceptance when the source is sigma-far from every
/// product distribution.
class IndependenceProtocol : public Protocol {
 public:
  IndependenceProtocol(ProductDomain dom, double sigma, double epsilon);

  std::string name() const override { return "independence"; }
  Transcript run(const Distribution& d, ProverStrategy& prover,
                 NoiseSource& rng) const override;

  std::size_t sample_size() const { return sample_size_; }

 private:
  ProductDomain dom_;
  double sigma_;
  double epsilon_;
  std::size_t sample_size_;
};

/// Direct decision form, for callers that already hold the message and
/// sample. M arrives in wire form and is validated here.
Decision verify_independence(const std::vector<double>& concatenated_marginals,
                             std::span<const std::int64_t> sample,
                             const ProductDomain& dom, double sigma,
                             double epsilon, NoiseSource& rng);

/// Honest prover strategy plus the adversarial pool used in soundness runs.
std::unique_ptr<ProverStrategy> make_honest_marginal_strategy();
std::vector<std::unique_ptr<ProverStrategy>> make_marginal_adversary_pool();

struct UniformityResult {
  Decision decision = Decision::reject;
  bool independence_stage_accepted = false;
  bool marginal_stage_accepted = false;
};

/// Reduction from uniformity over [N] to independence over the hypercube:
/// pad to 2^d, map through the canonical binary encoding, run the given
/// independence protocol on the lifted distribution, then require every
/// empirical marginal frequency to lie within 2*sqrt(ln d)/sqrt(s) of 1/2.
/// The protocol handle must speak the independence schema over the lifted
/// domain (see lift_to_hypercube).
UniformityResult verify_uniformity_via_independence(
    const Distribution& d, double sigma, const Protocol& independence_protocol,
    ProverStrategy& prover, NoiseSource& rng);

/// Convenience form wiring in the eps-DP IndependenceProtocol.
UniformityResult verify_uniformity_via_independence(const Distribution& d,
                                                    double sigma,
                                                    double epsilon,
                                                    ProverStrategy& prover,
                                                    NoiseSource& rng);

/// Distribution over the hypercube domain obtained by pushing d through
/// pad_to_power_of_two and the canonical bijection (identity on indices;
/// attribute i is bit i counted from the most significant).
std::pair<Distribution, ProductDomain> lift_to_hypercube(const Distribution& d);

}  // namespace dpip
