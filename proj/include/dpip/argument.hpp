#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "dpip/commitment.hpp"
#include "dpip/distribution.hpp"
#include "dpip/protocol.hpp"

namespace dpip {

/// Parameters of the commitment-based verified-distribution-oracle
/// protocol. The verifier's total privacy budget eps splits evenly over
/// majority_rounds identity tests (majority_rounds = ceil(ln(1/sigma))
/// rounded up to odd).
struct ArgumentOptions {
  std::size_t n = 256;
  double sigma = 0.3;
  double epsilon = 1.0;
  std::size_t identity_sample_size = 0;  // per-round inner block size
  std::size_t opening_count = 0;         // committed-oracle draws per round
  std::size_t output_samples = 64;
  std::size_t majority_rounds = 3;

  /// Test-only seam: runs right after the identity phase with mutable
  /// access to the verifier's sample, which no later step may read.
  std::function<void(std::vector<std::int64_t>&)> post_identity_hook;
};

/// Options with the desk schedule filled in from the configuration.
ArgumentOptions desk_argument_options(std::size_t n, double sigma,
                                      double epsilon);

/// The protocol: key exchange, Merkle commitment to the claimed
/// distribution, authenticated quantile openings manufacturing sample
/// access to Q, a majority of eps/k-DP two-sample identity tests of D
/// against Q, then verified openings forming the tagged output. Any
/// invalid opening or a failed identity majority rejects.
class ArgumentProtocol : public Protocol {
 public:
  explicit ArgumentProtocol(ArgumentOptions options);
  std::string name() const override { return "argument"; }
  Transcript run(const Distribution& d, ProverStrategy& prover,
                 NoiseSource& rng) const override;
  const ArgumentOptions& options() const { return options_; }

 private:
  ArgumentOptions options_;
};

/// Honest prover: commits to the true distribution and answers every
/// opening from its tree.
std::unique_ptr<ProverStrategy> make_honest_argument_strategy();

/// Commits to a fixed distribution q (honest answering); the cheating
/// prover for far-committed soundness runs.
std::unique_ptr<ProverStrategy> make_fixed_commit_strategy(Distribution q);

/// Commits to tree_a's root but answers openings from tree_b with the
/// given probability (1 = always). With a == b this is the honest
/// strategy.
std::unique_ptr<ProverStrategy> make_equivocating_strategy(
    Distribution a, Distribution b, double answer_from_b_prob = 1.0);

}  // namespace dpip
