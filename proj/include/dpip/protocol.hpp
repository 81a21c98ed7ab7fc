#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dpip/commitment.hpp"
#include "dpip/distribution.hpp"
#include "dpip/noise.hpp"

namespace dpip {

enum class Sender { verifier, prover };
enum class Decision { accept, reject };

/// Pair (domain element, claimed probability mass) output by the retrieval
/// and argument protocols.
struct TaggedSample {
  std::int64_t element = 0;
  double tag = 0.0;
  bool operator==(const TaggedSample&) const = default;
};

// Payload alternatives; the tag of each message must match the protocol
// phase that produced it, and verifiers treat any mismatch as malformed.
struct RandomStringPayload {
  std::vector<std::uint64_t> words;
};
struct ElementListPayload {
  std::vector<std::int64_t> elements;
};
struct TagListPayload {
  std::vector<double> tags;
};
struct MarginalsPayload {
  std::vector<double> concatenated;  // raw wire form, validated by verifier
};
struct CommitmentRootPayload {
  NodeLabel root;
};
struct OpeningPayload {
  Opening opening;
};
struct DecisionPayload {
  Decision decision = Decision::reject;
  bool malformed = false;
};

using Payload =
    std::variant<RandomStringPayload, ElementListPayload, TagListPayload,
                 MarginalsPayload, CommitmentRootPayload, OpeningPayload,
                 DecisionPayload>;

struct Message {
  Sender sender = Sender::verifier;
  Payload payload;
};

/// Ordered list of exchanged messages plus the final decision; the unit of
/// the privacy analysis. The decision message is always last and unique.
struct Transcript {
  std::vector<Message> messages;
  Decision decision = Decision::reject;
  bool malformed = false;
  std::optional<std::vector<TaggedSample>> output;

  void push(Sender sender, Payload payload);
  void finish(Decision d, bool was_malformed = false);

  /// One JSON object per message plus a trailing decision line.
  std::string to_json_lines() const;
};

/// A prover with full read access to the true distribution. Stateful
/// strategies reset in begin_session; honest strategies are deterministic
/// given (message, distribution) unless declared randomized.
class ProverStrategy {
 public:
  virtual ~ProverStrategy() = default;
  virtual std::string name() const = 0;
  virtual void begin_session(const Distribution& /*d*/, NoiseSource& /*rng*/) {}
  virtual Message respond(const Message& query, const Distribution& d,
                          NoiseSource& rng) = 0;
  /// Independent copy for parallel trial workers.
  virtual std::unique_ptr<ProverStrategy> clone() const = 0;
};

class Protocol {
 public:
  virtual ~Protocol() = default;
  virtual std::string name() const = 0;
  virtual Transcript run(const Distribution& d, ProverStrategy& prover,
                         NoiseSource& rng) const = 0;
};

/// Faithful message-by-message execution with all verifier sampling and
/// noise drawn from rng; replayable from the seed. Schema violations and
/// any exception escaping a strategy yield a malformed reject, never a
/// crash.
Transcript run_protocol(const Protocol& protocol, ProverStrategy& prover,
                        const Distribution& d, NoiseSource& rng);

struct AcceptanceEstimate {
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::size_t accepts = 0;
  std::size_t trials = 0;
};

/// Fraction of accepting transcripts over independent trials with a 95%
/// Wilson interval. Trials are embarrassingly parallel; per-trial sources
/// split deterministically from the seed so results do not depend on jobs.
AcceptanceEstimate estimate_acceptance(const Protocol& protocol,
                                       ProverStrategy& prover,
                                       const Distribution& d,
                                       std::size_t trials, std::uint64_t seed,
                                       unsigned jobs = 1);

struct AdversaryResult {
  std::string best_name;
  AcceptanceEstimate best;
  std::vector<std::pair<std::string, AcceptanceEstimate>> per_strategy;
};

/// Per-strategy acceptance rates over a fixed pool; returns the maximizer.
/// A pool is a lower bound on adversarial power, not an exhaustive search.
AdversaryResult best_adversary_acceptance(
    const Protocol& protocol,
    const std::vector<std::unique_ptr<ProverStrategy>>& pool,
    const Distribution& d, std::size_t trials, std::uint64_t seed,
    unsigned jobs = 1);

/// One CSV line of experiment output (schema_version=1).
struct ResultRow {
  std::string protocol;
  std::size_t n = 0;
  double sigma = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  std::size_t s = 0;
  std::size_t trials = 0;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t seed = 0;
};

std::string csv_header();
std::string to_csv(const ResultRow& row);

}  // namespace dpip
