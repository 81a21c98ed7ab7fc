#include "dpip/replicable_am.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "dpip/stats.hpp"

namespace dpip {

ReplicabilityEstimate measure_replicability(const MessageAlg& alg,
                                            const Distribution& d,
                                            std::size_t sample_size,
                                            std::size_t trials,
                                            NoiseSource& rng) {
  if (trials < 1000) {
    throw std::invalid_argument("replicability estimate needs >= 10^3 trials");
  }
  std::size_t disagree = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    NoiseSource trial = rng.split(t);
    const std::uint64_t r = trial.uniform_int(alg.seed_space);
    const auto s1 = d.sample_many(sample_size, trial);
    const auto s2 = d.sample_many(sample_size, trial);
    disagree += alg.message(s1, r) != alg.message(s2, r) ? 1 : 0;
  }
  const auto ci = wilson_interval(disagree, trials);
  return ReplicabilityEstimate{ci.rate, ci.low, ci.high};
}

bool derandomized_decision(std::int64_t m, std::int64_t m_prime,
                           std::span<const std::int64_t> s,
                           std::uint64_t r_prime, const MessageAlg& alg,
                           const DecisionAlg& decision) {
  std::size_t matching = 0;
  std::size_t accepting = 0;
  for (std::uint64_t r = 0; r < alg.seed_space; ++r) {
    if (alg.message(s, r) != m) continue;
    ++matching;
    accepting += decision.decide(m, m_prime, s, r, r_prime) ? 1 : 0;
  }
  if (matching == 0) return false;
  return 2 * accepting >= matching;
}

bool run_private_protocol(const PrivateCoinProtocol& p, const Distribution& d,
                          NoiseSource& rng) {
  const auto s = d.sample_many(p.message_alg.sample_size, rng);
  const std::uint64_t r = rng.uniform_int(p.message_alg.seed_space);
  const std::int64_t m = p.message_alg.message(s, r);
  const std::int64_t m_prime = p.honest_reply(m, d);
  const std::uint64_t r_prime = rng.next_u64();
  return p.decision_alg.decide(m, m_prime, s, r, r_prime);
}

ReplicableAmProtocol::ReplicableAmProtocol(PrivateCoinProtocol p)
    : p_(std::move(p)) {
  if (p_.message_alg.seed_space == 0 || p_.message_alg.seed_space > 65536) {
    throw std::invalid_argument("seed space must lie in [1, 2^16]");
  }
  if (!p_.message_alg.message || !p_.decision_alg.decide) {
    throw std::invalid_argument("incomplete private-coin protocol");
  }
}

Transcript ReplicableAmProtocol::run(const Distribution& d,
                                     ProverStrategy& prover,
                                     NoiseSource& rng) const {
  Transcript t;
  // The verifier sends the seed index: log|R| bits of public coins.
  const std::uint64_t r = rng.uniform_int(p_.message_alg.seed_space);
  const Message seed_message{Sender::verifier, RandomStringPayload{{r}}};
  t.messages.push_back(seed_message);

  NoiseSource prover_rng = rng.split(0x9a);
  Message reply = prover.respond(seed_message, d, prover_rng);
  t.messages.push_back(reply);
  const auto* pair = std::get_if<ElementListPayload>(&reply.payload);
  if (pair == nullptr || pair->elements.size() != 2) {
    t.finish(Decision::reject, /*was_malformed=*/true);
    return t;
  }
  const std::int64_t m = pair->elements[0];
  const std::int64_t m_prime = pair->elements[1];

  const auto s = d.sample_many(p_.message_alg.sample_size, rng);
  if (p_.message_alg.message(s, r) != m) {
    t.finish(Decision::reject);
    return t;
  }
  const std::uint64_t r_prime = rng.next_u64();
  const bool ok =
      derandomized_decision(m, m_prime, s, r_prime, p_.message_alg,
                            p_.decision_alg);
  t.finish(ok ? Decision::accept : Decision::reject);
  return t;
}

namespace {

class HonestAmStrategy : public ProverStrategy {
 public:
  explicit HonestAmStrategy(PrivateCoinProtocol p) : p_(std::move(p)) {}
  std::string name() const override { return "honest-am"; }
  Message respond(const Message& query, const Distribution& d,
                  NoiseSource& rng) override {
    const auto* words = std::get_if<RandomStringPayload>(&query.payload);
    if (words == nullptr || words->words.empty()) {
      return Message{Sender::prover, ElementListPayload{}};
    }
    const std::uint64_t r = words->words[0];
    const auto own_sample = d.sample_many(p_.message_alg.sample_size, rng);
    const std::int64_t m = p_.message_alg.message(own_sample, r);
    const std::int64_t m_prime = p_.honest_reply(m, d);
    return Message{Sender::prover, ElementListPayload{{m, m_prime}}};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<HonestAmStrategy>(p_);
  }

 private:
  PrivateCoinProtocol p_;
};

// Ignores the sample and always claims a fixed message with confirmation.
class FixedClaimStrategy : public ProverStrategy {
 public:
  FixedClaimStrategy(std::int64_t m, std::int64_t m_prime)
      : m_(m), m_prime_(m_prime) {}
  std::string name() const override {
    return "fixed-claim-" + std::to_string(m_);
  }
  Message respond(const Message&, const Distribution&, NoiseSource&) override {
    return Message{Sender::prover, ElementListPayload{{m_, m_prime_}}};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<FixedClaimStrategy>(*this);
  }

 private:
  std::int64_t m_;
  std::int64_t m_prime_;
};

// Guesses the verifier's message from its own sample but always confirms.
class ConfirmEverythingStrategy : public ProverStrategy {
 public:
  explicit ConfirmEverythingStrategy(PrivateCoinProtocol p)
      : p_(std::move(p)) {}
  std::string name() const override { return "confirm-everything"; }
  Message respond(const Message& query, const Distribution& d,
                  NoiseSource& rng) override {
    const auto* words = std::get_if<RandomStringPayload>(&query.payload);
    if (words == nullptr || words->words.empty()) {
      return Message{Sender::prover, ElementListPayload{}};
    }
    const auto own_sample = d.sample_many(p_.message_alg.sample_size, rng);
    const std::int64_t m =
        p_.message_alg.message(own_sample, words->words[0]);
    return Message{Sender::prover, ElementListPayload{{m, 1}}};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<ConfirmEverythingStrategy>(p_);
  }

 private:
  PrivateCoinProtocol p_;
};

class WrongSchemaStrategy : public ProverStrategy {
 public:
  std::string name() const override { return "wrong-schema"; }
  Message respond(const Message&, const Distribution&, NoiseSource&) override {
    return Message{Sender::prover, TagListPayload{{0.5}}};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<WrongSchemaStrategy>(*this);
  }
};

std::int64_t heavy_candidate(std::span<const std::int64_t> sample,
                             std::size_t n, double threshold) {
  std::vector<std::size_t> counts(n, 0);
  for (std::int64_t x : sample) {
    if (x >= 0 && static_cast<std::size_t>(x) < n) {
      ++counts[static_cast<std::size_t>(x)];
    }
  }
  const auto it = std::max_element(counts.begin(), counts.end());
  const double freq = static_cast<double>(*it) /
                      static_cast<double>(sample.size());
  if (freq < threshold) return 0;
  return static_cast<std::int64_t>(it - counts.begin()) + 1;
}

double frequency_of(std::span<const std::int64_t> sample, std::int64_t x) {
  std::size_t count = 0;
  for (std::int64_t v : sample) count += v == x ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(sample.size());
}

}  // namespace

std::unique_ptr<ProverStrategy> make_honest_am_strategy(
    PrivateCoinProtocol p) {
  return std::make_unique<HonestAmStrategy>(std::move(p));
}

std::vector<std::unique_ptr<ProverStrategy>> make_am_adversary_pool(
    PrivateCoinProtocol p) {
  std::vector<std::unique_ptr<ProverStrategy>> pool;
  pool.push_back(std::make_unique<FixedClaimStrategy>(1, 1));
  pool.push_back(std::make_unique<FixedClaimStrategy>(0, 1));
  pool.push_back(std::make_unique<ConfirmEverythingStrategy>(p));
  pool.push_back(std::make_unique<WrongSchemaStrategy>());
  return pool;
}

PrivateCoinProtocol toy_private_protocol(std::size_t n, double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw std::invalid_argument("sigma must lie in (0,1)");
  }
  PrivateCoinProtocol p;
  p.message_alg.sample_size = 60;
  p.message_alg.seed_space = 16;
  // Heavily rounded heavy-element indicator: the candidate must clear a
  // frequency threshold jittered by the seed; 0 encodes "none".
  p.message_alg.message = [n](std::span<const std::int64_t> sample,
                              std::uint64_t r) {
    const double threshold = 0.70 + 0.01 * static_cast<double>(r % 4);
    return heavy_candidate(sample, n, threshold);
  };
  p.honest_reply = [](std::int64_t m, const Distribution& d) -> std::int64_t {
    if (m <= 0 || static_cast<std::size_t>(m) > d.domain_size()) return 0;
    return d.mass(static_cast<std::size_t>(m - 1)) >= 0.5 ? 1 : 0;
  };
  p.decision_alg.decide = [](std::int64_t m, std::int64_t m_prime,
                             std::span<const std::int64_t> sample,
                             std::uint64_t r, std::uint64_t r_prime) {
    if (m <= 0 || m_prime != 1) return false;
    const double threshold = 0.55 + 0.01 * static_cast<double>(r % 4) +
                             0.005 * static_cast<double>(r_prime % 3);
    return frequency_of(sample, m - 1) >= threshold;
  };
  return p;
}

std::pair<Distribution, Distribution> toy_instances(std::size_t n,
                                                    double sigma) {
  const double heavy = std::max(0.9, 1.0 - sigma / 4.0);
  std::vector<double> pmf(n, (1.0 - heavy) / static_cast<double>(n - 1));
  pmf[0] = heavy;
  return {Distribution(std::move(pmf)), Distribution::uniform(n)};
}

}  // namespace dpip
