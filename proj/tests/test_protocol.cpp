#include <cmath>

#include "doctest.h"
#include "dpip/protocol.hpp"
#include "dpip/tagged_retrieval.hpp"

using namespace dpip;

namespace {

// Minimal one-message protocol: the verifier asks, the prover must answer
// with a tag list whose first entry is >= 0.5.
class ThresholdProtocol : public Protocol {
 public:
  std::string name() const override { return "threshold-toy"; }
  Transcript run(const Distribution& d, ProverStrategy& prover,
                 NoiseSource& rng) const override {
    Transcript t;
    const Message query{Sender::verifier, RandomStringPayload{{rng.next_u64()}}};
    t.messages.push_back(query);
    NoiseSource prover_rng = rng.split(0x9a);
    Message reply = prover.respond(query, d, prover_rng);
    t.messages.push_back(reply);
    const auto* tags = std::get_if<TagListPayload>(&reply.payload);
    if (tags == nullptr || tags->tags.empty() ||
        !std::isfinite(tags->tags.front())) {
      t.finish(Decision::reject, /*was_malformed=*/true);
      return t;
    }
    t.finish(tags->tags.front() >= 0.5 ? Decision::accept : Decision::reject);
    return t;
  }
};

class ConstantTagStrategy : public ProverStrategy {
 public:
  explicit ConstantTagStrategy(double value) : value_(value) {}
  std::string name() const override { return "constant-tag"; }
  Message respond(const Message&, const Distribution&, NoiseSource&) override {
    return Message{Sender::prover, TagListPayload{{value_}}};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<ConstantTagStrategy>(*this);
  }

 private:
  double value_;
};

class WrongTypeStrategy : public ProverStrategy {
 public:
  std::string name() const override { return "wrong-type"; }
  Message respond(const Message&, const Distribution&, NoiseSource&) override {
    return Message{Sender::prover, ElementListPayload{{1, 2, 3}}};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<WrongTypeStrategy>(*this);
  }
};

class ThrowingStrategy : public ProverStrategy {
 public:
  std::string name() const override { return "throwing"; }
  Message respond(const Message&, const Distribution&, NoiseSource&) override {
    throw std::runtime_error("prover blew up");
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<ThrowingStrategy>(*this);
  }
};

// Accepts with probability p regardless of the prover.
class CoinProtocol : public Protocol {
 public:
  explicit CoinProtocol(double p) : p_(p) {}
  std::string name() const override { return "coin"; }
  Transcript run(const Distribution&, ProverStrategy&,
                 NoiseSource& rng) const override {
    Transcript t;
    t.finish(rng.bernoulli(p_) ? Decision::accept : Decision::reject);
    return t;
  }

 private:
  double p_;
};

// Random payloads of every kind, including hostile values.
class FuzzStrategy : public ProverStrategy {
 public:
  std::string name() const override { return "fuzz"; }
  Message respond(const Message&, const Distribution&,
                  NoiseSource& rng) override {
    switch (rng.uniform_int(6)) {
      case 0:
        return Message{Sender::prover, TagListPayload{{}}};
      case 1: {
        TagListPayload p;
        for (int i = 0; i < 40; ++i) {
          const double vals[] = {std::nan(""), -1.0, 1e300, 0.0, 0.5};
          p.tags.push_back(vals[rng.uniform_int(5)]);
        }
        return Message{Sender::prover, std::move(p)};
      }
      case 2: {
        ElementListPayload p;
        for (int i = 0; i < 20; ++i) {
          p.elements.push_back(static_cast<std::int64_t>(rng.next_u64()));
        }
        return Message{Sender::prover, std::move(p)};
      }
      case 3:
        return Message{Sender::prover, MarginalsPayload{{-0.5, 2.0}}};
      case 4:
        return Message{Sender::prover, OpeningPayload{}};
      default:
        return Message{Sender::prover,
                       DecisionPayload{Decision::accept, false}};
    }
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<FuzzStrategy>(*this);
  }
};

}  // namespace

TEST_CASE("run_protocol basics") {
  const ThresholdProtocol protocol;
  const Distribution d = Distribution::uniform(4);
  SUBCASE("honest-ish prover accepts") {
    ConstantTagStrategy good(0.9);
    NoiseSource rng(1);
    const Transcript t = run_protocol(protocol, good, d, rng);
    CHECK(t.decision == Decision::accept);
    CHECK_FALSE(t.malformed);
    // Decision message is present exactly once and last.
    CHECK(std::get_if<DecisionPayload>(&t.messages.back().payload) != nullptr);
    std::size_t decisions = 0;
    for (const auto& msg : t.messages) {
      decisions += std::get_if<DecisionPayload>(&msg.payload) ? 1 : 0;
    }
    CHECK(decisions == 1);
  }
  SUBCASE("wrong message type is a malformed reject") {
    WrongTypeStrategy bad;
    NoiseSource rng(2);
    const Transcript t = run_protocol(protocol, bad, d, rng);
    CHECK(t.decision == Decision::reject);
    CHECK(t.malformed);
  }
  SUBCASE("throwing prover cannot crash the runner") {
    ThrowingStrategy bad;
    NoiseSource rng(3);
    const Transcript t = run_protocol(protocol, bad, d, rng);
    CHECK(t.decision == Decision::reject);
    CHECK(t.malformed);
  }
  SUBCASE("fixed seed reproduces the transcript byte for byte") {
    ConstantTagStrategy good(0.7);
    NoiseSource rng_a(44), rng_b(44);
    const Transcript a = run_protocol(protocol, good, d, rng_a);
    const Transcript b = run_protocol(protocol, good, d, rng_b);
    CHECK(a.to_json_lines() == b.to_json_lines());
  }
}

TEST_CASE("acceptance estimation") {
  const Distribution d = Distribution::uniform(2);
  ConstantTagStrategy prover(1.0);
  SUBCASE("always-accept protocol") {
    const CoinProtocol protocol(1.0);
    const AcceptanceEstimate est =
        estimate_acceptance(protocol, prover, d, 500, 9);
    CHECK(est.rate == doctest::Approx(1.0));
  }
  SUBCASE("fair coin concentrates at one half") {
    const CoinProtocol protocol(0.5);
    const AcceptanceEstimate est =
        estimate_acceptance(protocol, prover, d, 10000, 10);
    CHECK(std::fabs(est.rate - 0.5) <= 0.02);
    CHECK(est.ci_low < 0.5);
    CHECK(est.ci_high > 0.5);
  }
  SUBCASE("zero trials rejected") {
    const CoinProtocol protocol(0.5);
    CHECK_THROWS_AS(estimate_acceptance(protocol, prover, d, 0, 1),
                    std::invalid_argument);
  }
  SUBCASE("parallel workers reproduce the serial result") {
    const CoinProtocol protocol(0.37);
    const AcceptanceEstimate serial =
        estimate_acceptance(protocol, prover, d, 2000, 11, 1);
    const AcceptanceEstimate parallel =
        estimate_acceptance(protocol, prover, d, 2000, 11, 4);
    CHECK(serial.accepts == parallel.accepts);
  }
}

TEST_CASE("wilson interval covers the true rate") {
  // 200 repeated estimations of a Bernoulli(0.37) protocol at 200 trials
  // each; the 95% interval should cover in at least 93% of them.
  const CoinProtocol protocol(0.37);
  ConstantTagStrategy prover(1.0);
  const Distribution d = Distribution::uniform(2);
  std::size_t covered = 0;
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    const AcceptanceEstimate est =
        estimate_acceptance(protocol, prover, d, 200, 500 + rep);
    covered += (est.ci_low <= 0.37 && 0.37 <= est.ci_high) ? 1 : 0;
  }
  CHECK(covered >= 186);
}

TEST_CASE("best adversary selection") {
  const ThresholdProtocol protocol;
  const Distribution d = Distribution::uniform(4);
  std::vector<std::unique_ptr<ProverStrategy>> pool;
  pool.push_back(std::make_unique<ConstantTagStrategy>(0.2));
  pool.push_back(std::make_unique<ConstantTagStrategy>(0.9));
  pool.push_back(std::make_unique<WrongTypeStrategy>());
  const AdversaryResult result =
      best_adversary_acceptance(protocol, pool, d, 200, 12);
  CHECK(result.best_name == "constant-tag");
  CHECK(result.best.rate == doctest::Approx(1.0));
  CHECK(result.per_strategy.size() == 3);
  CHECK_THROWS_AS(best_adversary_acceptance(protocol, {}, d, 100, 1),
                  std::invalid_argument);
}

TEST_CASE("adversarial payload fuzzing never crashes the verifiers") {
  FuzzStrategy fuzz;
  const Distribution d = Distribution::uniform(16);
  const ThresholdProtocol toy;
  const RetrievalParams params = derive_params(1.0, 1e-4, 0.3, 32, 16);
  const TaggedRetrievalProtocol retrieval(params);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    NoiseSource rng_a(seed);
    const Transcript a = run_protocol(toy, fuzz, d, rng_a);
    CHECK(std::get_if<DecisionPayload>(&a.messages.back().payload) != nullptr);
    NoiseSource rng_b(seed);
    const Transcript b = run_protocol(retrieval, fuzz, d, rng_b);
    if (b.decision == Decision::accept) {
      // A fuzz payload can only be accepted if it happened to be a valid
      // tag vector; the output must then be present.
      CHECK(b.output.has_value());
    }
  }
}

TEST_CASE("csv rows carry the schema header") {
  CHECK(csv_header().find("schema_version=1") != std::string::npos);
  ResultRow row{"independence", 16, 0.4, 1.0, 0.0, 128, 1000, 0.8,
                0.77,           0.83, 42};
  const std::string line = to_csv(row);
  CHECK(line.find("independence,16,0.4,1,0,128,1000,0.8") == 0);
}
