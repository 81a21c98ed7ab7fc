#include <cmath>

#include "doctest.h"
#include "dpip/replicable_am.hpp"
#include "dpip/stats.hpp"

using namespace dpip;

TEST_CASE("replicability measurement") {
  NoiseSource rng(51);
  SUBCASE("sample-independent algorithms are perfectly replicable") {
    MessageAlg alg;
    alg.sample_size = 10;
    alg.seed_space = 16;
    alg.message = [](std::span<const std::int64_t>, std::uint64_t r) {
      return static_cast<std::int64_t>(r);
    };
    const auto est = measure_replicability(alg, Distribution::uniform(8), 10,
                                           2000, rng);
    CHECK(est.rho_hat == doctest::Approx(0.0));
  }
  SUBCASE("echoing the sample is almost never replicable") {
    MessageAlg alg;
    alg.sample_size = 4;
    alg.seed_space = 16;
    alg.message = [](std::span<const std::int64_t> s, std::uint64_t) {
      std::int64_t acc = 0;
      for (auto x : s) acc = acc * 1000003 + x;
      return acc;
    };
    const auto est = measure_replicability(
        alg, Distribution::uniform(1 << 16), 4, 2000, rng);
    CHECK(est.rho_hat >= 0.99);
  }
  SUBCASE("the toy message algorithm is highly replicable") {
    const auto toy = toy_private_protocol(16, 0.3);
    const auto [yes, far] = toy_instances(16, 0.3);
    const auto est_yes = measure_replicability(
        toy.message_alg, yes, toy.message_alg.sample_size, 3000, rng);
    CHECK(est_yes.rho_hat <= 0.05);
    const auto est_far = measure_replicability(
        toy.message_alg, far, toy.message_alg.sample_size, 3000, rng);
    CHECK(est_far.rho_hat <= 0.05);
    CHECK_THROWS_AS(measure_replicability(toy.message_alg, yes, 10, 10, rng),
                    std::invalid_argument);
  }
}

TEST_CASE("derandomized decision enumerates the seed space") {
  MessageAlg alg;
  alg.sample_size = 1;
  alg.seed_space = 4;
  // Seeds 0,1,2 produce message 1; seed 3 produces message 2.
  alg.message = [](std::span<const std::int64_t>, std::uint64_t r) {
    return static_cast<std::int64_t>(r < 3 ? 1 : 2);
  };
  const std::vector<std::int64_t> sample{0};
  SUBCASE("constant decisions pass through") {
    DecisionAlg yes;
    yes.decide = [](std::int64_t, std::int64_t, std::span<const std::int64_t>,
                    std::uint64_t, std::uint64_t) { return true; };
    CHECK(derandomized_decision(1, 0, sample, 9, alg, yes));
    CHECK(derandomized_decision(2, 0, sample, 9, alg, yes));
    DecisionAlg no;
    no.decide = [](std::int64_t, std::int64_t, std::span<const std::int64_t>,
                   std::uint64_t, std::uint64_t) { return false; };
    CHECK_FALSE(derandomized_decision(1, 0, sample, 9, alg, no));
  }
  SUBCASE("an unmatched message rejects") {
    DecisionAlg yes;
    yes.decide = [](std::int64_t, std::int64_t, std::span<const std::int64_t>,
                    std::uint64_t, std::uint64_t) { return true; };
    CHECK_FALSE(derandomized_decision(7, 0, sample, 9, alg, yes));
  }
  SUBCASE("two of three matching seeds accepting reaches the majority") {
    DecisionAlg mixed;
    mixed.decide = [](std::int64_t, std::int64_t,
                      std::span<const std::int64_t>, std::uint64_t r,
                      std::uint64_t) { return r <= 1; };
    // Matching seeds {0,1,2}; decisions (1,1,0): frequency 2/3 >= 1/2.
    CHECK(derandomized_decision(1, 0, sample, 9, alg, mixed));
    // Only seed 0 of {0,1,2} accepts: frequency 1/3 < 1/2.
    DecisionAlg minority;
    minority.decide = [](std::int64_t, std::int64_t,
                         std::span<const std::int64_t>, std::uint64_t r,
                         std::uint64_t) { return r == 0; };
    CHECK_FALSE(derandomized_decision(1, 0, sample, 9, alg, minority));
  }
}

TEST_CASE("toy fixture meets its calibration contract") {
  const auto toy = toy_private_protocol(16, 0.3);
  const auto [yes, far] = toy_instances(16, 0.3);
  NoiseSource rng(52);
  std::size_t yes_accepts = 0, far_accepts = 0;
  const int runs = 3000;
  for (int run = 0; run < runs; ++run) {
    NoiseSource trial = rng.split(run);
    yes_accepts += run_private_protocol(toy, yes, trial) ? 1 : 0;
    NoiseSource trial_far = rng.split(runs + run);
    far_accepts += run_private_protocol(toy, far, trial_far) ? 1 : 0;
  }
  CHECK(static_cast<double>(yes_accepts) / runs >= 0.99);
  CHECK(static_cast<double>(far_accepts) / runs <= 0.01);
}

TEST_CASE("the public-coin conversion keeps both error directions") {
  const auto toy = toy_private_protocol(16, 0.3);
  const auto [yes, far] = toy_instances(16, 0.3);
  const ReplicableAmProtocol am(toy_private_protocol(16, 0.3));
  SUBCASE("honest completeness within rho of the source protocol") {
    NoiseSource rng(53);
    const auto rho = measure_replicability(
        toy.message_alg, yes, toy.message_alg.sample_size, 3000, rng);
    auto honest = make_honest_am_strategy(toy_private_protocol(16, 0.3));
    const AcceptanceEstimate est =
        estimate_acceptance(am, *honest, yes, 3000, 54);
    CHECK(est.rate >=
          0.98 - rho.rho_hat - 3.0 * (rho.ci_high - rho.rho_hat) - 0.01);
  }
  SUBCASE("adversary pool on the far instance stays below 0.02 plus slack") {
    const auto pool = make_am_adversary_pool(toy_private_protocol(16, 0.3));
    const AdversaryResult result =
        best_adversary_acceptance(am, pool, far, 3000, 55);
    CHECK(result.best.rate <= 0.02 + 0.01);
  }
  SUBCASE("message mismatch always rejects") {
    // A prover that claims a nonzero heavy element on the far instance
    // practically never matches the verifier's recomputed message.
    const auto pool = make_am_adversary_pool(toy_private_protocol(16, 0.3));
    for (const auto& strategy : pool) {
      if (strategy->name() != "fixed-claim-1") continue;
      NoiseSource rng(56);
      for (int run = 0; run < 200; ++run) {
        NoiseSource trial = rng.split(run);
        CHECK(run_protocol(am, *strategy, far, trial).decision ==
              Decision::reject);
      }
    }
  }
  SUBCASE("schema violations are malformed rejects") {
    const auto pool = make_am_adversary_pool(toy_private_protocol(16, 0.3));
    for (const auto& strategy : pool) {
      if (strategy->name() != "wrong-schema") continue;
      NoiseSource rng(57);
      const Transcript t = run_protocol(am, *strategy, far, rng);
      CHECK(t.decision == Decision::reject);
      CHECK(t.malformed);
    }
  }
}

TEST_CASE("markov doubling of the derandomized decision") {
  // Conditioned on a matched honest message, the derandomized decision
  // rejects at most twice as often as the underlying decision.
  const auto toy = toy_private_protocol(16, 0.3);
  const auto [yes, far] = toy_instances(16, 0.3);
  NoiseSource rng(58);
  std::size_t matched = 0, inner_rejects = 0, derand_rejects = 0;
  for (int run = 0; run < 4000; ++run) {
    NoiseSource trial = rng.split(run);
    const auto s = yes.sample_many(toy.message_alg.sample_size, trial);
    const auto s_prover = yes.sample_many(toy.message_alg.sample_size, trial);
    const std::uint64_t r = trial.uniform_int(toy.message_alg.seed_space);
    const std::int64_t m = toy.message_alg.message(s_prover, r);
    if (toy.message_alg.message(s, r) != m) continue;
    ++matched;
    const std::int64_t m_prime = toy.honest_reply(m, yes);
    const std::uint64_t r_prime = trial.next_u64();
    inner_rejects +=
        toy.decision_alg.decide(m, m_prime, s, r, r_prime) ? 0 : 1;
    derand_rejects += derandomized_decision(m, m_prime, s, r_prime,
                                            toy.message_alg, toy.decision_alg)
                          ? 0
                          : 1;
  }
  REQUIRE(matched > 1000);
  const double inner_rate =
      static_cast<double>(inner_rejects) / static_cast<double>(matched);
  const double derand_rate =
      static_cast<double>(derand_rejects) / static_cast<double>(matched);
  const double slack =
      3.0 * std::sqrt(std::max(inner_rate, 1.0 / matched) / matched);
  CHECK(derand_rate <= 2.0 * inner_rate + slack);
}

TEST_CASE("communication is the seed index plus the source reply") {
  const ReplicableAmProtocol am(toy_private_protocol(16, 0.3));
  const auto [yes, far] = toy_instances(16, 0.3);
  auto honest = make_honest_am_strategy(toy_private_protocol(16, 0.3));
  NoiseSource rng(59);
  const Transcript t = run_protocol(am, *honest, yes, rng);
  REQUIRE(t.messages.size() >= 2);
  const auto* seed_msg =
      std::get_if<RandomStringPayload>(&t.messages[0].payload);
  REQUIRE(seed_msg != nullptr);
  CHECK(seed_msg->words.size() == 1);  // the seed index, log|R| bits
  CHECK(seed_msg->words[0] < 16);
  const auto* reply = std::get_if<ElementListPayload>(&t.messages[1].payload);
  REQUIRE(reply != nullptr);
  CHECK(reply->elements.size() == 2);  // (m, m')
}
