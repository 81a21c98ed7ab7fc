#include "dpip/protocol.hpp"

#include <atomic>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dpip/stats.hpp"
#include "json.hpp"

namespace dpip {

namespace {

nlohmann::json payload_to_json(const Payload& payload) {
  nlohmann::json j;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RandomStringPayload>) {
          j["type"] = "random-string";
          j["words"] = p.words;
        } else if constexpr (std::is_same_v<T, ElementListPayload>) {
          j["type"] = "element-list";
          j["elements"] = p.elements;
        } else if constexpr (std::is_same_v<T, TagListPayload>) {
          j["type"] = "tag-list";
          j["tags"] = p.tags;
        } else if constexpr (std::is_same_v<T, MarginalsPayload>) {
          j["type"] = "marginals";
          j["values"] = p.concatenated;
        } else if constexpr (std::is_same_v<T, CommitmentRootPayload>) {
          j["type"] = "commitment-root";
          j["p"] = p.root.mass;
          j["h"] = hex_encode(p.root.hash);
        } else if constexpr (std::is_same_v<T, OpeningPayload>) {
          j["type"] = "opening";
          j["opening"] = nlohmann::json::parse(p.opening.to_json());
        } else {
          j["type"] = "decision";
          j["decision"] =
              p.decision == Decision::accept ? "accept" : "reject";
          j["malformed"] = p.malformed;
        }
      },
      payload);
  return j;
}

}  // namespace

void Transcript::push(Sender sender, Payload payload) {
  messages.push_back(Message{sender, std::move(payload)});
}

void Transcript::finish(Decision d, bool was_malformed) {
  decision = d;
  malformed = was_malformed;
  messages.push_back(
      Message{Sender::verifier, DecisionPayload{d, was_malformed}});
}

std::string Transcript::to_json_lines() const {
  std::ostringstream out;
  for (const auto& message : messages) {
    nlohmann::json j = payload_to_json(message.payload);
    j["sender"] = message.sender == Sender::verifier ? "verifier" : "prover";
    out << j.dump() << '\n';
  }
  return out.str();
}

Transcript run_protocol(const Protocol& protocol, ProverStrategy& prover,
                        const Distribution& d, NoiseSource& rng) {
  try {
    NoiseSource prover_rng = rng.split(0x70726f76);  // distinct prover stream
    prover.begin_session(d, prover_rng);
    return protocol.run(d, prover, rng);
  } catch (const std::exception&) {
    // Verifiers validate adversarial payloads and should not throw; any
    // escaped exception still lands on the malformed-message rule.
    Transcript t;
    t.finish(Decision::reject, /*was_malformed=*/true);
    return t;
  }
}

namespace {

std::vector<std::uint8_t> run_trials(const Protocol& protocol,
                                     ProverStrategy& prover,
                                     const Distribution& d, std::size_t trials,
                                     std::uint64_t seed, unsigned jobs) {
  std::vector<std::uint8_t> accepted(trials, 0);
  NoiseSource base(seed);
  auto work = [&](ProverStrategy& worker_prover, std::size_t begin,
                  std::size_t stride) {
    for (std::size_t t = begin; t < trials; t += stride) {
      NoiseSource trial_rng = base.split(t);
      const Transcript transcript =
          run_protocol(protocol, worker_prover, d, trial_rng);
      accepted[t] = transcript.decision == Decision::accept ? 1 : 0;
    }
  };
  if (jobs <= 1) {
    work(prover, 0, 1);
  } else {
    // Stateful strategies are single-owner; each worker runs its own clone.
    std::vector<std::unique_ptr<ProverStrategy>> clones;
    for (unsigned j = 0; j < jobs; ++j) clones.push_back(prover.clone());
    std::vector<std::thread> threads;
    for (unsigned j = 0; j < jobs; ++j) {
      threads.emplace_back(work, std::ref(*clones[j]), j, jobs);
    }
    for (auto& th : threads) th.join();
  }
  return accepted;
}

AcceptanceEstimate summarize(const std::vector<std::uint8_t>& accepted) {
  AcceptanceEstimate est;
  est.trials = accepted.size();
  for (auto a : accepted) est.accepts += a;
  const auto ci = wilson_interval(est.accepts, est.trials);
  est.rate = ci.rate;
  est.ci_low = ci.low;
  est.ci_high = ci.high;
  return est;
}

}  // namespace

AcceptanceEstimate estimate_acceptance(const Protocol& protocol,
                                       ProverStrategy& prover,
                                       const Distribution& d,
                                       std::size_t trials, std::uint64_t seed,
                                       unsigned jobs) {
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  return summarize(run_trials(protocol, prover, d, trials, seed, jobs));
}

AdversaryResult best_adversary_acceptance(
    const Protocol& protocol,
    const std::vector<std::unique_ptr<ProverStrategy>>& pool,
    const Distribution& d, std::size_t trials, std::uint64_t seed,
    unsigned jobs) {
  if (pool.empty()) throw std::invalid_argument("adversary pool is empty");
  AdversaryResult result;
  bool first = true;
  for (const auto& strategy : pool) {
    const AcceptanceEstimate est =
        estimate_acceptance(protocol, *strategy, d, trials, seed, jobs);
    result.per_strategy.emplace_back(strategy->name(), est);
    if (first || est.rate > result.best.rate) {
      result.best = est;
      result.best_name = strategy->name();
      first = false;
    }
  }
  return result;
}

std::string csv_header() {
  return "# schema_version=1\n"
         "protocol,n,sigma,eps,delta,s,trials,rate,ci_low,ci_high,seed";
}

std::string to_csv(const ResultRow& row) {
  std::ostringstream out;
  out.precision(10);
  out << row.protocol << ',' << row.n << ',' << row.sigma << ',' << row.eps
      << ',' << row.delta << ',' << row.s << ',' << row.trials << ','
      << row.rate << ',' << row.ci_low << ',' << row.ci_high << ','
      << row.seed;
  return out.str();
}

}  // namespace dpip
