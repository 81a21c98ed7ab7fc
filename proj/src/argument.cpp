#include "dpip/argument.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "dpip/config.hpp"
#include "dpip/identity.hpp"

namespace dpip {

namespace {

double mu_from_word(std::uint64_t word) {
  return (static_cast<double>(word >> 11) + 1.0) * 0x1.0p-53;
}

HashKey key_from_words(const std::vector<std::uint64_t>& words) {
  HashKey key{};
  for (std::size_t w = 0; w < 4 && w < words.size(); ++w) {
    for (int b = 0; b < 8; ++b) {
      key[8 * w + b] = static_cast<std::uint8_t>(words[w] >> (56 - 8 * b));
    }
  }
  return key;
}

std::size_t odd_majority_rounds(double sigma) {
  auto k = static_cast<std::size_t>(std::ceil(std::log(1.0 / sigma)));
  if (k < 1) k = 1;
  if (k % 2 == 0) ++k;
  return k;
}

}  // namespace

ArgumentOptions desk_argument_options(std::size_t n, double sigma,
                                      double epsilon) {
  ArgumentOptions opt;
  opt.n = n;
  opt.sigma = sigma;
  opt.epsilon = epsilon;
  opt.identity_sample_size = identity_sample_size(n, sigma);
  const DeskConfig& cfg = desk_config();
  opt.opening_count = std::max<std::size_t>(
      256, opt.identity_sample_size / std::max<std::size_t>(
               1, cfg.argument_opening_divisor));
  opt.output_samples = cfg.argument_output_samples;
  opt.majority_rounds = odd_majority_rounds(sigma);
  return opt;
}

ArgumentProtocol::ArgumentProtocol(ArgumentOptions options)
    : options_(std::move(options)) {
  if (options_.majority_rounds % 2 == 0) {
    throw std::invalid_argument("majority rounds must be odd");
  }
  if (options_.identity_sample_size == 0 || options_.opening_count == 0) {
    throw std::invalid_argument("sample schedules must be positive");
  }
}

Transcript ArgumentProtocol::run(const Distribution& d, ProverStrategy& prover,
                                 NoiseSource& rng) const {
  const ArgumentOptions& opt = options_;
  if (d.domain_size() != opt.n) {
    throw std::invalid_argument("distribution does not match options.n");
  }
  Transcript t;
  NoiseSource prover_rng = rng.split(0x9a);

  // Key exchange and commitment.
  RandomStringPayload key_payload;
  for (int w = 0; w < 4; ++w) key_payload.words.push_back(rng.next_u64());
  const HashKey key = key_from_words(key_payload.words);
  const Message key_message{Sender::verifier, key_payload};
  t.messages.push_back(key_message);
  Message commit_reply = prover.respond(key_message, d, prover_rng);
  t.messages.push_back(commit_reply);
  const auto* root_payload =
      std::get_if<CommitmentRootPayload>(&commit_reply.payload);
  if (root_payload == nullptr ||
      !std::isfinite(root_payload->root.mass) ||
      std::fabs(root_payload->root.mass - 1.0) > 1e-9) {
    t.finish(Decision::reject, /*was_malformed=*/true);
    return t;
  }
  const NodeLabel root = root_payload->root;

  // One authenticated quantile draw from the committed distribution.
  // Returns the opened leaf or nullopt on any failed verification.
  auto draw_from_q = [&](NoiseSource& source)
      -> std::optional<std::pair<std::int64_t, double>> {
    RandomStringPayload mu_payload{{source.next_u64()}};
    const double mu = mu_from_word(mu_payload.words[0]);
    const Message query{Sender::verifier, mu_payload};
    t.messages.push_back(query);
    t.messages.push_back(prover.respond(query, d, prover_rng));
    const auto* opening_payload =
        std::get_if<OpeningPayload>(&t.messages.back().payload);
    if (opening_payload == nullptr) return std::nullopt;
    const Opening& opening = opening_payload->opening;
    if (!verify_opening(root, mu, opening, key)) return std::nullopt;
    return std::make_pair(static_cast<std::int64_t>(opening.leaf_index),
                          opening.q);
  };

  // Identity phase: majority of k wrapped two-sample tests, each eps/k-DP.
  // The verifier's own sample lives only inside this block.
  const std::size_t k = opt.majority_rounds;
  const double round_epsilon = opt.epsilon / static_cast<double>(k);
  const std::size_t blocks =
      static_cast<std::size_t>(std::ceil(6.0 / round_epsilon));
  const std::size_t s_inner = opt.identity_sample_size;
  bool identity_ok = false;
  {
    std::size_t votes = 0;
    std::vector<std::int64_t> own_sample;
    for (std::size_t round = 0; round < k; ++round) {
      std::vector<std::int64_t> q_sample;
      q_sample.reserve(opt.opening_count);
      for (std::size_t i = 0; i < opt.opening_count; ++i) {
        auto drawn = draw_from_q(rng);
        if (!drawn) {
          t.finish(Decision::reject);
          return t;
        }
        q_sample.push_back(drawn->first);
      }
      own_sample = d.sample_many(blocks * s_inner, rng);
      const std::size_t block = rng.uniform_int(blocks);
      const std::span<const std::int64_t> block_view(
          own_sample.data() + block * s_inner, s_inner);
      bool verdict =
          empirical_two_sample_tv(block_view, q_sample, opt.n) <=
          two_sample_threshold(opt.n, s_inner, opt.opening_count);
      if (rng.bernoulli(1.0 / 6.0)) verdict = !verdict;
      votes += verdict ? 1 : 0;
    }
    identity_ok = 2 * votes > k;
    if (opt.post_identity_hook) opt.post_identity_hook(own_sample);
    // own_sample is dropped here; later steps have no access to it.
  }
  if (!identity_ok) {
    t.finish(Decision::reject);
    return t;
  }

  // Output phase: further verified openings, purely communication.
  std::vector<TaggedSample> output;
  std::unordered_map<std::int64_t, double> seen;
  for (std::size_t i = 0; i < opt.output_samples; ++i) {
    auto drawn = draw_from_q(rng);
    if (!drawn) {
      t.finish(Decision::reject);
      return t;
    }
    const auto [x, q] = *drawn;
    const auto [it, inserted] = seen.emplace(x, q);
    if (!inserted && it->second != q) {
      t.finish(Decision::reject);  // self-inconsistent openings
      return t;
    }
    if (inserted) output.push_back(TaggedSample{x, q});
  }
  t.output = std::move(output);
  t.finish(Decision::accept);
  return t;
}

namespace {

class CommitStrategyBase : public ProverStrategy {
 public:
  void begin_session(const Distribution&, NoiseSource&) override {
    commit_tree_.reset();
    answer_tree_.reset();
  }

  Message respond(const Message& query, const Distribution& d,
                  NoiseSource& rng) override {
    const auto* words = std::get_if<RandomStringPayload>(&query.payload);
    if (words == nullptr) {
      return Message{Sender::prover, TagListPayload{}};
    }
    if (words->words.size() == 4) {
      const HashKey key = key_from_words(words->words);
      build_trees(d, key, rng);
      return Message{Sender::prover,
                     CommitmentRootPayload{commit_tree_->root()}};
    }
    if (words->words.size() == 1 && commit_tree_) {
      const double mu = mu_from_word(words->words[0]);
      const CommitmentTree& tree = pick_answer_tree(rng);
      return Message{Sender::prover, OpeningPayload{tree.open_quantile(mu)}};
    }
    return Message{Sender::prover, TagListPayload{}};
  }

 protected:
  virtual void build_trees(const Distribution& d, const HashKey& key,
                           NoiseSource& rng) = 0;
  virtual const CommitmentTree& pick_answer_tree(NoiseSource& rng) {
    (void)rng;
    return *commit_tree_;
  }

  std::optional<CommitmentTree> commit_tree_;
  std::optional<CommitmentTree> answer_tree_;
};

class HonestArgumentStrategy : public CommitStrategyBase {
 public:
  std::string name() const override { return "honest-commit"; }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<HonestArgumentStrategy>();
  }

 protected:
  void build_trees(const Distribution& d, const HashKey& key,
                   NoiseSource&) override {
    commit_tree_.emplace(d, key);
  }
};

class FixedCommitStrategy : public CommitStrategyBase {
 public:
  explicit FixedCommitStrategy(Distribution q) : q_(std::move(q)) {}
  std::string name() const override { return "fixed-commit"; }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<FixedCommitStrategy>(q_);
  }

 protected:
  void build_trees(const Distribution&, const HashKey& key,
                   NoiseSource&) override {
    commit_tree_.emplace(q_, key);
  }

 private:
  Distribution q_;
};

class EquivocatingStrategy : public CommitStrategyBase {
 public:
  EquivocatingStrategy(Distribution a, Distribution b, double from_b_prob)
      : a_(std::move(a)), b_(std::move(b)), from_b_prob_(from_b_prob) {
    if (a_.domain_size() != b_.domain_size()) {
      throw std::invalid_argument("equivocation needs equal domains");
    }
  }
  std::string name() const override { return "equivocating-commit"; }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<EquivocatingStrategy>(a_, b_, from_b_prob_);
  }

 protected:
  void build_trees(const Distribution&, const HashKey& key,
                   NoiseSource&) override {
    commit_tree_.emplace(a_, key);
    answer_tree_.emplace(b_, key);
  }
  const CommitmentTree& pick_answer_tree(NoiseSource& rng) override {
    if (answer_tree_ && rng.bernoulli(from_b_prob_)) return *answer_tree_;
    return *commit_tree_;
  }

 private:
  Distribution a_;
  Distribution b_;
  double from_b_prob_;
};

}  // namespace

std::unique_ptr<ProverStrategy> make_honest_argument_strategy() {
  return std::make_unique<HonestArgumentStrategy>();
}

std::unique_ptr<ProverStrategy> make_fixed_commit_strategy(Distribution q) {
  return std::make_unique<FixedCommitStrategy>(std::move(q));
}

std::unique_ptr<ProverStrategy> make_equivocating_strategy(
    Distribution a, Distribution b, double answer_from_b_prob) {
  return std::make_unique<EquivocatingStrategy>(std::move(a), std::move(b),
                                                answer_from_b_prob);
}

}  // namespace dpip
