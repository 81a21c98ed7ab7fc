#include "dpip/independence.hpp"

#include <cmath>
#include <stdexcept>

#include "dpip/identity.hpp"

namespace dpip {

Marginals honest_marginal_prover(const Distribution& d,
                                 const ProductDomain& dom) {
  return marginals_of(d, dom);
}

namespace {

// The public instance data (attribute sizes) travels in the verifier's
// opening message so strategies stay instance-agnostic.
Message domain_query(const ProductDomain& dom) {
  ElementListPayload payload;
  for (std::size_t i = 0; i < dom.dimensions(); ++i) {
    payload.elements.push_back(
        static_cast<std::int64_t>(dom.attribute_size(i)));
  }
  return Message{Sender::verifier, std::move(payload)};
}

std::optional<ProductDomain> domain_from_query(const Message& query) {
  const auto* payload = std::get_if<ElementListPayload>(&query.payload);
  if (payload == nullptr) return std::nullopt;
  std::vector<std::size_t> sizes;
  for (std::int64_t s : payload->elements) {
    if (s <= 0) return std::nullopt;
    sizes.push_back(static_cast<std::size_t>(s));
  }
  return ProductDomain(std::move(sizes));
}

std::optional<Marginals> parse_marginals(const std::vector<double>& wire,
                                         const ProductDomain& dom) {
  for (double x : wire) {
    if (!std::isfinite(x) || x < 0.0) return std::nullopt;
  }
  try {
    return Marginals::from_concatenated(wire, dom);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

class HonestMarginalStrategy : public ProverStrategy {
 public:
  std::string name() const override { return "honest-marginals"; }
  Message respond(const Message& query, const Distribution& d,
                  NoiseSource&) override {
    auto dom = domain_from_query(query);
    if (!dom) return Message{Sender::prover, MarginalsPayload{}};
    return Message{Sender::prover,
                   MarginalsPayload{marginals_of(d, *dom).concatenated()}};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<HonestMarginalStrategy>(*this);
  }
};

// Claims the nearest point mass: each block concentrated on its first value.
class PointMassMarginalStrategy : public ProverStrategy {
 public:
  std::string name() const override { return "point-mass-marginals"; }
  Message respond(const Message& query, const Distribution&,
                  NoiseSource&) override {
    auto dom = domain_from_query(query);
    if (!dom) return Message{Sender::prover, MarginalsPayload{}};
    MarginalsPayload payload;
    for (std::size_t i = 0; i < dom->dimensions(); ++i) {
      payload.concatenated.push_back(1.0);
      for (std::size_t v = 1; v < dom->attribute_size(i); ++v) {
        payload.concatenated.push_back(0.0);
      }
    }
    return Message{Sender::prover, std::move(payload)};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<PointMassMarginalStrategy>(*this);
  }
};

class UniformMarginalStrategy : public ProverStrategy {
 public:
  std::string name() const override { return "uniform-marginals"; }
  Message respond(const Message& query, const Distribution&,
                  NoiseSource&) override {
    auto dom = domain_from_query(query);
    if (!dom) return Message{Sender::prover, MarginalsPayload{}};
    MarginalsPayload payload;
    for (std::size_t i = 0; i < dom->dimensions(); ++i) {
      const double u = 1.0 / static_cast<double>(dom->attribute_size(i));
      for (std::size_t v = 0; v < dom->attribute_size(i); ++v) {
        payload.concatenated.push_back(u);
      }
    }
    return Message{Sender::prover, std::move(payload)};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<UniformMarginalStrategy>(*this);
  }
};

// Honest marginals with mass shifted inside every block.
class TiltedMarginalStrategy : public ProverStrategy {
 public:
  explicit TiltedMarginalStrategy(double shift) : shift_(shift) {}
  std::string name() const override { return "tilted-marginals"; }
  Message respond(const Message& query, const Distribution& d,
                  NoiseSource&) override {
    auto dom = domain_from_query(query);
    if (!dom) return Message{Sender::prover, MarginalsPayload{}};
    auto blocks = marginals_of(d, *dom).blocks();
    for (auto& block : blocks) {
      if (block.size() < 2) continue;
      const double moved = std::min(shift_, block[0]);
      block[0] -= moved;
      block[1] += moved;
    }
    return Message{Sender::prover,
                   MarginalsPayload{Marginals(blocks).concatenated()}};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<TiltedMarginalStrategy>(*this);
  }

 private:
  double shift_;
};

// Sends back a copy of the verifier's query: schema violation.
class ReplayStrategy : public ProverStrategy {
 public:
  std::string name() const override { return "replay-previous-message"; }
  Message respond(const Message& query, const Distribution&,
                  NoiseSource&) override {
    return Message{Sender::prover, query.payload};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<ReplayStrategy>(*this);
  }
};

class UnnormalizedMarginalStrategy : public ProverStrategy {
 public:
  std::string name() const override { return "unnormalized-marginals"; }
  Message respond(const Message& query, const Distribution& d,
                  NoiseSource&) override {
    auto dom = domain_from_query(query);
    if (!dom) return Message{Sender::prover, MarginalsPayload{}};
    MarginalsPayload payload{marginals_of(d, *dom).concatenated()};
    for (double& x : payload.concatenated) x *= 1.5;
    return Message{Sender::prover, std::move(payload)};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<UnnormalizedMarginalStrategy>(*this);
  }
};

}  // namespace

IndependenceProtocol::IndependenceProtocol(ProductDomain dom, double sigma,
                                           double epsilon)
    : dom_(std::move(dom)), sigma_(sigma), epsilon_(epsilon) {
  if (!(sigma_ > 0.0 && sigma_ < 1.0)) {
    throw std::invalid_argument("sigma must lie in (0,1)");
  }
  sample_size_ = dp_identity_sample_size(dom_.flat_size(), sigma_, epsilon_);
}

Transcript IndependenceProtocol::run(const Distribution& d,
                                     ProverStrategy& prover,
                                     NoiseSource& rng) const {
  Transcript t;
  const Message query = domain_query(dom_);
  t.messages.push_back(query);
  NoiseSource prover_rng = rng.split(0x9a);
  Message reply = prover.respond(query, d, prover_rng);
  t.messages.push_back(reply);

  const auto* payload = std::get_if<MarginalsPayload>(&reply.payload);
  if (payload == nullptr) {
    t.finish(Decision::reject, /*was_malformed=*/true);
    return t;
  }
  auto m = parse_marginals(payload->concatenated, dom_);
  if (!m) {
    t.finish(Decision::reject, /*was_malformed=*/true);
    return t;
  }

  // Communication is complete; only now is the sample drawn.
  const Distribution induced = product_from_marginals(*m, dom_);
  const auto sample = d.sample_many(sample_size_, rng);
  const bool ok = dp_identity_test(sample, induced, sigma_, epsilon_, rng);
  t.finish(ok ? Decision::accept : Decision::reject);
  return t;
}

Decision verify_independence(const std::vector<double>& concatenated_marginals,
                             std::span<const std::int64_t> sample,
                             const ProductDomain& dom, double sigma,
                             double epsilon, NoiseSource& rng) {
  auto m = parse_marginals(concatenated_marginals, dom);
  if (!m) return Decision::reject;
  const Distribution induced = product_from_marginals(*m, dom);
  return dp_identity_test(sample, induced, sigma, epsilon, rng)
             ? Decision::accept
             : Decision::reject;
}

std::unique_ptr<ProverStrategy> make_honest_marginal_strategy() {
  return std::make_unique<HonestMarginalStrategy>();
}

std::vector<std::unique_ptr<ProverStrategy>> make_marginal_adversary_pool() {
  std::vector<std::unique_ptr<ProverStrategy>> pool;
  pool.push_back(std::make_unique<HonestMarginalStrategy>());
  pool.push_back(std::make_unique<PointMassMarginalStrategy>());
  pool.push_back(std::make_unique<UniformMarginalStrategy>());
  pool.push_back(std::make_unique<TiltedMarginalStrategy>(0.2));
  pool.push_back(std::make_unique<ReplayStrategy>());
  pool.push_back(std::make_unique<UnnormalizedMarginalStrategy>());
  return pool;
}

std::pair<Distribution, ProductDomain> lift_to_hypercube(
    const Distribution& d) {
  Distribution padded = pad_to_power_of_two(d);
  std::size_t dim = 0;
  while ((std::size_t{1} << dim) < padded.domain_size()) ++dim;
  dim = std::max<std::size_t>(dim, 1);
  // The canonical bijection sends index i to its big-endian bits, which is
  // exactly the lexicographic flattening: the pmf carries over unchanged.
  return {std::move(padded),
          ProductDomain(std::vector<std::size_t>(dim, 2))};
}

UniformityResult verify_uniformity_via_independence(
    const Distribution& d, double sigma, const Protocol& independence_protocol,
    ProverStrategy& prover, NoiseSource& rng) {
  if (d.domain_size() < 2) {
    throw std::invalid_argument("domain must have at least two elements");
  }
  auto [cube, dom] = lift_to_hypercube(d);
  UniformityResult result;

  const Transcript t = run_protocol(independence_protocol, prover, cube, rng);
  result.independence_stage_accepted = t.decision == Decision::accept;
  if (!result.independence_stage_accepted) return result;

  const std::size_t dims = dom.dimensions();
  const std::size_t s = identity_sample_size(cube.domain_size(), sigma);
  const auto sample = cube.sample_many(s, rng);
  const double radius =
      2.0 * std::sqrt(std::log(static_cast<double>(std::max<std::size_t>(
                dims, 2)))) /
      std::sqrt(static_cast<double>(s));
  result.marginal_stage_accepted = true;
  for (std::size_t bit = 0; bit < dims; ++bit) {
    std::size_t ones = 0;
    const std::size_t shift = dims - 1 - bit;
    for (std::int64_t x : sample) {
      ones += (static_cast<std::uint64_t>(x) >> shift) & 1;
    }
    const double freq =
        static_cast<double>(ones) / static_cast<double>(sample.size());
    if (std::fabs(freq - 0.5) > radius) {
      result.marginal_stage_accepted = false;
      break;
    }
  }
  result.decision = result.marginal_stage_accepted ? Decision::accept
                                                   : Decision::reject;
  return result;
}

UniformityResult verify_uniformity_via_independence(const Distribution& d,
                                                    double sigma,
                                                    double epsilon,
                                                    ProverStrategy& prover,
                                                    NoiseSource& rng) {
  auto [cube, dom] = lift_to_hypercube(d);
  const IndependenceProtocol protocol(std::move(dom), sigma, epsilon);
  return verify_uniformity_via_independence(d, sigma, protocol, prover, rng);
}

}  // namespace dpip
