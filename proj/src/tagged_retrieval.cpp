#include "dpip/tagged_retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "dpip/config.hpp"
#include "dpip/dp.hpp"

namespace dpip {

namespace {

constexpr double kEdgeSlack = 1e-12;

void validate_common(double sigma, std::size_t s, std::size_t n) {
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw std::invalid_argument("sigma must lie in (0,1)");
  }
  if (s == 0) throw std::invalid_argument("sample size must be positive");
  if (n < 2) throw std::invalid_argument("domain must have >= 2 elements");
}

}  // namespace

double RetrievalParams::bin_edge(std::int64_t j) const {
  return std::exp(static_cast<double>(j) * tau) / static_cast<double>(n);
}

std::optional<std::int64_t> RetrievalParams::bin_of_tag(double tag) const {
  if (!std::isfinite(tag) || tag <= 0.0) return std::nullopt;
  if (tag < p_min * (1.0 - kEdgeSlack) || tag > p_max * (1.0 + kEdgeSlack)) {
    return std::nullopt;
  }
  const double x =
      std::log(tag * static_cast<double>(n) * (1.0 + kEdgeSlack)) / tau;
  auto j = static_cast<std::int64_t>(std::floor(x));
  return std::clamp(j, min_bin_, max_bin_);
}

RetrievalParams derive_params(double epsilon, double delta, double sigma,
                              std::size_t s, std::size_t n) {
  validate_common(sigma, s, n);
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0,1)");
  }
  RetrievalParams p;
  p.epsilon = epsilon;
  p.delta = delta;
  p.sigma = sigma;
  p.s = s;
  p.n = n;
  p.private_variant = true;
  const double log_inv_delta = std::log(1.0 / delta);
  p.p_max = log_inv_delta / (epsilon * static_cast<double>(s));
  p.p_min = sigma / static_cast<double>(n);
  p.tau = sigma * sigma * sigma;
  if (!(p.p_min < p.p_max)) {
    throw std::invalid_argument("infeasible regime: p_min >= p_max");
  }
  p.bin_range = std::log(p.p_max / p.p_min) / p.tau;
  p.b_min = std::max(1.0, (sigma / (2.0 * p.bin_range)) *
                              static_cast<double>(s));
  p.sensitivity_bound =
      3.0 * std::log(static_cast<double>(s)) + 5.0 * log_inv_delta / epsilon;
  p.collision_cap = 3;
  p.min_bin_ = static_cast<std::int64_t>(std::floor(
      std::log(p.p_min * static_cast<double>(n) * (1.0 + kEdgeSlack)) /
      p.tau));
  p.max_bin_ = static_cast<std::int64_t>(std::floor(
      std::log(p.p_max * static_cast<double>(n) * (1.0 + kEdgeSlack)) /
      p.tau));
  return p;
}

RetrievalParams derive_params_nonprivate(double sigma, std::size_t s,
                                         std::size_t n) {
  validate_common(sigma, s, n);
  RetrievalParams p;
  p.epsilon = 0.0;
  p.delta = 0.0;
  p.sigma = sigma;
  p.s = s;
  p.n = n;
  p.private_variant = false;
  p.p_max = 1.0 / static_cast<double>(s);
  p.p_min = sigma / (1000.0 * static_cast<double>(n));
  p.tau = sigma * sigma * sigma / 80000.0;
  if (!(p.p_min < p.p_max)) {
    throw std::invalid_argument("infeasible regime: p_min >= p_max");
  }
  p.bin_range = std::log(p.p_max / p.p_min) / p.tau;
  p.b_min = 1.0;  // the non-private variant thresholds bins per index
  p.sensitivity_bound = 0.0;
  p.collision_cap = static_cast<std::size_t>(
      std::ceil(std::log(static_cast<double>(n))));
  p.min_bin_ = static_cast<std::int64_t>(std::floor(
      std::log(p.p_min * static_cast<double>(n) * (1.0 + kEdgeSlack)) /
      p.tau));
  p.max_bin_ = static_cast<std::int64_t>(std::floor(
      std::log(p.p_max * static_cast<double>(n) * (1.0 + kEdgeSlack)) /
      p.tau));
  return p;
}

RetrievalParams desk_params_private(double epsilon, double delta, double sigma,
                                    std::size_t n) {
  const RetrievalCalibration cal =
      desk_config().retrieval_calibration(true, n, sigma, epsilon, delta);
  RetrievalParams p = derive_params(epsilon, delta, sigma, cal.s, n);
  p.band_scale = cal.band_scale;
  p.pair_noise_allowance = cal.pair_noise_allowance;
  p.triple_noise_allowance = cal.triple_noise_allowance;
  return p;
}

RetrievalParams desk_params_nonprivate(double sigma, std::size_t n) {
  const RetrievalCalibration cal =
      desk_config().retrieval_calibration(false, n, sigma, 0.0, 0.0);
  RetrievalParams p = derive_params_nonprivate(sigma, cal.s, n);
  p.band_scale = cal.band_scale;
  p.pair_noise_allowance = cal.pair_noise_allowance;
  p.triple_noise_allowance = cal.triple_noise_allowance;
  return p;
}

std::optional<std::vector<std::int64_t>> draw_seed_elements(
    std::size_t s, std::size_t n, NoiseSource& rng,
    std::size_t collision_cap) {
  std::vector<std::int64_t> seeds(s);
  std::unordered_map<std::int64_t, std::size_t> multiplicity;
  multiplicity.reserve(s);
  bool capped = false;
  for (auto& x : seeds) {
    x = static_cast<std::int64_t>(rng.uniform_int(n));
    if (++multiplicity[x] > collision_cap) capped = true;
  }
  if (capped) return std::nullopt;
  return seeds;
}

std::vector<double> honest_tag_prover(const Distribution& d,
                                      const std::vector<std::int64_t>& seeds,
                                      double p_min) {
  std::vector<double> tags(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const double mass = d.mass(static_cast<std::size_t>(seeds[i]));
    tags[i] = mass >= p_min ? mass : 0.0;
  }
  return tags;
}

std::size_t max_multiplicity(const std::vector<std::int64_t>& seeds,
                             const std::vector<std::int64_t>& t) {
  if (seeds.size() != t.size()) {
    throw std::invalid_argument("max_multiplicity: length mismatch");
  }
  std::unordered_map<std::int64_t, std::size_t> counts;
  counts.reserve(t.size());
  for (std::int64_t x : t) ++counts[x];
  std::size_t best = 0;
  for (std::int64_t x : seeds) {
    const auto it = counts.find(x);
    if (it != counts.end()) best = std::max(best, it->second);
  }
  return best;
}

std::optional<BinLayout> assign_bins(const std::vector<double>& tags,
                                     const RetrievalParams& params) {
  BinLayout layout;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const double tag = tags[i];
    if (tag == 0.0) {
      layout.zero_bin.push_back(i);
      continue;
    }
    const auto j = params.bin_of_tag(tag);
    if (!j) return std::nullopt;
    layout.bins[*j].push_back(i);
  }
  return layout;
}

CollisionCounts collision_counts(const BinLayout& layout,
                                 const std::vector<std::int64_t>& seeds,
                                 const std::vector<std::int64_t>& t,
                                 const std::vector<std::int64_t>& t_prime) {
  std::unordered_map<std::int64_t, std::pair<std::uint64_t, std::uint64_t>>
      counts;
  counts.reserve(seeds.size());
  for (std::int64_t x : seeds) counts.emplace(x, std::make_pair(0, 0));
  for (std::int64_t x : t) {
    auto it = counts.find(x);
    if (it != counts.end()) ++it->second.first;
  }
  for (std::int64_t x : t_prime) {
    auto it = counts.find(x);
    if (it != counts.end()) ++it->second.second;
  }
  CollisionCounts out;
  for (const auto& [j, members] : layout.bins) {
    std::uint64_t pair_count = 0, triple_count = 0;
    for (std::size_t k : members) {
      const auto& [ct, ct_prime] = counts.at(seeds[k]);
      pair_count += ct;
      triple_count += ct * ct_prime;
    }
    out.pair[j] = pair_count;
    out.triple[j] = triple_count;
  }
  for (std::size_t k : layout.zero_bin) {
    out.pair_zero_bin += counts.at(seeds[k]).first;
  }
  return out;
}

namespace {

// Tags must be element-consistent (duplicate seeds claim one mass) and the
// claimed masses of the distinct elements must form at most a probability
// distribution; violating either makes the message malformed.
bool tags_well_formed(const std::vector<std::int64_t>& seeds,
                      const std::vector<double>& tags) {
  std::unordered_map<std::int64_t, double> claimed;
  claimed.reserve(seeds.size());
  double total = 0.0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!std::isfinite(tags[i]) || tags[i] < 0.0) return false;
    const auto [it, inserted] = claimed.emplace(seeds[i], tags[i]);
    if (!inserted) {
      if (it->second != tags[i]) return false;
      continue;
    }
    total += tags[i];
  }
  return total <= 1.0 + 1e-9;
}

}  // namespace

TaggedRetrievalProtocol::TaggedRetrievalProtocol(RetrievalParams params)
    : params_(std::move(params)) {}

Transcript TaggedRetrievalProtocol::run(const Distribution& d,
                                        ProverStrategy& prover,
                                        NoiseSource& rng) const {
  const RetrievalParams& p = params_;
  if (d.domain_size() != p.n) {
    throw std::invalid_argument("distribution does not match params.n");
  }
  Transcript t;

  auto seeds_opt = draw_seed_elements(p.s, p.n, rng, p.collision_cap);
  if (!seeds_opt) {
    t.finish(Decision::reject);
    return t;
  }
  const std::vector<std::int64_t>& seeds = *seeds_opt;
  const Message query{Sender::verifier, ElementListPayload{seeds}};
  t.messages.push_back(query);

  NoiseSource prover_rng = rng.split(0x9a);
  Message reply = prover.respond(query, d, prover_rng);
  t.messages.push_back(reply);
  const auto* tag_payload = std::get_if<TagListPayload>(&reply.payload);
  if (tag_payload == nullptr || tag_payload->tags.size() != p.s ||
      !tags_well_formed(seeds, tag_payload->tags)) {
    t.finish(Decision::reject, /*was_malformed=*/true);
    return t;
  }
  const std::vector<double>& tags = tag_payload->tags;
  const auto layout = assign_bins(tags, p);
  if (!layout) {
    t.finish(Decision::reject, /*was_malformed=*/true);
    return t;
  }

  const auto sample_t = d.sample_many(p.s, rng);
  const auto sample_t_prime = d.sample_many(p.s, rng);

  if (p.private_variant) {
    const std::size_t m = std::max(max_multiplicity(seeds, sample_t),
                                   max_multiplicity(seeds, sample_t_prime));
    const PtrOutcome outcome =
        ptr_gate(static_cast<double>(m), p.sensitivity_bound,
                 PrivacyParams{p.epsilon, p.delta}, rng);
    if (outcome == PtrOutcome::reject) {
      t.finish(Decision::reject);
      return t;
    }
  }

  const CollisionCounts counts =
      collision_counts(*layout, seeds, sample_t, sample_t_prime);
  const double s_real = static_cast<double>(p.s);
  const double band =
      (p.private_variant ? p.tau : 4.0 * p.tau) * p.band_scale;
  const double pair_noise_scale =
      p.private_variant ? 3.0 / p.epsilon : 0.0;
  const double triple_noise_scale =
      p.private_variant ? 3.0 * p.sensitivity_bound / p.epsilon : 0.0;

  for (const auto& [j, members] : layout->bins) {
    const double size_j = static_cast<double>(members.size());
    bool checked;
    if (p.private_variant) {
      checked = size_j >= p.b_min;
    } else {
      const double threshold =
          std::exp(-static_cast<double>(j) * p.tau) * s_real * p.sigma *
          p.tau / (100.0 * std::log(static_cast<double>(p.n)));
      checked = size_j >= threshold;
    }
    if (!checked) continue;

    const double edge = p.bin_edge(j);
    const double pair_center = s_real * size_j * edge;
    const double pair_stat =
        p.private_variant
            ? laplace_release(static_cast<double>(counts.pair.at(j)),
                              pair_noise_scale, rng)
            : static_cast<double>(counts.pair.at(j));
    const double pair_tol = band * pair_center +
                            p.pair_noise_allowance * pair_noise_scale;
    if (std::fabs(pair_stat - pair_center) > pair_tol) {
      t.finish(Decision::reject);
      return t;
    }

    const double triple_center = s_real * s_real * size_j * edge * edge;
    const double triple_stat =
        p.private_variant
            ? laplace_release(static_cast<double>(counts.triple.at(j)),
                              triple_noise_scale, rng)
            : static_cast<double>(counts.triple.at(j));
    const double triple_tol = band * triple_center +
                              p.triple_noise_allowance * triple_noise_scale;
    if (std::fabs(triple_stat - triple_center) > triple_tol) {
      t.finish(Decision::reject);
      return t;
    }
  }

  const double zero_pairs = static_cast<double>(counts.pair_zero_bin);
  if (p.private_variant) {
    const double noisy = laplace_release(zero_pairs, pair_noise_scale, rng);
    if (noisy > 2.0 * p.p_min * s_real * s_real) {
      t.finish(Decision::reject);
      return t;
    }
  } else {
    const double limit = s_real *
                         static_cast<double>(layout->zero_bin.size()) *
                         p.sigma / (50.0 * static_cast<double>(p.n));
    if (zero_pairs > limit) {
      t.finish(Decision::reject);
      return t;
    }
  }

  std::vector<TaggedSample> output(p.s);
  for (std::size_t i = 0; i < p.s; ++i) {
    output[i] = TaggedSample{seeds[i], tags[i]};
  }
  t.output = std::move(output);
  t.finish(Decision::accept);
  return t;
}

Transcript run_tagged_retrieval_private(const Distribution& d,
                                        const RetrievalParams& params,
                                        ProverStrategy& prover,
                                        NoiseSource& rng) {
  if (!params.private_variant) {
    throw std::invalid_argument("params are not for the private variant");
  }
  TaggedRetrievalProtocol protocol(params);
  return run_protocol(protocol, prover, d, rng);
}

Transcript run_tagged_retrieval_nonprivate(const Distribution& d, double sigma,
                                           std::size_t s,
                                           ProverStrategy& prover,
                                           NoiseSource& rng) {
  RetrievalParams params = derive_params_nonprivate(sigma, s, d.domain_size());
  const RetrievalCalibration cal = desk_config().retrieval_calibration(
      false, d.domain_size(), sigma, 0.0, 0.0);
  params.band_scale = cal.band_scale;
  TaggedRetrievalProtocol protocol(params);
  return run_protocol(protocol, prover, d, rng);
}

TagQuality tag_quality(const std::vector<TaggedSample>& tagged,
                       const Distribution& d, double sigma, std::size_t n) {
  TagQuality q;
  if (tagged.empty()) return q;
  const double cut = sigma / static_cast<double>(n);
  for (const auto& [element, tag] : tagged) {
    const double mass = d.mass(static_cast<std::size_t>(element));
    if (tag >= cut) {
      double ratio = 0.0;
      if (mass > 0.0 && tag > 0.0) {
        ratio = std::min(tag / mass, mass / tag);
      }
      q.heavy_error += 1.0 - ratio;
    } else {
      q.light_mass += mass;
    }
  }
  const double s = static_cast<double>(tagged.size());
  q.heavy_error /= s;
  q.light_mass /= s;
  return q;
}

ApproximateHistogram approximate_histogram(
    const std::vector<TaggedSample>& tagged, double tau, std::size_t n,
    double p_min, double p_max) {
  ApproximateHistogram hist;
  if (tagged.empty()) return hist;
  std::map<std::int64_t, std::size_t> counts;
  for (const auto& [element, tag] : tagged) {
    if (tag <= 0.0 || tag < p_min) continue;
    const double clamped = std::min(tag, p_max);
    const auto j = static_cast<std::int64_t>(std::floor(
        std::log(clamped * static_cast<double>(n) * (1.0 + kEdgeSlack)) /
        tau));
    ++counts[j];
  }
  const double s = static_cast<double>(tagged.size());
  double covered = 0.0;
  for (const auto& [j, count] : counts) {
    HistogramBucket bucket;
    bucket.bin = j;
    bucket.mass_level =
        std::exp((static_cast<double>(j) + 0.5) * tau) /
        static_cast<double>(n);
    bucket.estimated_mass =
        (static_cast<double>(count) / s) * static_cast<double>(n) *
        bucket.mass_level;
    covered += bucket.estimated_mass;
    hist.buckets.push_back(bucket);
  }
  hist.light_mass = std::max(0.0, 1.0 - covered);
  return hist;
}

DistanceVerdict decide_distance_to_uniform(const ApproximateHistogram& hist,
                                           std::size_t n, double threshold) {
  if (hist.buckets.empty() && hist.light_mass == 0.0) {
    return DistanceVerdict::far;  // max-distance convention on empty input
  }
  const double uniform_mass = 1.0 / static_cast<double>(n);
  double elements = 0.0;
  double l1 = 0.0;
  for (const auto& bucket : hist.buckets) {
    if (bucket.mass_level <= 0.0) continue;
    const double count = bucket.estimated_mass / bucket.mass_level;
    elements += count;
    l1 += count * std::fabs(bucket.mass_level - uniform_mass);
  }
  const double light_elements =
      std::max(0.0, static_cast<double>(n) - elements);
  l1 += std::fabs(hist.light_mass - light_elements * uniform_mass);
  return 0.5 * l1 <= threshold ? DistanceVerdict::close
                               : DistanceVerdict::far;
}

namespace {

std::optional<std::vector<std::int64_t>> seeds_from_query(
    const Message& query) {
  const auto* payload = std::get_if<ElementListPayload>(&query.payload);
  if (payload == nullptr) return std::nullopt;
  return payload->elements;
}

class HonestTagStrategy : public ProverStrategy {
 public:
  explicit HonestTagStrategy(RetrievalParams params)
      : params_(std::move(params)) {}
  std::string name() const override { return "honest-tags"; }
  Message respond(const Message& query, const Distribution& d,
                  NoiseSource&) override {
    auto seeds = seeds_from_query(query);
    if (!seeds) return Message{Sender::prover, TagListPayload{}};
    return Message{Sender::prover,
                   TagListPayload{honest_tag_prover(d, *seeds,
                                                    params_.p_min)}};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<HonestTagStrategy>(*this);
  }

 private:
  RetrievalParams params_;
};

class TagScaleStrategy : public ProverStrategy {
 public:
  TagScaleStrategy(RetrievalParams params, double gamma)
      : params_(std::move(params)), gamma_(gamma) {}
  std::string name() const override {
    return "tag-scale-" + std::to_string(gamma_);
  }
  Message respond(const Message& query, const Distribution& d,
                  NoiseSource&) override {
    auto seeds = seeds_from_query(query);
    if (!seeds) return Message{Sender::prover, TagListPayload{}};
    auto tags = honest_tag_prover(d, *seeds, params_.p_min);
    for (double& tag : tags) tag *= gamma_;
    return Message{Sender::prover, TagListPayload{std::move(tags)}};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<TagScaleStrategy>(*this);
  }

 private:
  RetrievalParams params_;
  double gamma_;
};

// Every element's tag is relabelled to the lower edge of a uniformly
// random valid bin, consistently across duplicates.
class BinShuffleStrategy : public ProverStrategy {
 public:
  explicit BinShuffleStrategy(RetrievalParams params)
      : params_(std::move(params)) {}
  std::string name() const override { return "bin-shuffle"; }
  Message respond(const Message& query, const Distribution&,
                  NoiseSource& rng) override {
    auto seeds = seeds_from_query(query);
    if (!seeds) return Message{Sender::prover, TagListPayload{}};
    std::unordered_map<std::int64_t, double> assigned;
    const auto bins = static_cast<std::uint64_t>(params_.max_bin() -
                                                 params_.min_bin() + 1);
    TagListPayload payload;
    payload.tags.reserve(seeds->size());
    for (std::int64_t x : *seeds) {
      auto it = assigned.find(x);
      if (it == assigned.end()) {
        const std::int64_t j =
            params_.min_bin() +
            static_cast<std::int64_t>(rng.uniform_int(bins));
        it = assigned.emplace(x, params_.bin_edge(j)).first;
      }
      payload.tags.push_back(it->second);
    }
    return Message{Sender::prover, std::move(payload)};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<BinShuffleStrategy>(*this);
  }

 private:
  RetrievalParams params_;
};

// Honest tag values permuted among the distinct seed elements.
class TagSwapStrategy : public ProverStrategy {
 public:
  explicit TagSwapStrategy(RetrievalParams params)
      : params_(std::move(params)) {}
  std::string name() const override { return "tag-swap"; }
  Message respond(const Message& query, const Distribution& d,
                  NoiseSource& rng) override {
    auto seeds = seeds_from_query(query);
    if (!seeds) return Message{Sender::prover, TagListPayload{}};
    std::vector<std::int64_t> distinct;
    std::unordered_map<std::int64_t, double> honest;
    for (std::int64_t x : *seeds) {
      if (honest.emplace(x, 0.0).second) distinct.push_back(x);
    }
    std::vector<double> values;
    values.reserve(distinct.size());
    for (std::int64_t x : distinct) {
      const double mass = d.mass(static_cast<std::size_t>(x));
      values.push_back(mass >= params_.p_min ? mass : 0.0);
    }
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[rng.uniform_int(i)]);
    }
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      honest[distinct[i]] = values[i];
    }
    TagListPayload payload;
    payload.tags.reserve(seeds->size());
    for (std::int64_t x : *seeds) payload.tags.push_back(honest[x]);
    return Message{Sender::prover, std::move(payload)};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<TagSwapStrategy>(*this);
  }

 private:
  RetrievalParams params_;
};

class AllZeroTagStrategy : public ProverStrategy {
 public:
  std::string name() const override { return "all-zero-tags"; }
  Message respond(const Message& query, const Distribution&,
                  NoiseSource&) override {
    auto seeds = seeds_from_query(query);
    if (!seeds) return Message{Sender::prover, TagListPayload{}};
    return Message{Sender::prover,
                   TagListPayload{std::vector<double>(seeds->size(), 0.0)}};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<AllZeroTagStrategy>(*this);
  }
};

// Sends one tag too few: length schema violation.
class ShortTagListStrategy : public ProverStrategy {
 public:
  explicit ShortTagListStrategy(RetrievalParams params)
      : params_(std::move(params)) {}
  std::string name() const override { return "short-tag-list"; }
  Message respond(const Message& query, const Distribution& d,
                  NoiseSource&) override {
    auto seeds = seeds_from_query(query);
    if (!seeds) return Message{Sender::prover, TagListPayload{}};
    auto tags = honest_tag_prover(d, *seeds, params_.p_min);
    if (!tags.empty()) tags.pop_back();
    return Message{Sender::prover, TagListPayload{std::move(tags)}};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<ShortTagListStrategy>(*this);
  }

 private:
  RetrievalParams params_;
};

// Violates the p_min contract: a nonzero tag strictly below p_min.
class BelowPminStrategy : public ProverStrategy {
 public:
  explicit BelowPminStrategy(RetrievalParams params)
      : params_(std::move(params)) {}
  std::string name() const override { return "below-pmin-tags"; }
  Message respond(const Message& query, const Distribution& d,
                  NoiseSource&) override {
    auto seeds = seeds_from_query(query);
    if (!seeds) return Message{Sender::prover, TagListPayload{}};
    auto tags = honest_tag_prover(d, *seeds, params_.p_min);
    if (!tags.empty()) tags.front() = params_.p_min / 2.0;
    return Message{Sender::prover, TagListPayload{std::move(tags)}};
  }
  std::unique_ptr<ProverStrategy> clone() const override {
    return std::make_unique<BelowPminStrategy>(*this);
  }

 private:
  RetrievalParams params_;
};

}  // namespace

std::unique_ptr<ProverStrategy> make_honest_tag_strategy(
    const RetrievalParams& params) {
  return std::make_unique<HonestTagStrategy>(params);
}

std::unique_ptr<ProverStrategy> make_tag_scale_strategy(
    const RetrievalParams& params, double gamma) {
  return std::make_unique<TagScaleStrategy>(params, gamma);
}

std::unique_ptr<ProverStrategy> make_bin_shuffle_strategy(
    const RetrievalParams& params) {
  return std::make_unique<BinShuffleStrategy>(params);
}

std::vector<std::unique_ptr<ProverStrategy>> make_tag_adversary_pool(
    const RetrievalParams& params) {
  std::vector<std::unique_ptr<ProverStrategy>> pool;
  pool.push_back(std::make_unique<TagScaleStrategy>(params, 1.5));
  pool.push_back(std::make_unique<TagScaleStrategy>(params, 2.0));
  pool.push_back(std::make_unique<TagScaleStrategy>(params, 4.0));
  pool.push_back(std::make_unique<BinShuffleStrategy>(params));
  pool.push_back(std::make_unique<TagSwapStrategy>(params));
  pool.push_back(std::make_unique<AllZeroTagStrategy>());
  pool.push_back(std::make_unique<ShortTagListStrategy>(params));
  pool.push_back(std::make_unique<BelowPminStrategy>(params));
  return pool;
}

}  // namespace dpip
