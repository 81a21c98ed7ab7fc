#include "dpip/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace dpip {

namespace {

constexpr double kRenormTolerance = 1e-6;

void validate_and_renormalize(std::vector<double>& pmf) {
  if (pmf.empty()) throw std::invalid_argument("pmf must be non-empty");
  double total = 0.0;
  for (double x : pmf) {
    if (!(x >= 0.0)) {  // also catches NaN
      throw std::invalid_argument("pmf entries must be non-negative");
    }
    total += x;
  }
  if (std::fabs(total - 1.0) > kRenormTolerance) {
    throw std::invalid_argument("pmf does not sum to 1");
  }
  for (double& x : pmf) x /= total;
}

}  // namespace

Distribution::Distribution(std::vector<double> pmf) : pmf_(std::move(pmf)) {
  validate_and_renormalize(pmf_);
  cdf_.resize(pmf_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf_.size(); ++i) {
    acc += pmf_[i];
    cdf_[i] = acc;
  }
  cdf_.back() = 1.0;
}

Distribution Distribution::uniform(std::size_t n) {
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::point_mass(std::size_t n, std::size_t at) {
  std::vector<double> pmf(n, 0.0);
  pmf.at(at) = 1.0;
  return Distribution(std::move(pmf));
}

std::int64_t Distribution::sample(NoiseSource& rng) const {
  const double u = rng.uniform_open_closed();
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<std::int64_t>(it - cdf_.begin());
}

std::vector<std::int64_t> Distribution::sample_many(std::size_t n,
                                                    NoiseSource& rng) const {
  std::vector<std::int64_t> out(n);
  for (auto& x : out) x = sample(rng);
  return out;
}

std::string Distribution::to_json() const {
  nlohmann::json j;
  j["domain_size"] = pmf_.size();
  j["pmf"] = pmf_;
  return j.dump();
}

Distribution Distribution::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  std::vector<double> pmf = j.at("pmf").get<std::vector<double>>();
  if (j.contains("domain_size") &&
      j.at("domain_size").get<std::size_t>() != pmf.size()) {
    throw std::invalid_argument("domain_size does not match pmf length");
  }
  return Distribution(std::move(pmf));
}

ProductDomain::ProductDomain(std::vector<std::size_t> attribute_sizes)
    : sizes_(std::move(attribute_sizes)) {
  if (sizes_.empty()) throw std::invalid_argument("empty attribute list");
  flat_size_ = 1;
  for (std::size_t s : sizes_) {
    if (s == 0) throw std::invalid_argument("attribute size must be positive");
    if (flat_size_ > std::numeric_limits<std::size_t>::max() / s) {
      throw std::invalid_argument("product domain too large");
    }
    flat_size_ *= s;
  }
}

std::size_t ProductDomain::flatten(const std::vector<std::size_t>& tuple) const {
  if (tuple.size() != sizes_.size()) {
    throw std::invalid_argument("tuple arity mismatch");
  }
  std::size_t index = 0;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (tuple[i] >= sizes_[i]) throw std::out_of_range("tuple entry out of range");
    index = index * sizes_[i] + tuple[i];
  }
  return index;
}

std::vector<std::size_t> ProductDomain::unflatten(std::size_t index) const {
  if (index >= flat_size_) throw std::out_of_range("index out of range");
  std::vector<std::size_t> tuple(sizes_.size());
  for (std::size_t i = sizes_.size(); i-- > 0;) {
    tuple[i] = index % sizes_[i];
    index /= sizes_[i];
  }
  return tuple;
}

std::string ProductDomain::to_json() const {
  nlohmann::json j;
  j["attribute_sizes"] = sizes_;
  return j.dump();
}

ProductDomain ProductDomain::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  return ProductDomain(j.at("attribute_sizes").get<std::vector<std::size_t>>());
}

Marginals::Marginals(std::vector<std::vector<double>> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw std::invalid_argument("empty marginal list");
  for (auto& block : blocks_) validate_and_renormalize(block);
}

Marginals Marginals::from_concatenated(const std::vector<double>& flat,
                                       const ProductDomain& dom) {
  std::size_t expected = 0;
  for (std::size_t i = 0; i < dom.dimensions(); ++i) {
    expected += dom.attribute_size(i);
  }
  if (flat.size() != expected) {
    throw std::invalid_argument("concatenated marginal length mismatch");
  }
  std::vector<std::vector<double>> blocks;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < dom.dimensions(); ++i) {
    const std::size_t len = dom.attribute_size(i);
    blocks.emplace_back(flat.begin() + offset, flat.begin() + offset + len);
    offset += len;
  }
  return Marginals(std::move(blocks));
}

std::vector<double> Marginals::concatenated() const {
  std::vector<double> flat;
  for (const auto& block : blocks_) {
    flat.insert(flat.end(), block.begin(), block.end());
  }
  return flat;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("domain size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::fabs(p[i] - q[i]);
  return 0.5 * acc;
}

double tv_distance(const Distribution& p, const Distribution& q) {
  return tv_distance(p.pmf(), q.pmf());
}

double kl_divergence(const Distribution& p, const Distribution& q) {
  if (p.domain_size() != q.domain_size()) {
    throw std::invalid_argument("domain size mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < p.domain_size(); ++i) {
    const double pi = p.mass(i), qi = q.mass(i);
    if (pi == 0.0) continue;
    if (qi == 0.0) return std::numeric_limits<double>::infinity();
    acc += pi * std::log(pi / qi);
  }
  return std::max(acc, 0.0);
}

Distribution product_from_marginals(const Marginals& m,
                                    const ProductDomain& dom) {
  if (m.dimensions() != dom.dimensions()) {
    throw std::invalid_argument("marginal arity mismatch");
  }
  for (std::size_t i = 0; i < dom.dimensions(); ++i) {
    if (m.block(i).size() != dom.attribute_size(i)) {
      throw std::invalid_argument("marginal block length mismatch");
    }
  }
  std::vector<double> pmf(dom.flat_size(), 1.0);
  // Lexicographic fill: stride of attribute i is the product of later sizes.
  std::size_t stride = dom.flat_size();
  for (std::size_t i = 0; i < dom.dimensions(); ++i) {
    const auto& block = m.block(i);
    stride /= block.size();
    for (std::size_t index = 0; index < pmf.size(); ++index) {
      pmf[index] *= block[(index / stride) % block.size()];
    }
  }
  return Distribution(std::move(pmf));
}

Marginals marginals_of(const Distribution& d, const ProductDomain& dom) {
  if (d.domain_size() != dom.flat_size()) {
    throw std::invalid_argument("flattened size mismatch");
  }
  std::vector<std::vector<double>> blocks(dom.dimensions());
  for (std::size_t i = 0; i < dom.dimensions(); ++i) {
    blocks[i].assign(dom.attribute_size(i), 0.0);
  }
  std::size_t stride = dom.flat_size();
  std::vector<std::size_t> strides(dom.dimensions());
  for (std::size_t i = 0; i < dom.dimensions(); ++i) {
    stride /= dom.attribute_size(i);
    strides[i] = stride;
  }
  for (std::size_t index = 0; index < d.domain_size(); ++index) {
    const double mass = d.mass(index);
    if (mass == 0.0) continue;
    for (std::size_t i = 0; i < dom.dimensions(); ++i) {
      blocks[i][(index / strides[i]) % dom.attribute_size(i)] += mass;
    }
  }
  return Marginals(std::move(blocks));
}

std::vector<std::size_t> sample_product_by_quantile(const Marginals& m,
                                                    const ProductDomain& dom,
                                                    double u) {
  if (!(u > 0.0) || u > 1.0) {
    throw std::invalid_argument("quantile u must lie in (0,1]");
  }
  if (m.dimensions() != dom.dimensions()) {
    throw std::invalid_argument("marginal arity mismatch");
  }
  std::vector<std::size_t> tuple(dom.dimensions());
  // Walk attributes most-significant first; at each step locate the value
  // whose half-open CDF interval (lo, hi] contains u, then rescale u into
  // that interval. Zero-mass values have empty intervals and are skipped.
  for (std::size_t i = 0; i < dom.dimensions(); ++i) {
    const auto& block = m.block(i);
    std::size_t last_nonzero = 0;
    for (std::size_t v = 0; v < block.size(); ++v) {
      if (block[v] > 0.0) last_nonzero = v;
    }
    double lo = 0.0;
    std::size_t chosen = last_nonzero;
    for (std::size_t v = 0; v <= last_nonzero; ++v) {
      if (block[v] <= 0.0) continue;
      const double hi = (v == last_nonzero) ? 1.0 : lo + block[v];
      if (u <= hi) {
        chosen = v;
        u = std::min(std::max((u - lo) / (hi - lo), 1e-300), 1.0);
        break;
      }
      lo = hi;
    }
    tuple[i] = chosen;
  }
  return tuple;
}

Distribution pad_to_power_of_two(const Distribution& d) {
  const std::size_t n = d.domain_size();
  std::size_t padded = 1;
  while (padded < n) padded *= 2;
  if (padded == n) return d;
  const double keep = static_cast<double>(n) / static_cast<double>(padded);
  std::vector<double> pmf(padded, 0.0);
  for (std::size_t i = 0; i < n; ++i) pmf[i] = keep * d.mass(i);
  const double pad_mass = 1.0 / static_cast<double>(padded);
  for (std::size_t i = n; i < padded; ++i) pmf[i] = pad_mass;
  return Distribution(std::move(pmf));
}

}  // namespace dpip
