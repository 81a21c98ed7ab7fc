#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpip/noise.hpp"

namespace dpip {

/// Explicit probability mass function over the finite domain {0,...,N-1}.
///
/// Immutable after construction. The constructor renormalizes pmfs whose
/// total is within 1e-6 of 1 and rejects anything further off; entries must
/// be non-negative. Domains at desk scale are small enough that a dense
/// vector is the right representation.
class Distribution {
 public:
  explicit Distribution(std::vector<double> pmf);

  static Distribution uniform(std::size_t n);
  static Distribution point_mass(std::size_t n, std::size_t at);

  std::size_t domain_size() const { return pmf_.size(); }
  double mass(std::size_t i) const { return pmf_[i]; }
  const std::vector<double>& pmf() const { return pmf_; }

  /// CDF value after element i, i.e. sum of masses 0..i.
  double cdf(std::size_t i) const { return cdf_[i]; }

  /// One i.i.d. draw.
  std::int64_t sample(NoiseSource& rng) const;

  /// n i.i.d. draws.
  std::vector<std::int64_t> sample_many(std::size_t n, NoiseSource& rng) const;

  std::string to_json() const;
  static Distribution from_json(const std::string& text);

 private:
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

/// Product domain A_0 x ... x A_{d-1} with the canonical lexicographic
/// flattening. Attribute 0 is the most significant coordinate.
class ProductDomain {
 public:
  explicit ProductDomain(std::vector<std::size_t> attribute_sizes);

  std::size_t dimensions() const { return sizes_.size(); }
  std::size_t attribute_size(std::size_t i) const { return sizes_[i]; }
  const std::vector<std::size_t>& attribute_sizes() const { return sizes_; }
  std::size_t flat_size() const { return flat_size_; }

  std::size_t flatten(const std::vector<std::size_t>& tuple) const;
  std::vector<std::size_t> unflatten(std::size_t index) const;

  std::string to_json() const;
  static ProductDomain from_json(const std::string& text);

 private:
  std::vector<std::size_t> sizes_;
  std::size_t flat_size_;
};

/// Per-attribute probability vectors. Each block sums to 1 within 1e-9
/// (constructor renormalizes within 1e-6, as for Distribution).
class Marginals {
 public:
  explicit Marginals(std::vector<std::vector<double>> blocks);

  /// Parse from the concatenated wire form, splitting per dom.
  static Marginals from_concatenated(const std::vector<double>& flat,
                                     const ProductDomain& dom);

  std::size_t dimensions() const { return blocks_.size(); }
  const std::vector<double>& block(std::size_t i) const { return blocks_[i]; }
  const std::vector<std::vector<double>>& blocks() const { return blocks_; }

  /// Concatenated length sum |A_i| wire form.
  std::vector<double> concatenated() const;

 private:
  std::vector<std::vector<double>> blocks_;
};

/// Half the L1 distance between two pmfs on the same domain.
double tv_distance(const Distribution& p, const Distribution& q);
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

/// KL divergence with natural log; 0*log(0/q) = 0 and +infinity when
/// p_i > 0, q_i = 0.
double kl_divergence(const Distribution& p, const Distribution& q);

/// The product distribution induced by per-attribute marginals, flattened
/// in lexicographic order.
Distribution product_from_marginals(const Marginals& m,
                                    const ProductDomain& dom);

/// Projection of a flattened distribution onto each attribute.
Marginals marginals_of(const Distribution& d, const ProductDomain& dom);

/// Lexicographic quantile of the product distribution at u, found by a
/// sequential per-attribute binary search. Deterministic in u.
std::vector<std::size_t> sample_product_by_quantile(const Marginals& m,
                                                    const ProductDomain& dom,
                                                    double u);

/// Mixture (N/2^d) D + ((2^d-N)/2^d) Unif{N,...,2^d-1} over the padded
/// power-of-two domain. Satisfies
/// (N/2^d) tv(D, Unif[N]) = tv(D', Unif[2^d]) exactly.
Distribution pad_to_power_of_two(const Distribution& d);

}  // namespace dpip
