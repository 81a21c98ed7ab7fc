#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "dpip/distribution.hpp"
#include "dpip/protocol.hpp"

namespace dpip {

/// Derived constants of the retrieval protocols. The private variant uses
/// p_max = log(1/delta)/(eps*s), p_min = sigma/N, tau = sigma^3,
/// B = log(p_max/p_min)/tau, b_min = (sigma/2B)*s (clamped up to 1 so a
/// checked bin is at least nonempty) and Delta = 3*log(s) +
/// 5*log(1/delta)/eps, with seed collision cap 3. The non-private variant
/// uses p_max = 1/s, p_min = sigma/1000N, tau = sigma^3/80000, relative
/// tolerance 4*tau, per-bin check threshold e^{-j tau} * s * sigma * tau /
/// (100 ln N) and collision cap ceil(ln N). Natural logarithms throughout.
///
/// band_scale and the noise allowances are the desk-scale widening knobs
/// described in config.hpp; (1, 0, 0) is the written-down check.
struct RetrievalParams {
  double epsilon = 1.0;
  double delta = 1e-4;
  double sigma = 0.3;
  std::size_t s = 64;
  std::size_t n = 256;
  bool private_variant = true;

  double p_max = 0.0;
  double p_min = 0.0;
  double tau = 0.0;
  double bin_range = 0.0;       // B
  double b_min = 0.0;
  double sensitivity_bound = 0.0;  // Delta
  std::size_t collision_cap = 3;

  double band_scale = 1.0;
  double pair_noise_allowance = 0.0;
  double triple_noise_allowance = 0.0;

  std::int64_t min_bin() const { return min_bin_; }
  std::int64_t max_bin() const { return max_bin_; }

  /// Lower edge e^{j tau}/N of bin j.
  double bin_edge(std::int64_t j) const;

  /// Bin of a positive tag, with 1e-12 relative slack at the edges; tags
  /// outside [p_min, p_max] have no bin. Zero tags live in S^-infinity and
  /// are not handled here.
  std::optional<std::int64_t> bin_of_tag(double tag) const;

  std::int64_t min_bin_ = 0;
  std::int64_t max_bin_ = 0;
};

/// Private-variant constants; throws on infeasible regimes
/// (p_min >= p_max or parameters out of range).
RetrievalParams derive_params(double epsilon, double delta, double sigma,
                              std::size_t s, std::size_t n);

/// Non-private-variant constants.
RetrievalParams derive_params_nonprivate(double sigma, std::size_t s,
                                         std::size_t n);

/// i.i.d. uniform seed elements; empty optional when any element appears
/// more than collision_cap times.
std::optional<std::vector<std::int64_t>> draw_seed_elements(
    std::size_t s, std::size_t n, NoiseSource& rng, std::size_t collision_cap);

/// Exact thresholded tags: D(x) when D(x) >= p_min, else 0.
std::vector<double> honest_tag_prover(const Distribution& d,
                                      const std::vector<std::int64_t>& seeds,
                                      double p_min);

/// m(T) = max over seed positions k of the number of occurrences of S_k in
/// T; 0 when no seed element appears in T.
std::size_t max_multiplicity(const std::vector<std::int64_t>& seeds,
                             const std::vector<std::int64_t>& t);

/// Partition of seed positions by tag bin; S^-infinity holds zero tags.
struct BinLayout {
  std::map<std::int64_t, std::vector<std::size_t>> bins;
  std::vector<std::size_t> zero_bin;
};

/// Assigns every position to its bin. Empty optional when some tag is
/// invalid (negative, NaN, nonzero below p_min, or above p_max).
std::optional<BinLayout> assign_bins(const std::vector<double>& tags,
                                     const RetrievalParams& params);

struct CollisionCounts {
  std::map<std::int64_t, std::uint64_t> pair;    // per bin j
  std::map<std::int64_t, std::uint64_t> triple;  // per bin j
  std::uint64_t pair_zero_bin = 0;               // S^-infinity pairs
};

/// Exact two- and three-way collision counts between the binned seeds and
/// the fresh samples T, T'.
CollisionCounts collision_counts(const BinLayout& layout,
                                 const std::vector<std::int64_t>& seeds,
                                 const std::vector<std::int64_t>& t,
                                 const std::vector<std::int64_t>& t_prime);

/// End-to-end retrieval protocol (either variant, chosen by params).
/// Message flow: verifier sends the seed list, prover answers with tags,
/// the verifier's collision checks decide. Accepting transcripts carry the
/// tagged output.
class TaggedRetrievalProtocol : public Protocol {
 public:
  explicit TaggedRetrievalProtocol(RetrievalParams params);
  std::string name() const override {
    return params_.private_variant ? "tagged-retrieval-private"
                                   : "tagged-retrieval-nonprivate";
  }
  Transcript run(const Distribution& d, ProverStrategy& prover,
                 NoiseSource& rng) const override;
  const RetrievalParams& params() const { return params_; }

 private:
  RetrievalParams params_;
};

/// Convenience wrappers for the two variants.
Transcript run_tagged_retrieval_private(const Distribution& d,
                                        const RetrievalParams& params,
                                        ProverStrategy& prover,
                                        NoiseSource& rng);
Transcript run_tagged_retrieval_nonprivate(const Distribution& d, double sigma,
                                           std::size_t s,
                                           ProverStrategy& prover,
                                           NoiseSource& rng);

struct TagQuality {
  double heavy_error = 0.0;  // mean over tags >= sigma/N of 1 - min ratio
  double light_mass = 0.0;   // mean true mass of tags < sigma/N
};

/// Test-side quality metrics of a tagged output against the true
/// distribution.
TagQuality tag_quality(const std::vector<TaggedSample>& tagged,
                       const Distribution& d, double sigma, std::size_t n);

struct HistogramBucket {
  std::int64_t bin = 0;
  double mass_level = 0.0;      // geometric midpoint e^{(j+1/2) tau}/N
  double estimated_mass = 0.0;  // estimated total probability in the bucket
};

struct ApproximateHistogram {
  std::vector<HistogramBucket> buckets;
  double light_mass = 0.0;  // leftover below p_min
};

/// Histogram over the geometric e^{j tau} grid from a tagged output; pure
/// post-processing, never touches verifier samples. Uniform seeds put
/// |S^j|/s of the domain in bucket j, so its total mass is estimated by
/// (|S^j|/s) * N * level.
ApproximateHistogram approximate_histogram(
    const std::vector<TaggedSample>& tagged, double tau, std::size_t n,
    double p_min, double p_max);

enum class DistanceVerdict { close, far };

/// Demo label-invariant decision: estimated TV distance to uniform from
/// the bucket masses, thresholded. An empty histogram is far by
/// convention.
DistanceVerdict decide_distance_to_uniform(const ApproximateHistogram& hist,
                                           std::size_t n, double threshold);

/// Desk-calibrated parameter sets: s and the widening knobs come from the
/// configuration table for the given test point.
RetrievalParams desk_params_private(double epsilon, double delta, double sigma,
                                    std::size_t n);
RetrievalParams desk_params_nonprivate(double sigma, std::size_t n);

/// Honest tag strategy and the adversary pool (tag scaling, bin shuffle,
/// tag swap, all-zero, malformed variants). Strategies carry the public
/// protocol parameters.
std::unique_ptr<ProverStrategy> make_honest_tag_strategy(
    const RetrievalParams& params);
std::unique_ptr<ProverStrategy> make_tag_scale_strategy(
    const RetrievalParams& params, double gamma);
std::unique_ptr<ProverStrategy> make_bin_shuffle_strategy(
    const RetrievalParams& params);
std::vector<std::unique_ptr<ProverStrategy>> make_tag_adversary_pool(
    const RetrievalParams& params);

}  // namespace dpip
