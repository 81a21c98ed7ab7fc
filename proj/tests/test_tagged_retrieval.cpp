#include <cmath>

#include "doctest.h"
#include "dpip/tagged_retrieval.hpp"

using namespace dpip;

namespace {

// Two-level instance compatible with the private desk parameters at
// N = 256, s = 64: a few heavy elements under p_max, the rest below p_min.
Distribution desk_two_level() {
  std::vector<double> pmf(256, 0.2 / 248.0);  // 8.06e-4 < p_min = 1.17e-3
  for (int i = 0; i < 8; ++i) pmf[i] = 0.1;   // < p_max = 0.1439 at s = 64
  return Distribution(std::move(pmf));
}

}  // namespace

TEST_CASE("derived parameter formulas") {
  SUBCASE("require-block values") {
    const RetrievalParams p = derive_params(0.5, std::exp(-5.0), 0.2, 1000, 4096);
    CHECK(p.p_max == doctest::Approx(0.01));
    CHECK(p.tau == doctest::Approx(0.008));
    CHECK(p.sensitivity_bound ==
          doctest::Approx(3.0 * std::log(1000.0) + 50.0));
    CHECK(p.collision_cap == 3);
  }
  SUBCASE("infeasible regime is rejected") {
    // p_min = sigma/N exceeds p_max = log(1/delta)/(eps s).
    CHECK_THROWS_AS(derive_params(1.0, 1e-4, 0.9, 100000, 16),
                    std::invalid_argument);
    CHECK_THROWS_AS(derive_params(-1.0, 1e-4, 0.3, 64, 256),
                    std::invalid_argument);
  }
  SUBCASE("non-private constants") {
    const RetrievalParams p = derive_params_nonprivate(0.3, 256, 256);
    CHECK(p.p_max == doctest::Approx(1.0 / 256));
    CHECK(p.p_min == doctest::Approx(0.3 / 256000.0));
    CHECK(p.tau == doctest::Approx(0.3 * 0.3 * 0.3 / 80000.0));
    CHECK(p.collision_cap == 6);  // ceil(ln 256)
  }
  SUBCASE("bin edges cover the tag range without gaps") {
    const RetrievalParams p = derive_params(1.0, 1e-4, 0.3, 64, 256);
    CHECK(p.bin_edge(p.min_bin()) <= p.p_min * (1 + 1e-9));
    CHECK(p.bin_edge(p.max_bin()) <= p.p_max * (1 + 1e-9));
    CHECK(p.bin_edge(p.max_bin() + 1) > p.p_max * (1 - 1e-9));
    CHECK(p.bin_of_tag(p.p_min).has_value());
    CHECK(p.bin_of_tag(p.p_max).has_value());
    CHECK(p.bin_of_tag(p.p_max) == p.max_bin());
    CHECK_FALSE(p.bin_of_tag(p.p_min / 2).has_value());
    CHECK_FALSE(p.bin_of_tag(p.p_max * 2).has_value());
    CHECK_FALSE(p.bin_of_tag(std::nan("")).has_value());
  }
}

TEST_CASE("seed element draws and the collision cap") {
  SUBCASE("single draw never rejects") {
    NoiseSource rng(1);
    CHECK(draw_seed_elements(1, 10, rng, 3).has_value());
  }
  SUBCASE("four draws from a single element always reject at cap 3") {
    NoiseSource rng(2);
    CHECK_FALSE(draw_seed_elements(4, 1, rng, 3).has_value());
  }
  SUBCASE("rejection is rare for a roomy domain") {
    NoiseSource rng(3);
    std::size_t rejects = 0;
    const int runs = 10000;
    for (int run = 0; run < runs; ++run) {
      NoiseSource trial = rng.split(run);
      rejects += draw_seed_elements(100, 1 << 16, trial, 3) ? 0 : 1;
    }
    CHECK(static_cast<double>(rejects) / runs <= 0.01);
  }
}

TEST_CASE("honest tags threshold at p_min") {
  const Distribution d = desk_two_level();
  const std::vector<std::int64_t> seeds{0, 7, 100, 200};
  const auto tags = honest_tag_prover(d, seeds, 0.3 / 256.0);
  CHECK(tags[0] == doctest::Approx(0.1));
  CHECK(tags[1] == doctest::Approx(0.1));
  CHECK(tags[2] == 0.0);  // below p_min
  CHECK(tags[3] == 0.0);
  const Distribution u = Distribution::uniform(16);
  const auto utags = honest_tag_prover(u, {1, 5, 5}, 0.01);
  for (double t : utags) CHECK(t == doctest::Approx(1.0 / 16));
}

TEST_CASE("max multiplicity counts seed occurrences in T") {
  CHECK(max_multiplicity({1, 2, 3}, {4, 5, 6}) == 0);
  CHECK(max_multiplicity({1, 2, 3}, {2, 2, 5}) == 2);
  CHECK(max_multiplicity({7, 8, 9, 10}, {7, 7, 7, 7}) == 4);
  CHECK_THROWS_AS(max_multiplicity({1}, {1, 2}), std::invalid_argument);
}

TEST_CASE("collision counts enumerate pairs and triples exactly") {
  const RetrievalParams p = derive_params(1.0, 1e-4, 0.3, 4, 16);
  SUBCASE("hand-checked example") {
    // Single seed element 7 carrying a valid tag.
    const std::vector<double> tags{1.0 / 16, 0.0, 0.0, 0.0};
    const std::vector<std::int64_t> seeds{7, 1, 2, 3};
    const auto layout = assign_bins(tags, p);
    REQUIRE(layout.has_value());
    const auto counts =
        collision_counts(*layout, seeds, {7, 7, 4, 4}, {7, 5, 5, 5});
    const auto j = p.bin_of_tag(1.0 / 16).value();
    CHECK(counts.pair.at(j) == 2);
    CHECK(counts.triple.at(j) == 2);
    CHECK(counts.pair_zero_bin == 0);
  }
  SUBCASE("disjoint supports count zero") {
    const std::vector<double> tags{1.0 / 16, 1.0 / 16};
    const std::vector<std::int64_t> seeds{0, 1};
    const auto layout = assign_bins(tags, derive_params(1.0, 1e-4, 0.3, 2, 16));
    REQUIRE(layout.has_value());
    const auto counts = collision_counts(*layout, seeds, {5, 6}, {7, 8});
    for (const auto& [bin, count] : counts.pair) CHECK(count == 0);
    for (const auto& [bin, count] : counts.triple) CHECK(count == 0);
  }
  SUBCASE("zero-tag bin pairs are counted separately") {
    const std::vector<double> tags{0.0, 0.0};
    const std::vector<std::int64_t> seeds{3, 4};
    const auto layout = assign_bins(tags, derive_params(1.0, 1e-4, 0.3, 2, 16));
    REQUIRE(layout.has_value());
    const auto counts = collision_counts(*layout, seeds, {3, 3}, {4, 4});
    CHECK(counts.pair_zero_bin == 2);
  }
}

TEST_CASE("bin partition covers every honest tag exactly once") {
  const RetrievalParams p = derive_params(1.0, 1e-4, 0.3, 64, 256);
  const Distribution d = desk_two_level();
  NoiseSource rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    NoiseSource trial = rng.split(rep);
    const auto seeds = draw_seed_elements(64, 256, trial, 3);
    if (!seeds) continue;
    const auto tags = honest_tag_prover(d, *seeds, p.p_min);
    const auto layout = assign_bins(tags, p);
    REQUIRE(layout.has_value());
    std::size_t members = layout->zero_bin.size();
    for (const auto& [bin, indices] : layout->bins) members += indices.size();
    CHECK(members == 64);
  }
}

TEST_CASE("private retrieval protocol at the desk point") {
  const RetrievalParams params = desk_params_private(1.0, 1e-4, 0.3, 256);
  const Distribution uniform = Distribution::uniform(256);
  SUBCASE("honest prover is accepted with tagged output") {
    auto honest = make_honest_tag_strategy(params);
    const TaggedRetrievalProtocol protocol(params);
    const AcceptanceEstimate est =
        estimate_acceptance(protocol, *honest, uniform, 400, 61);
    CHECK(est.rate >= 0.75);
    NoiseSource rng(62);
    for (int rep = 0; rep < 50; ++rep) {
      NoiseSource trial = rng.split(rep);
      const Transcript t = run_protocol(protocol, *honest, uniform, trial);
      if (t.decision == Decision::accept) {
        REQUIRE(t.output.has_value());
        CHECK(t.output->size() == params.s);
        for (const auto& ts : *t.output) {
          CHECK(ts.tag == doctest::Approx(1.0 / 256));
        }
        break;
      }
    }
  }
  SUBCASE("inflation by 2 e^{5 tau} is rejected most of the time") {
    const double gamma = 2.0 * std::exp(5.0 * params.tau);
    auto inflating = make_tag_scale_strategy(params, gamma);
    const TaggedRetrievalProtocol protocol(params);
    const AcceptanceEstimate est =
        estimate_acceptance(protocol, *inflating, uniform, 400, 63);
    CHECK(est.rate <= 0.25);
  }
  SUBCASE("nonzero tags below p_min are malformed") {
    auto pool = make_tag_adversary_pool(params);
    const TaggedRetrievalProtocol protocol(params);
    NoiseSource rng(64);
    for (const auto& strategy : pool) {
      if (strategy->name() != "below-pmin-tags") continue;
      for (int rep = 0; rep < 20; ++rep) {
        NoiseSource trial = rng.split(rep);
        const Transcript t = run_protocol(protocol, *strategy, uniform, trial);
        CHECK(t.decision == Decision::reject);
      }
    }
  }
  SUBCASE("tag swapping on a two-level instance is caught") {
    const Distribution d = desk_two_level();
    const TaggedRetrievalProtocol protocol(params);
    auto honest = make_honest_tag_strategy(params);
    const AcceptanceEstimate honest_est =
        estimate_acceptance(protocol, *honest, d, 400, 65);
    CHECK(honest_est.rate >= 0.7);
    auto pool = make_tag_adversary_pool(params);
    for (const auto& strategy : pool) {
      if (strategy->name() != "tag-swap") continue;
      const AcceptanceEstimate est =
          estimate_acceptance(protocol, *strategy, d, 400, 66);
      CHECK(est.rate <= 0.3);
    }
  }
}

TEST_CASE("non-private retrieval protocol") {
  const Distribution uniform = Distribution::uniform(256);
  SUBCASE("honest prover accepted at the calibrated sample size") {
    NoiseSource rng(71);
    std::size_t accepts = 0;
    const int runs = 300;
    auto params = desk_params_nonprivate(0.3, 256);
    auto honest = make_honest_tag_strategy(params);
    for (int run = 0; run < runs; ++run) {
      NoiseSource trial = rng.split(run);
      const Transcript t = run_tagged_retrieval_nonprivate(
          uniform, 0.3, params.s, *honest, trial);
      accepts += t.decision == Decision::accept ? 1 : 0;
    }
    CHECK(static_cast<double>(accepts) / runs >= 0.75);
  }
  SUBCASE("tag inflation is rejected") {
    auto params = desk_params_nonprivate(0.3, 256);
    auto inflating = make_tag_scale_strategy(params, 2.0);
    NoiseSource rng(72);
    std::size_t rejects = 0;
    const int runs = 200;
    for (int run = 0; run < runs; ++run) {
      NoiseSource trial = rng.split(run);
      const Transcript t = run_tagged_retrieval_nonprivate(
          uniform, 0.3, params.s, *inflating, trial);
      rejects += t.decision == Decision::reject ? 1 : 0;
    }
    CHECK(static_cast<double>(rejects) / runs >= 0.75);
  }
  SUBCASE("variants share the transcript schema") {
    // Same seed: the message kinds coincide; the variants differ only in
    // verifier-internal noise, the ptr gate, and the collision caps.
    const RetrievalParams private_params = desk_params_private(1.0, 1e-4, 0.3, 256);
    auto honest = make_honest_tag_strategy(private_params);
    NoiseSource rng_a(73), rng_b(73);
    const Transcript a =
        run_tagged_retrieval_private(uniform, private_params, *honest, rng_a);
    auto nonprivate_params = desk_params_nonprivate(0.3, 256);
    nonprivate_params.s = private_params.s;
    auto honest_np = make_honest_tag_strategy(nonprivate_params);
    const TaggedRetrievalProtocol protocol(
        derive_params_nonprivate(0.3, private_params.s, 256));
    const Transcript b = run_protocol(protocol, *honest_np, uniform, rng_b);
    REQUIRE(a.messages.size() == b.messages.size());
    for (std::size_t i = 0; i < a.messages.size(); ++i) {
      CHECK(a.messages[i].payload.index() == b.messages[i].payload.index());
    }
    // Identical public coins produce identical seed lists.
    const auto* seeds_a =
        std::get_if<ElementListPayload>(&a.messages[0].payload);
    const auto* seeds_b =
        std::get_if<ElementListPayload>(&b.messages[0].payload);
    REQUIRE(seeds_a != nullptr);
    REQUIRE(seeds_b != nullptr);
    CHECK(seeds_a->elements == seeds_b->elements);
  }
}

TEST_CASE("tag quality metrics") {
  const Distribution d = desk_two_level();
  const double sigma = 0.3;
  SUBCASE("exact tags have zero heavy error") {
    const std::vector<TaggedSample> tagged{{0, 0.1}, {1, 0.1}};
    const TagQuality q = tag_quality(tagged, d, sigma, 256);
    CHECK(q.heavy_error == doctest::Approx(0.0));
    CHECK(q.light_mass == doctest::Approx(0.0));
  }
  SUBCASE("all-zero tags count the light mass") {
    const std::vector<TaggedSample> tagged{{0, 0.0}, {100, 0.0}};
    const TagQuality q = tag_quality(tagged, d, sigma, 256);
    CHECK(q.heavy_error == doctest::Approx(0.0));
    CHECK(q.light_mass ==
          doctest::Approx((0.1 + 0.2 / 248.0) / 2.0));
  }
  SUBCASE("uniformly inflated tags have the min-ratio error") {
    const double tau = 0.027;
    const std::vector<TaggedSample> tagged{{0, 0.1 * (1 + tau)},
                                           {1, 0.1 * (1 + tau)}};
    const TagQuality q = tag_quality(tagged, d, sigma, 256);
    CHECK(q.heavy_error == doctest::Approx(1.0 - 1.0 / (1 + tau)));
  }
}

TEST_CASE("approximate histogram and the uniformity decision") {
  const RetrievalParams p = derive_params(1.0, 1e-4, 0.3, 64, 256);
  SUBCASE("uniform tags occupy one bucket containing 1/N") {
    std::vector<TaggedSample> tagged;
    for (int i = 0; i < 64; ++i) {
      tagged.push_back({i, 1.0 / 256});
    }
    const auto hist =
        approximate_histogram(tagged, p.tau, 256, p.p_min, p.p_max);
    REQUIRE(hist.buckets.size() == 1);
    const auto& bucket = hist.buckets.front();
    // The occupied bucket's level range covers the uniform mass.
    CHECK(bucket.mass_level / std::exp(0.5 * p.tau) <= 1.0 / 256 * (1 + 1e-9));
    CHECK(bucket.mass_level * std::exp(0.5 * p.tau) >= 1.0 / 256 * (1 - 1e-9));
    CHECK(bucket.estimated_mass == doctest::Approx(1.0).epsilon(0.05));
    CHECK(decide_distance_to_uniform(hist, 256, 0.1) ==
          DistanceVerdict::close);
  }
  SUBCASE("two-level tags occupy two buckets") {
    std::vector<TaggedSample> tagged;
    for (int i = 0; i < 32; ++i) tagged.push_back({i, 0.02});
    for (int i = 32; i < 64; ++i) tagged.push_back({100 + i, 0.002});
    const auto hist =
        approximate_histogram(tagged, p.tau, 256, p.p_min, p.p_max);
    CHECK(hist.buckets.size() == 2);
    double total = hist.light_mass;
    for (const auto& bucket : hist.buckets) total += bucket.estimated_mass;
    CHECK(total >= 0.99);
  }
  SUBCASE("empty input yields the all-zero histogram, decided far") {
    const auto hist = approximate_histogram({}, p.tau, 256, p.p_min, p.p_max);
    CHECK(hist.buckets.empty());
    CHECK(hist.light_mass == 0.0);
    CHECK(decide_distance_to_uniform(hist, 256, 0.1) == DistanceVerdict::far);
  }
  SUBCASE("point-mass-heavy tags are decided far") {
    // Half the sampled weight on one near-p_max atom.
    std::vector<TaggedSample> tagged;
    for (int i = 0; i < 32; ++i) tagged.push_back({0, 0.14});
    for (int i = 0; i < 32; ++i) tagged.push_back({1 + i, 0.0});
    const auto hist =
        approximate_histogram(tagged, p.tau, 256, p.p_min, p.p_max);
    CHECK(decide_distance_to_uniform(hist, 256, 0.1) == DistanceVerdict::far);
  }
}

TEST_CASE("single-element perturbations respect the sensitivity bounds") {
  // Changing one element of T moves each pair count by at most 3 (cap 3 on
  // seed multiplicities) and each triple count by at most 3 * m(T').
  const RetrievalParams p = derive_params(1.0, 1e-4, 0.3, 16, 32);
  NoiseSource rng(81);
  for (int rep = 0; rep < 30; ++rep) {
    NoiseSource trial = rng.split(rep);
    const auto seeds = draw_seed_elements(16, 32, trial, 3);
    if (!seeds) continue;
    const Distribution d = Distribution::uniform(32);
    const auto tags = honest_tag_prover(d, *seeds, p.p_min);
    const auto layout = assign_bins(tags, p);
    REQUIRE(layout.has_value());
    auto t = d.sample_many(16, trial);
    const auto t_prime = d.sample_many(16, trial);
    const auto base = collision_counts(*layout, *seeds, t, t_prime);
    const std::size_t m_prime = max_multiplicity(*seeds, t_prime);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::int64_t old = t[i];
      t[i] = static_cast<std::int64_t>(trial.uniform_int(32));
      const auto perturbed = collision_counts(*layout, *seeds, t, t_prime);
      for (const auto& [bin, count] : base.pair) {
        const double diff =
            std::fabs(static_cast<double>(count) -
                      static_cast<double>(perturbed.pair.at(bin)));
        CHECK(diff <= 3.0);
      }
      for (const auto& [bin, count] : base.triple) {
        const double diff =
            std::fabs(static_cast<double>(count) -
                      static_cast<double>(perturbed.triple.at(bin)));
        CHECK(diff <= 3.0 * std::max<double>(1.0, m_prime));
      }
      t[i] = old;
    }
  }
}

TEST_CASE("collision moments match the claim on a small instance") {
  // Fixed seeds, fresh T and T': Monte Carlo means within 4 standard
  // errors of s * sum D(S_k) and s^2 * sum D(S_k)^2.
  const RetrievalParams p = derive_params(1.0, 1e-4, 0.3, 32, 64);
  NoiseSource rng(91);
  const Distribution d = Distribution::uniform(64);
  const auto seeds = [&] {
    while (true) {
      NoiseSource trial = rng.split(rng.next_u64() & 0xffff);
      if (auto s = draw_seed_elements(32, 64, trial, 3)) return *s;
    }
  }();
  const auto tags = honest_tag_prover(d, seeds, p.p_min);
  const auto layout = assign_bins(tags, p);
  REQUIRE(layout.has_value());
  REQUIRE(layout->bins.size() == 1);
  const auto bin = layout->bins.begin()->first;

  const int resamples = 4000;
  std::vector<double> pair_counts(resamples), triple_counts(resamples);
  for (int r = 0; r < resamples; ++r) {
    NoiseSource trial = rng.split(1 << 20 | r);
    const auto t = d.sample_many(32, trial);
    const auto t_prime = d.sample_many(32, trial);
    const auto counts = collision_counts(*layout, seeds, t, t_prime);
    pair_counts[r] = static_cast<double>(counts.pair.at(bin));
    triple_counts[r] = static_cast<double>(counts.triple.at(bin));
  }
  double expected_pair = 0.0, expected_triple = 0.0;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    expected_pair += 32.0 * d.mass(static_cast<std::size_t>(seeds[k]));
    expected_triple += 32.0 * 32.0 *
                       d.mass(static_cast<std::size_t>(seeds[k])) *
                       d.mass(static_cast<std::size_t>(seeds[k]));
  }
  double pair_mean = 0.0, triple_mean = 0.0;
  for (int r = 0; r < resamples; ++r) {
    pair_mean += pair_counts[r] / resamples;
    triple_mean += triple_counts[r] / resamples;
  }
  double pair_var = 0.0, triple_var = 0.0;
  for (int r = 0; r < resamples; ++r) {
    pair_var += (pair_counts[r] - pair_mean) * (pair_counts[r] - pair_mean) /
                (resamples - 1);
    triple_var += (triple_counts[r] - triple_mean) *
                  (triple_counts[r] - triple_mean) / (resamples - 1);
  }
  CHECK(std::fabs(pair_mean - expected_pair) <=
        4.0 * std::sqrt(pair_var / resamples));
  CHECK(std::fabs(triple_mean - expected_triple) <=
        4.0 * std::sqrt(triple_var / resamples));
  CHECK(pair_var <= 3.0 * expected_pair * 1.1);
  CHECK(triple_var <=
        3.0 * (1.0 + 2.0 * p.p_max * 32.0) * expected_triple * 1.1);
}
