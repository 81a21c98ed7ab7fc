#include <cmath>

#include "doctest.h"
#include "dpip/dp.hpp"
#include "dpip/noise.hpp"
#include "dpip/stats.hpp"

using namespace dpip;

TEST_CASE("noise source replays bit-identically from its seed") {
  NoiseSource a(12345), b(12345);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  NoiseSource c(12345), d(54321);
  bool all_equal = true;
  for (int i = 0; i < 64; ++i) all_equal &= c.next_u64() == d.next_u64();
  CHECK_FALSE(all_equal);
  // Split streams are deterministic and distinct.
  CHECK(NoiseSource(1).split(3).next_u64() ==
        NoiseSource(1).split(3).next_u64());
  CHECK(NoiseSource(1).split(3).next_u64() !=
        NoiseSource(1).split(4).next_u64());
}

TEST_CASE("laplace release mean and variance") {
  NoiseSource rng(77);
  SUBCASE("zero-noise passthrough") {
    CHECK(laplace_release(5.0, 0.0, rng) == 5.0);
    CHECK(laplace_release(5.0, 1e-16, rng) == 5.0);
    CHECK_THROWS_AS(laplace_release(5.0, -1.0, rng), std::invalid_argument);
  }
  SUBCASE("sample mean and variance match Laplace moments") {
    const std::size_t draws = 100000;
    std::vector<double> xs(draws);
    for (auto& x : xs) x = laplace_release(5.0, 1.0, rng);
    CHECK(std::fabs(mean(xs) - 5.0) <= 0.02);
    const double var = sample_variance(xs);
    CHECK(var >= 2.0 * 0.95);
    CHECK(var <= 2.0 * 1.05);
  }
  SUBCASE("kolmogorov-smirnov distance to the Laplace cdf") {
    const std::size_t draws = 100000;
    std::vector<double> xs(draws);
    for (auto& x : xs) x = laplace_release(0.0, 2.0, rng);
    const double d = ks_distance(xs, [](double x) {
      return x < 0 ? 0.5 * std::exp(x / 2.0) : 1.0 - 0.5 * std::exp(-x / 2.0);
    });
    CHECK(d <= 0.01);
  }
}

TEST_CASE("ptr gate calibration") {
  const PrivacyParams params{1.0, 1e-4};
  const double margin = std::log(1e4);  // log(1/delta)/eps
  SUBCASE("configuration errors") {
    NoiseSource rng(1);
    CHECK_THROWS_AS(ptr_gate(0.0, margin * 0.5, params, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(ptr_gate(0.0, 20.0, PrivacyParams{1.0, 0.0}, rng),
                    std::invalid_argument);
  }
  SUBCASE("tiny statistic passes a huge bound") {
    NoiseSource rng(2);
    std::size_t passes = 0;
    for (int i = 0; i < 20000; ++i) {
      passes += ptr_gate(0.0, 40.0, params, rng) == PtrOutcome::pass ? 1 : 0;
    }
    CHECK(static_cast<double>(passes) / 20000.0 >= 1.0 - 1e-4 - 0.001);
  }
  SUBCASE("statistic above the bound is rejected") {
    NoiseSource rng(3);
    std::size_t passes = 0;
    for (int i = 0; i < 20000; ++i) {
      passes += ptr_gate(45.0, 40.0, params, rng) == PtrOutcome::pass ? 1 : 0;
    }
    // Passing requires a Laplace draw below the negated margin.
    CHECK(static_cast<double>(passes) / 20000.0 <= 1e-4 + 0.001);
  }
  SUBCASE("statistic at the release threshold passes half the time") {
    NoiseSource rng(4);
    std::size_t passes = 0;
    const int trials = 40000;
    for (int i = 0; i < trials; ++i) {
      passes += ptr_gate(40.0 - margin, 40.0, params, rng) == PtrOutcome::pass
                    ? 1
                    : 0;
    }
    const double rate = static_cast<double>(passes) / trials;
    CHECK(std::fabs(rate - 0.5) <= 3.0 * std::sqrt(0.25 / trials));
  }
}

TEST_CASE("composition accounting") {
  const PrivacyParams one = compose({0.7}, {1e-5});
  CHECK(one.epsilon == doctest::Approx(0.7));
  CHECK(one.delta == doctest::Approx(1e-5));
  const PrivacyParams split =
      compose(std::vector<double>(8, 0.125), std::vector<double>(8, 0.0));
  CHECK(split.epsilon == doctest::Approx(1.0));
  const PrivacyParams mixed = compose({0.1, 0.2}, {0.0, 1e-6});
  CHECK(mixed.epsilon == doctest::Approx(0.3));
  CHECK(mixed.delta == doctest::Approx(1e-6));
  // Order independence.
  const PrivacyParams swapped = compose({0.2, 0.1}, {1e-6, 0.0});
  CHECK(swapped.epsilon == doctest::Approx(mixed.epsilon));
  CHECK(swapped.delta == doctest::Approx(mixed.delta));
  CHECK_THROWS_AS(compose({}, {}), std::invalid_argument);
}

TEST_CASE("dp audit of decision mechanisms") {
  const std::vector<std::int64_t> x{1, 2, 3, 4, 5};
  const std::vector<std::int64_t> x_prime{1, 2, 7, 4, 5};
  NoiseSource rng(31);
  SUBCASE("input-oblivious mechanism never flags") {
    DecisionMechanism coin = [](const std::vector<std::int64_t>&,
                                NoiseSource& r) { return r.bernoulli(0.5); };
    const AuditReport report = audit_dp_decision(
        coin, x, x_prime, PrivacyParams{0.5, 0.0}, 20000, rng);
    CHECK_FALSE(report.violated);
  }
  SUBCASE("deterministic element test flags at any finite epsilon") {
    DecisionMechanism contains7 = [](const std::vector<std::int64_t>& data,
                                     NoiseSource&) {
      for (auto v : data) {
        if (v == 7) return true;
      }
      return false;
    };
    const AuditReport report = audit_dp_decision(
        contains7, x, x_prime, PrivacyParams{4.0, 0.0}, 20000, rng);
    CHECK(report.violated);
    CHECK(report.p_hat == doctest::Approx(0.0));
    CHECK(report.p_hat_prime == doctest::Approx(1.0));
  }
  SUBCASE("non-adjacent inputs rejected") {
    DecisionMechanism coin = [](const std::vector<std::int64_t>&,
                                NoiseSource&) { return true; };
    CHECK_THROWS_AS(
        audit_dp_decision(coin, x, x, PrivacyParams{1, 0}, 20000, rng),
        std::invalid_argument);
    std::vector<std::int64_t> twice{9, 2, 9, 4, 5};
    CHECK_THROWS_AS(
        audit_dp_decision(coin, x, twice, PrivacyParams{1, 0}, 20000, rng),
        std::invalid_argument);
    CHECK_THROWS_AS(
        audit_dp_decision(coin, x, x_prime, PrivacyParams{1, 0}, 100, rng),
        std::invalid_argument);
  }
}

TEST_CASE("audit report serializes to json") {
  AuditReport report;
  report.p_hat = 0.25;
  report.p_hat_prime = 0.5;
  report.violated = false;
  report.trials = 10000;
  const std::string text = report.to_json();
  CHECK(text.find("\"p_hat\":0.25") != std::string::npos);
  CHECK(text.find("\"violated\":false") != std::string::npos);
}
