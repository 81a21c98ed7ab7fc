#include "dpip/identity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "dpip/config.hpp"

namespace dpip {

std::size_t identity_sample_size(std::size_t n, double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw std::invalid_argument("sigma must lie in (0,1)");
  }
  const double s = desk_config().identity_coeff *
                   std::sqrt(static_cast<double>(n)) / (sigma * sigma);
  return static_cast<std::size_t>(std::ceil(s));
}

double empirical_tv_statistic(std::span<const std::int64_t> sample,
                              const Distribution& q) {
  const std::size_t n = q.domain_size();
  std::vector<std::size_t> counts(n, 0);
  std::size_t foreign = 0;
  for (std::int64_t x : sample) {
    if (x < 0 || static_cast<std::size_t>(x) >= n) {
      ++foreign;
    } else {
      ++counts[static_cast<std::size_t>(x)];
    }
  }
  const double total = static_cast<double>(sample.size());
  double acc = static_cast<double>(foreign) / total;
  for (std::size_t i = 0; i < n; ++i) {
    acc += std::fabs(static_cast<double>(counts[i]) / total - q.mass(i));
  }
  return 0.5 * acc;
}

double empirical_two_sample_tv(std::span<const std::int64_t> sample,
                               std::span<const std::int64_t> reference,
                               std::size_t n) {
  std::vector<double> emp_a(n, 0.0), emp_b(n, 0.0);
  double foreign = 0.0;
  for (std::int64_t x : sample) {
    if (x < 0 || static_cast<std::size_t>(x) >= n) {
      foreign += 1.0 / static_cast<double>(sample.size());
    } else {
      emp_a[static_cast<std::size_t>(x)] +=
          1.0 / static_cast<double>(sample.size());
    }
  }
  for (std::int64_t x : reference) {
    if (x < 0 || static_cast<std::size_t>(x) >= n) {
      foreign += 1.0 / static_cast<double>(reference.size());
    } else {
      emp_b[static_cast<std::size_t>(x)] +=
          1.0 / static_cast<double>(reference.size());
    }
  }
  double acc = foreign;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(emp_a[i] - emp_b[i]);
  return 0.5 * acc;
}

namespace {

enum class CalKind : std::uint8_t { identity = 1, two_sample = 2 };

struct CalKey {
  CalKind kind;
  std::size_t n;
  std::int64_t sigma_micro;  // 0 for two-sample
  std::size_t s;
  std::size_t s_ref;  // 0 for identity
  auto operator<=>(const CalKey&) const = default;
};

std::map<CalKey, double>& calibration_cache() {
  static std::map<CalKey, double> cache;
  return cache;
}

std::mutex& calibration_mutex() {
  static std::mutex m;
  return m;
}

double quantile_of(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

// Null quantile of the statistic under a uniform source, which maximizes
// the plug-in bias over references on [N]; thresholds calibrated here stay
// conservative for any reference.
double compute_threshold(const CalKey& key) {
  const DeskConfig& cfg = desk_config();
  const Distribution uniform = Distribution::uniform(key.n);
  const std::size_t draws = cfg.identity_calibration_draws;
  std::vector<double> stats(draws);
  NoiseSource rng(mix_seed(
      mix_seed(0x1d3717f1ULL + static_cast<std::uint64_t>(key.kind), key.n),
      mix_seed(static_cast<std::uint64_t>(key.s),
               static_cast<std::uint64_t>(key.s_ref) ^
                   static_cast<std::uint64_t>(key.sigma_micro))));
  for (std::size_t t = 0; t < draws; ++t) {
    NoiseSource trial = rng.split(t);
    const auto sample = uniform.sample_many(key.s, trial);
    if (key.kind == CalKind::identity) {
      stats[t] = empirical_tv_statistic(sample, uniform);
    } else {
      const auto reference = uniform.sample_many(key.s_ref, trial);
      stats[t] = empirical_two_sample_tv(sample, reference, key.n);
    }
  }
  return quantile_of(std::move(stats), cfg.identity_null_quantile);
}

double lookup_threshold(const CalKey& key) {
  {
    std::lock_guard<std::mutex> lock(calibration_mutex());
    auto it = calibration_cache().find(key);
    if (it != calibration_cache().end()) return it->second;
  }
  const double threshold = compute_threshold(key);
  std::lock_guard<std::mutex> lock(calibration_mutex());
  return calibration_cache().emplace(key, threshold).first->second;
}

}  // namespace

double identity_threshold(std::size_t n, double sigma, std::size_t s) {
  if (s == 0) throw std::invalid_argument("sample size must be positive");
  const CalKey key{CalKind::identity, n,
                   static_cast<std::int64_t>(std::llround(sigma * 1e6)), s, 0};
  return lookup_threshold(key);
}

double two_sample_threshold(std::size_t n, std::size_t s, std::size_t s_ref) {
  if (s == 0 || s_ref == 0) {
    throw std::invalid_argument("sample sizes must be positive");
  }
  const CalKey key{CalKind::two_sample, n, 0, s, s_ref};
  return lookup_threshold(key);
}

bool identity_test_nonprivate(std::span<const std::int64_t> sample,
                              const Distribution& q, double sigma) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  const double threshold =
      identity_threshold(q.domain_size(), sigma, sample.size());
  return empirical_tv_statistic(sample, q) <= threshold;
}

TesterSpec privatize_tester(const TesterSpec& inner, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!inner.decide) throw std::invalid_argument("inner tester has no decision");
  const std::size_t m =
      static_cast<std::size_t>(std::ceil(6.0 / epsilon));
  const std::size_t s = inner.sample_size;
  TesterSpec wrapped;
  wrapped.sample_size = m * s;
  wrapped.error_prob = 1.0 / 3.0;
  wrapped.decide = [inner = inner.decide, m, s](
                       std::span<const std::int64_t> sample,
                       NoiseSource& rng) {
    if (sample.size() < m * s) {
      throw std::invalid_argument("insufficient sample for wrapper");
    }
    const std::size_t block = rng.uniform_int(m);
    const bool verdict = inner(sample.subspan(block * s, s), rng);
    return rng.bernoulli(1.0 / 6.0) ? !verdict : verdict;
  };
  return wrapped;
}

std::size_t dp_identity_sample_size(std::size_t n, double sigma,
                                    double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const std::size_t m =
      static_cast<std::size_t>(std::ceil(6.0 / epsilon));
  return m * identity_sample_size(n, sigma);
}

bool dp_identity_test(std::span<const std::int64_t> sample,
                      const Distribution& q, double sigma, double epsilon,
                      NoiseSource& rng) {
  const std::size_t s = identity_sample_size(q.domain_size(), sigma);
  TesterSpec inner;
  inner.sample_size = s;
  inner.decide = [&q, sigma](std::span<const std::int64_t> block,
                             NoiseSource&) {
    return identity_test_nonprivate(block, q, sigma);
  };
  const TesterSpec wrapped = privatize_tester(inner, epsilon);
  if (sample.size() < wrapped.sample_size) {
    throw std::invalid_argument("insufficient sample for dp identity test");
  }
  return wrapped.decide(sample, rng);
}

AmTesterSpec privatize_am_tester(const AmTesterSpec& inner, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!inner.decide) throw std::invalid_argument("inner tester has no decision");
  const std::size_t m =
      static_cast<std::size_t>(std::ceil(6.0 / epsilon));
  const std::size_t s = inner.sample_size;
  AmTesterSpec wrapped;
  wrapped.sample_size = m * s;
  wrapped.error_prob = 11.0 / 36.0;  // 1 - 25/36
  wrapped.decide = [inner = inner.decide, m, s](
                       const std::vector<Message>& transcript,
                       std::span<const std::int64_t> sample,
                       NoiseSource& rng) {
    if (sample.size() < m * s) {
      throw std::invalid_argument("insufficient sample for wrapper");
    }
    const std::size_t block = rng.uniform_int(m);
    const bool verdict = inner(transcript, sample.subspan(block * s, s), rng);
    return rng.bernoulli(1.0 / 6.0) ? !verdict : verdict;
  };
  return wrapped;
}

std::string calibration_table_csv() {
  std::lock_guard<std::mutex> lock(calibration_mutex());
  std::ostringstream out;
  out << "kind,n,sigma,s,s_ref,threshold\n";
  out.precision(12);
  for (const auto& [key, threshold] : calibration_cache()) {
    out << (key.kind == CalKind::identity ? "identity" : "two-sample") << ','
        << key.n << ',' << static_cast<double>(key.sigma_micro) / 1e6 << ','
        << key.s << ',' << key.s_ref << ',' << threshold << '\n';
  }
  return out.str();
}

void load_calibration_table_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  std::lock_guard<std::mutex> lock(calibration_mutex());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string kind, n, sigma, s, s_ref, threshold;
    std::getline(fields, kind, ',');
    std::getline(fields, n, ',');
    std::getline(fields, sigma, ',');
    std::getline(fields, s, ',');
    std::getline(fields, s_ref, ',');
    std::getline(fields, threshold, ',');
    CalKey key{kind == "identity" ? CalKind::identity : CalKind::two_sample,
               std::stoull(n),
               static_cast<std::int64_t>(std::llround(std::stod(sigma) * 1e6)),
               std::stoull(s), std::stoull(s_ref)};
    calibration_cache()[key] = std::stod(threshold);
  }
}

void clear_calibration_cache() {
  std::lock_guard<std::mutex> lock(calibration_mutex());
  calibration_cache().clear();
}

}  // namespace dpip
