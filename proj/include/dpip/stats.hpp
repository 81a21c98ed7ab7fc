#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

namespace dpip {

struct ConfidenceInterval {
  double rate = 0.0;
  double low = 0.0;
  double high = 1.0;
};

/// 95% Wilson score interval. Better behaved than Wald near rates 0 and 1,
/// which soundness estimates routinely hit.
inline ConfidenceInterval wilson_interval(std::size_t successes,
                                          std::size_t trials,
                                          double z = 1.959964) {
  ConfidenceInterval ci;
  if (trials == 0) return ci;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  ci.rate = p;
  ci.low = std::max(0.0, center - half);
  ci.high = std::min(1.0, center + half);
  return ci;
}

inline double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

inline double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size() - 1);
}

/// Exact upper tail Pr[X > threshold] for X ~ Bin(n, p), by summing the pmf
/// with the multiplicative recurrence. Accurate to double precision for the
/// n used in tests (<= a few thousand).
inline double binomial_tail_above(long n, double p, double threshold) {
  if (threshold >= static_cast<double>(n)) return 0.0;
  long k0 = static_cast<long>(std::floor(threshold)) + 1;  // first k > threshold
  if (k0 < 0) k0 = 0;
  // log pmf at k0, then recurrence upward.
  const double logp = std::log(p), log1p = std::log1p(-p);
  double logpmf = std::lgamma(n + 1.0) - std::lgamma(k0 + 1.0) -
                  std::lgamma(n - k0 + 1.0) + k0 * logp + (n - k0) * log1p;
  double pmf = std::exp(logpmf);
  double tail = 0.0;
  for (long k = k0; k <= n; ++k) {
    tail += pmf;
    pmf *= (static_cast<double>(n - k) / static_cast<double>(k + 1)) * p /
           (1.0 - p);
  }
  return tail;
}

/// Kolmogorov-Smirnov distance between an empirical sample and a reference
/// CDF. Sorts a copy of the sample.
inline double ks_distance(std::vector<double> xs,
                          const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

}  // namespace dpip
