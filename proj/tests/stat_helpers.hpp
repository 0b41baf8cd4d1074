#ifndef FUSEPEEL_TESTS_STAT_HELPERS_HPP
#define FUSEPEEL_TESTS_STAT_HELPERS_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace test_stats {

// 0.999 chi-square quantile via the Wilson-Hilferty cube approximation
// (slightly conservative for the df used here, checked against tables:
// df=10 -> 29.76 vs 29.59, df=20 -> 45.44 vs 45.32).
inline double chi2_crit_999(double df) {
  constexpr double z999 = 3.090232306167814;
  const double a = 2.0 / (9.0 * df);
  const double b = 1.0 - a + z999 * std::sqrt(a);
  return df * b * b * b;
}

// Chi-square statistic of `histogram` (counts of value = bin index) against
// Poisson(lambda), pooling the right tail so each bin expects >= 5 samples.
// Returns (statistic, degrees of freedom).
struct Chi2 {
  double statistic;
  double df;
};

inline Chi2 chi2_poisson(std::span<const std::uint64_t> histogram,
                         double lambda, std::uint64_t samples) {
  std::vector<double> pmf;
  double p = std::exp(-lambda);
  double cumulative = 0.0;
  for (std::size_t i = 0;; ++i) {
    if (i > 0) p *= lambda / double(i);
    if (double(samples) * p < 5.0 && i > lambda) break;
    pmf.push_back(p);
    cumulative += p;
  }
  const double tail_p = 1.0 - cumulative;

  double stat = 0.0;
  std::uint64_t observed_tail = 0;
  for (std::size_t i = 0; i < histogram.size(); ++i) {
    if (i < pmf.size()) {
      const double expect = double(samples) * pmf[i];
      const double diff = double(histogram[i]) - expect;
      stat += diff * diff / expect;
    } else {
      observed_tail += histogram[i];
    }
  }
  const double tail_expect = double(samples) * tail_p;
  if (tail_expect > 0) {
    const double diff = double(observed_tail) - tail_expect;
    stat += diff * diff / tail_expect;
  }
  return Chi2{stat, double(pmf.size())};  // bins+tail - 1
}

// Chi-square for a uniform distribution over `bins` outcomes.
inline Chi2 chi2_uniform(std::span<const std::uint64_t> histogram,
                         std::uint64_t samples) {
  const double expect = double(samples) / double(histogram.size());
  double stat = 0.0;
  for (std::uint64_t count : histogram) {
    const double diff = double(count) - expect;
    stat += diff * diff / expect;
  }
  return Chi2{stat, double(histogram.size() - 1)};
}

}  // namespace test_stats

#endif  // FUSEPEEL_TESTS_STAT_HELPERS_HPP
