#include "qsynth/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsynth {

namespace {
constexpr double kZ95 = 1.959964;
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty sample");
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median: empty sample");
  const std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
  const double upper = xs[mid];
  if (xs.size() % 2 == 1) return upper;
  const double lower = *std::max_element(xs.begin(), xs.begin() + mid);
  return 0.5 * (lower + upper);
}

double sample_stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) {
    throw std::invalid_argument("sample_stddev: need at least two samples");
  }
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

WilsonInterval wilson95(int successes, int trials) {
  if (trials < 1) throw std::invalid_argument("wilson95: trials must be >= 1");
  if (successes < 0 || successes > trials) {
    throw std::invalid_argument("wilson95: successes out of range");
  }
  const double n = trials;
  const double p = successes / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // Degenerate counts give exact endpoints; float sqrt drifts off them.
  const double low = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double high =
      successes == trials ? 1.0 : std::min(1.0, center + half);
  return {low, high};
}

LineFit least_squares_line(const std::vector<double>& x,
                           const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("least_squares_line: length mismatch");
  }
  if (x.size() < 2) {
    throw std::invalid_argument("least_squares_line: need at least two points");
  }
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("least_squares_line: x values are constant");
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace qsynth
