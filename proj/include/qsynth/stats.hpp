#pragma once

#include <vector>

namespace qsynth {

double mean(const std::vector<double>& xs);

// Order statistic of a copy; the even case averages the middle pair.
double median(std::vector<double> xs);

// Unbiased (n - 1 denominator) standard deviation; needs two samples.
double sample_stddev(const std::vector<double>& xs);

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

// 95% score interval for a binomial proportion (z = 1.959964): the set of p
// where the observed rate sits within z normal deviations of p.
WilsonInterval wilson95(int successes, int trials);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares through (x_i, y_i); x must not be constant.
LineFit least_squares_line(const std::vector<double>& x,
                           const std::vector<double>& y);

}  // namespace qsynth
