#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace kcut::harness {

// sup_x |F_N(x) - cdf(x)| for the empirical CDF F_N of samples.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// sup_x |F_N(x) - G_M(x)|; tied values are stepped over together.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Asymptotic two-sample critical value c * sqrt((n+m)/(n m)); c = 1.949 is the 0.1% level.
double ks_two_sample_critical(std::size_t n, std::size_t m, double c = 1.949);

}  // namespace kcut::harness
