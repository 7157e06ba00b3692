#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace wlss {

double mean(const std::vector<double>& x);
double variance(const std::vector<double>& x);  // unbiased
double median(std::vector<double> x);

struct Estimate {
  double value = 0;
  double se = 0;
};

// Full-sample statistic with a batch-means standard error. stat(begin, end)
// evaluates the statistic on trials [begin, end).
Estimate batch_means(std::size_t trials, const std::function<double(std::size_t, std::size_t)>& stat,
                     int batches = 20);

Estimate mean_estimate(const std::vector<double>& x, int batches = 20);
Estimate variance_estimate(const std::vector<double>& x, int batches = 20);
Estimate third_cumulant_estimate(const std::vector<double>& x, int batches = 20);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Run body(i) for i in [0, count) on up to `threads` workers (0 = hardware).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned threads = 0);

}  // namespace wlss
