#include "wlss/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "wlss/core.hpp"

namespace wlss {

double mean(const std::vector<double>& x) {
  require(!x.empty(), "mean: empty sample");
  double s = 0;
  for (double v : x) s += v;
  return s / double(x.size());
}

double variance(const std::vector<double>& x) {
  require(x.size() >= 2, "variance: need two samples");
  const double m = mean(x);
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / double(x.size() - 1);
}

double median(std::vector<double> x) {
  require(!x.empty(), "median: empty sample");
  std::sort(x.begin(), x.end());
  const size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

Estimate batch_means(std::size_t trials, const std::function<double(std::size_t, std::size_t)>& stat,
                     int batches) {
  require(trials >= 2, "batch_means: need two trials");
  Estimate e;
  e.value = stat(0, trials);
  const std::size_t b = std::min<std::size_t>(batches, trials / 2);
  if (b < 2) return e;
  std::vector<double> vals;
  for (std::size_t i = 0; i < b; ++i) vals.push_back(stat(i * trials / b, (i + 1) * trials / b));
  e.se = std::sqrt(variance(vals) / double(b));
  return e;
}

namespace {

std::vector<double> slice(const std::vector<double>& x, std::size_t a, std::size_t b) {
  return {x.begin() + a, x.begin() + b};
}

}  // namespace

Estimate mean_estimate(const std::vector<double>& x, int batches) {
  return batch_means(x.size(), [&](std::size_t a, std::size_t b) { return mean(slice(x, a, b)); },
                     batches);
}

Estimate variance_estimate(const std::vector<double>& x, int batches) {
  return batch_means(x.size(), [&](std::size_t a, std::size_t b) { return variance(slice(x, a, b)); },
                     batches);
}

Estimate third_cumulant_estimate(const std::vector<double>& x, int batches) {
  auto k3 = [&](std::size_t a, std::size_t b) {
    const double n = double(b - a);
    double m = 0;
    for (std::size_t i = a; i < b; ++i) m += x[i];
    m /= n;
    double s = 0;
    for (std::size_t i = a; i < b; ++i) s += std::pow(x[i] - m, 3);
    return s * n / ((n - 1) * (n - 2));
  };
  return batch_means(x.size(), k3, batches);
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "linear_fit: bad sizes");
  const double mx = mean(x), my = mean(y);
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = unsigned(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace wlss
