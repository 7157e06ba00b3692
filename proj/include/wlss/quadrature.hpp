#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "wlss/core.hpp"

namespace wlss {

struct QuadratureRule {
  std::vector<double> x;
  std::vector<double> w;
  size_t size() const { return x.size(); }
};

// ∫_{−2}^{2} f(x)/√(4−x²) dx with M Chebyshev–Gauss nodes x_j = 2cos θ_j.
template <class F>
double chebyshev_gauss(F&& f, int M) {
  double s = 0;
  for (int j = 0; j < M; ++j) s += f(2 * std::cos(kPi * (j + 0.5) / M));
  return s * kPi / M;
}

// ∫_{−2}^{2} f(x) ρ_sc(x) dx, Chebyshev–Gauss of the second kind.
template <class F>
double semicircle_average(F&& f, int M) {
  double s = 0;
  for (int j = 1; j <= M; ++j) {
    const double th = kPi * j / (M + 1);
    const double sn = std::sin(th);
    s += sn * sn * f(2 * std::cos(th));
  }
  return s * 2.0 / (M + 1);
}

// 20-point Gauss–Legendre on every panel between consecutive breakpoints.
QuadratureRule composite_gauss(std::vector<double> breaks);

// Composite rule on [a,b] with panels of at most base_width, geometrically
// refined around each (center, width) feature down to the feature width.
QuadratureRule feature_rule(double a, double b, double base_width,
                            const std::vector<std::pair<double, double>>& features);

struct Integral {
  double value = 0;
  double error = 0;
};

// Adaptive Gauss–Kronrod (31 points); infinite limits allowed.
Integral integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                            double tol = 1e-10, unsigned max_depth = 20);

}  // namespace wlss
