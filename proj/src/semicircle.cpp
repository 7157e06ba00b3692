#include "wlss/semicircle.hpp"

#include <algorithm>
#include <cmath>

namespace wlss {

double rho_sc(double x) {
  const double r = 4.0 - x * x;
  return r > 0 ? std::sqrt(r) / (2 * kPi) : 0.0;
}

double semicircle_cdf(double x) {
  if (x <= -2) return 0.0;
  if (x >= 2) return 1.0;
  const double v = 0.5 + x * std::sqrt(4 - x * x) / (4 * kPi) + std::asin(x / 2) / kPi;
  return std::clamp(v, 0.0, 1.0);
}

SemicircleQuantiles quantiles(int n) {
  require(n >= 1, "quantiles: n must be >= 1");
  SemicircleQuantiles q;
  q.n = n;
  q.gamma.resize(n);
  for (int i = 1; i <= n; ++i) {
    if (i == n) {
      q.gamma[i - 1] = 2.0;
      continue;
    }
    const double target = double(i) / n;
    if (2 * i == n) {
      q.gamma[i - 1] = 0.0;
      continue;
    }
    // Edge asymptotics F(x) ≈ (2/3π)(x+2)^{3/2} give a tight starting bracket.
    double lo = -2, hi = 2;
    const double t = std::min(target, 1 - target);
    const double guess = std::pow(1.5 * kPi * t, 2.0 / 3.0);
    if (guess < 0.5) {
      if (target < 0.5) hi = std::min(-2 + 2 * guess, 0.0);
      else lo = std::max(2 - 2 * guess, 0.0);
      if (semicircle_cdf(lo) > target || semicircle_cdf(hi) < target) lo = -2, hi = 2;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (semicircle_cdf(mid) < target ? lo : hi) = mid;
    }
    q.gamma[i - 1] = 0.5 * (lo + hi);
  }
  return q;
}

Complex sqrt_z2m4(Complex z) { return std::sqrt(z - 2.0) * std::sqrt(z + 2.0); }

Complex m_sc(Complex z, int order) {
  require(z.imag() != 0.0, "m_sc: im(z) must be nonzero");
  require(order == 0 || order == 1, "m_sc: order must be 0 or 1");
  const Complex m = 0.5 * (-z + sqrt_z2m4(z));
  if (order == 0) return m;
  return -m / (z + 2.0 * m);
}

ControlParams control_params(Complex z, int n) {
  require(z.imag() > 0, "control_params: im(z) must be positive");
  require(n >= 1, "control_params: n must be >= 1");
  const double eta = z.imag();
  const double nim = n * eta;
  return {std::abs(std::abs(z.real()) - 2.0),
          std::sqrt(m_sc(z).imag() / nim) + 1.0 / nim};
}

Complex stieltjes_ratio(Complex z, Complex w) {
  const Complex p = m_sc(z) * m_sc(w);
  return p / (1.0 - p);
}

}  // namespace wlss
