#include "wlss/hermite.hpp"

#include <cmath>

#include "wlss/quadrature.hpp"

namespace wlss {

namespace {

const double kPiQuarter = std::pow(kPi, -0.25);

}  // namespace

HermiteEvaluator::HermiteEvaluator(int n_max) : n_max_(n_max) {
  require(n_max >= 0, "HermiteEvaluator: n_max must be >= 0");
}

void HermiteEvaluator::values(double x, int m, double* out) const {
  require(m <= n_max_, "weighted_hermite: degree exceeds n_max");
  // φ_k = p_k·e^{lg}; p is rescaled whenever it grows large.
  double lg = -0.5 * x * x;
  double scale = std::exp(lg);
  double a = 0, b = kPiQuarter;
  out[0] = b * scale;
  for (int k = 0; k < m; ++k) {
    const double c = std::sqrt(2.0 / (k + 1)) * x * b - std::sqrt(double(k) / (k + 1)) * a;
    a = b;
    b = c;
    if (std::abs(b) > 1e150) {
      a *= 1e-150;
      b *= 1e-150;
      lg += 150 * std::log(10.0);
      scale = std::exp(lg);
    }
    out[k + 1] = b * scale;
  }
}

std::vector<double> HermiteEvaluator::values(double x, int m) const {
  std::vector<double> v(m + 1);
  values(x, m, v.data());
  return v;
}

double HermiteEvaluator::value(int n, double x, int deriv) const {
  require(n >= 0, "weighted_hermite: n must be >= 0");
  require(deriv == 0 || deriv == 1, "weighted_hermite: deriv must be 0 or 1");
  std::vector<double> v(n + 1);
  values(x, n, v.data());
  if (deriv == 0) return v[n];
  // φ_n′ = √(2n)φ_{n−1} − xφ_n.
  return (n > 0 ? std::sqrt(2.0 * n) * v[n - 1] : 0.0) - x * v[n];
}

void HermiteEvaluator::antiderivatives(double x, int m, const double* phi, double* out) {
  out[0] = kPiQuarter * std::sqrt(kPi / 2) * std::erfc(-x / std::sqrt(2.0));
  if (m >= 1) out[1] = -std::sqrt(2.0) * phi[0];
  for (int k = 1; k < m; ++k)
    out[k + 1] = std::sqrt(double(k) / (k + 1)) * out[k - 1] - std::sqrt(2.0 / (k + 1)) * phi[k];
}

double HermiteEvaluator::total_integral(int k) {
  require(k >= 0, "total_integral: k must be >= 0");
  if (k % 2) return 0.0;
  const int m = k / 2;
  return std::exp(0.5 * std::log(2.0) + 0.25 * std::log(kPi) + 0.5 * std::lgamma(2.0 * m + 1) -
                  m * std::log(2.0) - std::lgamma(m + 1.0));
}

double weighted_hermite(int n, double x, int deriv) { return HermiteEvaluator(n).value(n, x, deriv); }

HermiteIntegrals hermite_integrals(int m) {
  require(m >= 0, "hermite_integrals: m must be >= 0");
  HermiteIntegrals r;
  const int k_even = 2 * m, k_odd = 2 * m + 1;
  const HermiteEvaluator he(k_odd);
  const double reach = std::sqrt(4.0 * m + 3) + 12;
  const double width = std::min(0.5, 1.0 / std::sqrt(4.0 * m + 3));
  std::vector<double> v(k_odd + 1);
  auto integrate = [&](double a, double b, int k) {
    const auto rule = feature_rule(a, b, width, {});
    double s = 0;
    for (size_t i = 0; i < rule.size(); ++i) {
      he.values(rule.x[i], k, v.data());
      s += rule.w[i] * v[k];
    }
    return s;
  };
  r.even_full_line = integrate(-reach, reach, k_even);
  r.even_closed_form = HermiteEvaluator::total_integral(k_even);
  const double scale = std::sqrt((2.0 * m + 1) / 2);
  r.odd_half_line_scaled = scale * integrate(0, reach, k_odd);
  std::vector<double> a(k_odd + 1);
  he.values(0.0, k_odd, v.data());
  HermiteEvaluator::antiderivatives(0.0, k_odd, v.data(), a.data());
  r.odd_half_line_recurrence = -scale * a[k_odd];
  if (m > 0) {
    r.even_asymptote = std::sqrt(2.0) / std::pow(m, 0.25);
    r.odd_asymptote = std::pow(m, 0.25) / std::sqrt(2.0);
  }
  return r;
}

}  // namespace wlss
