#include "wlss/bands.hpp"

#include <algorithm>
#include <cmath>

namespace wlss {

namespace {

// Smooth step: 0 for t ≤ 0, 1 for t ≥ 1.
double smooth_step(double t) {
  if (t <= 0) return 0.0;
  if (t >= 1) return 1.0;
  const double a = std::exp(-1 / t), b = std::exp(-1 / (1 - t));
  return a / (a + b);
}

// Parseval weights of the r2c half spectrum.
double half_weight(std::size_t k, std::size_t m) { return (k == 0 || 2 * k == m) ? 1.0 : 2.0; }

template <class Mult>
GridFunction apply_multiplier(const GridFunction& f, Mult mult) {
  auto y = f.spectrum();
  for (std::size_t k = 0; k < y.size(); ++k) y[k] *= mult(f.frequency(k));
  return GridFunction::from_spectrum(f.L(), f.p(), y);
}

}  // namespace

double bump_h(double xi) {
  const double a = std::abs(xi);
  return 1.0 - smooth_step((a - 0.75) / (4.0 / 3.0 - 0.75));
}

double bump_omega(double xi) { return bump_h(0.5 * xi) - bump_h(xi); }

double band_multiplier(int k, double xi) {
  if (k < 0) return bump_h(xi);
  return bump_omega(std::ldexp(xi, -k));
}

double partition_sum(double xi, int k_max) {
  double s = bump_h(xi);
  for (int k = 0; k <= k_max; ++k) s += band_multiplier(k, xi);
  return s;
}

double band_eta(int k) { return std::ldexp(1.0, -k); }

int max_resolved_band(const GridFunction& phi) {
  int k = -1;
  while ((8.0 / 3.0) * std::ldexp(1.0, k + 1) < phi.nyquist()) ++k;
  return k;
}

std::vector<DyadicBand> decompose(const GridFunction& phi, int k_max) {
  require(k_max >= 0, "decompose: k_max must be >= 0");
  if (!((8.0 / 3.0) * std::ldexp(1.0, k_max) < phi.nyquist()))
    throw InvalidInput("decompose: grid too coarse for k_max");
  std::vector<DyadicBand> out;
  for (int k = -1; k <= k_max; ++k) {
    const double eta = band_eta(k);
    auto pk = apply_multiplier(phi, [&](double xi) { return band_multiplier(k, xi); });
    auto gk = apply_multiplier(phi, [&](double xi) {
      const double m = band_multiplier(k, xi);
      return m == 0 ? 0.0 : m * std::exp(eta * xi);
    });
    out.push_back({k, std::move(pk), std::move(gk), eta});
  }
  return out;
}

GridFunction poisson_deconvolve(const DyadicBand& band) {
  return apply_multiplier(band.phi_k, [&](double xi) {
    // Outside the band's support the coefficients vanish; cap the factor there.
    return band_multiplier(band.k, xi) == 0 ? 0.0 : std::exp(band.eta * xi);
  });
}

GridFunction poisson_smooth(const GridFunction& f, double eta) {
  require(eta > 0, "poisson_smooth: eta must be positive");
  return apply_multiplier(f, [&](double xi) { return std::exp(-eta * xi); });
}

double fourier_tail(const GridFunction& phi, int k_max) {
  const auto& y = phi.spectrum();
  const std::size_t m = phi.size();
  double s = 0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double r = 1.0 - partition_sum(phi.frequency(k), k_max);
    s += half_weight(k, m) * r * r * std::norm(y[k]);
  }
  return std::sqrt(s * phi.h() / double(m));
}

double sharp_fourier_tail(const GridFunction& phi, double cutoff) {
  const auto& y = phi.spectrum();
  const std::size_t m = phi.size();
  double s = 0;
  for (std::size_t k = 0; k < y.size(); ++k)
    if (phi.frequency(k) > cutoff) s += half_weight(k, m) * std::norm(y[k]);
  return std::sqrt(s * phi.h() / double(m));
}

double h_half_fourier(const GridFunction& phi) {
  const auto& y = phi.spectrum();
  const std::size_t m = phi.size();
  double s = 0;
  for (std::size_t k = 0; k < y.size(); ++k) s += half_weight(k, m) * phi.frequency(k) * std::norm(y[k]);
  // Σ over ±ξ with spacing π/L, and |φ̂| = h|Y|: ∫|ξ||φ̂|² ≈ (π/L)·h²·Σ.
  return s * (kPi / phi.L()) * phi.h() * phi.h();
}

namespace {

// Double integral of (φ(x)−φ(y))²/(x−y)² over ℝ², using the support [a,b]:
// the S×S part on a tensor grid and the S×Sᶜ part in closed form.
double h_half_double_integral(const GridFunction& phi) {
  // Effective support: declared interval trimmed to the significant samples.
  const auto& v = phi.samples();
  double peak = 0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  if (peak == 0) return 0.0;
  std::size_t first = 0, last = v.size() - 1;
  while (std::abs(v[first]) < 1e-15 * peak) ++first;
  while (std::abs(v[last]) < 1e-15 * peak) --last;
  const double a = std::max(phi.support_lo(), phi.x(first) - phi.h());
  const double b = std::min(phi.support_hi(), phi.x(last) + phi.h());
  if (b <= a) return 0.0;
  const int m = 4096;
  const double h = (b - a) / m;
  std::vector<double> xs(m), f(m), df(m);
  for (int i = 0; i < m; ++i) {
    xs[i] = a + (i + 0.5) * h;
    f[i] = phi(xs[i]);
    df[i] = phi.derivative(xs[i]);
  }
  double inner = 0;
  for (int i = 0; i < m; ++i) {
    inner += df[i] * df[i];
    for (int j = i + 1; j < m; ++j) {
      const double d = (f[i] - f[j]) / (xs[i] - xs[j]);
      inner += 2 * d * d;
    }
  }
  inner *= h * h;
  double outer = 0;
  for (int i = 0; i < m; ++i) outer += f[i] * f[i] * (1 / (xs[i] - a) + 1 / (b - xs[i]));
  outer *= h;
  return inner + 2 * outer;
}

}  // namespace

Norms norms(const GridFunction& phi, double s) {
  require(s >= 0, "norms: s must be >= 0");
  Norms r;
  r.l2 = phi.l2_norm();
  const auto& y = phi.spectrum();
  const std::size_t m = phi.size();
  double hs = 0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double xi = phi.frequency(k);
    hs += half_weight(k, m) * std::pow(1 + xi * xi, s) * std::norm(y[k]);
  }
  r.sobolev_hs = std::sqrt(hs * phi.h() / double(m));
  r.homogeneous_h_half_integral = h_half_double_integral(phi);
  const int k_max = max_resolved_band(phi);
  for (int k = -1; k <= k_max; ++k) {
    double e = 0;
    for (std::size_t q = 0; q < y.size(); ++q) {
      const double mult = band_multiplier(k, phi.frequency(q));
      if (mult != 0) e += half_weight(q, m) * mult * mult * std::norm(y[q]);
    }
    r.band_sums += std::pow(2.0, 2.0 * k * s) * e * phi.h() / double(m);
  }
  return r;
}

}  // namespace wlss
