#include "wlss/functionals.hpp"

#include <fftw3.h>

#include <cmath>
#include <fstream>
#include <mutex>

#include "wlss/quadrature.hpp"
#include "wlss/semicircle.hpp"

namespace wlss {

namespace {

std::mutex& dct_mutex() {
  static std::mutex m;
  return m;
}

// c_k = (2/M)Σ_j f(θ_j)cos(kθ_j), θ_j = π(j+½)/M, via a type-II DCT.
std::vector<double> dct_coeffs(const RealFn& phi, int M, int K) {
  double* in = fftw_alloc_real(M);
  double* out = fftw_alloc_real(M);
  fftw_plan plan;
  {
    std::lock_guard lock(dct_mutex());
    plan = fftw_plan_r2r_1d(M, in, out, FFTW_REDFT10, FFTW_ESTIMATE);
  }
  for (int j = 0; j < M; ++j) in[j] = phi(2 * std::cos(kPi * (j + 0.5) / M));
  fftw_execute(plan);
  std::vector<double> c(K + 1);
  for (int k = 0; k <= K; ++k) c[k] = out[k] / M;
  {
    std::lock_guard lock(dct_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return c;
}

double derivative(const RealFn& f, double x) {
  const double h = 1e-3;
  return (8 * (f(x + h) - f(x - h)) - (f(x + 2 * h) - f(x - 2 * h))) / (12 * h);
}

double v_double_integral(const std::vector<double>& x, const std::vector<double>& f,
                         const std::vector<double>& df) {
  const size_t m = x.size();
  double s = 0;
  for (size_t i = 0; i < m; ++i) {
    s += df[i] * df[i] * (4 - x[i] * x[i]);
    for (size_t j = i + 1; j < m; ++j) {
      const double d = (f[i] - f[j]) / (x[i] - x[j]);
      s += 2 * d * d * (4 - x[i] * x[j]);
    }
  }
  const double w = kPi / double(m);
  return s * w * w / (2 * kPi * kPi);
}

}  // namespace

double ChebyshevSeries::operator()(double theta) const {
  double s = 0.5 * c[0];
  for (size_t k = 1; k < c.size(); ++k) s += c[k] * std::cos(double(k) * theta);
  return s;
}

ChebyshevSeries chebyshev_coeffs(const RealFn& phi, int K) {
  require(K >= 1, "chebyshev_coeffs: K must be >= 1");
  return {dct_coeffs(phi, std::max(8 * K, 64), K)};
}

double weighted_integral(const RealFn& f, double tol) {
  double prev = chebyshev_gauss(f, 64);
  for (int M = 128; M <= (1 << 20); M *= 2) {
    const double cur = chebyshev_gauss(f, M);
    if (std::abs(cur - prev) <= tol * (1 + std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

VarianceV variance_V(const RealFn& phi, CumulantPair cum, int n) {
  require(n >= 1, "variance_V: n must be >= 1");
  VarianceV r;
  const double rn = std::sqrt(double(n));

  // Chebyshev route: grow K until the tail of Σ k c_k² is negligible.
  std::vector<double> c;
  int K = 64;
  for (;; K *= 2) {
    c = chebyshev_coeffs(phi, K).c;
    double tail = 0, total = 0;
    for (int k = 1; k <= K; ++k) {
      total += k * c[k] * c[k];
      if (2 * k > K) tail += k * c[k] * c[k];
    }
    if (tail <= 1e-14 * (1 + total) || K >= 16384) break;
  }
  double v = 0;
  for (int k = 1; k <= K; ++k) v += 0.5 * k * c[k] * c[k];
  v += 0.5 * cum.s4 * c[2] * c[2] + 2 * cum.s3 * c[1] * c[2] / rn;
  r.via_chebyshev = v;
  r.chebyshev_terms = K;
  r.value = v;

  // Quadrature route on the tensor Chebyshev–Gauss grid.
  const double ix = weighted_integral([&](double x) { return phi(x) * x; });
  const double i2 = weighted_integral([&](double x) { return phi(x) * (2 - x * x); });
  const double single = cum.s4 / (2 * kPi * kPi) * i2 * i2 - 2 * cum.s3 / (kPi * kPi * rn) * ix * i2;
  double prev = NAN;
  for (int M = 256; M <= 8192; M *= 2) {
    std::vector<double> x(M), f(M), df(M);
    for (int j = 0; j < M; ++j) {
      x[j] = 2 * std::cos(kPi * (j + 0.5) / M);
      f[j] = phi(x[j]);
      df[j] = derivative(phi, x[j]);
    }
    const double cur = v_double_integral(x, f, df) + single;
    r.via_quadrature = cur;
    r.quadrature_nodes = M;
    if (!std::isnan(prev)) {
      r.quadrature_change = std::abs(cur - prev);
      if (r.quadrature_change < 1e-7 * (1 + std::abs(cur))) {
        r.quadrature_converged = true;
        break;
      }
    }
    prev = cur;
  }
  return r;
}

double expectation_e1(const RealFn& phi) {
  return -weighted_integral(phi) / (2 * kPi) + 0.25 * (phi(2.0) + phi(-2.0));
}

double expectation_e(const RealFn& phi, CumulantPair cum, int n) {
  require(n >= 1, "expectation_e: n must be >= 1");
  const double e1 = expectation_e1(phi);
  const double i4 = weighted_integral([&](double x) { return phi(x) * (x * x * x * x - 4 * x * x + 2); });
  const double i3 = weighted_integral([&](double x) { return phi(x) * (x * x * x - 3 * x); });
  return e1 + cum.s4 / (2 * kPi) * i4 + 2 * cum.s3 / std::sqrt(double(n)) * i3 / kPi;
}

double skewness_B(const RealFn& phi) {
  const double ix = weighted_integral([&](double x) { return phi(x) * x; });
  return -ix * ix * ix / (12 * kPi * kPi * kPi);
}

Complex predicted_cf(double V, double B, CumulantPair cum, int n, double xi) {
  const double rn = std::sqrt(double(n));
  return std::exp(Complex(-0.5 * xi * xi * V, xi * xi * xi * cum.s3 * B / rn));
}

Complex predicted_cf(const RealFn& phi, CumulantPair cum, int n, double xi) {
  return predicted_cf(variance_V(phi, cum, n).value, skewness_B(phi), cum, n, xi);
}

Complex cov_kernel_F(Complex z, Complex w, CumulantPair cum, int n) {
  const Complex mz = m_sc(z), mw = m_sc(w);
  const Complex dz = m_sc(z, 1), dw = m_sc(w, 1);
  const Complex d = 1.0 - mz * mw;
  return 2.0 * dz * dw / (d * d) - 4 * cum.s3 / std::sqrt(double(n)) * dz * dw * (mz + mw) +
         2 * cum.s4 * dz * mz * dw * mw;
}

double im_im_covariance(Complex z, Complex w, CumulantPair cum, int n) {
  return 0.5 * (cov_kernel_F(z, std::conj(w), cum, n) - cov_kernel_F(z, w, cum, n)).real();
}

void write_function_table(const std::string& path, const std::vector<std::string>& columns,
                          const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out.precision(17);
  for (size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& r : rows) {
    require(r.size() == columns.size(), "write_function_table: row width mismatch");
    for (size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace wlss
