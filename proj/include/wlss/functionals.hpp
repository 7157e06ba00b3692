#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wlss/core.hpp"

namespace wlss {

using RealFn = std::function<double(double)>;

// φ(2cos θ) = c_0/2 + Σ_{k≥1} c_k cos kθ.
struct ChebyshevSeries {
  std::vector<double> c;
  double operator()(double theta) const;
};

ChebyshevSeries chebyshev_coeffs(const RealFn& phi, int K);

struct VarianceV {
  double value = 0;
  double via_chebyshev = 0;
  double via_quadrature = 0;
  int chebyshev_terms = 0;
  int quadrature_nodes = 0;
  double quadrature_change = 0;  // last doubling step
  bool quadrature_converged = false;
};

VarianceV variance_V(const RealFn& phi, CumulantPair cum, int n);

double expectation_e(const RealFn& phi, CumulantPair cum, int n);
double expectation_e1(const RealFn& phi);

double skewness_B(const RealFn& phi);

Complex predicted_cf(double V, double B, CumulantPair cum, int n, double xi);
Complex predicted_cf(const RealFn& phi, CumulantPair cum, int n, double xi);

Complex cov_kernel_F(Complex z, Complex w, CumulantPair cum, int n);

// n²·Cov(Im m_N(z), Im m_N(w)) predicted from F: ½Re[F(z, w̄) − F(z, w)].
double im_im_covariance(Complex z, Complex w, CumulantPair cum, int n);

// ∫ f(x)/√(4−x²) dx on Chebyshev–Gauss nodes, doubled until stable to tol.
double weighted_integral(const RealFn& f, double tol = 1e-13);

void write_function_table(const std::string& path, const std::vector<std::string>& columns,
                          const std::vector<std::vector<double>>& rows);

}  // namespace wlss
