#pragma once

#include <vector>

#include "wlss/core.hpp"

namespace wlss {

// Orthonormal Hermite functions φ_k(x) = e^{−x²/2}h_k(x), evaluated by the
// upward recurrence on the weighted functions with a running exponent, so
// that large degrees and large |x| neither overflow nor lose the e^{−x²/2}
// factor to underflow prematurely.
class HermiteEvaluator {
 public:
  explicit HermiteEvaluator(int n_max);
  int n_max() const { return n_max_; }

  // φ_0..φ_m at x into out[0..m].
  void values(double x, int m, double* out) const;
  std::vector<double> values(double x, int m) const;
  // deriv 0 or 1.
  double value(int n, double x, int deriv = 0) const;

  // A_k(x) = ∫_{−∞}^x φ_k for k = 0..m, given phi[0..m] = φ_k(x).
  static void antiderivatives(double x, int m, const double* phi, double* out);

  // ∫_ℝ φ_k (zero for odd k), closed form.
  static double total_integral(int k);

 private:
  int n_max_;
};

double weighted_hermite(int n, double x, int deriv = 0);

struct HermiteIntegrals {
  double even_full_line = 0;          // ∫φ_{2m}, quadrature
  double even_closed_form = 0;        // 2^{1/2}π^{1/4}√((2m)!)/(2^m m!)
  double odd_half_line_scaled = 0;    // √((2m+1)/2)·∫_0^∞φ_{2m+1}, quadrature
  double odd_half_line_recurrence = 0;  // same from the antiderivative recurrence
  double even_asymptote = 0;          // 2^{1/2}/m^{1/4}
  double odd_asymptote = 0;           // m^{1/4}/2^{1/2}
};

HermiteIntegrals hermite_integrals(int m);

}  // namespace wlss
