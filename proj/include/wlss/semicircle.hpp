#pragma once

#include <vector>

#include "wlss/core.hpp"

namespace wlss {

double rho_sc(double x);

// Distribution function of the semicircle law, clamped to [0,1].
double semicircle_cdf(double x);

struct SemicircleQuantiles {
  int n = 0;
  std::vector<double> gamma;  // gamma[i-1] = γ_i
};

SemicircleQuantiles quantiles(int n);

// √(z−2)·√(z+2) with principal roots. Valid on the real axis too, where a
// signed-zero imaginary part selects the side of the cut.
Complex sqrt_z2m4(Complex z);

// order 0: Stieltjes transform of the semicircle; order 1: its derivative.
Complex m_sc(Complex z, int order = 0);

struct ControlParams {
  double kappa = 0;
  double psi = 0;
};

ControlParams control_params(Complex z, int n);

// m(z)m(w)/(1 − m(z)m(w)), the divided difference of m_sc.
Complex stieltjes_ratio(Complex z, Complex w);

}  // namespace wlss
