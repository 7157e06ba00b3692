#pragma once

#include <vector>

#include "wlss/grid_function.hpp"

namespace wlss {

// Low-frequency bump: 1 on |ξ| ≤ 3/4, 0 on |ξ| ≥ 4/3, C∞ in between.
double bump_h(double xi);
// Annular bump ω̂(ξ) = ĥ(ξ/2) − ĥ(ξ), supported in 3/4 ≤ |ξ| ≤ 8/3.
double bump_omega(double xi);
// Fourier multiplier of band k (k = −1 is the low band ĥ).
double band_multiplier(int k, double xi);
// ĥ(ξ) + Σ_{k=0}^{k_max} ω̂(2^{−k}ξ).
double partition_sum(double xi, int k_max);

// Poisson scale of band k: 2^{−k}, so 2 for the low band.
double band_eta(int k);

struct DyadicBand {
  int k = -1;
  GridFunction phi_k;
  GridFunction g_k;
  double eta = 2;
};

// Largest k whose annulus (8/3)·2^k stays below the grid Nyquist frequency.
int max_resolved_band(const GridFunction& phi);

std::vector<DyadicBand> decompose(const GridFunction& phi, int k_max);

// ĝ_k = e^{η_k|ξ|} φ̂_k.
GridFunction poisson_deconvolve(const DyadicBand& band);

// P_η ⋆ f with P_η(x) = η/(π(x²+η²)).
GridFunction poisson_smooth(const GridFunction& f, double eta);

// L² norm of (1 − Σ_{k≤k_max} multipliers)·φ̂, i.e. the part of φ the bands
// up to k_max do not capture.
double fourier_tail(const GridFunction& phi, int k_max);
// L² norm of φ̂ restricted to |ξ| > cutoff.
double sharp_fourier_tail(const GridFunction& phi, double cutoff);

struct Norms {
  double l2 = 0;
  double sobolev_hs = 0;                   // (∫|φ̂|²(1+ξ²)^s dξ/2π)^{1/2}
  double homogeneous_h_half_integral = 0;  // ∫∫(φ(x)−φ(y))²/(x−y)²
  double band_sums = 0;                    // Σ_k 2^{2ks}‖φ_k‖²
};

Norms norms(const GridFunction& phi, double s);

// ∫|ξ||φ̂(ξ)|² dξ, the Fourier form of the H^{1/2} double integral.
double h_half_fourier(const GridFunction& phi);

}  // namespace wlss
