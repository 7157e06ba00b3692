#pragma once

#include "wlss/report.hpp"

namespace wlss {

// Deterministic invariant batteries. Each returns a Report whose metrics are
// the individual checks; sizes are parameters so the fast CLI gate and the
// full acceptance run share the code.

// m_sc residual on a grid_side² grid, divided-difference identity, quantile
// CDF residual for every n ≤ quantile_n_max.
Report semicircle_suite(int grid_side, int quantile_n_max);

// Two routes to V on a fixed smooth corpus, positivity on random admissible
// (φ, s3, s4), parity identities of B and e.
Report functional_suite(int random_cases, std::uint64_t seed);

// Partition of unity, Poisson round trip, reconstruction vs Fourier tail,
// smoothed-indicator plateau. Grid has 2^p points on [−8, 8].
Report littlewood_paley_suite(int p);

// Fast gate used by `wigner-lss validate`: all of the above at small sizes
// plus short Monte Carlo, kernel and DBM checks.
Report validation_suite(unsigned threads);

}  // namespace wlss
