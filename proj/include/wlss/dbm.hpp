#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wlss/ensemble.hpp"

namespace wlss {

// z_t = cosh(t/2)z + sinh(t/2)√(z²−4). Real z is taken as the limit from the
// upper half-plane.
Complex characteristic(Complex z, double t);
// z̃_s = z_{T−s}: z̃_0 = z_T and z̃_T = z.
Complex forward_characteristic(Complex z, double T, double s);

struct DbmState {
  double t = 0;
  std::vector<double> x;  // strictly increasing
  int beta = 1;
};

struct DbmTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> coupled_states;  // empty unless coupled
  std::size_t substeps = 0;
  std::size_t splits = 0;
  std::size_t implicit_steps = 0;  // drift-implicit fallback near collisions
};

// Drift-implicit Euler step y = c + d·drift(y) for c = x + √(2/(Nβ))ΔB, solved by
// damped Newton from the ordered start x. The solution is always ordered.
// Returns false if Newton stalls.
bool dbm_implicit_step(const std::vector<double>& x, const std::vector<double>& c, double d,
                       std::vector<double>& y);

// Euler–Maruyama for dx_i = √(2/(Nβ))dB_i + ((1/N)Σ_{j≠i}1/(x_i−x_j) − x_i/2)dt,
// recording the state every dt up to T. With `coupled`, a second system is
// driven by the same Brownian increments. Substeps are bounded by
// N·gap²/8 and by half a gap of drift; a step that breaks the ordering is
// split by Brownian bridge refinement. Pieces still failing after 16 halvings
// take a drift-implicit Euler step, which always stays ordered.
DbmTrajectory simulate_dbm(const DbmState& initial, double T, double dt, std::uint64_t seed,
                           const DbmState* coupled = nullptr);

void write_trajectory_csv(const std::string& path, const DbmTrajectory& traj, bool coupled = false);

// X(z,t) = [Σ_k Im log(x_k − z_t) − N∫Im log(x − z_t)ρ_sc(x)dx] / Im m_sc(z_t).
double meso_statistic(const std::vector<double>& points, Complex z, double t);
// N∫Im log(x − w)ρ_sc(x)dx / N, the deterministic reference.
double meso_reference(Complex w);

struct CharMoments {
  double var_z = 0;
  double var_w = 0;
  double cov = 0;
  double var_z_sumform = 0;
  double cov_sumform = 0;
};

CharMoments char_gaussian_moments(Complex z, std::optional<Complex> w, double T, int n);

struct HomogenizationOptions {
  EnsembleSpec wigner = EnsembleSpec::goe(2);  // n is overridden
  bool shared_initial = false;                 // same seed for both initial spectra
};

// residual: lambda_k - mu_k - e^{-t/2} (X^W - X^G)/n. The OU drift contracts the
// initial difference, so the undamped prediction over-shoots by (1 - e^{-t/2}) times the
// mean shift; it is kept as `undamped` for comparison.
struct HomogenizationResidual {
  std::vector<double> residual;
  std::vector<double> undamped;
};

HomogenizationResidual homogenization_residual(int n, double t, const std::vector<int>& k_indices,
                                               std::uint64_t seed, const HomogenizationOptions& opt = {});

}  // namespace wlss
