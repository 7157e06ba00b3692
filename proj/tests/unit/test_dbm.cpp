#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "wlss/dbm.hpp"
#include "wlss/semicircle.hpp"
#include "wlss/stats.hpp"

using namespace wlss;

namespace {

double gk(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 25, tol);
}

}  // namespace

TEST_CASE("characteristic flow") {
  for (Complex z : {Complex(0.3, 0.01), Complex(-1.2, 0.4), Complex(3.0, 0.2)}) {
    for (double t : {0.05, 0.5, 1.0}) {
      const Complex zt = characteristic(z, t);
      // m_sc(z_t) = e^{−t/2} m_sc(z) and dz_t/dt = z_t/2 + m_sc(z_t).
      CHECK(std::abs(m_sc(zt) - std::exp(-t / 2) * m_sc(z)) < 1e-13);
      const double h = 1e-5;
      const Complex d = (characteristic(z, t + h) - characteristic(z, t - h)) / (2 * h);
      CHECK(std::abs(d - (0.5 * zt + m_sc(zt))) < 1e-8);
      CHECK(zt.imag() > z.imag());
      CHECK(std::abs(characteristic(characteristic(z, 0.2), t) - characteristic(z, t + 0.2)) < 1e-12);
    }
    CHECK(characteristic(z, 0) == z);
  }
  CHECK(characteristic(Complex(0.5, 0), 0.1).imag() > 0);
  CHECK(forward_characteristic(Complex(0.1, 0.1), 0.4, 0.4) == Complex(0.1, 0.1));
}

TEST_CASE("single particle is Ornstein-Uhlenbeck") {
  // N = 1, β = 1: dx = √2 dB − x/2 dt, so Var x_T = 2(1 − e^{−T}) from x_0 = 0.
  const int paths = 4000;
  const double T = 1.5;
  std::vector<double> xs(paths);
  for (int i = 0; i < paths; ++i) {
    const auto tr = simulate_dbm({0, {0.0}, 1}, T, 0.01, derive_seed(7, i));
    xs[i] = tr.states.back()[0];
    REQUIRE(tr.times.size() == 151);
  }
  const auto v = variance_estimate(xs);
  CHECK(std::abs(v.value - 2 * (1 - std::exp(-T))) < 4 * v.se + 0.02);
  CHECK(std::abs(mean(xs)) < 4 * std::sqrt(v.value / paths));
}

TEST_CASE("dyson paths stay ordered and couple") {
  const auto x0 = sample_spectrum(EnsembleSpec::goe(40), 1).eigenvalues;
  const auto tr = simulate_dbm({0, x0, 1}, 0.2, 0.05, 3, nullptr);
  CHECK(tr.states.size() == 5);
  for (const auto& s : tr.states) CHECK(std::is_sorted(s.begin(), s.end()));
  const DbmState same{0, x0, 1};
  const auto c = simulate_dbm(same, 0.2, 0.05, 3, &same);
  CHECK(c.states.back() == c.coupled_states.back());
  CHECK(c.states.back() == tr.states.back());
  const auto y0 = sample_spectrum(EnsembleSpec::goe(40), 2).eigenvalues;
  const DbmState other{0, y0, 1};
  const auto d = simulate_dbm(same, 0.5, 0.5, 3, &other);
  // Coupled gaps contract: sup |λ − μ| does not grow much beyond the start.
  double g0 = 0, g1 = 0;
  for (std::size_t i = 10; i < 30; ++i) {
    g0 = std::max(g0, std::abs(x0[i] - y0[i]));
    g1 = std::max(g1, std::abs(d.states.back()[i] - d.coupled_states.back()[i]));
  }
  CHECK(g1 < g0);
  CHECK_THROWS_AS(simulate_dbm({0, {1.0, 0.0}, 1}, 1, 1, 1), InvalidInput);
  CHECK_THROWS_AS(simulate_dbm({0, {0.0}, 3}, 1, 1, 1), InvalidInput);
  CHECK_THROWS_AS(simulate_dbm({0, {0.0}, 1}, 0, 1, 1), InvalidInput);
}

TEST_CASE("implicit step solves the fixed point and keeps order") {
  const auto x = sample_spectrum(EnsembleSpec::goe(30), 4).eigenvalues;
  const double n = 30, d = 1e-3;
  for (int variant = 0; variant < 2; ++variant) {
    std::vector<double> c = x;
    if (variant == 0) std::swap(c[14], c[15]);
    else std::reverse(c.begin(), c.end());  // far outside the chamber
    std::vector<double> y;
    REQUIRE(dbm_implicit_step(x, c, d, y));
    CHECK(std::is_sorted(y.begin(), y.end()));
    double res = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      double f = -y[i] / 2;
      for (std::size_t j = 0; j < y.size(); ++j)
        if (j != i) f += 1 / (n * (y[i] - y[j]));
      res = std::max(res, std::abs(y[i] - c[i] - d * f));
    }
    CHECK(res < 1e-11);
  }
}

TEST_CASE("near collision start") {
  auto x = sample_spectrum(EnsembleSpec::goe(50), 6).eigenvalues;
  x[25] = x[24] + 1e-12;
  const auto tr = simulate_dbm({0, x, 1}, 0.05, 0.05, 9, nullptr);
  for (const auto& s : tr.states) CHECK(std::is_sorted(s.begin(), s.end()));
  CHECK(tr.states.back()[25] - tr.states.back()[24] > 1e-6);
}

TEST_CASE("trajectory csv") {
  const auto x0 = sample_spectrum(EnsembleSpec::goe(6), 1).eigenvalues;
  const auto tr = simulate_dbm({0, x0, 1}, 0.3, 0.1, 5);
  const auto path = (std::filesystem::temp_directory_path() / "wlss_traj.csv").string();
  write_trajectory_csv(path, tr);
  std::ifstream in(path);
  std::string line;
  int rows = 0;
  std::getline(in, line);
  CHECK(line.rfind("time,x1,", 0) == 0);
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
  std::filesystem::remove(path);
}

TEST_CASE("mesoscopic reference against quadrature") {
  for (Complex w : {Complex(0.2, 0.05), Complex(-1.5, 0.3), Complex(2.5, 1.0)}) {
    const double ref = gk([&](double x) { return rho_sc(x) * std::log(Complex(x) - w).imag(); }, -2, 2, 1e-13);
    CHECK(meso_reference(w) == doctest::Approx(ref).epsilon(1e-9));
  }
  CHECK_THROWS_AS(meso_reference(Complex(0.1, 0)), InvalidInput);
  // Quantiles carry no mesoscopic fluctuation beyond O(1), at any n.
  for (int n : {400, 1600}) CHECK(std::abs(meso_statistic(quantiles(n).gamma, Complex(0.3, 0), 0.2)) < 2);
}

TEST_CASE("Gaussian characteristic moments") {
  const Complex z(0.3, 0.2), w(-0.5, 0.1);
  const double T = 0.3;
  const auto r = char_gaussian_moments(z, w, T, 300);
  // Continuum double integral 2∫₀ᵀ∫ρ_sc(x) y_s²/|x − z̃_s|⁴ dx ds by nested quadrature.
  auto inner = [&](double s) {
    const Complex a = forward_characteristic(z, T, s);
    return 2 * gk([&](double x) { return rho_sc(x) * a.imag() * a.imag() / std::pow(std::norm(x - a), 2); }, -2, 2);
  };
  CHECK(r.var_z == doctest::Approx(gk(inner, 0, T)).epsilon(1e-7));
  auto cross = [&](double s) {
    const Complex a = forward_characteristic(z, T, s), b = forward_characteristic(w, T, s);
    return gk([&](double x) { return rho_sc(x) * a.imag() * b.imag() / (std::norm(x - a) * std::norm(x - b)); }, -2, 2);
  };
  CHECK(r.cov == doctest::Approx(gk(cross, 0, T)).epsilon(1e-7));
  const auto self = char_gaussian_moments(z, std::nullopt, T, 300);
  CHECK(self.cov == doctest::Approx(self.var_z / 2).epsilon(1e-8));
  CHECK(std::abs(r.var_z - r.var_z_sumform) < 5.0 / (300 * z.imag()));
  const auto zero = char_gaussian_moments(z, w, 0, 10);
  CHECK(zero.var_z == 0);
  CHECK(zero.cov == 0);
  CHECK_THROWS_AS(char_gaussian_moments(Complex(1.99, 0.1), std::nullopt, 0.1, 10), InvalidInput);
  CHECK_THROWS_AS(char_gaussian_moments(Complex(0.1, 0), std::nullopt, 0.1, 10), InvalidInput);
}

TEST_CASE("homogenization residual") {
  HomogenizationOptions same;
  same.wigner = EnsembleSpec::goe(40);
  same.shared_initial = true;
  const auto r = homogenization_residual(40, 0.1, {10, 20, 30}, 9, same);
  for (double v : r.residual) CHECK(v == 0);
  for (double v : r.undamped) CHECK(v == 0);
  CHECK_THROWS_AS(homogenization_residual(40, 2.0, {10}, 1), InvalidInput);
  CHECK_THROWS_AS(homogenization_residual(40, 0.5, {41}, 1), InvalidInput);
}
