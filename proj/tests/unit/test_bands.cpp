#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "wlss/bands.hpp"

using namespace wlss;

namespace {

double l2_diff(const GridFunction& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a.samples()[j] - b[j]) * (a.samples()[j] - b[j]);
  return std::sqrt(s * a.h());
}

GridFunction gaussian(double sigma, double L = 8, int p = 12) {
  return GridFunction::from_callable([sigma](double x) { return std::exp(-x * x / (2 * sigma * sigma)); }, L, p);
}

}  // namespace

TEST_CASE("bump profile") {
  CHECK(bump_h(0) == 1);
  CHECK(bump_h(0.75) == 1);
  CHECK(bump_h(-0.7) == 1);
  CHECK(bump_h(4.0 / 3) == 0);
  CHECK(bump_h(2) == 0);
  double prev = 1;
  for (double xi = 0.75; xi <= 1.34; xi += 1e-3) {
    CHECK(bump_h(xi) <= prev + 1e-15);
    prev = bump_h(xi);
  }
  // Smooth: second differences stay small on a fine grid.
  const double d = 1e-4;
  for (double xi = 0.76; xi < 1.33; xi += 0.01)
    CHECK(std::abs(bump_h(xi + d) - 2 * bump_h(xi) + bump_h(xi - d)) < 1e-6);
  for (double xi : {0.0, 0.5, 0.74, 2.7, 5.0}) CHECK(bump_omega(xi) == 0);
  CHECK(bump_omega(1.5) > 0);
}

TEST_CASE("partition telescopes") {
  for (int K : {0, 3, 7}) {
    for (double xi = 0; xi < 4.0 * std::ldexp(1.0, K); xi += 0.37) {
      CHECK(partition_sum(xi, K) == doctest::Approx(bump_h(std::ldexp(xi, -K - 1))).epsilon(1e-14));
      double s = 0;
      for (int k = -1; k <= K; ++k) s += band_multiplier(k, xi);
      CHECK(s == doctest::Approx(partition_sum(xi, K)).epsilon(1e-14));
      if (xi <= 1.5 * std::ldexp(1.0, K)) CHECK(partition_sum(xi, K) == doctest::Approx(1).epsilon(1e-14));
    }
  }
  CHECK(band_eta(-1) == 2);
  CHECK(band_eta(3) == 0.125);
}

TEST_CASE("bands live on their annuli and reconstruct the function") {
  const auto phi = GridFunction::from_callable([](double x) { return std::exp(-std::abs(x)) * std::cos(3 * x); }, 8, 13);
  const int K = max_resolved_band(phi);
  CHECK((8.0 / 3) * std::ldexp(1.0, K) < phi.nyquist());
  CHECK((8.0 / 3) * std::ldexp(1.0, K + 1) >= phi.nyquist());
  const auto bands = decompose(phi, K);
  REQUIRE(bands.size() == std::size_t(K + 2));
  std::vector<double> sum(phi.size(), 0.0);
  for (const auto& b : bands) {
    const auto& y = b.phi_k.spectrum();
    double inside = 0, outside = 0;
    for (std::size_t q = 0; q < y.size(); ++q) {
      const double xi = phi.frequency(q);
      const bool in = b.k < 0 ? xi <= 4.0 / 3 : xi >= 0.75 * std::ldexp(1.0, b.k) && xi <= (8.0 / 3) * std::ldexp(1.0, b.k);
      (in ? inside : outside) += std::norm(y[q]);
    }
    CHECK(outside <= 1e-24 * (inside + 1e-300) + 1e-28);
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += b.phi_k.samples()[j];
  }
  // What the bands miss is the Fourier tail beyond them.
  CHECK(l2_diff(phi, sum) == doctest::Approx(fourier_tail(phi, K)).epsilon(1e-6));
}

TEST_CASE("Poisson deconvolution round trip") {
  const auto phi = GridFunction::from_callable([](double x) { return 1 / (1 + x * x); }, 16, 13);
  for (const auto& b : decompose(phi, 4)) {
    const auto back = poisson_smooth(b.g_k, b.eta);
    const double n_phi = b.phi_k.l2_norm();
    CHECK(l2_diff(b.phi_k, back.samples()) <= 1e-9 * (n_phi + 1e-12));
    CHECK(b.g_k.l2_norm() <= std::exp(8.0 / 3) * n_phi * (1 + 1e-12) + 1e-15);
  }
}

TEST_CASE("Poisson smoothing of a Poisson kernel adds the scales") {
  // P_a ⋆ P_b = P_{a+b}.
  const double a = 0.3, b = 0.5;
  auto P = [](double eta) {
    return [eta](double x) { return eta / (kPi * (x * x + eta * eta)); };
  };
  const auto f = GridFunction::from_callable(P(a), 64, 16);
  const auto g = poisson_smooth(f, b);
  for (double x : {-2.0, 0.0, 0.1, 1.0, 3.0}) CHECK(g(x) == doctest::Approx(P(a + b)(x)).epsilon(2e-3));
}

TEST_CASE("Gaussian Fourier tails") {
  // φ = exp(−x²/2σ²): ∫_{|ξ|>c}|φ̂|² dξ/2π = σ√π erfc(σc).
  // The discrete spectrum has spacing π/L, so a long box keeps the Riemann sum close.
  const double sigma = 0.25;
  const auto phi = gaussian(sigma, 128, 17);
  for (double c : {2.0, 4.0, 8.0}) {
    const double exact = std::sqrt(sigma * std::sqrt(kPi) * std::erfc(sigma * c));
    CHECK(sharp_fourier_tail(phi, c) == doctest::Approx(exact).epsilon(2e-3));
  }
  CHECK(sharp_fourier_tail(phi, -1) == doctest::Approx(phi.l2_norm()).epsilon(1e-10));
  for (int K : {1, 2, 3}) {
    const double t = fourier_tail(phi, K);
    CHECK(t <= sharp_fourier_tail(phi, 1.5 * std::ldexp(1.0, K)) * (1 + 1e-9));
    CHECK(t >= sharp_fourier_tail(phi, (8.0 / 3) * std::ldexp(1.0, K)) * (1 - 1e-9));
  }
}

TEST_CASE("norms") {
  const auto phi = gaussian(1.0, 16, 12);
  const auto n0 = norms(phi, 0);
  CHECK(n0.l2 == doctest::Approx(std::pow(kPi, 0.25)).epsilon(1e-10));
  CHECK(n0.sobolev_hs == doctest::Approx(n0.l2).epsilon(1e-10));
  // H¹ norm² = ‖φ‖² + ‖φ'‖² = √π + √π/2.
  CHECK(norms(phi, 1).sobolev_hs == doctest::Approx(std::sqrt(1.5 * std::sqrt(kPi))).epsilon(1e-8));
  // Double integral and Fourier form of the H^{1/2} seminorm both equal 2π here.
  const auto nh = norms(phi, 0.5);
  CHECK(h_half_fourier(gaussian(1.0, 128, 15)) == doctest::Approx(2 * kPi).epsilon(1e-3));
  CHECK(nh.homogeneous_h_half_integral == doctest::Approx(2 * kPi).epsilon(1e-3));
  // Band sums are comparable to the Sobolev norm.
  for (double s : {0.0, 0.5, 1.0}) {
    const auto r = norms(phi, s);
    const double q = r.band_sums / (r.sobolev_hs * r.sobolev_hs);
    CHECK(q > 0.1);
    CHECK(q < 10);
  }
  CHECK_THROWS_AS(norms(phi, -1), InvalidInput);
}

TEST_CASE("grid function interpolation and I/O") {
  const auto phi = GridFunction::from_callable([](double x) { return std::sin(x) * std::exp(-x * x / 8); }, 8, 12);
  for (double x : {-3.3, -0.01, 0.5, 2.71})
    CHECK(phi(x) == doctest::Approx(std::sin(x) * std::exp(-x * x / 8)).epsilon(1e-7));
  for (double x : {-1.2, 0.3})
    CHECK(phi.derivative(x) ==
          doctest::Approx(std::exp(-x * x / 8) * (std::cos(x) - x / 4 * std::sin(x))).epsilon(1e-5));
  CHECK(phi(9) == 0);
  const auto dir = std::filesystem::temp_directory_path();
  const auto bin = (dir / "wlss_grid.bin").string(), csv = (dir / "wlss_grid.csv").string();
  phi.write_binary(bin);
  phi.write_csv(csv);
  const auto a = GridFunction::read_binary(bin);
  const auto b = GridFunction::read_csv(csv);
  CHECK(a.samples() == phi.samples());
  CHECK(a.L() == phi.L());
  CHECK(b.size() == phi.size());
  CHECK(l2_diff(b, phi.samples()) < 1e-12);
  std::filesystem::remove(bin);
  std::filesystem::remove(csv);
  CHECK_THROWS_AS(GridFunction::read_binary(csv), IoError);
}

TEST_CASE("support and resolution are enforced") {
  CHECK_THROWS_AS(GridFunction(4, 8, std::vector<double>(256, 1.0), -1, 1), InvalidInput);
  CHECK_THROWS_AS(GridFunction(4, 8, std::vector<double>(100, 0.0), -4, 4), InvalidInput);
  const auto ok = GridFunction::from_callable([](double x) { return std::abs(x) < 1 ? 1 - x * x : 0.0; }, 4, 8, -1, 1);
  CHECK(ok(1.5) == 0);
  CHECK_THROWS_AS(decompose(ok, max_resolved_band(ok) + 1), InvalidInput);
  CHECK_THROWS_AS(decompose(ok, -1), InvalidInput);
  CHECK_THROWS_AS(poisson_smooth(ok, 0), InvalidInput);
}
