#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "wlss/ensemble.hpp"
#include "wlss/functionals.hpp"
#include "wlss/stats.hpp"

using namespace wlss;

namespace {

const CumulantPair kGauss{0, 0};

double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

}  // namespace

TEST_CASE("variance of polynomial statistics") {
  const CumulantPair c{0.7, 1.9};
  const int n = 50;
  const double rn = std::sqrt(double(n));
  struct Case {
    RealFn f;
    double v;
  };
  const std::vector<Case> cases{
      {[](double x) { return x; }, 2},
      {[](double x) { return x * x; }, 4 + 2 * c.s4},
      {[](double x) { return x * x * x; }, 24},
      {[](double x) { return x * x + x; }, 6 + 2 * c.s4 + 8 * c.s3 / rn},
  };
  for (const auto& k : cases) {
    const auto v = variance_V(k.f, c, n);
    CHECK(v.via_chebyshev == doctest::Approx(k.v).epsilon(1e-12));
    CHECK(v.via_quadrature == doctest::Approx(k.v).epsilon(1e-6));
    CHECK(v.quadrature_converged);
  }
}

TEST_CASE("variance of exp against Bessel coefficients") {
  // e^{2cos θ} = I_0(2) + 2 Σ I_k(2) cos kθ, so c_k = 2 I_k(2).
  double v = 0;
  for (int k = 1; k < 40; ++k) v += 0.5 * k * 4 * std::pow(std::cyl_bessel_i(double(k), 2.0), 2);
  const CumulantPair c{0, 1.3};
  v += 0.5 * c.s4 * 4 * std::pow(std::cyl_bessel_i(2.0, 2.0), 2);
  const auto r = variance_V([](double x) { return std::exp(x); }, c, 100);
  CHECK(r.via_chebyshev == doctest::Approx(v).epsilon(1e-12));
  CHECK(r.via_quadrature == doctest::Approx(v).epsilon(1e-6));
  const auto s = chebyshev_coeffs([](double x) { return std::exp(x); }, 16);
  for (int k = 0; k <= 6; ++k) CHECK(s.c[k] == doctest::Approx(2 * std::cyl_bessel_i(double(k), 2.0)).epsilon(1e-13));
}

TEST_CASE("Chebyshev coefficients against direct quadrature") {
  const RealFn phi = [](double x) { return 1 / (1 + (x - 0.3) * (x - 0.3)); };
  const auto s = chebyshev_coeffs(phi, 64);
  for (int k : {0, 1, 2, 5, 11}) {
    const double ck = 2 / kPi * gk([&](double t) { return phi(2 * std::cos(t)) * std::cos(k * t); }, 0, kPi);
    CHECK(s.c[k] == doctest::Approx(ck).scale(1).epsilon(1e-12));
  }
  for (double t : {0.1, 1.0, 2.5}) CHECK(s(t) == doctest::Approx(phi(2 * std::cos(t))).epsilon(1e-12));
}

TEST_CASE("weighted integral matches arcsine moments") {
  // ∫ x^{2k}/√(4−x²) dx = π·C(2k, k).
  CHECK(weighted_integral([](double) { return 1.0; }) == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(weighted_integral([](double x) { return x * x; }) == doctest::Approx(2 * kPi).epsilon(1e-14));
  CHECK(weighted_integral([](double x) { return std::pow(x, 6); }) == doctest::Approx(20 * kPi).epsilon(1e-13));
  const RealFn g = [](double x) { return std::cos(x) * std::exp(x / 3); };
  const double direct = gk([&](double t) { return g(2 * std::cos(t)); }, 0, kPi);
  CHECK(weighted_integral(g) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("mean corrections") {
  const CumulantPair c{0.4, 2.2};
  const int n = 30;
  CHECK(expectation_e([](double x) { return x * x; }, c, n) == doctest::Approx(1).epsilon(1e-12));
  CHECK(expectation_e([](double x) { return x * x * x * x; }, c, n) == doctest::Approx(5 + c.s4).epsilon(1e-12));
  CHECK(expectation_e([](double x) { return x * x * x; }, c, n) ==
        doctest::Approx(4 * c.s3 / std::sqrt(double(n))).epsilon(1e-12));
  CHECK(expectation_e([](double) { return 1.0; }, c, n) == doctest::Approx(0).scale(1).epsilon(1e-13));
  CHECK(expectation_e1([](double x) { return x; }) == doctest::Approx(0).scale(1).epsilon(1e-14));
}

TEST_CASE("tr H^4 correction for Laplace entries") {
  // E tr H⁴ = 2n + e(x⁴) + O(1/n) with e(x⁴) = 5 + s4.
  EnsembleSpec spec = EnsembleSpec::goe(80);
  spec.entry = EntryDistribution::laplace();
  const int trials = 3000;
  std::vector<double> t4(trials);
  for (int i = 0; i < trials; ++i) {
    const auto ev = sample_spectrum(spec, derive_seed(31, i)).eigenvalues;
    double s = 0;
    for (double x : ev) s += x * x * x * x;
    t4[i] = s - 2 * spec.n;
  }
  const auto m = mean_estimate(t4);
  CHECK(std::abs(m.value - 8) < 4 * m.se + 0.4);
}

TEST_CASE("skewness functional") {
  CHECK(skewness_B([](double x) { return x; }) == doctest::Approx(-2.0 / 3).epsilon(1e-14));
  CHECK(skewness_B([](double x) { return x * x; }) == doctest::Approx(0).scale(1).epsilon(1e-14));
  const CumulantPair c{0.5, 0};
  const int n = 16;
  // Third cumulant κ3 of tr φ is −6 s3 B/√n, 4 s3/√n for φ = x; the phase is (iξ)³κ3/6.
  const auto cf = predicted_cf([](double x) { return x; }, c, n, 0.7);
  const double k3 = 4 * c.s3 / std::sqrt(double(n));
  CHECK(std::abs(cf) == doctest::Approx(std::exp(-0.5 * 0.49 * 2)).epsilon(1e-12));
  CHECK(std::arg(cf) == doctest::Approx(-std::pow(0.7, 3) / 6 * k3).epsilon(1e-12));
  CHECK(predicted_cf(3.0, -1.0, kGauss, 10, 0.0) == Complex(1, 0));
}

TEST_CASE("resolvent covariance is the polarized variance") {
  const CumulantPair c{0.6, 1.4};
  const int n = 40;
  const Complex z(0.3, 0.5), w(-0.4, 0.7);
  auto im_g = [](Complex a) { return [a](double x) { return (1.0 / (x - a)).imag(); }; };
  const RealFn fz = im_g(z), fw = im_g(w);
  const double vp = variance_V([&](double x) { return fz(x) + fw(x); }, c, n).value;
  const double vm = variance_V([&](double x) { return fz(x) - fw(x); }, c, n).value;
  CHECK(im_im_covariance(z, w, c, n) == doctest::Approx((vp - vm) / 4).epsilon(1e-8));
  CHECK(im_im_covariance(z, z, c, n) == doctest::Approx(variance_V(fz, c, n).value).epsilon(1e-8));
}

TEST_CASE("input checks") {
  CHECK_THROWS_AS(variance_V([](double x) { return x; }, kGauss, 0), InvalidInput);
  CHECK_THROWS_AS(expectation_e([](double x) { return x; }, kGauss, 0), InvalidInput);
}
