#include "wlss/suites.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "wlss/bands.hpp"
#include "wlss/config.hpp"
#include "wlss/dbm.hpp"
#include "wlss/experiments.hpp"
#include "wlss/functionals.hpp"
#include "wlss/hermite.hpp"
#include "wlss/kernels.hpp"
#include "wlss/rng.hpp"
#include "wlss/semicircle.hpp"
#include "wlss/stats.hpp"

namespace wlss {

namespace {

void at_most(Report& r, const std::string& name, double value, double bound, const std::string& prov) {
  r.metrics.push_back(make_metric(name, value, bound, 0, 0, "at_most", prov));
}

template <class F>
void guarded(Report& r, const std::string& name, const std::string& prov, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    r.metrics.push_back(failed_metric(name, prov, e.what()));
  }
}

Report start(const std::string& kind) {
  Report r;
  r.kind = kind;
  r.version = version();
  return r;
}

std::vector<NamedFunction> smooth_corpus() {
  std::vector<NamedFunction> c;
  auto add = [&](RealFn f) { c.push_back({std::move(f), -INFINITY, INFINITY, "", {}}); };
  add([](double x) { return x; });
  add([](double x) { return x * x; });
  add([](double x) { return x * x * x - x; });
  add([](double x) { return x * x * x * x; });
  add([](double x) { return std::cos(x); });
  add([](double x) { return std::sin(2 * x); });
  add([](double x) { return std::exp(x / 2); });
  add([](double x) { return std::exp(-x * x / 0.5); });
  add([](double x) { return std::exp(-(x - 0.5) * (x - 0.5)); });
  add([](double x) { return 1 / (1 + x * x); });
  add([](double x) { return std::tanh(x); });
  add([](double x) { return 0.3 / (x * x + 0.09); });
  add([](double x) { return 0.5 / ((x - 0.7) * (x - 0.7) + 0.25); });
  add([](double x) { return x * std::exp(-x * x); });
  add([](double x) { return std::cos(3 * x + 0.2); });
  add([](double x) { return std::log(5 + x); });
  add([](double x) { return std::sqrt(5 + x); });
  c.push_back(make_test_function("bump", {0, 1.5}));
  c.push_back(make_test_function("smooth-indicator", {-1, 1, 0.3}));
  add([](double x) { return 0.2 - 0.7 * x + 0.4 * x * x * x - 0.1 * x * x * x * x * x; });
  return c;
}

}  // namespace

Report semicircle_suite(int grid_side, int quantile_n_max) {
  Report r = start("semicircle-suite");
  guarded(r, "m_sc_quadratic_residual", "spectra-core", [&] {
    double worst = 0, worst_abs = 0;
    for (int i = 0; i < grid_side; ++i)
      for (int j = 0; j < grid_side; ++j) {
        const double E = -4 + 8.0 * i / (grid_side - 1);
        const double eta = std::pow(10.0, -6 + 7.0 * j / (grid_side - 1));
        for (double s : {1.0, -1.0}) {
          const Complex z(E, s * eta);
          const Complex m = m_sc(z);
          worst = std::max(worst, std::abs(m * m + z * m + 1.0));
          if (s > 0) worst_abs = std::max(worst_abs, std::abs(m));
        }
      }
    at_most(r, "m_sc_quadratic_residual", worst, 1e-12, "spectra-core");
    at_most(r, "m_sc_modulus_max", worst_abs, 1 + 1e-12, "spectra-core");
  });
  guarded(r, "stieltjes_ratio_identity", "spectra-core", [&] {
    double worst = 0;
    const int side = std::max(4, grid_side / 4);
    for (int a = 0; a < side; ++a)
      for (int b = 0; b < side; ++b) {
        const Complex z(-3 + 6.0 * a / (side - 1), 0.05 + 2.0 * b / (side - 1));
        const Complex w(2.5 - 5.0 * b / (side - 1), 0.1 + 1.5 * a / (side - 1));
        if (std::abs(z - w) < 1e-4) continue;
        const Complex dd = (m_sc(z) - m_sc(w)) / (z - w);
        worst = std::max(worst, std::abs(stieltjes_ratio(z, w) - dd));
      }
    at_most(r, "stieltjes_ratio_identity", worst, 1e-10, "spectra-core");
  });
  guarded(r, "quantile_cdf_residual", "spectra-core", [&] {
    double worst = 0;
    for (int n = 1; n <= quantile_n_max; n = n < 64 ? n + 1 : n * 2) {
      const auto q = quantiles(n);
      for (int i = 1; i <= n; ++i) worst = std::max(worst, std::abs(semicircle_cdf(q.gamma[i - 1]) - double(i) / n));
    }
    at_most(r, "quantile_cdf_residual", worst, 1e-12, "spectra-core");
  });
  return r;
}

Report functional_suite(int random_cases, std::uint64_t seed) {
  Report r = start("functional-suite");
  const auto corpus = smooth_corpus();
  guarded(r, "variance_two_routes", "functionals", [&] {
    double worst = 0;
    Rng rng = make_stream(seed, 0);
    std::uniform_real_distribution<double> u(-1, 1);
    for (const auto& f : corpus) {
      const double s3 = u(rng);
      const CumulantPair cum{s3, s3 * s3 - 2 + 2 * (u(rng) + 1)};
      const auto v = variance_V(f.f, cum, 100);
      worst = std::max(worst, std::abs(v.via_chebyshev - v.via_quadrature));
    }
    at_most(r, "variance_chebyshev_vs_quadrature_max", worst, 1e-6, "functionals");
  });
  guarded(r, "variance_positivity", "functionals", [&] {
    Rng rng = make_stream(seed, 1);
    std::uniform_real_distribution<double> u(-1, 1);
    std::uniform_int_distribution<int> pick(0, int(corpus.size()) - 1);
    std::uniform_int_distribution<int> nn(4, 1000);
    double worst = INFINITY;
    for (int c = 0; c < random_cases; ++c) {
      const double a = u(rng), b = u(rng), w = 1 + 3 * (u(rng) + 1);
      const auto& f1 = corpus[pick(rng)].f;
      const auto& f2 = corpus[pick(rng)].f;
      RealFn phi = [=](double x) { return a * f1(x) + b * f2(x) + 0.3 * std::sin(w * x); };
      const double s3 = 2 * u(rng);
      const CumulantPair cum{s3, s3 * s3 - 2 + 3 * (u(rng) + 1)};
      const auto v = variance_V(phi, cum, nn(rng));
      worst = std::min(worst, v.via_chebyshev);
    }
    r.metrics.push_back(make_metric("variance_min_over_random_admissible", worst, -1e-12, 0, 0, "at_least",
                                    "functionals"));
  });
  guarded(r, "parity_identities", "functionals", [&] {
    double worst = 0;
    const CumulantPair cum{0.7, 1.3};
    const int n = 50;
    for (const auto& f : corpus) {
      RealFn refl = [&](double x) { return f.f(-x); };
      RealFn neg = [&](double x) { return -f.f(x); };
      const double B = skewness_B(f.f);
      worst = std::max(worst, std::abs(skewness_B(refl) + B));
      worst = std::max(worst, std::abs(skewness_B(neg) + B));
      const double e = expectation_e(f.f, cum, n);
      worst = std::max(worst, std::abs(expectation_e(refl, {-cum.s3, cum.s4}, n) - e));
      worst = std::max(worst, std::abs(expectation_e(neg, cum, n) + e));
      worst = std::max(worst, std::abs(expectation_e(refl, {0, cum.s4}, n) - expectation_e(f.f, {0, cum.s4}, n)));
    }
    at_most(r, "parity_identity_max_error", worst, 1e-10, "functionals");
  });
  return r;
}

Report littlewood_paley_suite(int p) {
  Report r = start("littlewood-paley-suite");
  const double L = 8;
  guarded(r, "partition_of_unity", "bandlimits", [&] {
    // Bands up to km cover |ξ| ≤ (3/4)·2^{km+1} completely.
    const int km = 10;
    double worst = 0;
    for (int j = 0; j <= 20000; ++j) {
      const double xi = 1.5 * std::ldexp(1.0, km) * j / 20000;
      worst = std::max(worst, std::abs(partition_sum(xi, km) - 1));
    }
    at_most(r, "partition_of_unity_max_error", worst, 1e-12, "bandlimits");
  });
  guarded(r, "poisson_round_trip", "bandlimits", [&] {
    const auto phi = GridFunction::from_callable([](double x) { return std::exp(-2 * x * x) * std::cos(3 * x); }, L, p);
    const int km = std::min(6, max_resolved_band(phi));
    double worst = 0;
    for (const auto& b : decompose(phi, km)) {
      const auto back = poisson_smooth(b.g_k, b.eta);
      double s = 0;
      for (std::size_t j = 0; j < back.size(); ++j) {
        const double d = back.samples()[j] - b.phi_k.samples()[j];
        s += d * d;
      }
      worst = std::max(worst, std::sqrt(s * phi.h()));
    }
    at_most(r, "poisson_round_trip_l2_max", worst, 1e-8, "bandlimits");
  });
  guarded(r, "reconstruction_vs_tail", "bandlimits", [&] {
    const auto phi = GridFunction::from_callable([](double x) { return std::exp(-x * x / 0.02); }, L, p);
    double worst = 0;
    for (int km = 0; km <= 5; ++km) {
      const auto bands = decompose(phi, km);
      std::vector<double> rest = phi.samples();
      for (const auto& b : bands)
        for (std::size_t j = 0; j < rest.size(); ++j) rest[j] -= b.phi_k.samples()[j];
      double s = 0;
      for (double v : rest) s += v * v;
      worst = std::max(worst, std::abs(std::sqrt(s * phi.h()) - fourier_tail(phi, km)));
    }
    at_most(r, "reconstruction_minus_fourier_tail_max", worst, 1e-8, "bandlimits");
  });
  guarded(r, "indicator_plateau", "bandlimits", [&] {
    // Sharp enough that the smoothing scale sits beyond every band used.
    const double w = 1e-3;
    const auto phi = GridFunction::from_callable(
        [w](double x) { return 0.5 * (std::erf((x + 1) / w) - std::erf((x - 1) / w)); }, L, p);
    const int km = std::min(8, max_resolved_band(phi));
    const auto bands = decompose(phi, km);
    std::vector<double> scaled, ks, partial;
    double acc = 0;
    for (const auto& b : bands) {
      const double l2 = b.phi_k.l2_norm();
      acc += std::ldexp(l2 * l2, std::max(b.k, 0));
      // From k = 2 on, each annulus spans several periods of |φ̂|² = 4sin²ξ/ξ².
      if (b.k >= 2) {
        scaled.push_back(std::ldexp(l2 * l2, b.k));
        ks.push_back(b.k);
        partial.push_back(acc);
      }
    }
    const auto [mn, mx] = std::minmax_element(scaled.begin(), scaled.end());
    at_most(r, "plateau_2^k_l2sq_max_over_min", *mx / *mn, 1.5, "bandlimits");
    const auto fit = linear_fit(ks, partial);
    r.metrics.push_back(make_metric("band_sum_growth_slope", fit.slope, 0, 0, 0, "at_least", "bandlimits"));
    r.metrics.push_back(make_metric("band_sum_linear_in_k_r2", fit.r2, 0.99, 0, 0, "at_least", "bandlimits"));
  });
  return r;
}

Report validation_suite(unsigned threads) {
  const auto t0 = std::chrono::steady_clock::now();
  Report r = start("validate");
  auto merge = [&](const Report& s) {
    for (auto m : s.metrics) {
      m.name = s.kind + "/" + m.name;
      r.metrics.push_back(m);
    }
  };
  merge(semicircle_suite(100, 256));
  merge(functional_suite(100, 7));
  merge(littlewood_paley_suite(15));

  auto experiment = [&](const std::string& text) {
    Config c = Config::parse(text, "validate");
    c.set_json("threads", threads);
    return run_experiment(c);
  };
  merge(experiment("kind = \"clt\"\nn = 60\ntrials = 3000\nfunction = \"x2\"\nxi = [1]\n"));
  merge(experiment(
      "kind = \"dbm-moments\"\nn = 400\nou_paths = 500\nou_T = 6\ninv_n = 20\ninv_paths = 20\ninv_T = 0.2\n"));

  guarded(r, "kernels", "gausskernels", [&] {
    const auto gue = density_of_states(60, Symmetry::kGUE, 0.5);
    const double rho = rho_sc(0.5);
    r.metrics.push_back(make_metric("kernels/gue_density_correction", 60 * (gue.rho - rho),
                                    60 * gue.correction_predicted, 0, 0.3 / (4 * kPi * kPi * kPi * rho * rho),
                                    "within", "gausskernels"));
    const auto h = hermite_integrals(50);
    at_most(r, "kernels/hermite_closed_form_rel", std::abs(h.even_full_line / h.even_closed_form - 1), 1e-8,
            "gausskernels");
    at_most(r, "kernels/cd_symmetry", std::abs(cd_kernel(40, 0.3, -0.7) - cd_kernel(40, -0.7, 0.3)), 1e-12,
            "gausskernels");
  });

  guarded(r, "determinism", "harness", [&] {
    const std::string text = "kind = \"clt\"\nn = 30\ntrials = 200\nfunction = \"x\"\nxi = [1]\n";
    Config a = Config::parse(text), b = Config::parse(text);
    a.set_json("threads", 1);
    b.set_json("threads", 3);
    auto ra = run_experiment(a).to_json(), rb = run_experiment(b).to_json();
    for (auto* j : {&ra, &rb}) {
      j->erase("wall_clock_seconds");
      j->erase("config");
    }
    r.metrics.push_back(make_metric("determinism/threads_1_vs_3_identical", ra == rb ? 1 : 0, 1, 0, 0, "at_least",
                                    "harness"));
  });
  r.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace wlss
