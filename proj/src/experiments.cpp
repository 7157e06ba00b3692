#include "wlss/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <fstream>
#include <sstream>
#include <tuple>

#include "wlss/bands.hpp"
#include "wlss/dbm.hpp"
#include "wlss/hermite.hpp"
#include "wlss/kernels.hpp"
#include "wlss/quadrature.hpp"
#include "wlss/semicircle.hpp"
#include "wlss/stats.hpp"

namespace wlss {

double smooth_step(double t) {
  if (t <= 0) return 0;
  if (t >= 1) return 1;
  const double a = std::exp(-1 / t), b = std::exp(-1 / (1 - t));
  return a / (a + b);
}

NamedFunction make_test_function(const std::string& name, const std::vector<double>& p, const std::string& file) {
  auto need = [&](std::size_t k) {
    if (p.size() != k)
      throw InvalidInput("test function '" + name + "' expects " + std::to_string(k) + " parameters");
  };
  NamedFunction nf;
  nf.label = name;
  if (name == "x") {
    need(0);
    nf.f = [](double x) { return x; };
  } else if (name == "x2") {
    need(0);
    nf.f = [](double x) { return x * x; };
  } else if (name == "power") {
    need(1);
    const double e = p[0];
    require(e >= 0 && std::floor(e) == e, "power: exponent must be a nonnegative integer");
    nf.f = [e](double x) { return std::pow(x, e); };
  } else if (name == "poly") {
    require(!p.empty(), "poly: needs coefficients");
    nf.f = [p](double x) {
      double s = 0;
      for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * x + *it;
      return s;
    };
  } else if (name == "cos") {
    need(1);
    const double w = p[0];
    nf.f = [w](double x) { return std::cos(w * x); };
  } else if (name == "gauss") {
    need(2);
    const double c = p[0], s = p[1];
    require(s > 0, "gauss: width must be positive");
    nf.f = [c, s](double x) { return std::exp(-0.5 * (x - c) * (x - c) / (s * s)); };
    nf.features = {{c, s}};
  } else if (name == "poisson") {
    need(2);
    const double E = p[0], eta = p[1];
    require(eta > 0, "poisson: eta must be positive");
    nf.f = [E, eta](double x) { return eta / ((x - E) * (x - E) + eta * eta); };
    nf.features = {{E, eta}};
  } else if (name == "smooth-indicator") {
    need(3);
    const double a = p[0], b = p[1], w = p[2];
    require(a < b && w > 0, "smooth-indicator: needs a < b and width > 0");
    nf.f = [a, b, w](double x) { return 0.5 * (std::erf((x - a) / w) - std::erf((x - b) / w)); };
    nf.features = {{a, w}, {b, w}};
  } else if (name == "bump") {
    need(2);
    const double c = p[0], r = p[1];
    require(r > 0, "bump: radius must be positive");
    nf.f = [c, r](double x) {
      const double u = (x - c) / r;
      return std::abs(u) < 1 ? std::exp(1 - 1 / (1 - u * u)) : 0.0;
    };
    nf.lo = c - r;
    nf.hi = c + r;
  } else if (name == "cutoff-poisson") {
    need(4);
    const double E = p[0], eta = p[1], inner = p[2], edge = p[3];
    require(eta > 0 && inner > 0 && edge > inner, "cutoff-poisson: needs eta > 0 and 0 < inner < edge");
    nf.f = [=](double x) {
      const double cut = smooth_step((edge - std::abs(x)) / (edge - inner));
      return cut == 0 ? 0.0 : cut * eta / ((x - E) * (x - E) + eta * eta);
    };
    nf.lo = -edge;
    nf.hi = edge;
    nf.features = {{E, eta}};
  } else if (name == "grid") {
    require(!file.empty(), "grid test function needs function_file");
    const bool csv = file.size() >= 4 && file.compare(file.size() - 4, 4, ".csv") == 0;
    const GridFunction g = csv ? GridFunction::read_csv(file) : GridFunction::read_binary(file);
    nf.f = [g](double x) { return g(x); };
    nf.lo = std::max(g.support_lo(), -g.L());
    nf.hi = std::min(g.support_hi(), g.L());
    nf.features = {};
  } else {
    throw InvalidInput("unknown test function '" + name + "'");
  }
  return nf;
}

EnsembleSpec ensemble_from_config(const Config& cfg, int n) {
  EnsembleSpec s;
  s.n = n;
  s.beta = int(cfg.get_int("beta", 1));
  s.entry = build_entry_distribution(cfg.get_string("entry", "gaussian"), cfg.get_doubles("entry_params", {}));
  const std::string c = cfg.get_string("construction", "direct");
  if (c == "direct")
    s.construction = Construction::kDirect;
  else if (c == "symmetrized")
    s.construction = Construction::kSymmetrized;
  else
    throw InvalidInput("construction must be 'direct' or 'symmetrized'");
  s.divisible_t = cfg.get_double("divisible_t", 0);
  s.validate();
  return s;
}

namespace {

const std::set<std::string> kCommon = {"kind", "n", "trials", "seed", "threads", "out", "batches"};
const std::set<std::string> kEnsemble = {"beta", "entry", "entry_params", "construction", "divisible_t"};
const std::set<std::string> kFunction = {"function", "function_params", "function_file"};

const std::map<std::string, std::set<std::string>> kKindKeys = {
    {"clt", {"xi", "cumulant_source", "s3", "s4"}},
    {"band-variance", {"k_min", "k_max", "grid_L", "grid_p", "bound"}},
    {"covariance-grid", {"energies", "etas", "rel_tol", "cumulant_source", "s3", "s4"}},
    {"counting-variance", {"ns", "energy"}},
    {"wegner", {"energy", "window", "eta_factors", "bound_factor"}},
    {"dbm-moments",
     {"z_re", "z_im", "w_re", "w_im", "T", "ou_paths", "ou_T", "ou_dt", "inv_n", "inv_T", "inv_paths", "meso_n",
      "meso_t", "meso_z", "trajectory_out"}},
    {"homogenization", {"t", "alpha", "k_count", "bound_factor"}},
    {"kernel-validate",
     {"sizes", "n_density", "density_energy", "energies", "etas", "bound_C", "mc_E1", "mc_E2", "mc_eta",
      "heatmap_out", "hermite_m_max", "hermite_m_asym"}},
};

bool uses_ensemble(const std::string& kind) {
  return kind == "clt" || kind == "band-variance" || kind == "covariance-grid" || kind == "counting-variance" ||
         kind == "wegner" || kind == "homogenization";
}

bool uses_function(const std::string& kind) { return kind == "clt" || kind == "band-variance"; }

struct Ctx {
  const Config& cfg;
  std::uint64_t seed;
  unsigned threads;
  int batches;
  Report& report;

  void add(Metric m) { report.metrics.push_back(std::move(m)); }

  // Runs f; a thrown error becomes a failed metric with this name.
  template <class F>
  void guarded(const std::string& name, const std::string& provenance, F&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      add(failed_metric(name, provenance, e.what()));
    }
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Runs body(trial, out) for every trial into a [width][trials] table.
template <class F>
std::vector<std::vector<double>> run_trials(std::size_t trials, std::size_t width, unsigned threads, F&& body) {
  std::vector<std::vector<double>> table(width, std::vector<double>(trials));
  parallel_for(
      trials,
      [&](std::size_t i) {
        std::vector<double> out(width);
        body(i, out.data());
        for (std::size_t k = 0; k < width; ++k) table[k][i] = out[k];
      },
      threads);
  return table;
}

NamedFunction function_from_config(const Config& c, const std::string& fallback, const std::vector<double>& params) {
  const std::string name = c.get_string("function", fallback);
  const auto p = c.has("function_params") || c.has("function") ? c.get_doubles("function_params", {}) : params;
  return make_test_function(name, p, c.get_string("function_file", ""));
}

double semicircle_integral(const NamedFunction& f) {
  const double lo = std::max(-2.0, f.lo), hi = std::min(2.0, f.hi);
  if (lo >= hi) return 0;
  // Split at features so that narrow peaks are seen by the adaptive rule.
  std::vector<double> br = {lo, hi};
  for (auto [c, w] : f.features)
    for (double x : {c - 5 * w, c, c + 5 * w})
      if (x > lo && x < hi) br.push_back(x);
  std::sort(br.begin(), br.end());
  double s = 0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i)
    s += integrate_adaptive([&](double x) { return f.f(x) * rho_sc(x); }, br[i], br[i + 1], 1e-13).value;
  return s;
}

CumulantPair cumulants_from_config(const Config& c, const EnsembleSpec& spec) {
  const std::string src = c.get_string("cumulant_source", "entry");
  if (src == "entry") return spec.cumulants();
  if (src == "override") return {c.get_double("s3", 0), c.get_double("s4", 0)};
  throw InvalidInput("cumulant_source must be 'entry' or 'override'");
}

// ---------------------------------------------------------------- clt

void run_clt(Ctx& ctx) {
  const auto& c = ctx.cfg;
  const int n = int(c.get_int("n", 200));
  const std::size_t trials = std::size_t(c.get_int("trials", 10000));
  const EnsembleSpec spec = ensemble_from_config(c, n);
  const NamedFunction fn = function_from_config(c, "x2", {});
  const CumulantPair cum = cumulants_from_config(c, spec);
  const auto xis = c.get_doubles("xi", {0, 0.5, -0.5, 1, -1, 2, -2, 3, -3});

  const auto table = run_trials(trials, 1, ctx.threads, [&](std::size_t i, double* out) {
    out[0] = linear_statistic(sample_spectrum(spec, derive_seed(ctx.seed, i)), fn.f);
  });
  const auto& v = table[0];
  const double center = n * semicircle_integral(fn);
  std::vector<double> centered(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) centered[i] = v[i] - center;

  double V = NAN, B = NAN;
  ctx.guarded("mean_correction", "functionals", [&] {
    const auto m = mean_estimate(centered, ctx.batches);
    const double e = expectation_e(fn.f, cum, n);
    ctx.add(make_metric("mean_correction", m.value, e, m.se, 3 * m.se, "within", "functionals"));
  });
  ctx.guarded("variance", "functionals", [&] {
    V = variance_V(fn.f, cum, n).value;
    const auto s = variance_estimate(v, ctx.batches);
    ctx.add(make_metric("variance", s.value, V, s.se, 3 * s.se, "within", "functionals"));
  });
  ctx.guarded("third_cumulant", "functionals", [&] {
    B = skewness_B(fn.f);
    const auto k3 = third_cumulant_estimate(v, ctx.batches);
    const double pred = -6 * cum.s3 * B / std::sqrt(double(n));
    ctx.add(make_metric("third_cumulant", k3.value, pred, k3.se, 3 * k3.se, "within", "functionals"));
  });
  if (!std::isfinite(V) || !std::isfinite(B)) return;
  const double mu = mean(v);
  for (double xi : xis) {
    const Complex pred = predicted_cf(V, B, cum, n, xi);
    for (int part = 0; part < 2; ++part) {
      const std::string name = std::string(part ? "cf_im" : "cf_re") + "(xi=" + fmt(xi) + ")";
      ctx.guarded(name, "functionals", [&] {
        const auto est = batch_means(
            v.size(),
            [&](std::size_t a, std::size_t b) {
              double s = 0;
              for (std::size_t i = a; i < b; ++i)
                s += part ? std::sin(xi * (v[i] - mu)) : std::cos(xi * (v[i] - mu));
              return s / double(b - a);
            },
            ctx.batches);
        const double p = part ? pred.imag() : pred.real();
        ctx.add(make_metric(name, est.value, p, est.se, 3 * est.se + 10.0 / n, "within", "functionals"));
      });
    }
  }
}

// ---------------------------------------------------------------- band-variance

void run_band_variance(Ctx& ctx) {
  const auto& c = ctx.cfg;
  const int n = int(c.get_int("n", 500));
  const std::size_t trials = std::size_t(c.get_int("trials", 2000));
  const EnsembleSpec spec = ensemble_from_config(c, n);
  const NamedFunction fn = function_from_config(c, "smooth-indicator", {-1, 1, 0.5 / n});
  const int k_min = int(c.get_int("k_min", 1));
  const int k_max = int(c.get_int("k_max", std::max(1, int(std::floor(std::log2(double(n)))) - 1)));
  require(k_min >= -1 && k_min <= k_max, "band-variance: need -1 <= k_min <= k_max");
  const double bound = c.get_double("bound", 30);
  const GridFunction phi = GridFunction::from_callable(fn.f, c.get_double("grid_L", 8), int(c.get_int("grid_p", 18)));
  const auto all = decompose(phi, k_max);
  std::vector<DyadicBand> bands;
  for (const auto& b : all)
    if (b.k >= k_min) bands.push_back(b);

  const auto table = run_trials(trials, bands.size(), ctx.threads, [&](std::size_t i, double* out) {
    const auto s = sample_spectrum(spec, derive_seed(ctx.seed, i));
    for (std::size_t b = 0; b < bands.size(); ++b) out[b] = linear_statistic(s, bands[b].phi_k);
  });

  std::vector<double> ratios;
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const int k = bands[b].k;
    const double l2 = bands[b].phi_k.l2_norm();
    const double scale = std::ldexp(l2 * l2, k);
    const std::string tag = "(k=" + std::to_string(k) + ")";
    ctx.add(make_metric("band_scale_2^k_l2sq" + tag, scale, NAN, 0, 0, "info", "bandlimits"));
    const auto s = variance_estimate(table[b], ctx.batches);
    const double r = s.value / scale;
    ratios.push_back(r);
    ctx.add(make_metric("variance_ratio" + tag, r, NAN, s.se / scale, 0, "info", "bandlimits"));
  }
  const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
  ctx.add(make_metric("variance_ratio_max_over_min", *mx / *mn, bound, 0, 0, "at_most", "bandlimits"));
}

// ---------------------------------------------------------------- covariance-grid

void run_covariance_grid(Ctx& ctx) {
  const auto& c = ctx.cfg;
  const int n = int(c.get_int("n", 200));
  const std::size_t trials = std::size_t(c.get_int("trials", 5000));
  const EnsembleSpec spec = ensemble_from_config(c, n);
  const CumulantPair cum = cumulants_from_config(c, spec);
  const auto Es = c.get_doubles("energies", {-1, 0, 0.5});
  const auto etas = c.get_doubles("etas", {0.1, 0.3});
  const double rel = c.get_double("rel_tol", 0.1);
  std::vector<Complex> zs;
  for (double e : Es)
    for (double h : etas) {
      require(h > 0, "covariance-grid: etas must be positive");
      zs.emplace_back(e, h);
    }
  const auto table = run_trials(trials, zs.size(), ctx.threads, [&](std::size_t i, double* out) {
    const auto s = sample_spectrum(spec, derive_seed(ctx.seed, i));
    for (std::size_t j = 0; j < zs.size(); ++j) out[j] = empirical_stieltjes(s, zs[j]).imag();
  });
  for (std::size_t a = 0; a < zs.size(); ++a)
    for (std::size_t b = a; b < zs.size(); ++b) {
      const std::string name = "n2cov(z=" + fmt(zs[a].real()) + "+" + fmt(zs[a].imag()) + "i,w=" +
                               fmt(zs[b].real()) + "+" + fmt(zs[b].imag()) + "i)";
      ctx.guarded(name, "functionals", [&] {
        const auto& x = table[a];
        const auto& y = table[b];
        const auto est = batch_means(
            trials,
            [&](std::size_t lo, std::size_t hi) {
              double mx = 0, my = 0;
              for (std::size_t i = lo; i < hi; ++i) mx += x[i], my += y[i];
              mx /= double(hi - lo);
              my /= double(hi - lo);
              double s = 0;
              for (std::size_t i = lo; i < hi; ++i) s += (x[i] - mx) * (y[i] - my);
              return double(n) * n * s / double(hi - lo - 1);
            },
            ctx.batches);
        const double pred = im_im_covariance(zs[a], zs[b], cum, n);
        ctx.add(make_metric(name, est.value, pred, est.se, 3 * est.se + rel * std::abs(pred), "within",
                            "functionals"));
      });
    }
}

// ---------------------------------------------------------------- counting-variance

void run_counting_variance(Ctx& ctx) {
  const auto& c = ctx.cfg;
  const std::size_t trials = std::size_t(c.get_int("trials", 40000));
  const auto ns = c.get_doubles("ns", {100, 200, 400, 800});
  const double E = c.get_double("energy", 0);
  require(ns.size() >= 2, "counting-variance: need at least two sizes");
  std::vector<double> logs, vars;
  int beta = 1;
  for (std::size_t q = 0; q < ns.size(); ++q) {
    const int n = int(ns[q]);
    const EnsembleSpec spec = ensemble_from_config(c, n);
    beta = spec.beta;
    // Gaussian ensembles are counted on the tridiagonal model without diagonalizing.
    const bool sturm = spec.gaussian() && n >= 2;
    const auto table = run_trials(trials, 1, ctx.threads, [&](std::size_t i, double* out) {
      const auto seed = derive_seed(derive_seed(ctx.seed, q), i);
      if (sturm) {
        out[0] = double(sturm_count(sample_tridiagonal(spec, seed), E));
        return;
      }
      const auto s = sample_spectrum(spec, seed);
      out[0] = double(std::upper_bound(s.eigenvalues.begin(), s.eigenvalues.end(), E) - s.eigenvalues.begin());
    });
    const auto est = variance_estimate(table[0], ctx.batches);
    logs.push_back(std::log(double(n)));
    vars.push_back(est.value);
    ctx.add(make_metric("count_variance(n=" + std::to_string(n) + ")", est.value, NAN, est.se, 0, "info",
                        "ensembles"));
  }
  const auto fit = linear_fit(logs, vars);
  ctx.add(make_metric("log_slope_a", fit.slope, 0, 0, 0, "at_least", "harness"));
  ctx.add(make_metric("log_fit_r2", fit.r2, 0.9, 0, 0, "at_least", "harness"));
  ctx.add(make_metric("log_slope_vs_1/(beta*pi^2)", fit.slope, 1 / (beta * kPi * kPi), 0, 0, "info", "harness"));
}

// ---------------------------------------------------------------- wegner

// Lebesgue measure of ∪(λ_i − η, λ_i + η) inside [a, b].
double covered_measure(const std::vector<double>& ev, double eta, double a, double b) {
  auto it = std::lower_bound(ev.begin(), ev.end(), a - eta);
  double total = 0, cur_lo = 0, cur_hi = -INFINITY;
  for (; it != ev.end() && *it - eta < b; ++it) {
    const double lo = std::max(a, *it - eta), hi = std::min(b, *it + eta);
    if (hi <= lo) continue;
    if (lo > cur_hi) {
      if (cur_hi > cur_lo) total += cur_hi - cur_lo;
      cur_lo = lo;
      cur_hi = hi;
    } else {
      cur_hi = std::max(cur_hi, hi);
    }
  }
  if (cur_hi > cur_lo) total += cur_hi - cur_lo;
  return total;
}

void run_wegner(Ctx& ctx) {
  const auto& c = ctx.cfg;
  const int n = int(c.get_int("n", 200));
  const std::size_t trials = std::size_t(c.get_int("trials", 2000));
  const EnsembleSpec spec = ensemble_from_config(c, n);
  const double E = c.get_double("energy", 0);
  const double delta = c.get_double("window", 0.02);
  const double factor = c.get_double("bound_factor", 1.5);
  std::vector<double> def;
  for (int j = 0; j <= 8; ++j) def.push_back(std::pow(10.0, -4 + 0.5 * j));
  const auto fac = c.get_doubles("eta_factors", def);
  require(delta > 0, "wegner: window must be positive");
  for (double f : fac) require(f > 0, "wegner: eta_factors must be positive");
  // Averaging over E in the window replaces the indicator of an eigenvalue
  // within η of E by the covered fraction of the window.
  const auto table = run_trials(trials, fac.size(), ctx.threads, [&](std::size_t i, double* out) {
    const auto s = sample_spectrum(spec, derive_seed(ctx.seed, i));
    for (std::size_t j = 0; j < fac.size(); ++j)
      out[j] = covered_measure(s.eigenvalues, fac[j] / n, E - delta, E + delta) / (2 * delta);
  });
  std::vector<double> ratios;
  for (std::size_t j = 0; j < fac.size(); ++j) {
    const double eta = fac[j] / n;
    const auto m = mean_estimate(table[j], ctx.batches);
    ratios.push_back(m.value / (n * eta));
    ctx.add(make_metric("ratio(eta=" + fmt(fac[j]) + "/n)", m.value / (n * eta), NAN, m.se / (n * eta), 0, "info",
                        "ensembles"));
  }
  const double C = mean(ratios);
  ctx.add(make_metric("fitted_constant", C, NAN, 0, 0, "info", "harness"));
  ctx.add(make_metric("max_ratio", *std::max_element(ratios.begin(), ratios.end()), factor * C, 0, 0, "at_most",
                      "harness"));
  ctx.add(make_metric("small_eta_ratio_vs_2rho_sc", ratios.front(), 2 * rho_sc(E), 0, 0, "info", "spectra-core"));
}

// ---------------------------------------------------------------- dbm-moments

void run_dbm_moments(Ctx& ctx) {
  const auto& c = ctx.cfg;
  ctx.guarded("characteristic_ode_residual", "dbm", [&] {
    double worst = 0;
    const double h = 1e-4;
    for (double E : {-1.5, -0.5, 0.0, 0.7, 1.5, 2.5})
      for (double eta : {0.0, 0.01, 0.1, 1.0})
        for (double t : {0.05, 0.3, 1.0}) {
          // A real base point outside [−2, 2] stays on the real axis.
          if (eta == 0 && std::abs(E) >= 2) continue;
          const Complex z(E, eta);
          const Complex zt = characteristic(z, t);
          const Complex d = (characteristic(z, t + h) - characteristic(z, t - h)) / (2 * h);
          worst = std::max(worst, std::abs(d - m_sc(zt) - zt / 2.0));
        }
    ctx.add(make_metric("characteristic_ode_residual", worst, 1e-7, 0, 0, "at_most", "dbm"));
  });

  const int n = int(c.get_int("n", 2000));
  const Complex z(c.get_double("z_re", 0.4), c.get_double("z_im", 0.01));
  const Complex w(c.get_double("w_re", -0.4), c.get_double("w_im", 0.01));
  const double T = c.get_double("T", 0.2);
  ctx.guarded("var_closed_vs_sumform", "dbm", [&] {
    const auto m = char_gaussian_moments(z, w, T, n);
    ctx.add(make_metric("var_closed_vs_sumform", m.var_z_sumform, m.var_z, 0, 5 / (n * z.imag()), "within", "dbm"));
    const double dre = z.real() - w.real();
    const double bound = 10 * (T * T + z.imag() * z.imag()) / (dre * dre) + 10 / (n * z.imag());
    ctx.add(make_metric("cov_sumform_bound", m.cov_sumform, bound, 0, 0, "at_most", "dbm"));
    ctx.add(make_metric("cov_continuum_vs_sumform", m.cov_sumform, m.cov, 0, 5 / (n * z.imag()), "within", "dbm"));
  });

  ctx.guarded("ou_stationary_variance", "dbm", [&] {
    const std::size_t paths = std::size_t(c.get_int("ou_paths", 5000));
    const double oT = c.get_double("ou_T", 10), odt = c.get_double("ou_dt", 0.01);
    const auto table = run_trials(paths, 1, ctx.threads, [&](std::size_t i, double* out) {
      const DbmState s{0, {0.0}, 1};
      out[0] = simulate_dbm(s, oT, odt, derive_seed(derive_seed(ctx.seed, 1), i)).states.back()[0];
    });
    const auto v = variance_estimate(table[0], ctx.batches);
    ctx.add(make_metric("ou_stationary_variance", v.value, 2.0, v.se, 3 * v.se, "within", "dbm"));
  });

  ctx.guarded("goe_invariance", "dbm", [&] {
    const int m = int(c.get_int("inv_n", 100));
    const std::size_t paths = std::size_t(c.get_int("inv_paths", 64));
    const double iT = c.get_double("inv_T", 1);
    const int records = 4;
    const auto table = run_trials(paths, records + 1, ctx.threads, [&](std::size_t i, double* out) {
      const auto s0 = sample_spectrum(EnsembleSpec::goe(m), derive_seed(derive_seed(ctx.seed, 2), i));
      const DbmState st{0, s0.eigenvalues, 1};
      const auto tr = simulate_dbm(st, iT, iT / records, derive_seed(derive_seed(ctx.seed, 3), i));
      for (int r = 0; r <= records; ++r) {
        double q = 0;
        for (double x : tr.states[r]) q += x * x;
        out[r] = q;
      }
    });
    for (int r = 0; r <= records; ++r) {
      const auto e = mean_estimate(table[r], ctx.batches);
      ctx.add(make_metric("goe_invariance_sum_x2(t=" + fmt(iT * r / records) + ")", e.value, m + 1.0, e.se,
                          3 * e.se, "within", "ensembles"));
    }
    const std::string out = c.get_string("trajectory_out", "");
    if (!out.empty()) {
      const auto s0 = sample_spectrum(EnsembleSpec::goe(m), derive_seed(derive_seed(ctx.seed, 2), 0));
      write_trajectory_csv(out, simulate_dbm({0, s0.eigenvalues, 1}, iT, iT / 20, derive_seed(ctx.seed, 4)));
    }
  });

  ctx.guarded("meso_statistic_on_quantiles", "dbm", [&] {
    const int m = int(c.get_int("meso_n", 500));
    const double t = c.get_double("meso_t", 0.1);
    const double E = c.get_double("meso_z", 0.3);
    const double x = meso_statistic(quantiles(m).gamma, Complex(E, 0.0), t);
    ctx.add(make_metric("meso_statistic_on_quantiles_abs", std::abs(x), 2.0, 0, 0, "at_most", "dbm"));
  });
}

// ---------------------------------------------------------------- homogenization

void run_homogenization(Ctx& ctx) {
  const auto& c = ctx.cfg;
  const int n = int(c.get_int("n", 200));
  const std::size_t runs = std::size_t(c.get_int("trials", 50));
  const double t = c.get_double("t", 0.5);
  const double alpha = c.get_double("alpha", 0.25);
  const int kc = int(c.get_int("k_count", 5));
  const double factor = c.get_double("bound_factor", 10);
  require(alpha > 0 && alpha < 0.5 && kc >= 1, "homogenization: need 0 < alpha < 1/2 and k_count >= 1");
  HomogenizationOptions opt;
  opt.wigner = ensemble_from_config(c, n);
  if (!c.has("entry")) opt.wigner.entry = EntryDistribution::laplace();
  std::vector<int> ks;
  for (int j = 0; j < kc; ++j)
    ks.push_back(int(std::lround(alpha * n + (kc == 1 ? 0.5 : double(j) / (kc - 1)) * (1 - 2 * alpha) * n)));
  const int k_edge = std::max(1, n / 50);

  ctx.guarded("median_abs_residual", "dbm", [&] {
    auto all = ks;
    all.push_back(k_edge);
    const std::size_t m = all.size();
    const auto table = run_trials(runs, 2 * m, ctx.threads, [&](std::size_t i, double* out) {
      const auto r = homogenization_residual(n, t, all, derive_seed(ctx.seed, i), opt);
      for (std::size_t j = 0; j < m; ++j) {
        out[j] = std::abs(r.residual[j]);
        out[m + j] = std::abs(r.undamped[j]);
      }
    });
    std::vector<double> bulk, undamped;
    for (std::size_t j = 0; j < ks.size(); ++j) {
      bulk.insert(bulk.end(), table[j].begin(), table[j].end());
      undamped.insert(undamped.end(), table[m + j].begin(), table[m + j].end());
    }
    const double scale = 1 / (double(n) * n * t);
    const double med = median(bulk);
    ctx.add(make_metric("median_abs_residual", med, factor * scale, 0, 0, "at_most", "dbm"));
    ctx.add(make_metric("median_abs_residual_in_units_1/(n^2 t)", med / scale, NAN, 0, 0, "info", "dbm"));
    ctx.add(make_metric("undamped_median_abs_residual_in_units_1/(n^2 t)", median(undamped) / scale, NAN, 0, 0,
                        "info", "dbm"));
    ctx.add(make_metric("edge_median_abs_residual(k=" + std::to_string(k_edge) + ")", median(table[m - 1]), NAN, 0,
                        0, "info", "dbm"));
  });

  ctx.guarded("identical_coupling_residual", "dbm", [&] {
    HomogenizationOptions same;
    same.wigner = EnsembleSpec::goe(n);
    same.shared_initial = true;
    const auto r = homogenization_residual(n, t, ks, derive_seed(ctx.seed, runs + 1), same);
    double worst = 0;
    for (double v : r.residual) worst = std::max(worst, std::abs(v));
    ctx.add(make_metric("identical_coupling_residual", worst, 0, 0, 0, "at_most", "dbm"));
  });
}

// ---------------------------------------------------------------- kernel-validate

void run_kernel_validate(Ctx& ctx) {
  const auto& c = ctx.cfg;
  const int n = int(c.get_int("n", 100));
  ctx.guarded("gue_covariance_bound", "gausskernels", [&] {
    const auto Es = c.get_doubles("energies", {-1, -0.5, 0, 0.5, 1});
    const auto etas = c.get_doubles("etas", {1e-3, 1e-2, 1e-1});
    const double C = c.get_double("bound_C", 20);
    double worst = 0;
    for (double eta : etas)
      for (std::size_t a = 0; a < Es.size(); ++a)
        for (std::size_t b = a; b < Es.size(); ++b) {
          const auto f = poisson_test_function(Es[a], eta), g = poisson_test_function(Es[b], eta);
          const auto cov = kernel_covariance(n, Symmetry::kGUE, f, g);
          const double d = Es[a] - Es[b];
          worst = std::max(worst, std::abs(cov.value) * (d * d + eta * eta));
        }
    ctx.add(make_metric("gue_cov_times_(dE^2+eta^2)_max", worst, C, 0, 0, "at_most", "gausskernels"));
  });

  ctx.guarded("density_corrections", "gausskernels", [&] {
    const int m = int(c.get_int("n_density", 60));
    const double E = c.get_double("density_energy", 0.5);
    const double rho = rho_sc(E);
    const auto gue = density_of_states(m, Symmetry::kGUE, E);
    const double unit = 1 / (4 * kPi * kPi * kPi * rho * rho);
    ctx.add(make_metric("gue_density_correction_N(rho-rho_sc)", m * (gue.rho - rho), m * gue.correction_predicted, 0,
                        0.3 * unit, "within", "gausskernels"));
    const auto goe = density_of_states(m, Symmetry::kGOE, E);
    const double pg = m * goe.correction_predicted;
    ctx.add(make_metric("goe_density_correction_N(rho-rho_sc)", m * (goe.rho - rho), pg, 0, 0.3 * std::abs(pg),
                        "within", "gausskernels"));
  });

  const std::size_t trials = std::size_t(c.get_int("trials", 20000));
  const auto sizes = c.get_doubles("sizes", {100, 101});
  const double E1 = c.get_double("mc_E1", 0), E2 = c.get_double("mc_E2", 0.3), eta = c.get_double("mc_eta", 0.1);
  const NamedFunction nf = make_test_function("cutoff-poisson", {E1, eta, 1.5, 1.9});
  const NamedFunction ng = make_test_function("cutoff-poisson", {E2, eta, 1.5, 1.9});
  for (std::size_t q = 0; q < sizes.size(); ++q) {
    const int m = int(sizes[q]);
    const std::string tag = "(n=" + std::to_string(m) + ")";
    ctx.guarded("goe_kernel_vs_mc" + tag, "gausskernels", [&] {
      const auto table = run_trials(trials, 2, ctx.threads, [&](std::size_t i, double* out) {
        const auto s = sample_spectrum(EnsembleSpec::goe(m), derive_seed(derive_seed(ctx.seed, 10 + q), i));
        out[0] = linear_statistic(s, nf.f);
        out[1] = linear_statistic(s, ng.f);
      });
      auto cov_stat = [&](int a, int b) {
        const auto& x = table[a];
        const auto& y = table[b];
        return batch_means(
            trials,
            [&](std::size_t lo, std::size_t hi) {
              double mx = 0, my = 0;
              for (std::size_t i = lo; i < hi; ++i) mx += x[i], my += y[i];
              mx /= double(hi - lo);
              my /= double(hi - lo);
              double s = 0;
              for (std::size_t i = lo; i < hi; ++i) s += (x[i] - mx) * (y[i] - my);
              return s / double(hi - lo - 1);
            },
            ctx.batches);
      };
      TestFunction tf{nf.f, nf.lo, nf.hi, nf.features}, tg{ng.f, ng.lo, ng.hi, ng.features};
      for (auto [a, b, label] : {std::tuple{0, 1, "cov"}, std::tuple{0, 0, "var"}}) {
        const auto est = cov_stat(a, b);
        const auto kc = kernel_covariance(m, Symmetry::kGOE, tf, a == b ? tf : tg);
        ctx.add(make_metric(std::string("goe_kernel_") + label + "_vs_mc" + tag, est.value, kc.value, est.se,
                            3 * est.se + kc.error_estimate, "within", "gausskernels"));
      }
    });
  }

  ctx.guarded("hermite_integrals", "gausskernels", [&] {
    const int m_max = int(c.get_int("hermite_m_max", 50));
    double worst_even = 0, worst_odd = 0;
    for (int m = 0; m <= m_max; ++m) {
      const auto h = hermite_integrals(m);
      worst_even = std::max(worst_even, std::abs(h.even_full_line - h.even_closed_form) / h.even_closed_form);
      worst_odd = std::max(worst_odd, std::abs(h.odd_half_line_scaled - h.odd_half_line_recurrence) /
                                          std::abs(h.odd_half_line_scaled));
    }
    ctx.add(make_metric("hermite_even_quadrature_vs_closed_rel", worst_even, 1e-8, 0, 0, "at_most", "gausskernels"));
    ctx.add(make_metric("hermite_odd_quadrature_vs_recurrence_rel", worst_odd, 1e-8, 0, 0, "at_most",
                        "gausskernels"));
    const int ma = int(c.get_int("hermite_m_asym", 100));
    const auto h = hermite_integrals(ma);
    ctx.add(make_metric("hermite_even_over_asymptote", h.even_full_line / h.even_asymptote, 1, 0, 2.0 / ma, "within",
                        "gausskernels"));
    ctx.add(make_metric("hermite_odd_over_asymptote", h.odd_half_line_scaled / h.odd_asymptote, 1, 0,
                        2 / std::sqrt(double(ma)), "within", "gausskernels"));
  });

  ctx.guarded("goe_component_sizes", "gausskernels", [&] {
    std::vector<double> grid;
    for (int j = 0; j <= 12; ++j) grid.push_back(-1.8 + 3.6 * j / 12);
    for (int m : {n, n + 1}) {
      double e1 = 0, jj = 0;
      for (double x : grid)
        for (double y : grid) {
          const auto g = goe_cluster(m, x, y);
          e1 = std::max(e1, std::abs(g.components.E1_xy));
          jj = std::max(jj, std::abs(g.components.J_xy));
        }
      const std::string tag = "(n=" + std::to_string(m) + ")";
      ctx.add(make_metric("goe_E1_max" + tag, e1, NAN, 0, 0, "info", "gausskernels"));
      ctx.add(make_metric("goe_J_max_over_log_n" + tag, jj / std::log(double(m)), NAN, 0, 0, "info", "gausskernels"));
    }
  });

  const std::string heat = c.get_string("heatmap_out", "");
  if (!heat.empty()) {
    ctx.guarded("heatmap", "gausskernels", [&] {
      std::vector<double> xs;
      for (int j = 0; j <= 100; ++j) xs.push_back(-1.9 + 3.8 * j / 100);
      Eigen::MatrixXd v(xs.size(), xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j) v(i, j) = gue_cluster(n, xs[i], xs[j]);
      write_heatmap_csv(heat, xs, xs, v);
    });
  }
}

}  // namespace

std::vector<std::string> experiment_kinds() {
  std::vector<std::string> k;
  for (const auto& [name, keys] : kKindKeys) k.push_back(name);
  return k;
}

Report run_experiment(const Config& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string kind = cfg.require_string("kind");
  const auto it = kKindKeys.find(kind);
  if (it == kKindKeys.end()) throw InvalidInput("unknown experiment kind '" + kind + "'");
  for (const auto& key : cfg.keys()) {
    const bool ok = kCommon.count(key) || it->second.count(key) || (uses_ensemble(kind) && kEnsemble.count(key)) ||
                    (uses_function(kind) && kFunction.count(key));
    if (!ok) throw InvalidInput("config key '" + key + "' is not used by kind '" + kind + "'");
  }
  if (cfg.has("trials")) require(cfg.get_int("trials", 1) >= 1, "trials must be >= 1");
  if (cfg.has("n")) require(cfg.get_int("n", 1) >= 1, "n must be >= 1");
  if (cfg.has("function_file")) {
    std::ifstream probe(cfg.get_string("function_file", ""));
    if (!probe) throw InvalidInput("function_file does not exist: " + cfg.get_string("function_file", ""));
  }

  Report report;
  report.kind = kind;
  report.config = cfg.json();
  report.version = version();
  Ctx ctx{cfg, std::uint64_t(cfg.get_int("seed", 1)), unsigned(cfg.get_int("threads", 0)),
          int(cfg.get_int("batches", 20)), report};
  if (kind == "clt") run_clt(ctx);
  else if (kind == "band-variance") run_band_variance(ctx);
  else if (kind == "covariance-grid") run_covariance_grid(ctx);
  else if (kind == "counting-variance") run_counting_variance(ctx);
  else if (kind == "wegner") run_wegner(ctx);
  else if (kind == "dbm-moments") run_dbm_moments(ctx);
  else if (kind == "homogenization") run_homogenization(ctx);
  else run_kernel_validate(ctx);
  report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace wlss
