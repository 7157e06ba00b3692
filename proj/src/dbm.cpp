#include "wlss/dbm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "wlss/quadrature.hpp"
#include "wlss/semicircle.hpp"

namespace wlss {

Complex characteristic(Complex z, double t) {
  require(z.imag() >= 0, "characteristic: im(z) must be >= 0");
  if (z.imag() == 0) z = Complex(z.real(), +0.0);
  return std::cosh(t / 2) * z + std::sinh(t / 2) * sqrt_z2m4(z);
}

Complex forward_characteristic(Complex z, double T, double s) { return characteristic(z, T - s); }

namespace {

void drift(const std::vector<double>& x, std::vector<double>& out) {
  const std::size_t n = x.size();
  out.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0;
    for (std::size_t j = 0; j < i; ++j) {
      const double r = 1 / (x[i] - x[j]);
      acc += r;
      out[j] -= r;
    }
    out[i] += acc;
  }
  const double inv = 1.0 / double(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = out[i] * inv - 0.5 * x[i];
}

double min_gap(const std::vector<double>& x) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < x.size(); ++i) g = std::min(g, x[i] - x[i - 1]);
  return g;
}

bool ordered(const std::vector<double>& x) {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) return false;
  return true;
}

struct System {
  std::vector<double> x, f, trial;
};

}  // namespace

// Drift-implicit Euler step: y = c + d·drift(y) with c = x + σΔB. y minimizes
// ½|y − c|² + d·U(y), U = −(1/N)Σ log(y_j − y_i) + Σ y_i²/4, which is strictly
// convex on the ordered chamber, so the step exists and keeps the order.
bool dbm_implicit_step(const std::vector<double>& x, const std::vector<double>& c, double d, std::vector<double>& y) {
  const std::size_t n = x.size();
  const double inv = 1.0 / double(n);
  auto phi = [&](const std::vector<double>& v) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      s += 0.5 * (v[i] - c[i]) * (v[i] - c[i]) + d * v[i] * v[i] / 4;
      for (std::size_t j = i + 1; j < n; ++j) s -= d * inv * std::log(v[j] - v[i]);
    }
    return s;
  };
  y = x;
  std::vector<double> f, z(n);
  Eigen::MatrixXd h(n, n);
  Eigen::VectorXd g(n);
  double value = phi(y);
  for (int it = 0; it < 200; ++it) {
    drift(y, f);
    h.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = y[i] - c[i] - d * f[i];
      h(i, i) += 1 + d / 2;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double r = d * inv / ((y[j] - y[i]) * (y[j] - y[i]));
        h(i, i) += r;
        h(j, j) += r;
        h(i, j) -= r;
        h(j, i) -= r;
      }
    }
    const Eigen::VectorXd step = h.llt().solve(-g);
    double size = 0, scale = 1;
    for (std::size_t i = 0; i < n; ++i) {
      size = std::max(size, std::abs(step[i]));
      scale = std::max(scale, std::abs(y[i]));
    }
    if (size <= 1e-15 * scale) return true;
    double a = 1;
    bool moved = false;
    for (int k = 0; k < 80; ++k, a *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) z[i] = y[i] + a * step[i];
      if (!ordered(z)) continue;
      const double v = phi(z);
      if (v <= value + 1e-13 * std::max(1.0, std::abs(value))) {
        y.swap(z);
        value = v;
        moved = true;
        break;
      }
    }
    if (!moved) return ordered(y) && a * size <= 1e-12 * scale;
  }
  return false;
}


DbmTrajectory simulate_dbm(const DbmState& initial, double T, double dt, std::uint64_t seed,
                           const DbmState* coupled) {
  require(T > 0 && dt > 0, "simulate_dbm: T and dt must be positive");
  require(initial.beta == 1 || initial.beta == 2, "simulate_dbm: beta must be 1 or 2");
  require(!initial.x.empty() && ordered(initial.x), "simulate_dbm: initial state must be strictly ordered");
  if (coupled) {
    require(coupled->x.size() == initial.x.size() && coupled->beta == initial.beta,
            "simulate_dbm: coupled system must match size and beta");
    require(ordered(coupled->x), "simulate_dbm: coupled state must be strictly ordered");
  }
  const std::size_t n = initial.x.size();
  const double sigma = std::sqrt(2.0 / (double(n) * initial.beta));
  std::vector<System> sys(coupled ? 2 : 1);
  sys[0].x = initial.x;
  if (coupled) sys[1].x = coupled->x;

  DbmTrajectory tr;
  auto record = [&](double t) {
    tr.times.push_back(t);
    tr.states.push_back(sys[0].x);
    if (coupled) tr.coupled_states.push_back(sys[1].x);
  };
  record(initial.t);

  Rng rng = make_stream(seed, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  // Explicit pieces that still break the order at this depth are advanced
  // with the implicit step instead of being split further.
  const int implicit_depth = 16;
  struct Piece {
    double d;
    std::vector<double> b;
    int depth;
  };
  std::vector<Piece> stack;
  std::vector<double> db(n);

  // Refreshes the drifts and returns the largest admissible substep ≤ limit.
  auto step_cap = [&](double limit) {
    double cap = limit;
    for (auto& y : sys) {
      drift(y.x, y.f);
      if (n > 1) {
        const double g = min_gap(y.x);
        double fmax = 0;
        for (double v : y.f) fmax = std::max(fmax, std::abs(v));
        cap = std::min(cap, double(n) * g * g / 8);
        if (fmax > 0) cap = std::min(cap, 0.5 * g / fmax);
      }
    }
    return cap;
  };
  auto split = [&](Piece& p) {
    // Brownian bridge midpoint; both halves keep the exact path law.
    Piece a{0.5 * p.d, std::vector<double>(n), p.depth + 1}, b{0.5 * p.d, std::vector<double>(n), p.depth + 1};
    for (std::size_t i = 0; i < n; ++i) {
      a.b[i] = 0.5 * p.b[i] + 0.5 * std::sqrt(p.d) * gauss(rng);
      b.b[i] = p.b[i] - a.b[i];
    }
    ++tr.splits;
    stack.push_back(std::move(b));
    stack.push_back(std::move(a));
  };

  const long steps = std::max(1L, long(std::llround(T / dt)));
  double t = initial.t;
  for (long s = 1; s <= steps; ++s) {
    const double t_end = initial.t + T * double(s) / double(steps);
    // Accepted substeps can fall below ulp(t) near a collision, so the
    // elapsed time is a compensated sum.
    const double span = t_end - t;
    double sum = 0, comp = 0;
    while (span - (sum - comp) > 0) {
      const double d0 = step_cap(span - (sum - comp));
      for (auto& v : db) v = std::sqrt(d0) * gauss(rng);
      stack.clear();
      stack.push_back({d0, db, 0});
      bool fresh = true;
      while (!stack.empty()) {
        Piece p = std::move(stack.back());
        stack.pop_back();
        if (!fresh) step_cap(p.d);
        fresh = false;
        bool ok = true;
        for (auto& y : sys) {
          y.trial.resize(n);
          for (std::size_t i = 0; i < n; ++i) y.trial[i] = y.x[i] + y.f[i] * p.d + sigma * p.b[i];
          ok = ok && ordered(y.trial);
        }
        if (ok) {
          for (auto& y : sys) std::swap(y.x, y.trial);
          const double yk = p.d - comp, tk = sum + yk;
          comp = (tk - sum) - yk;
          sum = tk;
          ++tr.substeps;
          continue;
        }
        if (p.depth >= implicit_depth) {
          for (auto& y : sys) {
            std::vector<double> c(n);
            for (std::size_t i = 0; i < n; ++i) c[i] = y.x[i] + sigma * p.b[i];
            if (!dbm_implicit_step(y.x, c, p.d, y.trial)) {
              std::ostringstream msg;
              msg << "simulate_dbm: implicit step did not converge at t=" << t + sum << " (substep " << p.d
                  << ", min gap " << min_gap(y.x) << ")";
              throw NumericalError(msg.str());
            }
          }
          for (auto& y : sys) std::swap(y.x, y.trial);
          const double yk = p.d - comp, tk = sum + yk;
          comp = (tk - sum) - yk;
          sum = tk;
          ++tr.substeps;
          ++tr.implicit_steps;
          continue;
        }
        split(p);
      }
    }
    t = t_end;
    record(t);
  }
  return tr;
}

void write_trajectory_csv(const std::string& path, const DbmTrajectory& traj, bool coupled) {
  const auto& st = coupled ? traj.coupled_states : traj.states;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out.precision(17);
  out << "time";
  if (!st.empty())
    for (std::size_t i = 0; i < st[0].size(); ++i) out << ",x" << i + 1;
  out << '\n';
  for (std::size_t r = 0; r < st.size(); ++r) {
    out << traj.times[r];
    for (double v : st[r]) out << ',' << v;
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

double meso_reference(Complex w) {
  require(w.imag() > 0, "meso_reference: im(w) must be positive");
  auto f = [&](double x) { return std::atan2(-w.imag(), x - w.real()); };
  int M = std::max(256, int(std::ceil(64 / w.imag())));
  double prev = semicircle_average(f, M);
  for (int it = 0; it < 12; ++it) {
    M *= 2;
    const double cur = semicircle_average(f, M);
    if (std::abs(cur - prev) < 1e-13) return cur;
    prev = cur;
  }
  return prev;
}

double meso_statistic(const std::vector<double>& points, Complex z, double t) {
  const Complex zt = characteristic(z, t);
  require(zt.imag() > 0, "meso_statistic: im(z_t) must be positive");
  double s = 0;
  for (double x : points) s += std::atan2(-zt.imag(), x - zt.real());
  s -= double(points.size()) * meso_reference(zt);
  return s / m_sc(zt).imag();
}

CharMoments char_gaussian_moments(Complex z, std::optional<Complex> w, double T, int n) {
  require(T >= 0, "char_gaussian_moments: T must be >= 0");
  require(n >= 1, "char_gaussian_moments: n must be >= 1");
  auto check = [](Complex u) {
    require(u.imag() > 0, "char_gaussian_moments: base point needs im > 0");
    require(std::abs(u.real()) < 2 && 2 - std::abs(u.real()) >= 0.05,
            "char_gaussian_moments: base point too close to the spectral edge");
  };
  check(z);
  if (w) check(*w);
  CharMoments r;
  if (T == 0) return r;

  auto closed_var = [&](Complex u) {
    const Complex a = forward_characteristic(u, T, 0), b = u;
    const Complex ma = m_sc(a), mb = m_sc(b);
    return std::log(a.imag() / b.imag()) - T / 2 + (std::log(1.0 - mb * mb) - std::log(1.0 - ma * ma)).real();
  };
  r.var_z = closed_var(z);
  const Complex ww = w ? *w : z;
  r.var_w = closed_var(ww);

  // Continuum counterpart of the covariance sum: the x-integral against ρ_sc
  // reduces to ½Re[ratio(z̃, w̃*) − ratio(z̃, w̃)].
  auto cov_density = [&](double s) {
    const Complex a = forward_characteristic(z, T, s), b = forward_characteristic(ww, T, s);
    return 0.5 * (stieltjes_ratio(a, std::conj(b)) - stieltjes_ratio(a, b)).real();
  };
  r.cov = integrate_adaptive(cov_density, 0, T, 1e-12).value;

  const auto gamma = quantiles(n).gamma;
  auto var_density = [&](double s) {
    const Complex a = forward_characteristic(z, T, s);
    const double y2 = a.imag() * a.imag();
    double acc = 0;
    for (double g : gamma) {
      const double d = std::norm(g - a);
      acc += y2 / (d * d);
    }
    return 2 * acc / n;
  };
  auto cov_sum_density = [&](double s) {
    const Complex a = forward_characteristic(z, T, s), b = forward_characteristic(ww, T, s);
    double acc = 0;
    for (double g : gamma) acc += a.imag() * b.imag() / (std::norm(g - a) * std::norm(g - b));
    return acc / n;
  };
  r.var_z_sumform = integrate_adaptive(var_density, 0, T, 1e-11).value;
  r.cov_sumform = integrate_adaptive(cov_sum_density, 0, T, 1e-11).value;
  return r;
}

HomogenizationResidual homogenization_residual(int n, double t, const std::vector<int>& k_indices,
                                               std::uint64_t seed, const HomogenizationOptions& opt) {
  require(n >= 2, "homogenization_residual: n must be >= 2");
  require(t >= 0.05 && t <= 1, "homogenization_residual: t must lie in [0.05, 1]");
  for (int k : k_indices) require(k >= 1 && k <= n, "homogenization_residual: index out of range");
  EnsembleSpec ws = opt.wigner;
  ws.n = n;
  ws.beta = 1;
  const EnsembleSpec gs = EnsembleSpec::goe(n);
  const auto w0 = sample_spectrum(ws, derive_seed(seed, 0)).eigenvalues;
  const auto g0 = sample_spectrum(gs, derive_seed(seed, opt.shared_initial ? 0 : 1)).eigenvalues;
  const DbmState a{0, w0, 1}, b{0, g0, 1};
  const auto tr = simulate_dbm(a, t, t, derive_seed(seed, 2), &b);
  const auto& lam = tr.states.back();
  const auto& mu = tr.coupled_states.back();
  const auto gamma = quantiles(n).gamma;
  const double damp = std::exp(-t / 2);
  HomogenizationResidual res;
  for (int k : k_indices) {
    const Complex e(gamma[k - 1], 0.0);
    const double pred = (meso_statistic(w0, e, t) - meso_statistic(g0, e, t)) / n;
    const double gap = lam[k - 1] - mu[k - 1];
    res.residual.push_back(gap - damp * pred);
    res.undamped.push_back(gap - pred);
  }
  return res;
}

}  // namespace wlss
