#include "wlss/kernels.hpp"

#include <cmath>
#include <fstream>

#include "wlss/quadrature.hpp"
#include "wlss/semicircle.hpp"

namespace wlss {

ClusterKernel::ClusterKernel(int n, Symmetry symmetry)
    : n_(n), sym_(symmetry), c_(std::sqrt(n / 2.0)), he_(n + 1) {
  require(n >= 2, "ClusterKernel: n must be >= 2");
  totals_.resize(n + 1);
  for (int k = 0; k <= n; ++k) totals_[k] = HermiteEvaluator::total_integral(k) / std::sqrt(c_);
  int_last_ = totals_[n - 1];
}

Eigen::MatrixXd ClusterKernel::basis(const std::vector<double>& x) const {
  Eigen::MatrixXd b(x.size(), n_ + 1);
  std::vector<double> v(n_ + 1);
  const double s = std::sqrt(c_);
  for (size_t i = 0; i < x.size(); ++i) {
    he_.values(c_ * x[i], n_, v.data());
    for (int k = 0; k <= n_; ++k) b(i, k) = s * v[k];
  }
  return b;
}

Eigen::MatrixXd ClusterKernel::basis_derivative(const std::vector<double>& x) const {
  Eigen::MatrixXd b(x.size(), n_ + 1);
  std::vector<double> v(n_ + 2);
  const double s = std::pow(c_, 1.5);
  for (size_t i = 0; i < x.size(); ++i) {
    he_.values(c_ * x[i], n_ + 1, v.data());
    for (int k = 0; k <= n_; ++k)
      b(i, k) = s * ((k > 0 ? std::sqrt(k / 2.0) * v[k - 1] : 0.0) - std::sqrt((k + 1) / 2.0) * v[k + 1]);
  }
  return b;
}

Eigen::MatrixXd ClusterKernel::basis_antiderivative(const std::vector<double>& x) const {
  Eigen::MatrixXd b(x.size(), n_ + 1);
  std::vector<double> v(n_ + 1), a(n_ + 1);
  const double s = 1 / std::sqrt(c_);
  for (size_t i = 0; i < x.size(); ++i) {
    he_.values(c_ * x[i], n_, v.data());
    HermiteEvaluator::antiderivatives(c_ * x[i], n_, v.data(), a.data());
    for (int k = 0; k <= n_; ++k) b(i, k) = s * a[k];
  }
  return b;
}

Eigen::MatrixXd ClusterKernel::basis_sg(const std::vector<double>& x) const {
  Eigen::MatrixXd b = basis_antiderivative(x);
  for (int k = 0; k <= n_; ++k) b.col(k).array() -= 0.5 * totals_[k];
  return b;
}

double ClusterKernel::scaled(int k, double x, int deriv) const {
  require(k >= 0 && k <= n_, "ClusterKernel::scaled: index out of range");
  return deriv == 0 ? basis({x})(0, k) : basis_derivative({x})(0, k);
}

double cd_kernel(int n, double x, double y) {
  const ClusterKernel k(n, Symmetry::kGUE);
  if (std::abs(x - y) < 1e-6) {
    const double m = 0.5 * (x + y);
    const auto f = k.basis({m});
    const auto d = k.basis_derivative({m});
    return d(0, n) * f(0, n - 1) - f(0, n) * d(0, n - 1);
  }
  const auto f = k.basis({x, y});
  return (f(0, n) * f(1, n - 1) - f(1, n) * f(0, n - 1)) / (x - y);
}

double gue_cluster(int n, double x, double y) {
  const double v = cd_kernel(n, x, y);
  return v * v;
}

GoeGrid goe_cluster_grid(const ClusterKernel& k, const std::vector<double>& x, const std::vector<double>& y) {
  const int n = k.n();
  const bool odd = n % 2 == 1;
  const double half_n = 0.5 * n;
  const Eigen::MatrixXd fx = k.basis(x), fy = k.basis(y);
  const Eigen::MatrixXd dx = k.basis_derivative(x), dy = k.basis_derivative(y);
  const Eigen::MatrixXd gx = k.basis_sg(x), gy = k.basis_sg(y);
  const auto Fx = fx.leftCols(n), Fy = fy.leftCols(n);
  const Eigen::VectorXd fx1 = fx.col(n - 1), fy1 = fy.col(n - 1), fxn = fx.col(n), fyn = fy.col(n);
  const Eigen::VectorXd gx1 = gx.col(n - 1), gy1 = gy.col(n - 1), gxn = gx.col(n), gyn = gy.col(n);
  const double inv = odd ? 1 / k.odd_normalization() : 0.0;
  const Eigen::RowVectorXd ones_y = Eigen::RowVectorXd::Ones(Eigen::Index(y.size()));
  const Eigen::VectorXd ones_x = Eigen::VectorXd::Ones(Eigen::Index(x.size()));

  GoeGrid r;
  const Eigen::MatrixXd K = Fx * Fy.transpose();
  r.S_xy = K + half_n * fx1 * gyn.transpose() + inv * fx1 * ones_y;
  r.S_yx = K + half_n * gx.col(n) * fy1.transpose() + inv * ones_x * fy1.transpose();
  // D(x,y) = −∂_y S(x,y).
  r.D_xy = -(Fx * dy.leftCols(n).transpose()) - half_n * fx1 * fyn.transpose();
  r.D_yx = -(dx.leftCols(n) * Fy.transpose()) - half_n * fxn * fy1.transpose();
  // J(x,y) = εS(·,y)(x) − sg(x−y) [− sgφ_{N−1}(y)/∫φ_{N−1} for odd N].
  r.J_xy = gx.leftCols(n) * Fy.transpose() + half_n * gx1 * gyn.transpose() + inv * gx1 * ones_y -
           inv * ones_x * gy1.transpose();
  r.J_yx = Fx * gy.leftCols(n).transpose() + half_n * gxn * gy1.transpose() + inv * ones_x * gy1.transpose() -
           inv * gx1 * ones_y;
  for (Eigen::Index i = 0; i < r.J_xy.rows(); ++i)
    for (Eigen::Index j = 0; j < r.J_xy.cols(); ++j) {
      const double d = x[i] - y[j];
      const double s = d > 0 ? 0.5 : (d < 0 ? -0.5 : 0.0);
      r.J_xy(i, j) -= s;
      r.J_yx(i, j) += s;
    }
  r.R = 2 * r.S_xy.cwiseProduct(r.S_yx) + r.J_xy.cwiseProduct(r.D_yx) + r.J_yx.cwiseProduct(r.D_xy);
  return r;
}

GoeCluster goe_cluster(int n, double x, double y) {
  require(n >= 3, "goe_cluster: n must be >= 3");
  require(std::abs(x) < 2 - kBulkDelta && std::abs(y) < 2 - kBulkDelta,
          "goe_cluster: evaluation outside the bulk window");
  const ClusterKernel k(n, Symmetry::kGOE);
  const auto g = goe_cluster_grid(k, {x}, {y});
  GoeCluster out;
  out.R = g.R(0, 0);
  auto& c = out.components;
  c.S_xy = g.S_xy(0, 0);
  c.S_yx = g.S_yx(0, 0);
  c.D_xy = g.D_xy(0, 0);
  c.D_yx = g.D_yx(0, 0);
  c.J_xy = g.J_xy(0, 0);
  c.J_yx = g.J_yx(0, 0);
  const auto f = k.basis({x, y});
  const auto sg = k.basis_sg({x, y});
  const auto a = k.basis_antiderivative({x, y});
  c.E1_xy = 0.5 * n * f(0, n - 1) * sg(1, n) + (n % 2 ? f(0, n - 1) / k.odd_normalization() : 0.0);
  double I = 0;
  for (int q = 0; q < n; ++q) I += f(1, q) * (a(0, q) - a(1, q));
  I += 0.5 * n * sg(1, n) * (a(0, n - 1) - a(1, n - 1));
  if (n % 2) I += (a(0, n - 1) - a(1, n - 1)) / k.odd_normalization();
  c.I_xy = I;
  return out;
}

double one_point_density(const ClusterKernel& k, double x) {
  const int n = k.n();
  const auto f = k.basis({x});
  double s = 0;
  for (int q = 0; q < n; ++q) s += f(0, q) * f(0, q);
  if (k.symmetry() == Symmetry::kGOE) {
    s += 0.5 * n * f(0, n - 1) * k.basis_sg({x})(0, n);
    if (n % 2) s += f(0, n - 1) / k.odd_normalization();
  }
  return s;
}

TestFunction poisson_test_function(double E, double eta, double lo, double hi) {
  TestFunction t;
  t.f = [E, eta](double x) { return eta / ((x - E) * (x - E) + eta * eta); };
  t.lo = lo;
  t.hi = hi;
  t.features = {{E, eta}};
  return t;
}

namespace {

// Rows i: ∫_{a}^{x_i} u(s) ds on a composite rule of 20-point Gauss panels,
// exact for piecewise polynomials of degree < 20.
// `total` receives the integrals over the whole rule.
Eigen::MatrixXd cumulative_integrals(const QuadratureRule& rule, const Eigen::MatrixXd& u, Eigen::RowVectorXd* total) {
  constexpr int q = 20;
  require(rule.size() % q == 0, "cumulative_integrals: rule is not made of 20-point panels");
  Eigen::MatrixXd out(u.rows(), u.cols());
  Eigen::RowVectorXd running = Eigen::RowVectorXd::Zero(u.cols());
  for (size_t p0 = 0; p0 < rule.size(); p0 += q) {
    double lo = rule.x[p0], hi = rule.x[p0], wsum = 0;
    for (int j = 0; j < q; ++j) {
      lo = std::min(lo, rule.x[p0 + j]);
      hi = std::max(hi, rule.x[p0 + j]);
      wsum += rule.w[p0 + j];
    }
    // Panel [c − h, c + h]; the weights sum to 2h.
    const double h = wsum / 2, c = 0.5 * (lo + hi);
    Eigen::MatrixXd Q(q, q);
    for (int i = 0; i < q; ++i) {
      const double ti = (rule.x[p0 + i] - c) / h;
      for (int j = 0; j < q; ++j) {
        const double tj = (rule.x[p0 + j] - c) / h, wj = rule.w[p0 + j] / h;
        double acc = 0;
        for (int m = 0; m < q; ++m) {
          const double ip = m == 0 ? ti + 1 : (std::legendre(m + 1, ti) - std::legendre(m - 1, ti)) / (2 * m + 1);
          acc += wj * std::legendre(m, tj) * (2 * m + 1) / 2 * ip;
        }
        Q(i, j) = h * acc;
      }
    }
    const auto block = u.middleRows(Eigen::Index(p0), q);
    out.middleRows(Eigen::Index(p0), q) = (Q * block).rowwise() + running;
    Eigen::VectorXd w(q);
    for (int j = 0; j < q; ++j) w[j] = rule.w[p0 + j];
    running += w.transpose() * block;
  }
  *total = running;
  return out;
}

QuadratureRule rule_for(const TestFunction& f, const TestFunction& g, double base_width) {
  auto feats = f.features;
  feats.insert(feats.end(), g.features.begin(), g.features.end());
  return feature_rule(std::min(f.lo, g.lo), std::max(f.hi, g.hi), base_width, feats);
}

double covariance_on_rule(const ClusterKernel& k, const TestFunction& f, const TestFunction& g,
                          const QuadratureRule& rule) {
  std::vector<double> xs;
  std::vector<double> wf, wg;
  for (size_t i = 0; i < rule.size(); ++i) {
    const double x = rule.x[i];
    const double a = (x >= f.lo && x <= f.hi) ? f.f(x) : 0.0;
    const double b = (x >= g.lo && x <= g.hi) ? g.f(x) : 0.0;
    xs.push_back(x);
    wf.push_back(rule.w[i] * a);
    wg.push_back(rule.w[i] * b);
  }
  const Eigen::Map<const Eigen::VectorXd> WF(wf.data(), Eigen::Index(wf.size()));
  const Eigen::Map<const Eigen::VectorXd> WG(wg.data(), Eigen::Index(wg.size()));
  double diag = 0;
  const int n = k.n();
  if (k.symmetry() == Symmetry::kGUE) {
    // ∫fg K(x,x) − tr(F G) with F_jk = ∫fφ_jφ_k.
    const Eigen::MatrixXd B = k.basis(xs).leftCols(n);
    const Eigen::MatrixXd F = B.transpose() * WF.asDiagonal() * B;
    const Eigen::MatrixXd G = B.transpose() * WG.asDiagonal() * B;
    for (size_t i = 0; i < xs.size(); ++i) {
      const double v = rule.x[i];
      const double a = (v >= f.lo && v <= f.hi) ? f.f(v) : 0.0;
      diag += wg[i] * a * B.row(Eigen::Index(i)).squaredNorm();
    }
    return diag - (F.cwiseProduct(G.transpose())).sum();
  }
  // GOE: ∫fg S(x,x) − ½∫∫f(x)g(y)R(x,y), both supported in the bulk.
  std::vector<double> xb, yb, wfb, wgb;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (wf[i] != 0) xb.push_back(xs[i]), wfb.push_back(wf[i]);
    if (wg[i] != 0) yb.push_back(xs[i]), wgb.push_back(wg[i]);
  }
  if (xb.empty() || yb.empty()) return 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (wf[i] == 0 || wg[i] == 0) continue;
    const double a = f.f(xs[i]);
    diag += wg[i] * a * one_point_density(k, xs[i]);
  }
  // R = R̃ + ½sgn(x−y)(D(x,y) − D(y,x)). The second part has a kink on the
  // diagonal; with D(x,y) = −Σ_p a_p(x)b_p(y) it is integrated exactly through
  // cumulative integrals in y, and only the smooth R̃ uses the tensor rule.
  const auto grid = goe_cluster_grid(k, xb, yb);
  Eigen::MatrixXd Rs = grid.R;
  for (Eigen::Index i = 0; i < Rs.rows(); ++i)
    for (Eigen::Index j = 0; j < Rs.cols(); ++j) {
      const double d = xb[size_t(i)] - yb[size_t(j)];
      const double s = d > 0 ? 0.5 : (d < 0 ? -0.5 : 0.0);
      Rs(i, j) -= s * (grid.D_xy(i, j) - grid.D_yx(i, j));
    }
  const Eigen::Map<const Eigen::VectorXd> A(wfb.data(), Eigen::Index(wfb.size()));
  const Eigen::Map<const Eigen::VectorXd> Bv(wgb.data(), Eigen::Index(wgb.size()));
  const double smooth = A.dot(Rs * Bv);

  const Eigen::MatrixXd fb = k.basis(xs), db = k.basis_derivative(xs);
  Eigen::MatrixXd a(xs.size(), n + 1), b(xs.size(), n + 1);
  a.leftCols(n) = fb.leftCols(n);
  b.leftCols(n) = db.leftCols(n);
  a.col(n) = 0.5 * n * fb.col(n - 1);
  b.col(n) = fb.col(n);
  Eigen::VectorXd gv(xs.size()), fw(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    gv[Eigen::Index(i)] = (xs[i] >= g.lo && xs[i] <= g.hi) ? g.f(xs[i]) : 0.0;
    fw[Eigen::Index(i)] = wf[i];
  }
  Eigen::RowVectorXd ta, tb;
  const Eigen::MatrixXd Ca = cumulative_integrals(rule, gv.asDiagonal() * a, &ta);
  const Eigen::MatrixXd Cb = cumulative_integrals(rule, gv.asDiagonal() * b, &tb);
  // ∫g(y)u(y)sgn(x − y)dy = 2G_u(x) − G_u(∞), G_u(x) = ∫_{−∞}^x gu.
  const Eigen::MatrixXd Sa = (2 * Ca).rowwise() - ta, Sb = (2 * Cb).rowwise() - tb;
  const double kink = -0.5 * fw.dot((a.cwiseProduct(Sb) - b.cwiseProduct(Sa)).rowwise().sum());
  return diag - 0.5 * (smooth + kink);
}

}  // namespace

KernelCovariance kernel_covariance(int n, Symmetry symmetry, const TestFunction& f, const TestFunction& g,
                                   double base_width) {
  require(f.lo < f.hi && g.lo < g.hi, "kernel_covariance: empty support");
  if (symmetry == Symmetry::kGOE)
    require(f.lo > -2 + kBulkDelta && f.hi < 2 - kBulkDelta && g.lo > -2 + kBulkDelta && g.hi < 2 - kBulkDelta,
            "kernel_covariance: GOE test functions must be supported in the bulk window");
  const ClusterKernel k(n, symmetry);
  // Refinement to half the panel width gives the error estimate.
  const double coarse = covariance_on_rule(k, f, g, rule_for(f, g, base_width));
  const double fine = covariance_on_rule(k, f, g, rule_for(f, g, base_width / 2));
  return {fine, std::abs(fine - coarse)};
}

DensityOfStates density_of_states(int n, Symmetry symmetry, double E) {
  require(std::abs(E) <= 1.5, "density_of_states: |E| must be <= 1.5");
  const ClusterKernel k(n, symmetry);
  DensityOfStates d;
  d.rho = one_point_density(k, E) / n;
  const double rho = rho_sc(E);
  if (symmetry == Symmetry::kGUE) {
    const double phase = n * (E * std::sqrt(4 - E * E) / 2 + 2 * std::asin(E / 2));
    const double sign = n % 2 ? 1.0 : -1.0;
    d.correction_predicted = sign * std::cos(phase) / (4 * kPi * kPi * kPi * n * rho * rho);
  } else {
    d.correction_predicted = -1 / (4 * kPi * kPi * n * rho);
  }
  return d;
}

void write_heatmap_csv(const std::string& path, const std::vector<double>& x, const std::vector<double>& y,
                       const Eigen::MatrixXd& values) {
  require(values.rows() == Eigen::Index(x.size()) && values.cols() == Eigen::Index(y.size()),
          "write_heatmap_csv: shape mismatch");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out.precision(17);
  out << "x,y,value\n";
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = 0; j < y.size(); ++j) out << x[i] << ',' << y[j] << ',' << values(Eigen::Index(i), Eigen::Index(j)) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace wlss
