#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wlss/hermite.hpp"

namespace wlss {

enum class Symmetry { kGUE, kGOE };

// Bulk window for GOE cluster evaluation: |x| < 2 − kBulkDelta.
inline constexpr double kBulkDelta = 0.05;

// Scaled Hermite functions φ^{(N)}_k(λ) = c^{1/2}φ_k(cλ), c = √(N/2), with
// derivatives and sg-transforms sgφ^{(N)}_k(λ) = ½(∫_{−∞}^λ − ∫_λ^∞)φ^{(N)}_k.
class ClusterKernel {
 public:
  ClusterKernel(int n, Symmetry symmetry);

  int n() const { return n_; }
  Symmetry symmetry() const { return sym_; }

  // Rows of φ^{(N)}_k, k = 0..N, at each point.
  Eigen::MatrixXd basis(const std::vector<double>& x) const;
  Eigen::MatrixXd basis_derivative(const std::vector<double>& x) const;
  Eigen::MatrixXd basis_sg(const std::vector<double>& x) const;
  Eigen::MatrixXd basis_antiderivative(const std::vector<double>& x) const;

  double scaled(int k, double x, int deriv = 0) const;
  // ∫ φ^{(N)}_{N−1}, the odd-N normalization.
  double odd_normalization() const { return int_last_; }

 private:
  int n_;
  Symmetry sym_;
  double c_;
  HermiteEvaluator he_;
  std::vector<double> totals_;  // ∫φ^{(N)}_k
  double int_last_;
};

// Σ_{k<N} φ^{(N)}_k(x)φ^{(N)}_k(y) in Christoffel–Darboux form, with the
// confluent limit for |x − y| < 1e−6.
double cd_kernel(int n, double x, double y);
double gue_cluster(int n, double x, double y);

struct GoeComponents {
  double S_xy = 0, S_yx = 0;
  double D_xy = 0, D_yx = 0;
  double J_xy = 0, J_yx = 0;  // I_N − sg for even n, Ĵ_N for odd n
  double E1_xy = 0;           // E_{N,1}(x,y), or Ê_{N,1} for odd n
  double I_xy = 0;            // ∫_y^x S_N(s, y) ds
};

struct GoeCluster {
  double R = 0;
  GoeComponents components;
};

GoeCluster goe_cluster(int n, double x, double y);

// Matrices of S, D, J, R on the tensor grid x × y.
struct GoeGrid {
  Eigen::MatrixXd S_xy, S_yx, D_xy, D_yx, J_xy, J_yx, R;
};
GoeGrid goe_cluster_grid(const ClusterKernel& k, const std::vector<double>& x, const std::vector<double>& y);

// S_N(x,x) for GOE, K_N(x,x) for GUE.
double one_point_density(const ClusterKernel& k, double x);

struct TestFunction {
  std::function<double(double)> f;
  double lo = -3, hi = 3;
  std::vector<std::pair<double, double>> features;  // (center, width) for refinement
};

TestFunction poisson_test_function(double E, double eta, double lo = -3, double hi = 3);

struct KernelCovariance {
  double value = 0;
  double error_estimate = 0;
};

// Cov(tr f(H), tr g(H)) from the exact finite-N kernels. GOE requires f and g
// to vanish outside the bulk window.
KernelCovariance kernel_covariance(int n, Symmetry symmetry, const TestFunction& f, const TestFunction& g,
                                   double base_width = 0.05);

struct DensityOfStates {
  double rho = 0;
  double correction_predicted = 0;  // predicted ρ − ρ_sc at order 1/N
};

DensityOfStates density_of_states(int n, Symmetry symmetry, double E);

void write_heatmap_csv(const std::string& path, const std::vector<double>& x, const std::vector<double>& y,
                       const Eigen::MatrixXd& values);

}  // namespace wlss
