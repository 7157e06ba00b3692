#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "wlss/core.hpp"

namespace wlss {

// Real function sampled on the uniform grid x_j = −L + j·h, j < 2^p, h = 2L/2^p.
// The discrete Fourier coefficients are computed on first use and shared by
// copies. Frequencies are ξ_k = πk/L for k = 0..2^{p−1}; |φ̂(ξ_k)| ≈ h·|Y_k|.
class GridFunction {
 public:
  GridFunction(double L, int p, std::vector<double> samples, double support_lo, double support_hi);

  // Samples f on the grid. The declared support defaults to the whole grid.
  static GridFunction from_callable(const std::function<double(double)>& f, double L = 8, int p = 20,
                                    double support_lo = -INFINITY, double support_hi = INFINITY);

  // Inverse transform of a half spectrum (FFTW r2c layout).
  static GridFunction from_spectrum(double L, int p, const std::vector<Complex>& half,
                                    double support_lo = -INFINITY, double support_hi = INFINITY);

  double L() const { return L_; }
  int p() const { return p_; }
  double h() const { return h_; }
  std::size_t size() const { return samples_.size(); }
  double x(std::size_t j) const { return -L_ + double(j) * h_; }
  const std::vector<double>& samples() const { return samples_; }
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }

  const std::vector<Complex>& spectrum() const;
  double frequency(std::size_t k) const { return kPi * double(k) / L_; }
  double nyquist() const { return kPi / h_; }

  // Cubic interpolation; zero outside the grid and outside the declared support.
  double operator()(double x) const;
  double derivative(double x) const;

  double l2_norm() const;

  void write_csv(const std::string& path) const;
  static GridFunction read_csv(const std::string& path);
  void write_binary(const std::string& path) const;
  static GridFunction read_binary(const std::string& path);

 private:
  double L_;
  int p_;
  double h_;
  std::vector<double> samples_;
  double lo_, hi_;
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

// Forward r2c and backward c2r transforms (unnormalized, FFTW sign convention).
std::vector<Complex> fft_forward(const std::vector<double>& x);
std::vector<double> fft_backward(const std::vector<Complex>& half, std::size_t n);

}  // namespace wlss
