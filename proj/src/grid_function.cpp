#include "wlss/grid_function.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

namespace wlss {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::vector<Complex> fft_forward(const std::vector<double>& x) {
  const std::size_t n = x.size();
  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(int(n), in, out, FFTW_ESTIMATE);
  }
  std::memcpy(in, x.data(), n * sizeof(double));
  fftw_execute(plan);
  std::vector<Complex> y(n / 2 + 1);
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = {out[k][0], out[k][1]};
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return y;
}

std::vector<double> fft_backward(const std::vector<Complex>& half, std::size_t n) {
  require(half.size() == n / 2 + 1, "fft_backward: size mismatch");
  fftw_complex* in = fftw_alloc_complex(half.size());
  double* out = fftw_alloc_real(n);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_c2r_1d(int(n), in, out, FFTW_ESTIMATE);
  }
  for (std::size_t k = 0; k < half.size(); ++k) {
    in[k][0] = half[k].real();
    in[k][1] = half[k].imag();
  }
  fftw_execute(plan);
  std::vector<double> y(out, out + n);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return y;
}

struct GridFunction::Cache {
  std::once_flag once;
  std::vector<Complex> spectrum;
};

GridFunction::GridFunction(double L, int p, std::vector<double> samples, double support_lo,
                           double support_hi)
    : L_(L), p_(p), samples_(std::move(samples)), lo_(support_lo), hi_(support_hi),
      cache_(std::make_shared<Cache>()) {
  require(L > 0, "GridFunction: L must be positive");
  require(p >= 2 && p <= 26, "GridFunction: p out of range");
  require(samples_.size() == (std::size_t(1) << p), "GridFunction: need 2^p samples");
  require(lo_ <= hi_, "GridFunction: empty support");
  h_ = 2 * L / double(samples_.size());
  for (std::size_t j = 0; j < samples_.size(); ++j) {
    require(std::isfinite(samples_[j]), "GridFunction: non-finite sample");
    const double xj = x(j);
    if ((xj < lo_ || xj > hi_) && std::abs(samples_[j]) >= 1e-10)
      throw InvalidInput("GridFunction: nonzero sample outside declared support");
  }
}

GridFunction GridFunction::from_callable(const std::function<double(double)>& f, double L, int p,
                                         double support_lo, double support_hi) {
  const std::size_t m = std::size_t(1) << p;
  const double h = 2 * L / double(m);
  std::vector<double> s(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double xj = -L + double(j) * h;
    s[j] = (xj < support_lo || xj > support_hi) ? 0.0 : f(xj);
  }
  return GridFunction(L, p, std::move(s), support_lo, support_hi);
}

GridFunction GridFunction::from_spectrum(double L, int p, const std::vector<Complex>& half,
                                         double support_lo, double support_hi) {
  const std::size_t m = std::size_t(1) << p;
  auto s = fft_backward(half, m);
  for (auto& v : s) v /= double(m);
  if (std::isfinite(support_lo) || std::isfinite(support_hi)) {
    const double h = 2 * L / double(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double xj = -L + double(j) * h;
      if (xj < support_lo || xj > support_hi) s[j] = 0;
    }
  }
  return GridFunction(L, p, std::move(s), support_lo, support_hi);
}

const std::vector<Complex>& GridFunction::spectrum() const {
  std::call_once(cache_->once, [&] { cache_->spectrum = fft_forward(samples_); });
  return cache_->spectrum;
}

double GridFunction::operator()(double xv) const {
  if (xv < lo_ || xv > hi_) return 0.0;
  const double u = (xv + L_) / h_;
  const double fl = std::floor(u);
  const long j = long(fl);
  const long m = long(samples_.size());
  if (j < 0 || j > m - 1) return 0.0;
  const double t = u - fl;
  auto at = [&](long i) { return (i < 0 || i >= m) ? 0.0 : samples_[std::size_t(i)]; };
  const double a = at(j - 1), b = at(j), c = at(j + 1), d = at(j + 2);
  // Four-point Lagrange through j−1..j+2.
  const double wa = -t * (t - 1) * (t - 2) / 6, wb = (t + 1) * (t - 1) * (t - 2) / 2;
  const double wc = -(t + 1) * t * (t - 2) / 2, wd = (t + 1) * t * (t - 1) / 6;
  return wa * a + wb * b + wc * c + wd * d;
}

double GridFunction::derivative(double xv) const {
  const double d = 0.5 * h_;
  return ((*this)(xv + d) - (*this)(xv - d)) / (2 * d);
}

double GridFunction::l2_norm() const {
  double s = 0;
  for (double v : samples_) s += v * v;
  return std::sqrt(s * h_);
}

void GridFunction::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out.precision(17);
  out << "x,value\n";
  for (std::size_t j = 0; j < samples_.size(); ++j) out << x(j) << ',' << samples_[j] << '\n';
  if (!out) throw IoError("write failed: " + path);
}

GridFunction GridFunction::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::string line;
  std::getline(in, line);
  std::vector<double> xs, vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double a, b;
    char comma;
    if (!(ss >> a >> comma >> b)) throw IoError("malformed row in " + path);
    xs.push_back(a);
    vs.push_back(b);
  }
  require(xs.size() >= 4 && std::has_single_bit(xs.size()), "GridFunction csv: need 2^p rows");
  const int p = std::countr_zero(xs.size());
  const double L = -xs.front();
  return GridFunction(L, p, std::move(vs), -INFINITY, INFINITY);
}

namespace {

constexpr char kMagic[8] = {'W', 'L', 'S', 'S', 'G', 'F', '0', '1'};

template <class T>
void put_le(std::ostream& o, T v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get_le(std::istream& i) {
  T v{};
  i.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

}  // namespace

void GridFunction::write_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(kMagic, 8);
  put_le<double>(out, L_);
  put_le<std::int32_t>(out, p_);
  put_le<double>(out, lo_);
  put_le<double>(out, hi_);
  out.write(reinterpret_cast<const char*>(samples_.data()), std::streamsize(samples_.size() * sizeof(double)));
  if (!out) throw IoError("write failed: " + path);
}

GridFunction GridFunction::read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw IoError("not a grid function file: " + path);
  const double L = get_le<double>(in);
  const int p = get_le<std::int32_t>(in);
  const double lo = get_le<double>(in), hi = get_le<double>(in);
  require(p >= 2 && p <= 26, "GridFunction binary: bad p");
  std::vector<double> s(std::size_t(1) << p);
  in.read(reinterpret_cast<char*>(s.data()), std::streamsize(s.size() * sizeof(double)));
  if (!in) throw IoError("truncated grid function file: " + path);
  return GridFunction(L, p, std::move(s), lo, hi);
}

}  // namespace wlss
