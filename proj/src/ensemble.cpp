#include "wlss/ensemble.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>

#include <Eigen/Eigenvalues>

namespace wlss {

CumulantPair EnsembleSpec::cumulants() const {
  if (construction == Construction::kSymmetrized)
    return {entry.s3() / std::sqrt(2.0), entry.s4() / 2};
  return entry.cumulants();
}

void EnsembleSpec::validate() const {
  require(n >= 1, "ensemble: n must be >= 1");
  require(beta == 1 || beta == 2, "ensemble: beta must be 1 or 2");
  require(beta == 1 || gaussian(), "ensemble: beta = 2 is supported only for Gaussian entries");
  require(divisible_t >= 0 && std::isfinite(divisible_t), "ensemble: divisible_t must be >= 0");
}

nlohmann::json EnsembleSpec::to_json() const {
  return {{"n", n},
          {"beta", beta},
          {"entry", entry.to_json()},
          {"construction", construction == Construction::kDirect ? "direct" : "symmetrized"},
          {"divisible_t", divisible_t}};
}

EnsembleSpec EnsembleSpec::from_json(const nlohmann::json& j) {
  EnsembleSpec s;
  s.n = j.at("n").get<int>();
  s.beta = j.at("beta").get<int>();
  s.entry = EntryDistribution::from_json(j.at("entry"));
  s.construction = j.at("construction").get<std::string>() == "symmetrized" ? Construction::kSymmetrized
                                                                            : Construction::kDirect;
  s.divisible_t = j.at("divisible_t").get<double>();
  return s;
}

std::uint64_t EnsembleSpec::id() const {
  const std::string s = to_json().dump();
  return fnv1a(s.data(), s.size());
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

namespace {

Eigen::MatrixXd wigner_matrix(const EnsembleSpec& spec, const EntryDistribution& law, Construction c, Rng& rng) {
  const int n = spec.n;
  const double s = 1 / std::sqrt(double(n));
  Eigen::MatrixXd h(n, n);
  if (c == Construction::kSymmetrized) {
    Eigen::MatrixXd x(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) x(i, j) = s * law.sample(rng);
    h = (x + x.transpose()) / std::sqrt(2.0);
    return h;
  }
  std::normal_distribution<double> g(0.0, std::sqrt(2.0 / n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) h(i, j) = h(j, i) = s * law.sample(rng);
    h(j, j) = g(rng);
  }
  return h;
}

std::vector<double> dense_eigenvalues_real(const Eigen::MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + h.rows());
  return ev;
}

std::vector<double> dense_gue(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const double s = 1 / std::sqrt(double(n));
  Eigen::MatrixXcd h(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      const double re = g(rng), im = g(rng);
      h(i, j) = Complex(re, im) * (s / std::sqrt(2.0));
      h(j, i) = std::conj(h(i, j));
    }
    h(j, j) = s * g(rng);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
  return {es.eigenvalues().data(), es.eigenvalues().data() + n};
}

std::vector<double> tridiagonal_gaussian(int n, int beta, Rng& rng) {
  if (n == 1) {
    std::normal_distribution<double> g(0.0, std::sqrt(2.0 / beta));
    return {g(rng)};
  }
  const auto t = draw_tridiagonal(n, beta, rng);
  const Eigen::Map<const Eigen::VectorXd> d(t.d.data(), n), e(t.e.data(), n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("tridiagonal eigensolver failed to converge");
  return {es.eigenvalues().data(), es.eigenvalues().data() + n};
}

}  // namespace

TridiagonalModel draw_tridiagonal(int n, int beta, Rng& rng) {
  require(n >= 2 && (beta == 1 || beta == 2), "draw_tridiagonal: need n >= 2 and beta in {1, 2}");
  TridiagonalModel t;
  t.d.resize(n);
  t.e.resize(n - 1);
  std::normal_distribution<double> g(0.0, std::sqrt(2.0 / (beta * double(n))));
  for (int i = 0; i < n; ++i) t.d[i] = g(rng);
  for (int i = 1; i < n; ++i) {
    std::chi_squared_distribution<double> chi(double(beta) * (n - i));
    t.e[i - 1] = std::sqrt(chi(rng) / (beta * double(n)));
  }
  return t;
}

TridiagonalModel sample_tridiagonal(const EnsembleSpec& spec, std::uint64_t seed) {
  spec.validate();
  require(spec.gaussian() && spec.n >= 2, "sample_tridiagonal: Gaussian entries and n >= 2 required");
  Rng rng = make_stream(seed, 0);
  return draw_tridiagonal(spec.n, spec.beta, rng);
}

std::size_t sturm_count(const TridiagonalModel& t, double E) {
  // Signs of the pivots of T − E = LDLᵀ give the inertia.
  const double tiny = std::numeric_limits<double>::min();
  std::size_t neg = 0;
  double q = t.d[0] - E;
  for (std::size_t i = 0;; ++i) {
    if (q == 0) q = -tiny;
    if (q < 0) ++neg;
    if (i + 1 == t.d.size()) break;
    q = t.d[i + 1] - E - t.e[i] * t.e[i] / q;
  }
  return neg;
}

Eigen::MatrixXd sample_matrix(const EnsembleSpec& spec, Rng& rng) {
  spec.validate();
  require(spec.beta == 1, "sample_matrix: real symmetric ensembles only");
  Eigen::MatrixXd h = wigner_matrix(spec, spec.entry, spec.construction, rng);
  if (spec.divisible_t > 0) {
    const EntryDistribution gauss;
    const Eigen::MatrixXd g = wigner_matrix(spec, gauss, Construction::kDirect, rng);
    h = std::exp(-spec.divisible_t / 2) * h + std::sqrt(-std::expm1(-spec.divisible_t)) * g;
  }
  return h;
}

SpectrumSample sample_spectrum(const EnsembleSpec& spec, std::uint64_t seed, SamplingPath path) {
  spec.validate();
  Rng rng = make_stream(seed, 0);
  SpectrumSample out;
  out.seed = seed;
  out.spec_id = spec.id();
  // Gaussian entries give GOE/GUE for either construction and any t.
  const bool tri = path == SamplingPath::kTridiagonal || (path == SamplingPath::kAuto && spec.gaussian());
  if (tri) {
    require(spec.gaussian(), "sample_spectrum: tridiagonal path needs Gaussian entries");
    out.eigenvalues = tridiagonal_gaussian(spec.n, spec.beta, rng);
  } else if (spec.beta == 2) {
    out.eigenvalues = dense_gue(spec.n, rng);
  } else {
    out.eigenvalues = dense_eigenvalues_real(sample_matrix(spec, rng));
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  for (double v : out.eigenvalues)
    if (!std::isfinite(v)) throw NumericalError("sample_spectrum: non-finite eigenvalue");
  return out;
}

Complex empirical_stieltjes(const SpectrumSample& s, Complex z) {
  require(z.imag() != 0, "empirical_stieltjes: im(z) must be nonzero");
  Complex acc = 0;
  for (double l : s.eigenvalues) acc += 1.0 / (l - z);
  return acc / double(s.eigenvalues.size());
}

double linear_statistic(const SpectrumSample& s, const GridFunction& phi) {
  double acc = 0;
  for (double l : s.eigenvalues) acc += phi(l);
  return acc;
}

double linear_statistic(const SpectrumSample& s, const std::function<double(double)>& phi) {
  double acc = 0;
  for (double l : s.eigenvalues) acc += phi(l);
  return acc;
}

void save_spectrum(const std::string& path, const SpectrumSample& s, const EnsembleSpec& spec) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(s.eigenvalues.data()),
            std::streamsize(s.eigenvalues.size() * sizeof(double)));
  if (!out) throw IoError("write failed: " + path);
  std::ofstream side(path + ".json");
  if (!side) throw IoError("cannot write " + path + ".json");
  side << nlohmann::json{{"spec", spec.to_json()},
                         {"seed", s.seed},
                         {"spec_id", s.spec_id},
                         {"count", s.eigenvalues.size()},
                         {"dtype", "float64-le"}}
              .dump(2);
}

SpectrumSample load_spectrum(const std::string& path, EnsembleSpec* spec) {
  std::ifstream side(path + ".json");
  if (!side) throw IoError("cannot read " + path + ".json");
  nlohmann::json j;
  try {
    side >> j;
  } catch (const std::exception& e) {
    throw IoError("bad sidecar " + path + ".json: " + e.what());
  }
  SpectrumSample s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.spec_id = j.at("spec_id").get<std::uint64_t>();
  s.eigenvalues.resize(j.at("count").get<std::size_t>());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  in.read(reinterpret_cast<char*>(s.eigenvalues.data()), std::streamsize(s.eigenvalues.size() * sizeof(double)));
  if (!in) throw IoError("truncated spectrum file: " + path);
  if (spec) *spec = EnsembleSpec::from_json(j.at("spec"));
  return s;
}

}  // namespace wlss
