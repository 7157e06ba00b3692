#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "wlss/entry_distribution.hpp"
#include "wlss/grid_function.hpp"

namespace wlss {

// kDirect: off-diagonal entries drawn from the law, diagonal N(0, 2/n).
// kSymmetrized: H = (X + Xᵀ)/√2 with X_ij i.i.d. from the law scaled by 1/√n;
// then diagonal cumulants are 2^{k−1} times the off-diagonal ones.
enum class Construction { kDirect, kSymmetrized };

struct EnsembleSpec {
  int n = 1;
  int beta = 1;
  EntryDistribution entry;
  Construction construction = Construction::kDirect;
  double divisible_t = 0;

  bool gaussian() const { return entry.kind() == EntryKind::kGaussian; }
  // Cumulants of the standardized off-diagonal entries √n·H_ij.
  CumulantPair cumulants() const;
  void validate() const;
  nlohmann::json to_json() const;
  static EnsembleSpec from_json(const nlohmann::json& j);
  std::uint64_t id() const;

  static EnsembleSpec goe(int n) { return {n, 1, {}, Construction::kDirect, 0}; }
  static EnsembleSpec gue(int n) { return {n, 2, {}, Construction::kDirect, 0}; }
};

struct SpectrumSample {
  std::vector<double> eigenvalues;
  std::uint64_t seed = 0;
  std::uint64_t spec_id = 0;
};

enum class SamplingPath { kAuto, kDense, kTridiagonal };

// Per-trial seed derived from a base seed (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// β-Hermite tridiagonal model scaled so that the full matrix has off-diagonal
// variance 1/n: diagonal N(0, 2/(βn)), subdiagonal χ_{β(n−i)}/√(βn).
struct TridiagonalModel {
  std::vector<double> d, e;
};
TridiagonalModel draw_tridiagonal(int n, int beta, Rng& rng);
// Same draw as the tridiagonal path of sample_spectrum for this seed.
TridiagonalModel sample_tridiagonal(const EnsembleSpec& spec, std::uint64_t seed);
// #{λ < E} from the Sturm sequence, O(n).
std::size_t sturm_count(const TridiagonalModel& t, double E);

Eigen::MatrixXd sample_matrix(const EnsembleSpec& spec, Rng& rng);

SpectrumSample sample_spectrum(const EnsembleSpec& spec, std::uint64_t seed,
                               SamplingPath path = SamplingPath::kAuto);

Complex empirical_stieltjes(const SpectrumSample& s, Complex z);

double linear_statistic(const SpectrumSample& s, const GridFunction& phi);
double linear_statistic(const SpectrumSample& s, const std::function<double(double)>& phi);

// Little-endian float64 eigenvalues plus a JSON sidecar at path + ".json".
void save_spectrum(const std::string& path, const SpectrumSample& s, const EnsembleSpec& spec);
SpectrumSample load_spectrum(const std::string& path, EnsembleSpec* spec = nullptr);

}  // namespace wlss
