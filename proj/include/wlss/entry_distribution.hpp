#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "wlss/core.hpp"
#include "wlss/rng.hpp"

namespace wlss {

enum class EntryKind { kGaussian, kLaplace, kMixture };

struct MixtureComponent {
  double weight = 1;
  double mean = 0;
  double scale = 1;
};

// A law for matrix entries, standardized to mean 0 and variance 1. The
// cumulants are computed by quadrature against the density and checked
// against the closed forms.
class EntryDistribution {
 public:
  EntryDistribution();  // standard Gaussian

  static EntryDistribution gaussian(double mean = 0, double scale = 1);
  static EntryDistribution laplace(double location = 0, double scale = 1);
  static EntryDistribution mixture(std::vector<MixtureComponent> components);

  EntryKind kind() const { return kind_; }
  double s3() const { return s3_; }
  double s4() const { return s4_; }
  CumulantPair cumulants() const { return {s3_, s4_}; }

  // Density and draws of the standardized variable.
  double density(double x) const;
  double sample(Rng& rng) const;

  const std::vector<MixtureComponent>& components() const { return comp_; }
  std::string kind_name() const;
  nlohmann::json to_json() const;
  static EntryDistribution from_json(const nlohmann::json& j);

 private:
  EntryDistribution(EntryKind kind, std::vector<MixtureComponent> comp);
  double raw_density(double x) const;
  void standardize();

  EntryKind kind_ = EntryKind::kGaussian;
  std::vector<MixtureComponent> comp_;  // laplace: single (1, location, scale)
  double shift_ = 0;
  double sd_ = 1;
  double s3_ = 0;
  double s4_ = 0;
};

// kind: "gaussian" [mean scale], "laplace" [location scale],
// "mixture" [w1 m1 s1 w2 m2 s2 ...].
EntryDistribution build_entry_distribution(const std::string& kind, const std::vector<double>& params);

}  // namespace wlss
