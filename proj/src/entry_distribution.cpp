#include "wlss/entry_distribution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "wlss/quadrature.hpp"

namespace wlss {

namespace {

// Raw moments E[X^k], k = 0..4, of one component.
std::array<double, 5> gaussian_raw_moments(double m, double s) {
  const double v = s * s;
  return {1, m, m * m + v, m * m * m + 3 * m * v, std::pow(m, 4) + 6 * m * m * v + 3 * v * v};
}

std::array<double, 5> laplace_raw_moments(double m, double b) {
  // Central moments of Laplace(b): 0, 2b², 0, 24b⁴.
  const double c2 = 2 * b * b, c4 = 24 * std::pow(b, 4);
  return {1, m, m * m + c2, m * m * m + 3 * m * c2, std::pow(m, 4) + 6 * m * m * c2 + c4};
}

struct Standardized {
  double mean, sd, s3, s4;
};

Standardized from_raw(const std::array<double, 5>& r) {
  const double mu = r[1];
  const double c2 = r[2] - mu * mu;
  const double c3 = r[3] - 3 * mu * r[2] + 2 * mu * mu * mu;
  const double c4 = r[4] - 4 * mu * r[3] + 6 * mu * mu * r[2] - 3 * std::pow(mu, 4);
  if (!(c2 > 1e-14)) throw InvalidInput("entry distribution: variance zero");
  return {mu, std::sqrt(c2), c3 / std::pow(c2, 1.5), c4 / (c2 * c2) - 3};
}

}  // namespace

EntryDistribution::EntryDistribution() : EntryDistribution(EntryKind::kGaussian, {{1, 0, 1}}) {}

EntryDistribution::EntryDistribution(EntryKind kind, std::vector<MixtureComponent> comp)
    : kind_(kind), comp_(std::move(comp)) {
  standardize();
}

EntryDistribution EntryDistribution::gaussian(double mean, double scale) {
  if (scale == 0) throw InvalidInput("entry distribution: variance zero");
  if (!(scale > 0)) throw InvalidInput("entry distribution: non-normalizable density");
  return EntryDistribution(EntryKind::kGaussian, {{1, mean, scale}});
}

EntryDistribution EntryDistribution::laplace(double location, double scale) {
  if (scale == 0) throw InvalidInput("entry distribution: variance zero");
  if (!(scale > 0)) throw InvalidInput("entry distribution: non-normalizable density");
  return EntryDistribution(EntryKind::kLaplace, {{1, location, scale}});
}

EntryDistribution EntryDistribution::mixture(std::vector<MixtureComponent> components) {
  if (components.empty()) throw InvalidInput("entry distribution: non-normalizable density");
  double total = 0;
  for (const auto& c : components) {
    if (!(c.weight >= 0) || !std::isfinite(c.weight) || !std::isfinite(c.mean))
      throw InvalidInput("entry distribution: non-normalizable density");
    if (!(c.scale > 0)) throw InvalidInput("entry distribution: non-normalizable density");
    total += c.weight;
  }
  if (!(total > 0)) throw InvalidInput("entry distribution: non-normalizable density");
  for (auto& c : components) c.weight /= total;
  return EntryDistribution(EntryKind::kMixture, std::move(components));
}

double EntryDistribution::raw_density(double x) const {
  if (kind_ == EntryKind::kLaplace) {
    const auto& c = comp_[0];
    return std::exp(-std::abs(x - c.mean) / c.scale) / (2 * c.scale);
  }
  double p = 0;
  for (const auto& c : comp_) {
    const double u = (x - c.mean) / c.scale;
    p += c.weight * std::exp(-0.5 * u * u) / (c.scale * std::sqrt(2 * kPi));
  }
  return p;
}

double EntryDistribution::density(double x) const { return sd_ * raw_density(shift_ + sd_ * x); }

void EntryDistribution::standardize() {
  std::array<double, 5> closed{};
  for (const auto& c : comp_) {
    const auto r = kind_ == EntryKind::kLaplace ? laplace_raw_moments(c.mean, c.scale)
                                                : gaussian_raw_moments(c.mean, c.scale);
    for (int k = 0; k < 5; ++k) closed[k] += c.weight * r[k];
  }
  const Standardized cf = from_raw(closed);

  // Quadrature, split at the kinks and component centers.
  std::vector<double> cuts;
  for (const auto& c : comp_) cuts.push_back(c.mean);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto moment = [&](int k, double center) {
    auto f = [&](double x) { return std::pow(x - center, k) * raw_density(x); };
    double sum = integrate_adaptive(f, -INFINITY, cuts.front(), 1e-13).value;
    for (size_t i = 0; i + 1 < cuts.size(); ++i)
      sum += integrate_adaptive(f, cuts[i], cuts[i + 1], 1e-13).value;
    sum += integrate_adaptive(f, cuts.back(), INFINITY, 1e-13).value;
    return sum;
  };
  const double mass = moment(0, 0);
  if (!(std::abs(mass - 1) < 1e-8)) throw InvalidInput("entry distribution: non-normalizable density");
  const double mu = moment(1, 0);
  const double c2 = moment(2, mu);
  if (!(c2 > 1e-14)) throw InvalidInput("entry distribution: variance zero");
  const double c3 = moment(3, mu), c4 = moment(4, mu);
  shift_ = mu;
  sd_ = std::sqrt(c2);
  s3_ = c3 / std::pow(c2, 1.5);
  s4_ = c4 / (c2 * c2) - 3;

  if (std::abs(mu - cf.mean) > 1e-8 * (1 + std::abs(cf.mean)) || std::abs(sd_ - cf.sd) > 1e-8 * cf.sd ||
      std::abs(s3_ - cf.s3) > 1e-8 || std::abs(s4_ - cf.s4) > 1e-8)
    throw NumericalError("entry distribution: quadrature cumulants disagree with closed form");
}

double EntryDistribution::sample(Rng& rng) const {
  double x;
  if (kind_ == EntryKind::kLaplace) {
    // Inverse CDF from a symmetric uniform.
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    const double v = u(rng);
    x = comp_[0].mean - comp_[0].scale * std::copysign(std::log1p(-2 * std::abs(v)), v);
  } else {
    size_t j = 0;
    if (comp_.size() > 1) {
      std::uniform_real_distribution<double> u(0, 1);
      double r = u(rng);
      while (j + 1 < comp_.size() && r >= comp_[j].weight) r -= comp_[j++].weight;
    }
    std::normal_distribution<double> g(comp_[j].mean, comp_[j].scale);
    x = g(rng);
  }
  return (x - shift_) / sd_;
}

std::string EntryDistribution::kind_name() const {
  switch (kind_) {
    case EntryKind::kGaussian: return "gaussian";
    case EntryKind::kLaplace: return "laplace";
    case EntryKind::kMixture: return "mixture";
  }
  return "";
}

nlohmann::json EntryDistribution::to_json() const {
  nlohmann::json c = nlohmann::json::array();
  for (const auto& m : comp_) c.push_back({m.weight, m.mean, m.scale});
  return {{"kind", kind_name()}, {"components", c}, {"s3", s3_}, {"s4", s4_}};
}

EntryDistribution EntryDistribution::from_json(const nlohmann::json& j) {
  std::vector<double> p;
  for (const auto& c : j.at("components"))
    for (const auto& v : c) p.push_back(v.get<double>());
  const std::string kind = j.at("kind").get<std::string>();
  if (kind != "mixture" && p.size() == 3) p.erase(p.begin());
  return build_entry_distribution(kind, p);
}

EntryDistribution build_entry_distribution(const std::string& kind, const std::vector<double>& params) {
  if (kind == "gaussian" || kind == "laplace") {
    require(params.empty() || params.size() == 2, "entry distribution: expected [center scale]");
    const double a = params.empty() ? 0 : params[0], b = params.empty() ? 1 : params[1];
    return kind == "gaussian" ? EntryDistribution::gaussian(a, b) : EntryDistribution::laplace(a, b);
  }
  if (kind == "mixture") {
    require(!params.empty() && params.size() % 3 == 0, "entry distribution: mixture needs weight/mean/scale triples");
    std::vector<MixtureComponent> c;
    for (size_t i = 0; i < params.size(); i += 3) c.push_back({params[i], params[i + 1], params[i + 2]});
    return EntryDistribution::mixture(std::move(c));
  }
  throw InvalidInput("entry distribution: unknown kind '" + kind + "'");
}

}  // namespace wlss
