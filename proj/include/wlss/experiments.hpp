#pragma once

#include <string>
#include <vector>

#include "wlss/config.hpp"
#include "wlss/ensemble.hpp"
#include "wlss/functionals.hpp"
#include "wlss/report.hpp"

namespace wlss {

// A closed-form or tabulated test function with the interval outside which it
// vanishes (infinite bounds when it does not).
struct NamedFunction {
  RealFn f;
  double lo = -INFINITY;
  double hi = INFINITY;
  std::string label;
  std::vector<std::pair<double, double>> features;  // (center, width) for quadrature refinement
};

// Names: x, x2, power [p], poly [c0 c1 ...], cos [freq], gauss [center width],
// poisson [E eta], smooth-indicator [a b width], bump [center radius],
// cutoff-poisson [E eta inner edge], grid (reads `file`, .csv or binary).
NamedFunction make_test_function(const std::string& name, const std::vector<double>& params,
                                 const std::string& file = "");

// Smooth step: 0 for t ≤ 0, 1 for t ≥ 1, C∞.
double smooth_step(double t);

EnsembleSpec ensemble_from_config(const Config& cfg, int n);

std::vector<std::string> experiment_kinds();

// Runs one experiment. Configuration errors throw InvalidInput; failures
// inside individual metrics are recorded on those metrics.
Report run_experiment(const Config& cfg);

}  // namespace wlss
