#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace wlss {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Bad input: precondition violated by the caller.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A numerical routine failed to reach its target.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}

// Third and fourth cumulants of the standardized off-diagonal entries.
struct CumulantPair {
  double s3 = 0;
  double s4 = 0;
};

inline const char* version() { return "1.0.0"; }

}  // namespace wlss
