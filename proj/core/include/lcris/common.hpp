#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace lcris {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// All stochastic code takes an explicit engine so runs are reproducible.
using Rng = std::mt19937_64;

// Malformed configuration or CLI input. Mapped to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A simulation constraint was violated (e.g. unreachable phase target).
// Mapped to exit code 3.
class ConstraintViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double wrap_two_pi(double x) {
  double w = std::fmod(x, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double v) { return 10.0 * std::log10(v); }

}  // namespace lcris
