#pragma once

#include <cmath>
#include <stdexcept>

namespace homog {

struct Interval {
  double a = -1.0;
  double b = 1.0;
  double length() const { return b - a; }
  bool contains(double x) const { return x > a && x < b; }
};

// The three stability regimes behave differently throughout (drift
// correctors, convergence exponents, log corrections). alpha = 1 is detected
// exactly up to 1e-14.
enum class AlphaRegime { Subcritical, Critical, Supercritical };

inline AlphaRegime classify_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("alpha must lie strictly inside (0,2)");
  if (std::fabs(alpha - 1.0) <= 1e-14) return AlphaRegime::Critical;
  return alpha < 1.0 ? AlphaRegime::Subcritical : AlphaRegime::Supercritical;
}

} // namespace homog
