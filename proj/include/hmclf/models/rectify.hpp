#pragma once

#include <cmath>
#include <string>

#include "hmclf/error.hpp"

namespace hmclf::models {

inline constexpr double kDefaultRectifyThreshold = 0.99;

/// Confident-only signals from a probability: p_plus = p if p >= q else 0,
/// p_minus = 1 - p if 1 - p >= q else 0.
struct RectifiedSignal {
  double p_plus = 0.0;
  double p_minus = 0.0;
  double q = kDefaultRectifyThreshold;
};

/// f(p, q) = p when p >= q, else 0.
inline double rectified(double p, double q) { return p >= q ? p : 0.0; }

inline RectifiedSignal rectify(double p, double q = kDefaultRectifyThreshold) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw UsageError("rectify: probability " + std::to_string(p) + " outside [0, 1]");
  }
  if (!(q >= 0.0 && q <= 1.0)) throw UsageError("rectify: threshold outside [0, 1]");
  return {rectified(p, q), rectified(1.0 - p, q), q};
}

}  // namespace hmclf::models
