#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavrelay/scenario.hpp"

namespace uavrelay {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/**
 * Property suites over reference worlds derived from `seed`: cost-shape
 * conditions (with a negative control), polar/Euclidean identities, analytic
 * gradients against finite differences, radial-slope single-sign-change
 * scans, and per-trajectory structure checks (radius monotone, deviation
 * angle non-decreasing in magnitude, step length capped, contour drift
 * bounded, region containment, length bounds) on full search runs across
 * synthetic nested worlds and a generated city map.
 */
std::vector<CheckResult> run_verification(std::uint64_t seed);

bool all_passed(const std::vector<CheckResult>& results);

/// Channel model with `k` nested segments: the reference two-segment urban
/// fit, extended with steeper decay laws for deeper obstruction degrees.
SegmentModel reference_model(int k);

}  // namespace uavrelay
