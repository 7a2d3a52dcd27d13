#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavrelay/cost.hpp"

namespace uavrelay {

enum class SearchPhase { axis, right, left };

struct SearchParams {
  double delta = 5.0;         ///< step length (m)
  int max_steps = 0;          ///< per-branch safety cap; 0 derives it from the length bound
  double contour_tol = 1e-6;  ///< relative drift allowed off a followed level set
  double refine_tol = 1e-3;   ///< axis critical-point refinement resolution (m)
  bool use_detector = false;  ///< route membership tests through noisy detection
  std::uint64_t detector_seed = 0;
};

struct Waypoint {
  Point2 pos;
  PolarCoord polar;
  SegmentId segment = 1;  ///< link degree at pos as seen by the search
  SearchPhase phase = SearchPhase::axis;
  int partition_k = 0;  ///< branch partition index; 0 on the axis pass
  double cost = 0.0;    ///< true placement cost at pos
  double f_min_so_far = 0.0;
};

struct Trajectory {
  std::vector<Waypoint> points;
};

/// Best true cost seen so far and where it was seen.
struct TrackRecord {
  double f_min = std::numeric_limits<double>::infinity();
  Point2 argmin;
  PolarCoord argmin_polar;
};

enum class StopReason { region_boundary, rising_radial_slope, max_steps };

struct BranchReport {
  int partition_k = 0;
  SearchPhase side = SearchPhase::right;
  double length = 0.0;
  int steps = 0;
  StopReason reason = StopReason::region_boundary;
};

struct SearchOutcome {
  TrackRecord record;
  Trajectory trajectory;
  std::vector<std::optional<double>> axis_rho0;  ///< index k-1: critical range of partition k
  std::vector<BranchReport> branches;
  double axis_length = 0.0;
  int contour_fallbacks = 0;  ///< steps that fell back to radial on a flat theta-slope
};

/// Raised when a branch exceeds its step cap; carries what was walked so far.
struct SearchDiagnostic : std::runtime_error {
  SearchDiagnostic(const std::string& msg, Trajectory partial_)
      : std::runtime_error(msg), partial(std::move(partial_)) {}
  Trajectory partial;
};

/**
 * Step 1 of the placement search: scan the user->BS axis at delta resolution,
 * then refine each partition's constrained minimizer of F_k(rho, 0) by
 * golden section inside the winning feasible interval. Partition k < K is
 * constrained to points of link degree <= k; partition K to degree exactly K.
 * An entry is absent when its constraint set meets no scan point.
 */
std::vector<std::optional<double>> axis_critical_points(const CostParams& cost,
                                                        const SegmentModel& model,
                                                        const Heights& h, const Point2& bs,
                                                        const Point2& user,
                                                        const SegmentOracle& oracle,
                                                        const SearchParams& params);

/**
 * One exploration branch of partition k, starting just off the axis at
 * rho_start. side > 0 explores counterclockwise, side < 0 clockwise. The
 * branch alternates radial probing (while the observed degree is <= k) with
 * level-set tracking of F_k (while it exceeds k), and terminates when it
 * leaves the bounded region (rho >= L cos theta) or the radial slope of F_k
 * turns nonnegative.
 */
SearchOutcome branch_search(const CostParams& cost, const SegmentModel& model, const Heights& h,
                            const Point2& bs, const Point2& user, const SegmentOracle& oracle,
                            const SearchParams& params, double rho_start, SegmentId k, int side);

/// Full placement search: axis pass plus a pair of branches per partition
/// 1..K-1. Every visited point is scored by its true cost and folded into the
/// returned record.
SearchOutcome shaded_contour_search(const CostParams& cost, const SegmentModel& model,
                                    const Heights& h, const Point2& bs, const Point2& user,
                                    const SegmentOracle& oracle, const SearchParams& params);

/**
 * First-order level-set step of length delta: radial progress away from the
 * user combined with the transverse motion that keeps F_k constant to first
 * order. Requires a nonvanishing theta-slope unless the radial slope is zero.
 */
Point2 contour_step(const AxisFrame& frame, const PolarCoord& p, const CostGrad& grad,
                    double delta);

struct LengthReport {
  double total = 0.0;
  double total_bound = 0.0;   ///< (2.4 K - 1.4) L
  double branch_bound = 0.0;  ///< 1.21 L
  double axis_length = 0.0;
  std::vector<double> branch_lengths;
  bool within_bounds = false;
};

LengthReport trajectory_length_report(const SearchOutcome& outcome, double L, int num_segments);

}  // namespace uavrelay
