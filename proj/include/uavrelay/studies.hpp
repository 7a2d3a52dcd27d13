#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "uavrelay/scenario.hpp"

namespace uavrelay {

/// Runs body(0..n-1) across up to `jobs` worker threads. Each index executes
/// exactly once; callers write into per-index slots, so results are identical
/// for any worker count.
void parallel_for(int n, int jobs, const std::function<void(int)>& body);

enum class Scheme { proposed = 0, probabilistic = 1, simple = 2, exhaustive = 3 };
inline constexpr int kNumSchemes = 4;
const char* scheme_name(Scheme s);

/// Placements and parity-scored metrics of one scheme for one user. Every
/// scheme is scored by the same true-segment evaluator: relayed throughput at
/// the rate-optimized position, and the outage scale (relative to direct
/// transmission, with direct transmission as fallback) at the outage-optimized
/// position.
struct SchemeOutcome {
  Point2 df_position{0.0, 0.0};
  Point2 af_position{0.0, 0.0};
  double df_throughput = 0.0;  ///< bps/Hz (half pre-log, two hops)
  double af_ratio = 1.0;       ///< min(f(x), f_direct) / f_direct, <= 1
  double df_length = 0.0;      ///< search trajectory length, where defined
  double af_length = 0.0;
  bool df_bounds_ok = true;
  bool af_bounds_ok = true;
};

struct UserTrial {
  Point2 user{0.0, 0.0};
  double link_distance = 0.0;
  DirectLink direct;
  int category = 1;  ///< 0 = cell edge, 1 = mid, 2 = cell center
  std::array<SchemeOutcome, kNumSchemes> schemes;
};

struct SchemeAggregate {
  double mean_throughput = 0.0;
  double mean_throughput_edge = 0.0;
  double mean_throughput_center = 0.0;
  double mean_ratio = 0.0;
  double mean_ratio_edge = 0.0;
  double mean_ratio_center = 0.0;
};

struct SingleUserStudy {
  std::vector<UserTrial> trials;
  std::array<SchemeAggregate, kNumSchemes> aggregate;
  double direct_mean_throughput = 0.0;
  double edge_cut = 0.0;    ///< 20th percentile of direct throughput
  double center_cut = 0.0;  ///< 80th percentile
};

/// Monte Carlo over random street users: four placement schemes, two cost
/// kinds each, scored with the true map segments. Requires a map world.
SingleUserStudy run_single_user_study(const Scenario& scen, const LosProbabilityTable& table,
                                      int jobs);

/// results.csv (one row per trial x scheme), cdf.csv, bars.csv, summary.json.
void write_single_user_outputs(const SingleUserStudy& study, const Scenario& scen,
                               const std::string& out_dir);

struct ClusterTrial {
  Point2 center{0.0, 0.0};
  double radius = 0.0;
  double proposed_rate = 0.0;       ///< mean per-user throughput, proposed placement
  double probabilistic_rate = 0.0;  ///< same metric, averaged-model baseline placement
  double center_rate = 0.0;         ///< same metric, single-user search at the center
  double trajectory_length = 0.0;
  bool bounds_ok = true;
};

struct ClusterRadiusSummary {
  double radius = 0.0;
  double proposed_mean = 0.0;
  double proposed_se = 0.0;
  double probabilistic_mean = 0.0;
  double probabilistic_se = 0.0;
  double max_center_gap = 0.0;  ///< max |proposed - center-anchored| rate over clusters
};

struct ClusterStudy {
  std::vector<ClusterTrial> trials;  ///< radius-major, then cluster index
  std::vector<ClusterRadiusSummary> by_radius;
  int clusters = 0;
};

/// Hotspot sweep: the same obstructed cluster centers reused across every
/// radius (paired design), served through the virtual-user search vs the
/// probability-averaged baseline, both scored by mean member throughput.
ClusterStudy run_cluster_study(const Scenario& scen, const LosProbabilityTable& table, int jobs);

/// clusters.csv plus cluster_summary.json.
void write_cluster_outputs(const ClusterStudy& study, const std::string& out_dir);

/// Received-power (dBm, user->relay) and end-to-end capacity (bps/Hz) fields
/// over a grid of relay positions for one user: CSV grids plus SVG heatmaps,
/// optionally overlaying a search trajectory.
void emit_power_capacity_maps(const Scenario& scen, const Point2& user, const std::string& out_dir,
                              const Trajectory* overlay = nullptr);

}  // namespace uavrelay
