#pragma once

#include <string>
#include <vector>

#include "uavrelay/search.hpp"

namespace uavrelay {

/**
 * Empirical line-of-sight probability of the relay-user link as a function of
 * the elevation angle, over uniform bins spanning (0, pi/2]. Bins that catch
 * no samples are filled from their nearest sampled neighbors.
 */
struct LosProbabilityTable {
  std::vector<double> p_los;
  std::vector<long> n_samples;

  int bins() const { return static_cast<int>(p_los.size()); }
  double bin_width() const { return (M_PI / 2.0) / bins(); }

  /// Linear interpolation between bin centers, clamped at the ends.
  double lookup(double phi) const;
};

/// Monte Carlo estimate: random street users against random relay positions
/// anywhere over the map, binned by elevation angle.
LosProbabilityTable build_los_table(const UrbanMap& map, const Heights& h, int n_users,
                                    int n_uav_samples, int bins, Rng& rng);

std::string serialize_los_table(const LosProbabilityTable& t);
LosProbabilityTable parse_los_table(const std::string& text);
void save_los_table(const LosProbabilityTable& t, const std::string& path);
LosProbabilityTable load_los_table(const std::string& path);

/**
 * Probability-averaged user-link gain: the LOS and NLOS power laws mixed by
 * the tabulated LOS probability at the link's elevation angle. Follows the
 * original formulation in using the horizontal user distance unless
 * use_3d_distance is set.
 */
double probabilistic_gain(const SegmentModel& m, const LosProbabilityTable& t, const Point2& x,
                          const Point2& user, const Heights& h, bool use_3d_distance = false);

struct PlacementResult {
  Point2 position;
  double cost = std::numeric_limits<double>::quiet_NaN();
  double trajectory_length = 0.0;
  std::string scheme;
};

/// Square grid over the disk whose diameter is the anchor->BS segment,
/// anchored at `anchor` with the given spacing.
std::vector<Point2> region_grid(const Point2& anchor, const Point2& bs, double spacing);

/// Grid minimizer of the cost under the probability-averaged gain model.
/// The reported cost is the true cost at the chosen point.
PlacementResult probabilistic_placement(const CostParams& c, const SegmentModel& m,
                                        const Heights& h, const Point2& bs, const Point2& user,
                                        const SegmentOracle& oracle,
                                        const LosProbabilityTable& t, double spacing,
                                        bool use_3d_distance = false);

/// Multi-user variant: minimizes the mean averaged-model cost over the users,
/// searching the disk anchored at the cluster center. Scoring is left to the
/// caller.
PlacementResult probabilistic_placement_multi(const CostParams& c, const SegmentModel& m,
                                              const Heights& h, const Point2& bs,
                                              const Point2& center,
                                              const std::vector<Point2>& users,
                                              const LosProbabilityTable& t, double spacing,
                                              bool use_3d_distance = false);

/// Axis-only search: best of the per-partition axis critical ranges by true
/// cost (the first step of the full search, without branch exploration).
PlacementResult simple_search_placement(const CostParams& c, const SegmentModel& m,
                                        const Heights& h, const Point2& bs, const Point2& user,
                                        const SegmentOracle& oracle, const SearchParams& params);

/// True-cost argmin over the region grid; the benchmark every other scheme is
/// compared against.
PlacementResult exhaustive_placement(const CostParams& c, const SegmentModel& m, const Heights& h,
                                     const Point2& bs, const Point2& user,
                                     const SegmentOracle& oracle, double spacing);

/// Full search wrapped to the common placement interface.
PlacementResult proposed_placement(const CostParams& c, const SegmentModel& m, const Heights& h,
                                   const Point2& bs, const Point2& user,
                                   const SegmentOracle& oracle, const SearchParams& params);

struct DirectLink {
  SegmentId segment = 1;
  double gain = 0.0;
  double throughput = 0.0;    ///< single-hop rate log2(1 + p_b * gain), bps/Hz
  double outage_scale = 0.0;  ///< 1 / (p_b * gain), the no-relay outage reference
};

/// Direct BS->user transmission evaluated with the segmented law, the link
/// degree taken from the map between the two terminals.
DirectLink direct_link_eval(const CostParams& c, const SegmentModel& m, const Heights& h,
                            const UrbanMap& map, const Point2& bs, const Point2& user);

}  // namespace uavrelay
