#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavrelay/geometry.hpp"
#include "uavrelay/rng.hpp"

namespace uavrelay {

/// Degree of line-of-sight obstruction of the relay-user link, 1-based.
/// Segment 1 is unobstructed; larger ids mean more intervening blockers.
using SegmentId = int;

struct Building {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
  double height = 0.0;

  /// Strict interior test; points on a wall line count as street.
  bool contains(const Point2& p) const {
    return p.x > x_min && p.x < x_max && p.y > y_min && p.y < y_max;
  }
};

/// Manhattan-grid layout parameters for generate_map.
struct MapLayout {
  double extent = 1000.0;  ///< square map side (m)
  int blocks = 7;          ///< building blocks per side
  double street = 75.0;    ///< street width between blocks (m)
  double height_min = 5.0;
  double height_max = 45.0;
};

struct UrbanMap {
  double extent = 0.0;
  std::vector<Building> buildings;

  bool in_extent(const Point2& p) const {
    return p.x >= 0.0 && p.x <= extent && p.y >= 0.0 && p.y <= extent;
  }
  bool on_street(const Point2& p) const;
  double max_height() const;
};

/**
 * Deterministic Manhattan-style map: blocks x blocks buildings separated by
 * streets of the given width, heights i.i.d. uniform in
 * [height_min, height_max]. The same seed always yields the same map.
 */
UrbanMap generate_map(std::uint64_t seed, const MapLayout& layout);

/// Number of distinct buildings whose solid intersects the 3D segment
/// (a, ha) -> (b, hb), endpoints excluded.
int blocker_count(const UrbanMap& map, const Point2& a, double ha, const Point2& b, double hb);

inline bool los_blocked(const UrbanMap& map, const Point2& a, double ha, const Point2& b,
                        double hb) {
  return blocker_count(map, a, ha, b, hb) > 0;
}

/// Obstruction degree of the relay-user link: 1 + blocker count, saturated
/// at the channel model's segment count.
SegmentId map_segment(const UrbanMap& map, const Point2& x, const Point2& user, const Heights& h,
                      int num_segments);

std::string serialize_map(const UrbanMap& map);
UrbanMap parse_map(const std::string& text);
void save_map(const UrbanMap& map, const std::string& path);
UrbanMap load_map(const std::string& path);

/// Uniform sample over the street area (rejection from the extent square).
Point2 random_street_point(const UrbanMap& map, Rng& rng);

/**
 * Synthetic obstruction field around one user: per direction bin, radii of
 * the boundaries between consecutive segments. Within a bin the radii are
 * strictly increasing in k, so scaling a point toward the user can never
 * increase its segment id.
 */
struct NestedBoundaryField {
  int num_segments = 2;                    ///< K
  std::vector<std::vector<double>> radii;  ///< [bin][k-1], k = 1..K-1

  int bins() const { return static_cast<int>(radii.size()); }
};

/// Random wavy rings: K-1 boundary radii per direction bin, each ring a
/// perturbed circle, monotone in k everywhere. Radii fall in [r_min, r_max].
NestedBoundaryField random_nested_field(std::uint64_t seed, int num_segments, int bins,
                                        double r_min, double r_max);

SegmentId nested_segment(const NestedBoundaryField& field, const Point2& x, const Point2& user);

/// Ground-truth segment query bound to one user position.
class SegmentOracle {
 public:
  virtual ~SegmentOracle() = default;
  virtual SegmentId segment(const Point2& x) const = 0;
  virtual int num_segments() const = 0;
};

class MapSegmentOracle final : public SegmentOracle {
 public:
  MapSegmentOracle(const UrbanMap& map, Point2 user, Heights heights, int num_segments)
      : map_(&map), user_(user), heights_(heights), num_segments_(num_segments) {}

  SegmentId segment(const Point2& x) const override {
    return map_segment(*map_, x, user_, heights_, num_segments_);
  }
  int num_segments() const override { return num_segments_; }

 private:
  const UrbanMap* map_;
  Point2 user_;
  Heights heights_;
  int num_segments_;
};

class NestedFieldOracle final : public SegmentOracle {
 public:
  NestedFieldOracle(const NestedBoundaryField& field, Point2 user) : field_(&field), user_(user) {}

  SegmentId segment(const Point2& x) const override { return nested_segment(*field_, x, user_); }
  int num_segments() const override { return field_->num_segments; }

 private:
  const NestedBoundaryField* field_;
  Point2 user_;
};

/// Segment of a virtual user standing in for a cluster: the most common
/// segment over the member users' oracles, ties resolved toward smaller ids.
class MajorityVoteOracle final : public SegmentOracle {
 public:
  explicit MajorityVoteOracle(std::vector<const SegmentOracle*> members);

  SegmentId segment(const Point2& x) const override;
  int num_segments() const override { return num_segments_; }

 private:
  std::vector<const SegmentOracle*> members_;
  int num_segments_;
};

}  // namespace uavrelay
