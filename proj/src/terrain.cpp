#include "uavrelay/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace uavrelay {

bool UrbanMap::on_street(const Point2& p) const {
  if (!in_extent(p)) return false;
  for (const Building& b : buildings)
    if (b.contains(p)) return false;
  return true;
}

double UrbanMap::max_height() const {
  double m = 0.0;
  for (const Building& b : buildings) m = std::max(m, b.height);
  return m;
}

UrbanMap generate_map(std::uint64_t seed, const MapLayout& layout) {
  if (layout.extent <= 0.0 || layout.blocks < 1 || layout.street < 0.0)
    throw std::invalid_argument("map layout: extent and blocks must be positive");
  const int n = layout.blocks;
  const double block = (layout.extent - (n + 1) * layout.street) / n;
  if (block <= 0.0)
    throw std::invalid_argument("map layout: streets leave no room for buildings");
  if (layout.height_min < 0.0 || layout.height_max < layout.height_min)
    throw std::invalid_argument("map layout: bad height range");

  UrbanMap map;
  map.extent = layout.extent;
  map.buildings.reserve(static_cast<std::size_t>(n) * n);
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    const double x0 = layout.street + i * (block + layout.street);
    for (int j = 0; j < n; ++j) {
      const double y0 = layout.street + j * (block + layout.street);
      Building b;
      b.x_min = x0;
      b.y_min = y0;
      b.x_max = x0 + block;
      b.y_max = y0 + block;
      b.height = rng.uniform(layout.height_min, layout.height_max);
      map.buildings.push_back(b);
    }
  }
  return map;
}

namespace {

// Clip parameter interval [t0, t1] to a slab lo <= p + t*d <= hi.
// Returns false when the intersection is empty.
bool clip_slab(double p, double d, double lo, double hi, double& t0, double& t1) {
  if (d == 0.0) return p >= lo && p <= hi;
  double a = (lo - p) / d;
  double b = (hi - p) / d;
  if (a > b) std::swap(a, b);
  t0 = std::max(t0, a);
  t1 = std::min(t1, b);
  return t0 < t1;
}

}  // namespace

int blocker_count(const UrbanMap& map, const Point2& a, double ha, const Point2& b, double hb) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double dz = hb - ha;
  int count = 0;
  for (const Building& bld : map.buildings) {
    double t0 = 1e-12, t1 = 1.0 - 1e-12;  // open segment: endpoints excluded
    if (!clip_slab(a.x, dx, bld.x_min, bld.x_max, t0, t1)) continue;
    if (!clip_slab(a.y, dy, bld.y_min, bld.y_max, t0, t1)) continue;
    const double z_lo = std::min(ha + t0 * dz, ha + t1 * dz);
    if (z_lo <= bld.height) ++count;
  }
  return count;
}

SegmentId map_segment(const UrbanMap& map, const Point2& x, const Point2& user, const Heights& h,
                      int num_segments) {
  const int blocked = blocker_count(map, user, h.h_user, x, h.h_uav);
  return std::min(num_segments, 1 + blocked);
}

std::string serialize_map(const UrbanMap& map) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "extent %.3f\n", map.extent);
  out += line;
  std::snprintf(line, sizeof line, "buildings %zu\n", map.buildings.size());
  out += line;
  for (const Building& b : map.buildings) {
    std::snprintf(line, sizeof line, "%.3f %.3f %.3f %.3f %.3f\n", b.x_min, b.y_min, b.x_max,
                  b.y_max, b.height);
    out += line;
  }
  return out;
}

UrbanMap parse_map(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  UrbanMap map;
  std::size_t n = 0;
  if (!(in >> tag >> map.extent) || tag != "extent")
    throw std::runtime_error("map parse: expected 'extent <m>'");
  if (!(in >> tag >> n) || tag != "buildings")
    throw std::runtime_error("map parse: expected 'buildings <count>'");
  map.buildings.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Building& b = map.buildings[i];
    if (!(in >> b.x_min >> b.y_min >> b.x_max >> b.y_max >> b.height))
      throw std::runtime_error("map parse: truncated building list");
    if (b.x_max <= b.x_min || b.y_max <= b.y_min || b.height < 0.0)
      throw std::runtime_error("map parse: degenerate building");
  }
  return map;
}

void save_map(const UrbanMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write map file: " + path);
  out << serialize_map(map);
}

UrbanMap load_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read map file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_map(buf.str());
}

Point2 random_street_point(const UrbanMap& map, Rng& rng) {
  for (int tries = 0; tries < 100000; ++tries) {
    const Point2 p{rng.uniform(0.0, map.extent), rng.uniform(0.0, map.extent)};
    if (map.on_street(p)) return p;
  }
  throw std::runtime_error("street sampling failed; map has almost no street area");
}

NestedBoundaryField random_nested_field(std::uint64_t seed, int num_segments, int bins,
                                        double r_min, double r_max) {
  if (num_segments < 1 || bins < 4 || r_min <= 0.0 || r_max <= r_min)
    throw std::invalid_argument("nested field: bad parameters");
  NestedBoundaryField field;
  field.num_segments = num_segments;
  field.radii.assign(bins, {});
  const int rings = num_segments - 1;
  if (rings == 0) return field;

  Rng rng(seed);
  // Evenly spread base radii with jitter, then wavy angular modulation.
  std::vector<double> base(rings), amp(rings), phase(rings);
  std::vector<int> mode(rings);
  const double span = r_max - r_min;
  for (int k = 0; k < rings; ++k) {
    const double lo = r_min + span * k / rings;
    const double hi = r_min + span * (k + 1) / rings;
    base[k] = rng.uniform(lo + 0.2 * (hi - lo), hi - 0.2 * (hi - lo));
    amp[k] = rng.uniform(0.05, 0.22);
    phase[k] = rng.uniform(0.0, 2.0 * M_PI);
    mode[k] = 1 + static_cast<int>(rng.below(4));
  }
  for (int b = 0; b < bins; ++b) {
    std::vector<double>& r = field.radii[b];
    r.resize(rings);
    const double ang = 2.0 * M_PI * b / bins;
    double prev = 0.0;
    for (int k = 0; k < rings; ++k) {
      double v = base[k] * (1.0 + amp[k] * std::sin(mode[k] * ang + phase[k]));
      v = std::clamp(v, r_min, r_max);
      if (v <= prev) v = prev * 1.02 + 1.0;
      r[k] = v;
      prev = v;
    }
  }
  return field;
}

SegmentId nested_segment(const NestedBoundaryField& field, const Point2& x, const Point2& user) {
  const Point2 z = x - user;
  const double r = z.norm();
  if (r == 0.0 || field.num_segments == 1) return 1;
  double ang = std::atan2(z.y, z.x);
  if (ang < 0.0) ang += 2.0 * M_PI;
  int bin = static_cast<int>(ang / (2.0 * M_PI) * field.bins());
  bin = std::clamp(bin, 0, field.bins() - 1);
  const std::vector<double>& radii = field.radii[bin];
  for (std::size_t k = 0; k < radii.size(); ++k)
    if (r <= radii[k]) return static_cast<SegmentId>(k + 1);
  return field.num_segments;
}

MajorityVoteOracle::MajorityVoteOracle(std::vector<const SegmentOracle*> members)
    : members_(std::move(members)) {
  if (members_.empty()) throw std::invalid_argument("majority vote: no member oracles");
  num_segments_ = members_.front()->num_segments();
  for (const SegmentOracle* m : members_)
    if (m->num_segments() != num_segments_)
      throw std::invalid_argument("majority vote: members disagree on segment count");
}

SegmentId MajorityVoteOracle::segment(const Point2& x) const {
  std::vector<int> votes(static_cast<std::size_t>(num_segments_) + 1, 0);
  for (const SegmentOracle* m : members_) ++votes[static_cast<std::size_t>(m->segment(x))];
  int best = 1;
  for (int k = 2; k <= num_segments_; ++k)
    if (votes[static_cast<std::size_t>(k)] > votes[static_cast<std::size_t>(best)]) best = k;
  return best;
}

}  // namespace uavrelay
