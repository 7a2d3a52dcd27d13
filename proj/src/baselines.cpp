#include "uavrelay/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace uavrelay {

double LosProbabilityTable::lookup(double phi) const {
  if (p_los.empty()) throw std::logic_error("los table: empty");
  const double w = bin_width();
  const int n = bins();
  // Interpolate between bin centers; clamp outside [c_0, c_{n-1}].
  const double t = phi / w - 0.5;
  if (t <= 0.0) return p_los.front();
  if (t >= n - 1.0) return p_los.back();
  const int i = static_cast<int>(t);
  const double frac = t - i;
  return p_los[static_cast<std::size_t>(i)] * (1.0 - frac) +
         p_los[static_cast<std::size_t>(i + 1)] * frac;
}

LosProbabilityTable build_los_table(const UrbanMap& map, const Heights& h, int n_users,
                                    int n_uav_samples, int bins, Rng& rng) {
  if (n_users < 1 || n_uav_samples < 1 || bins < 2)
    throw std::invalid_argument("los table: need users, samples and at least two bins");
  std::vector<long> hits(static_cast<std::size_t>(bins), 0);
  std::vector<long> total(static_cast<std::size_t>(bins), 0);
  const double w = (M_PI / 2.0) / bins;
  for (int uidx = 0; uidx < n_users; ++uidx) {
    const Point2 user = random_street_point(map, rng);
    for (int s = 0; s < n_uav_samples; ++s) {
      const Point2 uav{rng.uniform(0.0, map.extent), rng.uniform(0.0, map.extent)};
      const double phi = elevation_angle(uav, user, h);
      int bin = static_cast<int>(phi / w);
      bin = std::clamp(bin, 0, bins - 1);
      ++total[static_cast<std::size_t>(bin)];
      if (!los_blocked(map, user, h.h_user, uav, h.h_uav)) ++hits[static_cast<std::size_t>(bin)];
    }
  }
  LosProbabilityTable t;
  t.p_los.assign(static_cast<std::size_t>(bins), std::numeric_limits<double>::quiet_NaN());
  t.n_samples.assign(static_cast<std::size_t>(bins), 0);
  for (int i = 0; i < bins; ++i) {
    t.n_samples[static_cast<std::size_t>(i)] = total[static_cast<std::size_t>(i)];
    if (total[static_cast<std::size_t>(i)] > 0)
      t.p_los[static_cast<std::size_t>(i)] =
          static_cast<double>(hits[static_cast<std::size_t>(i)]) /
          static_cast<double>(total[static_cast<std::size_t>(i)]);
  }
  // Fill unsampled bins from the nearest sampled neighbors.
  for (int i = 0; i < bins; ++i) {
    if (!std::isnan(t.p_los[static_cast<std::size_t>(i)])) continue;
    int left = i - 1, right = i + 1;
    while (left >= 0 && std::isnan(t.p_los[static_cast<std::size_t>(left)])) --left;
    while (right < bins && std::isnan(t.p_los[static_cast<std::size_t>(right)])) ++right;
    if (left >= 0 && right < bins) {
      const double fr = static_cast<double>(i - left) / static_cast<double>(right - left);
      t.p_los[static_cast<std::size_t>(i)] =
          t.p_los[static_cast<std::size_t>(left)] * (1.0 - fr) +
          t.p_los[static_cast<std::size_t>(right)] * fr;
    } else if (left >= 0) {
      t.p_los[static_cast<std::size_t>(i)] = t.p_los[static_cast<std::size_t>(left)];
    } else if (right < bins) {
      t.p_los[static_cast<std::size_t>(i)] = t.p_los[static_cast<std::size_t>(right)];
    } else {
      throw std::runtime_error("los table: no samples at all");
    }
  }
  return t;
}

std::string serialize_los_table(const LosProbabilityTable& t) {
  std::string out = "phi_low_rad,phi_high_rad,p_los,n_samples\n";
  char line[160];
  const double w = t.bin_width();
  for (int i = 0; i < t.bins(); ++i) {
    std::snprintf(line, sizeof line, "%.6g,%.6g,%.6g,%ld\n", i * w, (i + 1) * w,
                  t.p_los[static_cast<std::size_t>(i)], t.n_samples[static_cast<std::size_t>(i)]);
    out += line;
  }
  return out;
}

LosProbabilityTable parse_los_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("phi_low_rad", 0) != 0)
    throw std::runtime_error("los table parse: missing header");
  LosProbabilityTable t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double lo = 0.0, hi = 0.0, p = 0.0;
    long n = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%ld", &lo, &hi, &p, &n) != 4)
      throw std::runtime_error("los table parse: bad row: " + line);
    t.p_los.push_back(p);
    t.n_samples.push_back(n);
  }
  if (t.p_los.empty()) throw std::runtime_error("los table parse: no rows");
  return t;
}

void save_los_table(const LosProbabilityTable& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write los table: " + path);
  out << serialize_los_table(t);
}

LosProbabilityTable load_los_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read los table: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_los_table(buf.str());
}

double probabilistic_gain(const SegmentModel& m, const LosProbabilityTable& t, const Point2& x,
                          const Point2& user, const Heights& h, bool use_3d_distance) {
  if (m.num_segments() < 2)
    throw std::invalid_argument("probabilistic gain: needs the two-segment LOS/NLOS model");
  const double phi = elevation_angle(x, user, h);
  const double p = t.lookup(phi);
  double d = use_3d_distance ? dist_to_user(x, user, h) : distance(x, user);
  d = std::max(d, 1e-6);
  return p * segment_gain(m, 1, d) + (1.0 - p) * segment_gain(m, 2, d);
}

std::vector<Point2> region_grid(const Point2& anchor, const Point2& bs, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("region grid: spacing must be positive");
  const Point2 center = (anchor + bs) * 0.5;
  const double r = distance(anchor, bs) * 0.5;
  const double pad = r + 1e-9;
  std::vector<Point2> pts;
  const int i_lo = static_cast<int>(std::ceil((center.x - pad - anchor.x) / spacing));
  const int i_hi = static_cast<int>(std::floor((center.x + pad - anchor.x) / spacing));
  const int j_lo = static_cast<int>(std::ceil((center.y - pad - anchor.y) / spacing));
  const int j_hi = static_cast<int>(std::floor((center.y + pad - anchor.y) / spacing));
  for (int i = i_lo; i <= i_hi; ++i) {
    for (int j = j_lo; j <= j_hi; ++j) {
      const Point2 p{anchor.x + i * spacing, anchor.y + j * spacing};
      if (distance(p, center) <= pad) pts.push_back(p);
    }
  }
  if (pts.empty()) pts.push_back(anchor);
  return pts;
}

PlacementResult probabilistic_placement(const CostParams& c, const SegmentModel& m,
                                        const Heights& h, const Point2& bs, const Point2& user,
                                        const SegmentOracle& oracle,
                                        const LosProbabilityTable& t, double spacing,
                                        bool use_3d_distance) {
  PlacementResult res;
  res.scheme = "probabilistic";
  double best = std::numeric_limits<double>::infinity();
  for (const Point2& p : region_grid(user, bs, spacing)) {
    const double g_u = probabilistic_gain(m, t, p, user, h, use_3d_distance);
    const double v = eval_cost(c, g_u, gain_bs(p, bs, m, h));
    if (v < best) {
      best = v;
      res.position = p;
    }
  }
  res.cost = true_cost(c, m, h, bs, user, oracle, res.position);
  return res;
}

PlacementResult probabilistic_placement_multi(const CostParams& c, const SegmentModel& m,
                                              const Heights& h, const Point2& bs,
                                              const Point2& center,
                                              const std::vector<Point2>& users,
                                              const LosProbabilityTable& t, double spacing,
                                              bool use_3d_distance) {
  if (users.empty()) throw std::invalid_argument("probabilistic placement: no users");
  PlacementResult res;
  res.scheme = "probabilistic";
  double best = std::numeric_limits<double>::infinity();
  for (const Point2& p : region_grid(center, bs, spacing)) {
    const double g_b = gain_bs(p, bs, m, h);
    double sum = 0.0;
    for (const Point2& u : users)
      sum += eval_cost(c, probabilistic_gain(m, t, p, u, h, use_3d_distance), g_b);
    const double v = sum / static_cast<double>(users.size());
    if (v < best) {
      best = v;
      res.position = p;
    }
  }
  return res;
}

PlacementResult simple_search_placement(const CostParams& c, const SegmentModel& m,
                                        const Heights& h, const Point2& bs, const Point2& user,
                                        const SegmentOracle& oracle, const SearchParams& params) {
  const auto rho0 = axis_critical_points(c, m, h, bs, user, oracle, params);
  const AxisFrame frame = make_frame(user, bs);
  PlacementResult res;
  res.scheme = "simple";
  res.trajectory_length = frame.L;
  double best = std::numeric_limits<double>::infinity();
  for (const std::optional<double>& r : rho0) {
    if (!r) continue;
    const Point2 p = from_polar(frame, {*r, 0.0});
    const double v = true_cost(c, m, h, bs, user, oracle, p);
    if (v < best) {
      best = v;
      res.position = p;
      res.cost = v;
    }
  }
  if (!std::isfinite(best)) throw std::runtime_error("simple search: no feasible axis point");
  return res;
}

PlacementResult exhaustive_placement(const CostParams& c, const SegmentModel& m, const Heights& h,
                                     const Point2& bs, const Point2& user,
                                     const SegmentOracle& oracle, double spacing) {
  PlacementResult res;
  res.scheme = "exhaustive";
  double best = std::numeric_limits<double>::infinity();
  for (const Point2& p : region_grid(user, bs, spacing)) {
    const double v = true_cost(c, m, h, bs, user, oracle, p);
    if (v < best) {
      best = v;
      res.position = p;
    }
  }
  res.cost = best;
  return res;
}

PlacementResult proposed_placement(const CostParams& c, const SegmentModel& m, const Heights& h,
                                   const Point2& bs, const Point2& user,
                                   const SegmentOracle& oracle, const SearchParams& params) {
  const SearchOutcome out = shaded_contour_search(c, m, h, bs, user, oracle, params);
  const LengthReport lr =
      trajectory_length_report(out, make_frame(user, bs).L, m.num_segments());
  PlacementResult res;
  res.scheme = "proposed";
  res.position = out.record.argmin;
  res.cost = out.record.f_min;
  res.trajectory_length = lr.total;
  return res;
}

DirectLink direct_link_eval(const CostParams& c, const SegmentModel& m, const Heights& h,
                            const UrbanMap& map, const Point2& bs, const Point2& user) {
  DirectLink dl;
  const int blocked = blocker_count(map, user, h.h_user, bs, h.h_bs);
  dl.segment = std::min(m.num_segments(), 1 + blocked);
  const Point2 d = bs - user;
  const double dz = h.h_bs - h.h_user;
  const double dist = std::sqrt(d.dot(d) + dz * dz);
  dl.gain = segment_gain(m, dl.segment, dist);
  dl.throughput = std::log2(1.0 + c.p_b * dl.gain);
  dl.outage_scale = 1.0 / (c.p_b * dl.gain);
  return dl;
}

}  // namespace uavrelay
