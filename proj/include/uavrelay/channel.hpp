#pragma once

#include <vector>

#include "uavrelay/geometry.hpp"
#include "uavrelay/rng.hpp"
#include "uavrelay/terrain.hpp"

namespace uavrelay {

/// Path-loss law of one obstruction segment: gain = beta * d^-alpha, with
/// lognormal shadowing of sigma_db around the dB mean.
struct SegmentParams {
  double alpha = 2.0;
  double log10_beta = -4.0;
  double sigma_db = 3.0;
};

/// Segmented relay-user channel plus the (always line-of-sight) BS-relay law.
struct SegmentModel {
  double alpha0 = 2.08;
  double log10_beta0 = -3.85;
  std::vector<SegmentParams> segments;  ///< index k-1 holds segment k

  int num_segments() const { return static_cast<int>(segments.size()); }
  double beta0() const { return std::pow(10.0, log10_beta0); }
  double beta(SegmentId k) const { return std::pow(10.0, segments[k - 1].log10_beta); }
  double alpha(SegmentId k) const { return segments[k - 1].alpha; }
  /// dB-model coefficients: mean received gain b(k) - a(k) * log10(d).
  double a(SegmentId k) const { return 10.0 * segments[k - 1].alpha; }
  double b(SegmentId k) const { return 10.0 * segments[k - 1].log10_beta; }
};

void validate_model(const SegmentModel& m);

/// Mean linear gain of a degree-k user link at 3D distance `dist`.
inline double segment_gain(const SegmentModel& m, SegmentId k, double dist) {
  return m.beta(k) * std::pow(dist, -m.alpha(k));
}

/// Mean gain in dB of a degree-k user link at 3D distance `dist`.
inline double segment_gain_db(const SegmentModel& m, SegmentId k, double dist) {
  return m.b(k) - m.a(k) * std::log10(dist);
}

/// BS-relay mean linear gain (single power law, no obstruction states).
inline double gain_bs(const Point2& x, const Point2& bs, const SegmentModel& m, const Heights& h) {
  return m.beta0() * std::pow(dist_to_bs(x, bs, h), -m.alpha0);
}

/// Relay-user mean linear gain when the link has obstruction degree k.
inline double gain_user(const Point2& x, const Point2& user, SegmentId k, const SegmentModel& m,
                        const Heights& h) {
  return segment_gain(m, k, dist_to_user(x, user, h));
}

/**
 * True when every higher-degree segment has strictly lower mean gain than its
 * predecessor across [d_min, d_max]. The dB gap between consecutive segments
 * is linear in log10(d), so checking the two endpoints is exact.
 */
bool ordering_holds(const SegmentModel& m, double d_min, double d_max);

struct Measurement {
  Point2 position;  ///< relay horizontal position the reading was taken at
  double gain_db;   ///< observed relay-user channel gain (dB)
};

/// Draw one shadowed gain reading at relay position x; the obstruction degree
/// comes from the ground-truth oracle.
Measurement sample_measurement(const Point2& x, const Point2& user, const SegmentOracle& oracle,
                               const SegmentModel& m, const Heights& h, Rng& rng);

/// Scaled-residual segment decision: argmin_k |y - (b_k - a_k log10 d)| / sigma_k,
/// ties resolved toward the smaller id.
SegmentId detect_segment(const Measurement& meas, const Point2& user, const SegmentModel& m,
                         const Heights& h);

enum class FadingKind { rician, rayleigh };

/// Unit-mean power gain of a small-scale fading draw. k_factor_db is ignored
/// for Rayleigh.
double sample_fading_power(FadingKind kind, double k_factor_db, Rng& rng);

}  // namespace uavrelay
