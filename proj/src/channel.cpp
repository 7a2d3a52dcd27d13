#include "uavrelay/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace uavrelay {

void validate_model(const SegmentModel& m) {
  if (m.segments.empty()) throw std::invalid_argument("channel model: needs at least one segment");
  if (m.alpha0 <= 0.0) throw std::invalid_argument("channel model: alpha0 must be positive");
  for (const SegmentParams& s : m.segments) {
    if (s.alpha <= 0.0) throw std::invalid_argument("channel model: alpha must be positive");
    if (s.sigma_db < 0.0) throw std::invalid_argument("channel model: sigma_db must be >= 0");
  }
}

bool ordering_holds(const SegmentModel& m, double d_min, double d_max) {
  if (!(d_min > 0.0) || !(d_max >= d_min))
    throw std::invalid_argument("ordering check: bad distance range");
  for (int k = 2; k <= m.num_segments(); ++k) {
    for (double d : {d_min, d_max}) {
      const double gap_db = (m.b(k) - m.b(k - 1)) - (m.a(k) - m.a(k - 1)) * std::log10(d);
      if (gap_db >= 0.0) return false;
    }
  }
  return true;
}

Measurement sample_measurement(const Point2& x, const Point2& user, const SegmentOracle& oracle,
                               const SegmentModel& m, const Heights& h, Rng& rng) {
  const SegmentId k = oracle.segment(x);
  const double sigma = m.segments[static_cast<std::size_t>(k - 1)].sigma_db;
  if (sigma <= 0.0)
    throw std::invalid_argument("sample_measurement: segment sigma_db must be positive");
  const double d = dist_to_user(x, user, h);
  return Measurement{x, segment_gain_db(m, k, d) + rng.normal(0.0, sigma)};
}

SegmentId detect_segment(const Measurement& meas, const Point2& user, const SegmentModel& m,
                         const Heights& h) {
  const double d = dist_to_user(meas.position, user, h);
  const double logd = std::log10(d);
  SegmentId best = 1;
  double best_score = 0.0;
  for (int k = 1; k <= m.num_segments(); ++k) {
    const double sigma = m.segments[static_cast<std::size_t>(k - 1)].sigma_db;
    if (sigma <= 0.0)
      throw std::invalid_argument("detect_segment: segment sigma_db must be positive");
    const double score = std::fabs(meas.gain_db - (m.b(k) - m.a(k) * logd)) / sigma;
    if (k == 1 || score < best_score) {
      best = k;
      best_score = score;
    }
  }
  return best;
}

double sample_fading_power(FadingKind kind, double k_factor_db, Rng& rng) {
  if (kind == FadingKind::rayleigh) return rng.exponential(1.0);
  const double kf = std::pow(10.0, k_factor_db / 10.0);
  // Complex amplitude: deterministic LOS part of power kf/(kf+1) plus
  // circularly symmetric scatter of total power 1/(kf+1).
  const double nu = std::sqrt(kf / (kf + 1.0));
  const double s = std::sqrt(0.5 / (kf + 1.0));
  const double re = nu + s * rng.normal();
  const double im = s * rng.normal();
  return re * re + im * im;
}

}  // namespace uavrelay
