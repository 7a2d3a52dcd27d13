#include "uavrelay/search.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace uavrelay {

namespace {

constexpr double kGolden = 0.6180339887498949;

double golden_minimize(const std::function<double(double)>& f, double a, double b, double tol) {
  while (b - a > tol) {
    const double c = b - kGolden * (b - a);
    const double d = a + kGolden * (b - a);
    if (f(c) <= f(d))
      b = d;
    else
      a = c;
  }
  return 0.5 * (a + b);
}

/// Shared state of one placement search run.
class Engine {
 public:
  Engine(const CostParams& cost, const SegmentModel& model, const Heights& h, const Point2& bs,
         const Point2& user, const SegmentOracle& oracle, const SearchParams& params)
      : cost_(cost),
        model_(model),
        h_(h),
        oracle_(oracle),
        params_(params),
        frame_(make_frame(user, bs)),
        detector_rng_(params.detector_seed) {
    validate_model(model);
    if (oracle.num_segments() != model.num_segments())
      throw std::invalid_argument("search: oracle and channel model disagree on segment count");
    if (!(params.delta > 0.0)) throw std::invalid_argument("search: delta must be positive");
    const int K = model.num_segments();
    const int floor_steps = static_cast<int>(
        std::ceil(4.0 * (2.4 * K - 1.4) * frame_.L / params.delta));
    if (params.max_steps == 0) {
      max_steps_ = floor_steps;
    } else {
      if (params.max_steps < floor_steps)
        throw std::invalid_argument("search: max_steps below the trajectory length bound");
      max_steps_ = params.max_steps;
    }
  }

  const AxisFrame& frame() const { return frame_; }
  int K() const { return model_.num_segments(); }

  /// Link degree used for membership decisions (optionally noisy).
  SegmentId observe(const Point2& x) {
    if (!params_.use_detector) return oracle_.segment(x);
    const Measurement meas = sample_measurement(x, frame_.user, oracle_, model_, h_, detector_rng_);
    return detect_segment(meas, frame_.user, model_, h_);
  }

  double cost_at(const Point2& x, SegmentId true_seg) const {
    const double g_u = segment_gain(model_, true_seg, dist_to_user(x, frame_.user, h_));
    const double g_b = gain_bs(x, frame_.bs, model_, h_);
    return eval_cost(cost_, g_u, g_b);
  }

  void record(SearchOutcome& out, const Point2& x, SearchPhase phase, int partition_k) {
    const PolarCoord p = to_polar(frame_, x);
    const SegmentId seg = oracle_.segment(x);
    const double c = cost_at(x, seg);
    if (c < out.record.f_min) {
      out.record.f_min = c;
      out.record.argmin = x;
      out.record.argmin_polar = p;
    }
    out.trajectory.points.push_back({x, p, seg, phase, partition_k, c, out.record.f_min});
  }

  FictitiousCost fictitious(SegmentId k) const {
    return FictitiousCost(cost_, model_, k, frame_.L, h_);
  }

  /// Axis scan positions (descending rho from L to 0) with observed degrees.
  struct AxisScan {
    std::vector<double> rho;
    std::vector<SegmentId> seg;
  };

  AxisScan scan_axis() {
    AxisScan scan;
    for (double r = frame_.L; r > 0.0; r -= params_.delta) {
      scan.rho.push_back(r);
      scan.seg.push_back(observe(from_polar(frame_, {r, 0.0})));
    }
    scan.rho.push_back(0.0);
    scan.seg.push_back(observe(frame_.user));
    return scan;
  }

  /// Constrained minimizer of F_k(., 0) over the scan, refined by golden
  /// section inside the winning contiguous feasible run.
  std::optional<double> critical_point(const AxisScan& scan, SegmentId k) {
    const auto feasible = [&](SegmentId s) { return k < K() ? s <= k : s == K(); };
    const FictitiousCost Fk = fictitious(k);
    int best = -1;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < scan.rho.size(); ++i) {
      if (!feasible(scan.seg[i])) continue;
      const double v = Fk.eval({scan.rho[i], 0.0});
      if (v < best_val) {
        best_val = v;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) return std::nullopt;
    int lo = best, hi = best;  // indices run from rho = L down to 0
    while (lo > 0 && feasible(scan.seg[static_cast<std::size_t>(lo - 1)])) --lo;
    while (hi + 1 < static_cast<int>(scan.rho.size()) &&
           feasible(scan.seg[static_cast<std::size_t>(hi + 1)]))
      ++hi;
    const double r_hi = scan.rho[static_cast<std::size_t>(lo)];
    const double r_lo = scan.rho[static_cast<std::size_t>(hi)];
    double refined = golden_minimize(
        [&](double r) { return Fk.eval({r, 0.0}); }, r_lo, r_hi, params_.refine_tol);
    if (!feasible(observe(from_polar(frame_, {refined, 0.0}))))
      refined = scan.rho[static_cast<std::size_t>(best)];
    return refined;
  }

  /// Solve F_k(rho, theta) = level on the descending limb near rho_guess.
  std::optional<double> project_to_level(const FictitiousCost& Fk, double theta, double level,
                                         double rho_guess) {
    const double tol = params_.contour_tol * std::max(std::fabs(level), 1e-30);
    const auto value = [&](double r) { return Fk.eval({std::max(r, 0.0), theta}); };
    double lo = rho_guess, hi = rho_guess;
    double f_guess = value(rho_guess);
    if (std::fabs(f_guess - level) <= tol) return rho_guess;
    if (f_guess > level) {
      // Need larger rho (the surface falls with rho on this limb).
      double step = 0.25 * params_.delta;
      for (int i = 0; i < 8 && value(hi) > level; ++i, step *= 2.0) hi += step;
      if (value(hi) > level) return std::nullopt;
    } else {
      double step = 0.25 * params_.delta;
      for (int i = 0; i < 8 && value(lo) < level; ++i, step *= 2.0) lo = std::max(lo - step, 0.0);
      if (value(lo) < level) return std::nullopt;
    }
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double fm = value(mid);
      if (std::fabs(fm - level) <= tol) return mid;
      if (fm > level)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }

  BranchReport run_branch(SearchOutcome& out, double rho_start, SegmentId k, int side) {
    const double delta = params_.delta;
    const SearchPhase phase = side > 0 ? SearchPhase::right : SearchPhase::left;
    BranchReport br;
    br.partition_k = k;
    br.side = phase;
    const FictitiousCost Fk = fictitious(k);

    const Point2 anchor = from_polar(frame_, {rho_start, 0.0});
    record(out, anchor, phase, k);

    const double theta0 = (rho_start < delta) ? side * M_PI / 64.0
                                              : side * delta / rho_start;
    Point2 x = from_polar(frame_, {rho_start, theta0});
    Point2 prev = anchor;
    double prev_rho = -1.0;
    std::optional<double> level;  // fictitious cost pinned on entering tracking

    for (int step = 0;; ++step) {
      if (step >= max_steps_) {
        br.reason = StopReason::max_steps;
        throw SearchDiagnostic("branch exceeded max_steps; oracle or cost surface pathological",
                               out.trajectory);
      }
      const PolarCoord p = to_polar(frame_, x);
      record(out, x, phase, k);
      br.length += distance(prev, x);
      br.steps = step + 1;
      if (step > 0 && !(p.rho > prev_rho - 1e-9))
        throw SearchDiagnostic("branch range stopped increasing", out.trajectory);
      prev_rho = p.rho;

      if (p.rho >= frame_.L * std::cos(p.theta)) {
        br.reason = StopReason::region_boundary;
        break;
      }
      const CostGrad g = Fk.grad(p);
      if (g.d_rho >= 0.0) {
        br.reason = StopReason::rising_radial_slope;
        break;
      }

      Point2 next;
      if (observe(x) <= k) {
        level.reset();
        next = from_polar(frame_, {p.rho + delta, p.theta});
      } else {
        if (!level) level = Fk.eval(p);
        bool fell_back = false;
        next = tracking_step(Fk, p, x, g, *level, out, fell_back);
        // A fallback leaves the tracked level set on purpose, so the next
        // tracking move must pin a fresh level at its own starting point.
        if (fell_back) level.reset();
      }
      prev = x;
      x = next;
    }
    out.branches.push_back(br);
    return br;
  }

  /// One level-set tracking move: first-order step, radial re-projection onto
  /// the level, then a proportional trim keeping the chord at <= delta.
  Point2 tracking_step(const FictitiousCost& Fk, const PolarCoord& p, const Point2& x,
                       const CostGrad& g, double level, SearchOutcome& out, bool& fell_back) {
    const double delta = params_.delta;
    fell_back = false;
    if (std::fabs(g.d_theta) < 1e-12) {
      // Flat transverse slope (df_rate with the user link active): the level
      // set is locally a circle, so progress radially instead.
      fell_back = true;
      ++out.contour_fallbacks;
      return from_polar(frame_, {p.rho + delta, p.theta});
    }
    const Point2 raw = x + contour_step(frame_, p, g, delta);
    PolarCoord q = to_polar(frame_, raw);
    double dtheta = q.theta - p.theta;

    for (int attempt = 0; attempt < 12; ++attempt) {
      const double theta_t = p.theta + dtheta;
      const std::optional<double> rho_t = project_to_level(Fk, theta_t, level, q.rho);
      if (!rho_t || *rho_t <= p.rho) {
        dtheta *= 0.5;  // level set does not reach this far; creep up on it
        if (std::fabs(dtheta) < 1e-12) break;
        continue;
      }
      const Point2 cand = from_polar(frame_, {*rho_t, theta_t});
      const double chord = distance(cand, x);
      if (chord <= delta * (1.0 + 1e-6)) return cand;
      dtheta *= delta / chord;
      q.rho = *rho_t;
    }
    // Projection kept failing (level-set apex or corner); fall back to radial
    // progress, which drives the radial slope nonnegative and ends the branch.
    fell_back = true;
    ++out.contour_fallbacks;
    return from_polar(frame_, {p.rho + delta, p.theta});
  }

  SearchOutcome run() {
    SearchOutcome out;
    const AxisScan scan = scan_axis();
    out.axis_rho0.resize(static_cast<std::size_t>(K()));
    for (SegmentId k = 1; k <= K(); ++k)
      out.axis_rho0[static_cast<std::size_t>(k - 1)] = critical_point(scan, k);

    // Lay down the axis waypoints (scan plus refined critical ranges) in
    // flight order: from the BS toward the user.
    std::vector<double> axis_pts = scan.rho;
    for (const std::optional<double>& r : out.axis_rho0)
      if (r) axis_pts.push_back(*r);
    std::sort(axis_pts.begin(), axis_pts.end(), std::greater<>());
    axis_pts.erase(std::unique(axis_pts.begin(), axis_pts.end()), axis_pts.end());
    for (double r : axis_pts) record(out, from_polar(frame_, {r, 0.0}), SearchPhase::axis, 0);
    out.axis_length = frame_.L;

    for (SegmentId k = 1; k < K(); ++k) {
      const std::optional<double>& rho0 = out.axis_rho0[static_cast<std::size_t>(k - 1)];
      if (!rho0) continue;
      run_branch(out, *rho0, k, +1);
      run_branch(out, *rho0, k, -1);
    }
    return out;
  }

  SearchOutcome run_single_branch(double rho_start, SegmentId k, int side) {
    SearchOutcome out;
    out.axis_rho0.assign(static_cast<std::size_t>(K()), std::nullopt);
    run_branch(out, rho_start, k, side);
    return out;
  }

 private:
  CostParams cost_;
  const SegmentModel& model_;
  Heights h_;
  const SegmentOracle& oracle_;
  SearchParams params_;
  AxisFrame frame_;
  Rng detector_rng_;
  int max_steps_ = 0;
};

}  // namespace

std::vector<std::optional<double>> axis_critical_points(const CostParams& cost,
                                                        const SegmentModel& model,
                                                        const Heights& h, const Point2& bs,
                                                        const Point2& user,
                                                        const SegmentOracle& oracle,
                                                        const SearchParams& params) {
  Engine eng(cost, model, h, bs, user, oracle, params);
  const auto scan = eng.scan_axis();
  std::vector<std::optional<double>> rho0(static_cast<std::size_t>(eng.K()));
  for (SegmentId k = 1; k <= eng.K(); ++k)
    rho0[static_cast<std::size_t>(k - 1)] = eng.critical_point(scan, k);
  return rho0;
}

SearchOutcome branch_search(const CostParams& cost, const SegmentModel& model, const Heights& h,
                            const Point2& bs, const Point2& user, const SegmentOracle& oracle,
                            const SearchParams& params, double rho_start, SegmentId k, int side) {
  if (side == 0) throw std::invalid_argument("branch_search: side must be nonzero");
  if (k < 1 || k >= model.num_segments())
    throw std::invalid_argument("branch_search: partition index must be in [1, K-1]");
  Engine eng(cost, model, h, bs, user, oracle, params);
  return eng.run_single_branch(rho_start, k, side > 0 ? +1 : -1);
}

SearchOutcome shaded_contour_search(const CostParams& cost, const SegmentModel& model,
                                    const Heights& h, const Point2& bs, const Point2& user,
                                    const SegmentOracle& oracle, const SearchParams& params) {
  Engine eng(cost, model, h, bs, user, oracle, params);
  return eng.run();
}

Point2 contour_step(const AxisFrame& frame, const PolarCoord& p, const CostGrad& grad,
                    double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("contour_step: delta must be positive");
  const Point2 e_rho = radial_dir(frame, p.theta);
  if (grad.d_rho == 0.0) return e_rho * delta;
  if (grad.d_theta == 0.0)
    throw std::invalid_argument("contour_step: vanishing theta-slope with nonzero radial slope");
  const Point2 e_theta = transverse_dir(frame, p.theta);
  const double c = grad.d_rho / (-grad.d_theta);
  const double gamma = delta / std::sqrt(1.0 + p.rho * p.rho * c * c);
  return e_rho * gamma + e_theta * (gamma * p.rho * c);
}

LengthReport trajectory_length_report(const SearchOutcome& outcome, double L, int num_segments) {
  LengthReport rep;
  rep.axis_length = outcome.axis_length;
  rep.total = outcome.axis_length;
  rep.total_bound = (2.4 * num_segments - 1.4) * L;
  rep.branch_bound = 1.21 * L;
  rep.within_bounds = true;
  for (const BranchReport& br : outcome.branches) {
    rep.branch_lengths.push_back(br.length);
    rep.total += br.length;
    if (br.length > rep.branch_bound) rep.within_bounds = false;
  }
  if (rep.total > rep.total_bound) rep.within_bounds = false;
  return rep;
}

}  // namespace uavrelay
