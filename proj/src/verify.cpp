#include "uavrelay/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace uavrelay {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

struct Checker {
  std::vector<CheckResult> results;
  void add(const std::string& name, bool ok, const std::string& detail) {
    results.push_back({name, ok, detail});
  }
};

/// Structure violations accumulated over full search trajectories.
struct Audit {
  int searches = 0;
  int rho_bad = 0;
  int theta_bad = 0;
  int chord_bad = 0;
  int drift_bad = 0;
  int drift_checked = 0;
  int containment_bad = 0;
  int bounds_bad = 0;
  double worst_drift = 0.0;
};

void audit_run(Audit& a, const CostParams& c, const SegmentModel& m, const Heights& h,
               const Point2& bs, const Point2& user, const SegmentOracle& oracle,
               const SearchParams& params) {
  const SearchOutcome out = shaded_contour_search(c, m, h, bs, user, oracle, params);
  const double L = distance(user, bs);
  ++a.searches;

  const LengthReport lr = trajectory_length_report(out, L, m.num_segments());
  if (!lr.within_bounds) ++a.bounds_bad;

  // Returned minimizer inside the bounded half-disk, up to one step of slack.
  {
    const PolarCoord& p = out.record.argmin_polar;
    const double theta_slack =
        2.0 * std::asin(std::min(1.0, params.delta / (2.0 * std::max(p.rho, 1e-9))));
    if (std::fabs(p.theta) > M_PI / 2.0 + theta_slack + 1e-9) ++a.containment_bad;
    if (p.rho > L * std::cos(std::min(std::fabs(p.theta), M_PI / 2.0)) +
                    params.delta * (1.0 + 1e-6))
      ++a.containment_bad;
  }

  // Per-branch structure: radius strictly up, deviation magnitude up, step
  // length capped, fictitious cost pinned across tracking moves.
  const auto& pts = out.trajectory.points;
  const bool check_drift = c.kind == CostKind::af_outage && out.contour_fallbacks == 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Waypoint& prev = pts[i - 1];
    const Waypoint& cur = pts[i];
    if (cur.phase == SearchPhase::axis || prev.phase != cur.phase ||
        prev.partition_k != cur.partition_k)
      continue;
    if (!(cur.polar.rho > prev.polar.rho - 1e-9)) ++a.rho_bad;
    if (std::fabs(cur.polar.theta) < std::fabs(prev.polar.theta) - 1e-12) ++a.theta_bad;
    if (distance(cur.pos, prev.pos) > params.delta * (1.0 + 1e-6)) ++a.chord_bad;
    if (check_drift && prev.segment > prev.partition_k && cur.segment > cur.partition_k &&
        cur.polar.theta != prev.polar.theta) {
      const FictitiousCost Fk(c, m, prev.partition_k, L, h);
      const double f0 = Fk.eval(prev.polar);
      const double f1 = Fk.eval(cur.polar);
      const double drift = std::fabs(f1 - f0) / std::max(std::fabs(f0), 1e-30);
      ++a.drift_checked;
      a.worst_drift = std::max(a.worst_drift, drift);
      if (drift > 5e-6) ++a.drift_bad;
    }
  }
}

}  // namespace

SegmentModel reference_model(int k) {
  if (k < 1 || k > 4) throw std::invalid_argument("reference_model: supports 1..4 segments");
  SegmentModel m;
  const SegmentParams all[] = {
      {2.14, -3.69, 2.6}, {3.03, -3.84, 4.4}, {3.60, -4.00, 5.0}, {4.10, -4.20, 5.5}};
  m.segments.assign(all, all + k);
  validate_model(m);
  return m;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const CheckResult& r : results)
    if (!r.passed) return false;
  return true;
}

std::vector<CheckResult> run_verification(std::uint64_t seed) {
  Checker ck;
  const Scenario scen = build_scenario(default_config());
  const CostParams af = scen.cost_params(CostKind::af_outage);
  const CostParams df = scen.cost_params(CostKind::df_rate);
  const Heights h = scen.heights;

  // --- Cost-shape conditions, with selectivity and a negative control.
  {
    const ConditionReport r = check_condition1(af);
    ck.add("af-cost-satisfies-condition-1", r.passed, r.detail);
  }
  {
    const ConditionReport r = check_condition2(df);
    ck.add("df-cost-satisfies-condition-2", r.passed, r.detail);
  }
  {
    const ConditionReport r1 = check_condition1(df);
    const ConditionReport r2 = check_condition2(af);
    ck.add("conditions-are-selective", !r1.passed && !r2.passed,
           "df must fail the curvature test and af the max-decomposition test");
  }
  {
    const Cost2d bad = [](double x, double y) { return 1.0 / (x + y); };
    const ConditionReport r1 = check_condition1_fn(bad);
    const ConditionReport r2 = check_condition2_fn(bad);
    ck.add("negative-control-fails-both", !r1.passed && !r2.passed,
           "1/(x+y) is neither curvature-qualified nor a max of slices");
  }

  // --- Polar/Euclidean identities.
  {
    Rng rng = Rng::for_trial(seed, 101);
    int bad = 0;
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const Point2 user{rng.uniform(0.0, 1000.0), rng.uniform(0.0, 1000.0)};
      Point2 bs{rng.uniform(0.0, 1000.0), rng.uniform(0.0, 1000.0)};
      if (distance(user, bs) < 1.0) bs.x += 10.0;
      const AxisFrame frame = make_frame(user, bs);
      const PolarCoord p{rng.uniform(0.0, 1.2 * frame.L), rng.uniform(-M_PI, M_PI)};
      const Point2 x = from_polar(frame, p);
      const double du = dist_to_user(x, user, h);
      const double du_p = dist_to_user_polar(p.rho, h);
      const double db = dist_to_bs(x, bs, h);
      const double db_p = dist_to_bs_polar(p.rho, p.theta, frame.L, h);
      const PolarCoord back = to_polar(frame, x);
      const double e1 = std::fabs(du - du_p) / std::max(du, 1.0);
      const double e2 = std::fabs(db - db_p) / std::max(db, 1.0);
      const double e3 = std::fabs(back.rho - p.rho) / std::max(p.rho, 1.0);
      worst = std::max({worst, e1, e2, e3});
      if (e1 > 1e-9 || e2 > 1e-9 || e3 > 1e-9) ++bad;
    }
    ck.add("polar-euclidean-identities", bad == 0,
           fmt("10000 samples, worst relative mismatch %.3g", worst));
  }

  // --- Analytic gradients against central finite differences.
  {
    Rng rng = Rng::for_trial(seed, 202);
    int bad = 0, checked = 0;
    double worst = 0.0;
    while (checked < 10000) {
      const int K = 2 + static_cast<int>(rng.below(3));
      const SegmentModel m = reference_model(K);
      const SegmentId k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
      const double L = rng.uniform(200.0, 1200.0);
      const CostParams& c = (rng.below(2) == 0) ? af : df;
      const FictitiousCost F(c, m, k, L, h);
      const PolarCoord p{rng.uniform(1.0, 0.98 * L), rng.uniform(-1.45, 1.45)};
      if (c.kind == CostKind::df_rate) {
        // Stay clear of the decision kink, where one-sided slopes differ.
        const double phi_b = -std::log2(1.0 + c.p_b * F.gain_bs_at(p.rho, p.theta));
        const double phi_u = -std::log2(1.0 + c.p_u * F.gain_user_at(p.rho));
        if (std::fabs(phi_b - phi_u) < 1e-4 * (std::fabs(phi_b) + std::fabs(phi_u))) continue;
      }
      ++checked;
      const CostGrad an = F.grad(p);
      const double f0 = F.eval(p);
      const double hr = 1e-5 * (p.rho + 10.0);
      const double ht = 1e-5;
      const double fd_r = (F.eval({p.rho + hr, p.theta}) - F.eval({p.rho - hr, p.theta})) /
                          (2.0 * hr);
      const double fd_t = (F.eval({p.rho, p.theta + ht}) - F.eval({p.rho, p.theta - ht})) /
                          (2.0 * ht);
      const double scale = std::fabs(an.d_rho) + std::fabs(an.d_theta);
      const double tol = 1e-5 * scale + 1e-9 * std::fabs(f0);
      const double err = std::max(std::fabs(fd_r - an.d_rho), std::fabs(fd_t - an.d_theta));
      worst = std::max(worst, err / std::max(tol, 1e-300));
      if (err > tol) ++bad;
    }
    ck.add("gradient-matches-finite-differences", bad == 0,
           fmt("10000 smooth points, worst error %.3g of tolerance", worst));
  }

  // --- Radial slope changes sign at most once along any ray.
  {
    Rng rng = Rng::for_trial(seed, 303);
    int bad = 0, slices = 0;
    while (slices < 1000) {
      const int K = 2 + static_cast<int>(rng.below(3));
      const SegmentModel m = reference_model(K);
      const SegmentId k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
      const double L = rng.uniform(200.0, 1200.0);
      const double theta = rng.uniform(-1.5, 1.5);
      const double reach = L * std::cos(theta);
      if (reach < 5.0) continue;
      ++slices;
      const CostParams& c = (rng.below(2) == 0) ? af : df;
      const FictitiousCost F(c, m, k, L, h);
      std::vector<double> g;
      for (double r = 1.0; r <= reach; r += 1.0) g.push_back(F.grad({r, theta}).d_rho);
      double scale = 0.0;
      for (double v : g) scale = std::max(scale, std::fabs(v));
      bool seen_nonneg = false;
      for (double v : g) {
        if (v >= 0.0) seen_nonneg = true;
        else if (seen_nonneg && v < -1e-9 * scale) {
          ++bad;
          break;
        }
      }
    }
    ck.add("radial-slope-single-sign-change", bad == 0,
           fmt("1000 ray slices, %g with a second sign flip", static_cast<double>(bad)));
  }

  // --- Full search runs: synthetic nested worlds plus the generated city.
  {
    Audit a;
    SearchParams params;
    params.delta = 5.0;
    Rng rng = Rng::for_trial(seed, 404);
    for (int i = 0; i < 12; ++i) {
      const int K = 2 + i % 3;
      const SegmentModel m = reference_model(K);
      const NestedBoundaryField field =
          random_nested_field(seed + 7000 + static_cast<std::uint64_t>(i), K, 90 + 30 * (i % 4),
                              30.0, 260.0);
      const Point2 user{rng.uniform(100.0, 900.0), rng.uniform(100.0, 900.0)};
      const double ang = rng.uniform(0.0, 2.0 * M_PI);
      const double L = rng.uniform(350.0, 800.0);
      const Point2 bs{user.x + L * std::cos(ang), user.y + L * std::sin(ang)};
      const NestedFieldOracle oracle(field, user);
      audit_run(a, i % 2 == 0 ? af : df, m, h, bs, user, oracle, params);
    }
    for (int i = 0; i < 4; ++i) {
      Rng urng = Rng::for_trial(seed, 500 + static_cast<std::uint64_t>(i));
      const Point2 user = random_street_point(scen.map, urng);
      const auto oracle = scen.oracle_for(user);
      audit_run(a, i % 2 == 0 ? df : af, scen.model, h, scen.bs, user, *oracle, params);
    }
    ck.add("trajectory-radius-monotone", a.rho_bad == 0,
           fmt("%g searches, %g non-increasing radius steps", a.searches, a.rho_bad));
    ck.add("trajectory-angle-monotone", a.theta_bad == 0,
           fmt("%g deviation-magnitude drops", static_cast<double>(a.theta_bad)));
    ck.add("trajectory-step-cap", a.chord_bad == 0,
           fmt("%g chords above delta", static_cast<double>(a.chord_bad)));
    ck.add("contour-level-drift", a.drift_bad == 0,
           fmt("%g tracked pairs, worst relative drift %.3g", a.drift_checked, a.worst_drift));
    ck.add("argmin-region-containment", a.containment_bad == 0,
           fmt("%g out-of-region minimizers", static_cast<double>(a.containment_bad)));
    ck.add("trajectory-length-bounds", a.bounds_bad == 0,
           fmt("%g runs above the length bounds", static_cast<double>(a.bounds_bad)));
  }

  return ck.results;
}

}  // namespace uavrelay
