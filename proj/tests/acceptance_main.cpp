/// End-to-end acceptance gate. Runs the full desk-scale evaluation and prints
/// one [PASS]/[FAIL] line per claim with the measured numbers; exits nonzero
/// when any claim fails.
///
/// Claims covered, in print order:
///   nested-grid-optimality          search minimum vs a 1 m exhaustive grid
///   street-throughput-vs-exhaustive per-user relayed rate parity on a city map
///   trajectory-length-bounds        every trajectory within its length bounds
///   throughput-gain-over-averaged-model   proposed vs probability-averaged baseline
///   outage-ratio-ordering           outage-scale ordering across schemes
///   cluster-radius-sweep            hotspot study: radius monotonicity + parity
///   property-suites                 built-in verification checks
///   los-statistics                  map LOS fraction and elevation profile

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "uavrelay/studies.hpp"
#include "uavrelay/verify.hpp"

using namespace uavrelay;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double idx = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(idx);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = idx - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) /
                   static_cast<double>(v.size()));
}

struct Claim {
  std::string name;
  bool ok = false;
  std::string detail;
};

/// Bound verdicts accumulated across every search the gate runs; the length
/// claim allows zero violations anywhere.
struct BoundsTally {
  long checked = 0;
  long violations = 0;

  void add(bool within) {
    ++checked;
    if (!within) ++violations;
  }
};

// ---------------------------------------------------------------------------
// Claim 1: on synthetic nested worlds the search minimum matches a 1 m
// exhaustive grid up to the per-world discretization allowance (the largest
// cost change between adjacent grid cells).
// ---------------------------------------------------------------------------
Claim check_nested_grid_optimality(BoundsTally& bounds) {
  const double t0 = now_seconds();
  const double L = 500.0;
  const Heights h{50.0, 45.0, 0.0};
  const Point2 user{0.0, 0.0};
  const Point2 bs{L, 0.0};
  const double p_eff = dbm_to_effective(33.0, -80.0);

  const int n_worlds = 100;
  int passed = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();
  int worst_world = -1;

  for (int w = 0; w < n_worlds; ++w) {
    const int k_segments = 2 + w % 3;
    CostParams cp;
    cp.kind = (w % 2 == 0) ? CostKind::df_rate : CostKind::af_outage;
    cp.p_u = p_eff;
    cp.p_b = p_eff;
    const SegmentModel model = reference_model(k_segments);
    const NestedBoundaryField field =
        random_nested_field(1000 + static_cast<std::uint64_t>(w), k_segments, 96, 50.0, 200.0);
    const NestedFieldOracle oracle(field, user);

    SearchParams sp;
    sp.delta = 1.0;
    const SearchOutcome out = shaded_contour_search(cp, model, h, bs, user, oracle, sp);
    bounds.add(trajectory_length_report(out, L, k_segments).within_bounds);

    // 1 m grid over the search region (the disk on the user->BS diameter),
    // tracking the global minimum and the largest adjacent-cell variation.
    const int nx = static_cast<int>(L);
    const int ny2 = nx / 2;
    const double r2 = (L / 2.0) * (L / 2.0);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> prev_row(static_cast<std::size_t>(nx) + 1, nan);
    std::vector<double> row(static_cast<std::size_t>(nx) + 1, nan);
    double grid_min = std::numeric_limits<double>::infinity();
    double allowance = 0.0;
    for (int iy = -ny2; iy <= ny2; ++iy) {
      for (int ix = 0; ix <= nx; ++ix) {
        const double x = ix, y = iy;
        const auto col = static_cast<std::size_t>(ix);
        if ((x - L / 2.0) * (x - L / 2.0) + y * y > r2) {
          row[col] = nan;
          continue;
        }
        const double f = true_cost(cp, model, h, bs, user, oracle, {x, y});
        row[col] = f;
        grid_min = std::min(grid_min, f);
        if (ix > 0 && std::isfinite(row[col - 1]))
          allowance = std::max(allowance, std::fabs(f - row[col - 1]));
        if (std::isfinite(prev_row[col]))
          allowance = std::max(allowance, std::fabs(f - prev_row[col]));
      }
      std::swap(prev_row, row);
    }

    const double margin = out.record.f_min - (grid_min + allowance);
    const double scale = std::max({std::fabs(grid_min), allowance, 1e-300});
    const double rel = margin / scale;
    if (rel > worst_margin) {
      worst_margin = rel;
      worst_world = w;
    }
    if (out.record.f_min <= grid_min + allowance + 1e-12 * scale) ++passed;
  }

  const double dt = now_seconds() - t0;
  Claim c;
  c.name = "nested-grid-optimality";
  c.ok = passed == n_worlds && dt < 60.0;
  c.detail = strf("%d/%d worlds at or below the 1 m grid minimum plus its cell-variation "
                  "allowance (worst relative margin %.2e in world %d; %.1f s, limit 60 s)",
                  passed, n_worlds, worst_margin, worst_world, dt);
  return c;
}

// ---------------------------------------------------------------------------
// Claims 2, 4, 5 share the 200-user single-user study on the generated city.
// ---------------------------------------------------------------------------
struct StudyClaims {
  Claim parity;    // street-throughput-vs-exhaustive
  Claim gain;      // throughput-gain-over-averaged-model
  Claim ordering;  // outage-ratio-ordering
  LosProbabilityTable table;
};

StudyClaims check_single_user_study(const Scenario& scen, BoundsTally& bounds) {
  const double t0 = now_seconds();
  Rng table_rng = Rng::for_trial(scen.seed, 0x7AB1Eu);
  StudyClaims out;
  out.table = build_los_table(scen.map, scen.heights, scen.lostable_users,
                              scen.lostable_samples, scen.lostable_bins, table_rng);
  const SingleUserStudy study = run_single_user_study(scen, out.table, 1);
  const double dt = now_seconds() - t0;

  const auto s = [](Scheme x) { return static_cast<std::size_t>(x); };
  std::vector<double> gaps;
  gaps.reserve(study.trials.size());
  for (const UserTrial& t : study.trials) {
    gaps.push_back(std::max(
        0.0, t.schemes[s(Scheme::exhaustive)].df_throughput -
                 t.schemes[s(Scheme::proposed)].df_throughput));
    bounds.add(t.schemes[s(Scheme::proposed)].df_bounds_ok);
    bounds.add(t.schemes[s(Scheme::proposed)].af_bounds_ok);
  }
  const double p95 = percentile(gaps, 0.95);
  out.parity.name = "street-throughput-vs-exhaustive";
  out.parity.ok = study.trials.size() == 200 && p95 <= 0.05 && dt < 300.0;
  out.parity.detail =
      strf("%zu street users: 95th-percentile shortfall vs the 5 m grid %.4f bps/Hz "
           "(limit 0.05; %.1f s, limit 300 s)",
           study.trials.size(), p95, dt);

  const double prop_tp = study.aggregate[s(Scheme::proposed)].mean_throughput;
  const double prob_tp = study.aggregate[s(Scheme::probabilistic)].mean_throughput;
  out.gain.name = "throughput-gain-over-averaged-model";
  out.gain.ok = prob_tp > 0.0 && prop_tp >= 1.5 * prob_tp;
  out.gain.detail = strf("mean throughput %.3f vs %.3f bps/Hz: %.2fx the averaged-model "
                         "baseline (needs >= 1.5x)",
                         prop_tp, prob_tp, prop_tp / prob_tp);

  const double r_prop = study.aggregate[s(Scheme::proposed)].mean_ratio;
  const double r_simple = study.aggregate[s(Scheme::simple)].mean_ratio;
  const double r_exh = study.aggregate[s(Scheme::exhaustive)].mean_ratio;
  out.ordering.name = "outage-ratio-ordering";
  out.ordering.ok = r_prop <= r_simple + 1e-12 && r_simple <= 1.0 + 1e-12 &&
                    r_prop <= 1.05 * r_exh;
  out.ordering.detail =
      strf("mean outage scale: proposed %.4f <= simple %.4f <= 1, and within 1.05x of "
           "exhaustive %.4f",
           r_prop, r_simple, r_exh);
  return out;
}

// ---------------------------------------------------------------------------
// Claim 6: hotspot clusters. Radius 0 collapses to the single-user search;
// mean throughput does not significantly increase with radius; the proposed
// placement beats the averaged-model baseline at every radius.
// ---------------------------------------------------------------------------
Claim check_cluster_sweep(const Scenario& scen, const LosProbabilityTable& table,
                          BoundsTally& bounds) {
  const double t0 = now_seconds();
  const ClusterStudy study = run_cluster_study(scen, table, 1);
  const double dt = now_seconds() - t0;

  Claim c;
  c.name = "cluster-radius-sweep";
  std::string why;

  for (const ClusterTrial& t : study.trials) bounds.add(t.bounds_ok);

  if (study.clusters < 50) why += strf(" only %d clusters;", study.clusters);
  if (study.by_radius.empty() || study.by_radius.front().radius != 0.0) {
    why += " no zero-radius sweep;";
  } else if (study.by_radius.front().max_center_gap > 1e-9) {
    why += strf(" zero-radius gap %.2e vs the single-user search;",
                study.by_radius.front().max_center_gap);
  }

  const auto n_r = study.by_radius.size();
  const auto n_c = static_cast<std::size_t>(study.clusters);
  double worst_trend = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < n_r; ++j) {
    std::vector<double> diff(n_c);
    for (std::size_t i = 0; i < n_c; ++i) {
      diff[i] = study.trials[(j + 1) * n_c + i].proposed_rate -
                study.trials[j * n_c + i].proposed_rate;
    }
    const double m = mean_of(diff), se = stderr_of(diff);
    worst_trend = std::max(worst_trend, m - se);
    if (m > se) {
      why += strf(" rate rose from r=%.0f to r=%.0f by %.4f (se %.4f);",
                  study.by_radius[j].radius, study.by_radius[j + 1].radius, m, se);
    }
  }

  double min_lead = std::numeric_limits<double>::infinity();
  for (const ClusterRadiusSummary& r : study.by_radius) {
    min_lead = std::min(min_lead, r.proposed_mean - r.probabilistic_mean);
    if (r.proposed_mean < r.probabilistic_mean) {
      why += strf(" baseline ahead at r=%.0f (%.4f vs %.4f);", r.radius,
                  r.proposed_mean, r.probabilistic_mean);
    }
  }

  c.ok = why.empty();
  c.detail = strf("%d clusters x %zu radii: zero-radius gap %.1e, paired trend "
                  "mean-se <= %.4f, min lead over baseline %.4f bps/Hz (%.1f s)%s",
                  study.clusters, n_r,
                  study.by_radius.empty() ? 0.0 : study.by_radius.front().max_center_gap,
                  worst_trend, min_lead, dt, why.c_str());
  return c;
}

Claim check_property_suites(std::uint64_t seed) {
  const double t0 = now_seconds();
  const std::vector<CheckResult> results = run_verification(seed);
  const double dt = now_seconds() - t0;
  int ok = 0;
  std::string failed;
  for (const CheckResult& r : results) {
    if (r.passed) {
      ++ok;
    } else {
      failed += strf(" %s: %s;", r.name.c_str(), r.detail.c_str());
    }
  }
  Claim c;
  c.name = "property-suites";
  c.ok = all_passed(results) && !results.empty();
  c.detail = strf("%d/%zu verification checks passed (%.2f s)%s", ok, results.size(), dt,
                  failed.c_str());
  return c;
}

Claim check_los_statistics(const Scenario& scen, const LosProbabilityTable& table) {
  Rng rng = Rng::for_trial(scen.seed, 0x10Fu);
  const int n = 2000;
  int los = 0;
  for (int i = 0; i < n; ++i) {
    const Point2 u = random_street_point(scen.map, rng);
    los += blocker_count(scen.map, u, scen.heights.h_user, scen.bs, scen.heights.h_bs) == 0;
  }
  const double frac = static_cast<double>(los) / n;
  const double top = table.p_los.back();
  Claim c;
  c.name = "los-statistics";
  c.ok = frac >= 0.15 && frac <= 0.30 && top >= 0.95;
  c.detail = strf("street-user LOS fraction to the base station %.3f (needs [0.15, 0.30]); "
                  "LOS probability in the top elevation bin %.3f (needs >= 0.95)",
                  frac, top);
  return c;
}

}  // namespace

int main() {
  const double t_start = now_seconds();
  std::vector<Claim> claims;
  BoundsTally bounds;

  const Scenario scen = build_scenario(default_config());

  claims.push_back(check_nested_grid_optimality(bounds));
  StudyClaims study = check_single_user_study(scen, bounds);
  Claim cluster = check_cluster_sweep(scen, study.table, bounds);

  Claim length;
  length.name = "trajectory-length-bounds";
  length.ok = bounds.checked > 0 && bounds.violations == 0;
  length.detail = strf("%ld/%ld trajectories within the total and per-branch bounds "
                       "(zero violations allowed)",
                       bounds.checked - bounds.violations, bounds.checked);

  claims.push_back(std::move(study.parity));
  claims.push_back(std::move(length));
  claims.push_back(std::move(study.gain));
  claims.push_back(std::move(study.ordering));
  claims.push_back(std::move(cluster));
  claims.push_back(check_property_suites(scen.seed));
  claims.push_back(check_los_statistics(scen, study.table));

  bool all_ok = true;
  for (const Claim& c : claims) {
    all_ok = all_ok && c.ok;
    std::printf("[%s] %s — %s\n", c.ok ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
  }
  std::printf("%s: %zu claims, %.1f s total\n", all_ok ? "ACCEPTED" : "REJECTED",
              claims.size(), now_seconds() - t_start);
  return all_ok ? 0 : 1;
}
