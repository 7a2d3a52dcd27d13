#include "uavrelay/studies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "uavrelay/svg.hpp"

namespace uavrelay {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) /
         std::sqrt(static_cast<double>(v.size()));
}

double percentile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double idx = std::clamp(p, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(idx));
  const double w = idx - static_cast<double>(lo);
  return v[lo] * (1.0 - w) + v[hi] * w;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  return out;
}

/// Throughput of the relayed link at x, scored with the true link degree.
double scored_throughput(const Scenario& scen, const CostParams& df, const Point2& user,
                         const SegmentOracle& oracle, const Point2& x) {
  const double g_u = gain_user(x, user, oracle.segment(x), scen.model, scen.heights);
  const double g_b = gain_bs(x, scen.bs, scen.model, scen.heights);
  return df_throughput(df, g_u, g_b);
}

/// Outage scale at x relative to (and floored by) direct transmission.
double scored_ratio(const Scenario& scen, const CostParams& af, const Point2& user,
                    const SegmentOracle& oracle, const DirectLink& direct, const Point2& x) {
  const double f = true_cost(af, scen.model, scen.heights, scen.bs, user, oracle, x);
  return std::min(f, direct.outage_scale) / direct.outage_scale;
}

}  // namespace

void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
  if (n <= 0) return;
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n) break;
      try {
        body(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::proposed: return "proposed";
    case Scheme::probabilistic: return "probabilistic";
    case Scheme::simple: return "simple";
    case Scheme::exhaustive: return "exhaustive";
  }
  return "?";
}

SingleUserStudy run_single_user_study(const Scenario& scen, const LosProbabilityTable& table,
                                      int jobs) {
  if (scen.world != WorldKind::map)
    throw std::invalid_argument("single-user study requires a map world");
  const CostParams df = scen.cost_params(CostKind::df_rate);
  const CostParams af = scen.cost_params(CostKind::af_outage);
  const int K = scen.model.num_segments();

  SingleUserStudy study;
  study.trials.resize(static_cast<std::size_t>(scen.n_users));

  parallel_for(scen.n_users, jobs, [&](int i) {
    UserTrial& t = study.trials[static_cast<std::size_t>(i)];
    Rng rng = Rng::for_trial(scen.seed, static_cast<std::uint64_t>(i));
    t.user = (scen.has_user && scen.n_users == 1) ? scen.user : random_street_point(scen.map, rng);
    t.link_distance = distance(t.user, scen.bs);
    t.direct = direct_link_eval(df, scen.model, scen.heights, scen.map, scen.bs, t.user);
    const auto oracle = scen.oracle_for(t.user);

    auto& out = t.schemes;
    for (const CostParams& c : {df, af}) {
      const bool is_df = c.kind == CostKind::df_rate;
      const SearchOutcome full =
          shaded_contour_search(c, scen.model, scen.heights, scen.bs, t.user, *oracle, scen.search);
      const LengthReport lr = trajectory_length_report(full, t.link_distance, K);
      const PlacementResult prob =
          probabilistic_placement(c, scen.model, scen.heights, scen.bs, t.user, *oracle, table,
                                  scen.search.delta, scen.prob_3d);
      const PlacementResult simple = simple_search_placement(c, scen.model, scen.heights, scen.bs,
                                                             t.user, *oracle, scen.search);
      const PlacementResult exh = exhaustive_placement(c, scen.model, scen.heights, scen.bs,
                                                       t.user, *oracle, scen.exhaustive_spacing);
      const Point2 pos[kNumSchemes] = {full.record.argmin, prob.position, simple.position,
                                       exh.position};
      const double len[kNumSchemes] = {lr.total, 0.0, simple.trajectory_length, 0.0};
      for (int s = 0; s < kNumSchemes; ++s) {
        if (is_df) {
          out[s].df_position = pos[s];
          out[s].df_length = len[s];
          out[s].df_bounds_ok = (s != 0) || lr.within_bounds;
          out[s].df_throughput = scored_throughput(scen, df, t.user, *oracle, pos[s]);
        } else {
          out[s].af_position = pos[s];
          out[s].af_length = len[s];
          out[s].af_bounds_ok = (s != 0) || lr.within_bounds;
          out[s].af_ratio = scored_ratio(scen, af, t.user, *oracle, t.direct, pos[s]);
        }
      }
    }
  });

  // Cell edge / center categories from the direct-transmission throughput.
  std::vector<double> direct_tp;
  direct_tp.reserve(study.trials.size());
  for (const UserTrial& t : study.trials) direct_tp.push_back(t.direct.throughput);
  study.edge_cut = percentile(direct_tp, 0.20);
  study.center_cut = percentile(direct_tp, 0.80);
  study.direct_mean_throughput = mean_of(direct_tp);
  for (UserTrial& t : study.trials) {
    t.category = t.direct.throughput <= study.edge_cut   ? 0
                 : t.direct.throughput >= study.center_cut ? 2
                                                           : 1;
  }

  for (int s = 0; s < kNumSchemes; ++s) {
    std::vector<double> tp, tp_e, tp_c, ra, ra_e, ra_c;
    for (const UserTrial& t : study.trials) {
      tp.push_back(t.schemes[s].df_throughput);
      ra.push_back(t.schemes[s].af_ratio);
      if (t.category == 0) {
        tp_e.push_back(t.schemes[s].df_throughput);
        ra_e.push_back(t.schemes[s].af_ratio);
      } else if (t.category == 2) {
        tp_c.push_back(t.schemes[s].df_throughput);
        ra_c.push_back(t.schemes[s].af_ratio);
      }
    }
    study.aggregate[s] = {mean_of(tp), mean_of(tp_e), mean_of(tp_c),
                          mean_of(ra), mean_of(ra_e), mean_of(ra_c)};
  }
  return study;
}

void write_single_user_outputs(const SingleUserStudy& study, const Scenario& scen,
                               const std::string& out_dir) {
  {
    std::ofstream out = open_out(out_dir, "results.csv");
    out << "trial,user_x_m,user_y_m,link_m,category,direct_bpshz,scheme,"
           "df_x_m,df_y_m,df_throughput_bpshz,df_length_m,df_bounds_ok,"
           "af_x_m,af_y_m,af_outage_ratio,af_length_m,af_bounds_ok\n";
    for (std::size_t i = 0; i < study.trials.size(); ++i) {
      const UserTrial& t = study.trials[i];
      for (int s = 0; s < kNumSchemes; ++s) {
        const SchemeOutcome& o = t.schemes[s];
        out << i << ',' << num(t.user.x) << ',' << num(t.user.y) << ',' << num(t.link_distance)
            << ',' << t.category << ',' << num(t.direct.throughput) << ','
            << scheme_name(static_cast<Scheme>(s)) << ',' << num(o.df_position.x) << ','
            << num(o.df_position.y) << ',' << num(o.df_throughput) << ',' << num(o.df_length)
            << ',' << (o.df_bounds_ok ? 1 : 0) << ',' << num(o.af_position.x) << ','
            << num(o.af_position.y) << ',' << num(o.af_ratio) << ',' << num(o.af_length) << ','
            << (o.af_bounds_ok ? 1 : 0) << '\n';
      }
    }
  }
  {
    std::ofstream out = open_out(out_dir, "cdf.csv");
    out << "scheme,throughput_bpshz,cdf\n";
    const auto emit = [&](const std::string& name, std::vector<double> v) {
      std::sort(v.begin(), v.end());
      for (std::size_t i = 0; i < v.size(); ++i)
        out << name << ',' << num(v[i]) << ','
            << num(static_cast<double>(i + 1) / static_cast<double>(v.size())) << '\n';
    };
    for (int s = 0; s < kNumSchemes; ++s) {
      std::vector<double> v;
      for (const UserTrial& t : study.trials) v.push_back(t.schemes[s].df_throughput);
      emit(scheme_name(static_cast<Scheme>(s)), std::move(v));
    }
    std::vector<double> v;
    for (const UserTrial& t : study.trials) v.push_back(t.direct.throughput);
    emit("direct", std::move(v));
  }
  {
    std::ofstream out = open_out(out_dir, "bars.csv");
    out << "scheme,category,mean_throughput_bpshz,mean_outage_ratio,count\n";
    const char* cat_names[] = {"edge", "mid", "center", "all"};
    for (int s = 0; s < kNumSchemes; ++s) {
      for (int cat = 0; cat < 4; ++cat) {
        std::vector<double> tp, ra;
        for (const UserTrial& t : study.trials) {
          if (cat != 3 && t.category != cat) continue;
          tp.push_back(t.schemes[s].df_throughput);
          ra.push_back(t.schemes[s].af_ratio);
        }
        out << scheme_name(static_cast<Scheme>(s)) << ',' << cat_names[cat] << ','
            << num(mean_of(tp)) << ',' << num(mean_of(ra)) << ',' << tp.size() << '\n';
      }
    }
  }
  {
    nlohmann::json j;
    j["n_users"] = study.trials.size();
    j["seed"] = scen.seed;
    j["direct_mean_throughput_bpshz"] = study.direct_mean_throughput;
    j["edge_cut_bpshz"] = study.edge_cut;
    j["center_cut_bpshz"] = study.center_cut;
    bool bounds_ok = true;
    for (int s = 0; s < kNumSchemes; ++s) {
      nlohmann::json js;
      const SchemeAggregate& a = study.aggregate[s];
      js["mean_throughput_bpshz"] = a.mean_throughput;
      js["mean_throughput_edge"] = a.mean_throughput_edge;
      js["mean_throughput_center"] = a.mean_throughput_center;
      js["mean_outage_ratio"] = a.mean_ratio;
      js["mean_outage_ratio_edge"] = a.mean_ratio_edge;
      js["mean_outage_ratio_center"] = a.mean_ratio_center;
      j["schemes"][scheme_name(static_cast<Scheme>(s))] = js;
    }
    for (const UserTrial& t : study.trials)
      bounds_ok = bounds_ok && t.schemes[0].df_bounds_ok && t.schemes[0].af_bounds_ok;
    j["length_bounds_all_ok"] = bounds_ok;
    const double prob_tp = study.aggregate[static_cast<int>(Scheme::probabilistic)].mean_throughput;
    if (prob_tp > 0.0)
      j["proposed_over_probabilistic_throughput"] =
          study.aggregate[static_cast<int>(Scheme::proposed)].mean_throughput / prob_tp;
    std::vector<double> gaps;
    for (const UserTrial& t : study.trials)
      gaps.push_back(std::fabs(t.schemes[static_cast<int>(Scheme::proposed)].df_throughput -
                               t.schemes[static_cast<int>(Scheme::exhaustive)].df_throughput));
    j["p95_throughput_gap_vs_exhaustive_bpshz"] = percentile(gaps, 0.95);
    std::ofstream out = open_out(out_dir, "summary.json");
    out << j.dump(2) << '\n';
  }
}

ClusterStudy run_cluster_study(const Scenario& scen, const LosProbabilityTable& table, int jobs) {
  if (scen.world != WorldKind::map)
    throw std::invalid_argument("cluster study requires a map world");
  const CostParams df = scen.cost_params(CostKind::df_rate);
  const int K = scen.model.num_segments();
  const int n_c = scen.n_clusters;
  const int n_r = static_cast<int>(scen.cluster_radii.size());
  if (n_r == 0) throw std::invalid_argument("cluster study requires at least one radius");

  // Obstructed hotspot centers: street points whose direct BS link is
  // blocked, reused across every radius so the sweep is paired.
  std::vector<Point2> centers;
  {
    Rng rng = Rng::for_trial(scen.seed, 0xC1u);
    int guard = 0;
    while (static_cast<int>(centers.size()) < n_c) {
      if (++guard > 1000000)
        throw std::runtime_error("cluster study: cannot find enough obstructed centers");
      const Point2 p = random_street_point(scen.map, rng);
      if (los_blocked(scen.map, p, scen.heights.h_user, scen.bs, scen.heights.h_bs))
        centers.push_back(p);
    }
  }

  ClusterStudy study;
  study.clusters = n_c;
  study.trials.resize(static_cast<std::size_t>(n_r * n_c));

  parallel_for(n_r * n_c, jobs, [&](int idx) {
    const int r_i = idx / n_c;
    const int c_i = idx % n_c;
    ClusterTrial& t = study.trials[static_cast<std::size_t>(idx)];
    t.center = centers[static_cast<std::size_t>(c_i)];
    t.radius = scen.cluster_radii[static_cast<std::size_t>(r_i)];
    Rng rng = Rng::for_trial(scen.seed, 0x10000u + static_cast<std::uint64_t>(idx));

    // Cluster members: street points inside the hotspot disk.
    std::vector<Point2> users;
    users.reserve(static_cast<std::size_t>(scen.cluster_users));
    for (int u = 0; u < scen.cluster_users; ++u) {
      if (t.radius <= 0.0) {
        users.push_back(t.center);
        continue;
      }
      Point2 p = t.center;
      for (int attempt = 0; attempt < 10000; ++attempt) {
        const double ang = rng.uniform(0.0, 2.0 * M_PI);
        const double rad = t.radius * std::sqrt(rng.uniform01());
        const Point2 cand{t.center.x + rad * std::cos(ang), t.center.y + rad * std::sin(ang)};
        if (scen.map.on_street(cand)) {
          p = cand;
          break;
        }
      }
      users.push_back(p);
    }

    std::vector<std::unique_ptr<SegmentOracle>> owned;
    std::vector<const SegmentOracle*> members;
    for (const Point2& u : users) {
      owned.push_back(scen.oracle_for(u));
      members.push_back(owned.back().get());
    }

    // Proposed: search against the virtual stand-in user at the center, the
    // link degree decided by majority vote over the members.
    const MajorityVoteOracle vote(members);
    const SearchOutcome out = shaded_contour_search(df, scen.model, scen.heights, scen.bs,
                                                    t.center, vote, scen.search);
    t.proposed_rate = sum_rate(df, scen.model, scen.heights, scen.bs, users, members,
                               out.record.argmin);
    const LengthReport lr = trajectory_length_report(out, distance(t.center, scen.bs), K);
    t.trajectory_length = lr.total;
    t.bounds_ok = lr.within_bounds;

    // Reference: the plain single-user search anchored at the center.
    const auto center_oracle = scen.oracle_for(t.center);
    const SearchOutcome cen = shaded_contour_search(df, scen.model, scen.heights, scen.bs,
                                                    t.center, *center_oracle, scen.search);
    t.center_rate = sum_rate(df, scen.model, scen.heights, scen.bs, users, members,
                             cen.record.argmin);

    // Baseline: grid argmin of the mean probability-averaged cost.
    const PlacementResult prob = probabilistic_placement_multi(
        df, scen.model, scen.heights, scen.bs, t.center, users, table, scen.search.delta,
        scen.prob_3d);
    t.probabilistic_rate = sum_rate(df, scen.model, scen.heights, scen.bs, users, members,
                                    prob.position);
  });

  for (int r_i = 0; r_i < n_r; ++r_i) {
    ClusterRadiusSummary s;
    s.radius = scen.cluster_radii[static_cast<std::size_t>(r_i)];
    std::vector<double> prop, prob;
    for (int c_i = 0; c_i < n_c; ++c_i) {
      const ClusterTrial& t = study.trials[static_cast<std::size_t>(r_i * n_c + c_i)];
      prop.push_back(t.proposed_rate);
      prob.push_back(t.probabilistic_rate);
      s.max_center_gap = std::max(s.max_center_gap, std::fabs(t.proposed_rate - t.center_rate));
    }
    s.proposed_mean = mean_of(prop);
    s.proposed_se = stderr_of(prop);
    s.probabilistic_mean = mean_of(prob);
    s.probabilistic_se = stderr_of(prob);
    study.by_radius.push_back(s);
  }
  return study;
}

void write_cluster_outputs(const ClusterStudy& study, const std::string& out_dir) {
  {
    std::ofstream out = open_out(out_dir, "clusters.csv");
    out << "radius_m,cluster,center_x_m,center_y_m,proposed_bpshz,probabilistic_bpshz,"
           "center_anchor_bpshz,trajectory_m,bounds_ok\n";
    const int n_c = study.clusters;
    for (std::size_t i = 0; i < study.trials.size(); ++i) {
      const ClusterTrial& t = study.trials[i];
      out << num(t.radius) << ',' << (n_c > 0 ? static_cast<int>(i) % n_c : 0) << ','
          << num(t.center.x) << ',' << num(t.center.y) << ',' << num(t.proposed_rate) << ','
          << num(t.probabilistic_rate) << ',' << num(t.center_rate) << ','
          << num(t.trajectory_length) << ',' << (t.bounds_ok ? 1 : 0) << '\n';
    }
  }
  {
    nlohmann::json j;
    j["clusters"] = study.clusters;
    for (const ClusterRadiusSummary& s : study.by_radius) {
      nlohmann::json js;
      js["radius_m"] = s.radius;
      js["proposed_mean_bpshz"] = s.proposed_mean;
      js["proposed_se"] = s.proposed_se;
      js["probabilistic_mean_bpshz"] = s.probabilistic_mean;
      js["probabilistic_se"] = s.probabilistic_se;
      js["max_center_gap_bpshz"] = s.max_center_gap;
      j["by_radius"].push_back(js);
    }
    std::ofstream out = open_out(out_dir, "cluster_summary.json");
    out << j.dump(2) << '\n';
  }
}

void emit_power_capacity_maps(const Scenario& scen, const Point2& user, const std::string& out_dir,
                              const Trajectory* overlay) {
  const auto oracle = scen.oracle_for(user);
  const CostParams df = scen.cost_params(CostKind::df_rate);
  const double res = scen.map_resolution;
  const int n = std::max(1, static_cast<int>(std::ceil(scen.extent / res)));

  std::vector<double> power(static_cast<std::size_t>(n) * n);
  std::vector<double> capacity(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Point2 x{(i + 0.5) * res, (j + 0.5) * res};
      const SegmentId k = oracle->segment(x);
      const double d_u = dist_to_user(x, user, scen.heights);
      power[static_cast<std::size_t>(j) * n + i] =
          scen.p_u_dbm + segment_gain_db(scen.model, k, d_u);
      const double g_u = gain_user(x, user, k, scen.model, scen.heights);
      const double g_b = gain_bs(x, scen.bs, scen.model, scen.heights);
      capacity[static_cast<std::size_t>(j) * n + i] = df_throughput(df, g_u, g_b);
    }
  }

  const auto write_field = [&](const std::string& base, const std::vector<double>& field) {
    std::ofstream out = open_out(out_dir, base + ".csv");
    out << "x_m,y_m,value\n";
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        out << num((i + 0.5) * res) << ',' << num((j + 0.5) * res) << ','
            << num(field[static_cast<std::size_t>(j) * n + i]) << '\n';

    double lo = field[0], hi = field[0];
    for (double v : field) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    SvgCanvas svg(0.0, 0.0, scen.extent, scen.extent, 800);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        svg.rect(i * res, j * res, res, res,
                 heat_color((field[static_cast<std::size_t>(j) * n + i] - lo) / span));
    if (scen.world == WorldKind::map)
      for (const Building& b : scen.map.buildings)
        svg.rect(b.x_min, b.y_min, b.x_max - b.x_min, b.y_max - b.y_min, "#202020", 0.35);
    if (overlay) {
      std::vector<Point2> pts;
      for (const Waypoint& w : overlay->points) pts.push_back(w.pos);
      svg.polyline(pts, "#00c040", 2.0);
    }
    svg.circle(user, 5.0, "#ffffff");
    svg.circle(scen.bs, 5.0, "#000000");
    svg.text({10.0, scen.extent - 20.0}, base + " [" + num(lo) + ", " + num(hi) + "]", 14,
             "#ffffff");
    svg.save(out_dir + "/" + base + ".svg");
  };
  write_field("power_map", power);
  write_field("capacity_map", capacity);
}

}  // namespace uavrelay
