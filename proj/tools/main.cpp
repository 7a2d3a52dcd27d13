#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "uavrelay/studies.hpp"
#include "uavrelay/svg.hpp"
#include "uavrelay/verify.hpp"

namespace {

using namespace uavrelay;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const char* phase_name(SearchPhase p) {
  switch (p) {
    case SearchPhase::axis: return "axis";
    case SearchPhase::right: return "right";
    case SearchPhase::left: return "left";
  }
  return "?";
}

const char* reason_name(StopReason r) {
  switch (r) {
    case StopReason::region_boundary: return "region_boundary";
    case StopReason::rising_radial_slope: return "rising_radial_slope";
    case StopReason::max_steps: return "max_steps";
  }
  return "?";
}

Scenario load_scenario(const std::string& config_path, bool seed_set, std::uint64_t seed) {
  const Config cfg = config_path.empty() ? default_config() : Config::from_file(config_path);
  Scenario s = build_scenario(cfg);
  if (seed_set) s.seed = seed;
  return s;
}

LosProbabilityTable study_table(const Scenario& scen) {
  Rng rng = Rng::for_trial(scen.seed, 0x7AB1Eu);
  return build_los_table(scen.map, scen.heights, scen.lostable_users, scen.lostable_samples,
                         scen.lostable_bins, rng);
}

Point2 pick_user(const Scenario& scen) {
  if (scen.has_user) return scen.user;
  if (scen.world == WorldKind::nested) return {0.0, 0.0};
  Rng rng = Rng::for_trial(scen.seed, 0x05E7u);
  return random_street_point(scen.map, rng);
}

void render_world(SvgCanvas& svg, const Scenario& scen) {
  if (scen.world != WorldKind::map) return;
  for (const Building& b : scen.map.buildings) {
    const double t = (b.height - 5.0) / 40.0;
    const int shade = 200 - static_cast<int>(t * 140.0);
    char color[8];
    std::snprintf(color, sizeof color, "#%02x%02x%02x", shade, shade, shade);
    svg.rect(b.x_min, b.y_min, b.x_max - b.x_min, b.y_max - b.y_min, color);
  }
}

double street_los_fraction(const UrbanMap& map, const Point2& bs, const Heights& h,
                           std::uint64_t seed, int n) {
  Rng rng = Rng::for_trial(seed, 0x10Fu);
  int los = 0;
  for (int i = 0; i < n; ++i) {
    const Point2 u = random_street_point(map, rng);
    if (!los_blocked(map, u, h.h_user, bs, h.h_bs)) ++los;
  }
  return static_cast<double>(los) / n;
}

int cmd_map(const Scenario& scen, const std::string& out_dir) {
  if (scen.world != WorldKind::map) {
    std::cerr << "error: the map subcommand needs a map world" << std::endl;
    return 1;
  }
  std::filesystem::create_directories(out_dir);
  save_map(scen.map, out_dir + "/map.txt");
  SvgCanvas svg(0.0, 0.0, scen.extent, scen.extent, 800);
  svg.rect(0.0, 0.0, scen.extent, scen.extent, "#f4f0e8");
  render_world(svg, scen);
  svg.circle(scen.bs, 6.0, "#d03020");
  svg.save(out_dir + "/map.svg");
  const double frac = street_los_fraction(scen.map, scen.bs, scen.heights, scen.seed, 2000);
  std::cout << "map: buildings=" << scen.map.buildings.size()
            << " max_height=" << num(scen.map.max_height()) << " street_los_fraction=" << num(frac)
            << "\nwrote " << out_dir << "/map.txt and map.svg" << std::endl;
  return 0;
}

int cmd_lostable(const Scenario& scen, const std::string& out_dir) {
  const LosProbabilityTable t = study_table(scen);
  std::filesystem::create_directories(out_dir);
  save_los_table(t, out_dir + "/lostable.csv");
  std::cout << "lostable: bins=" << t.bins() << " p_top_bin=" << num(t.p_los.back()) << "\nwrote "
            << out_dir << "/lostable.csv" << std::endl;
  return 0;
}

int cmd_search(const Scenario& scen, const std::string& out_dir) {
  const Point2 user = pick_user(scen);
  const auto oracle = scen.oracle_for(user);
  const SearchOutcome out = shaded_contour_search(scen.cost_params(), scen.model, scen.heights,
                                                  scen.bs, user, *oracle, scen.search);
  const double L = distance(user, scen.bs);
  const LengthReport rep = trajectory_length_report(out, L, scen.model.num_segments());

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream csv(out_dir + "/trajectory.csv", std::ios::binary);
    csv << "step,x,y,rho,theta_rad,segment,phase,partition_k,cost,f_min_so_far\n";
    for (std::size_t i = 0; i < out.trajectory.points.size(); ++i) {
      const Waypoint& w = out.trajectory.points[i];
      csv << i << ',' << num(w.pos.x) << ',' << num(w.pos.y) << ',' << num(w.polar.rho) << ','
          << num(w.polar.theta) << ',' << w.segment << ',' << phase_name(w.phase) << ','
          << w.partition_k << ',' << num(w.cost) << ',' << num(w.f_min_so_far) << '\n';
    }
  }
  {
    nlohmann::json j;
    j["argmin"] = {{"x", out.record.argmin.x},
                   {"y", out.record.argmin.y},
                   {"rho", out.record.argmin_polar.rho},
                   {"theta_rad", out.record.argmin_polar.theta}};
    j["f_min"] = out.record.f_min;
    j["cost_kind"] = scen.cost_kind == CostKind::af_outage ? "af" : "df";
    j["link_m"] = L;
    for (const auto& r : out.axis_rho0)
      j["axis_rho0"].push_back(r ? nlohmann::json(*r) : nlohmann::json());
    for (const BranchReport& br : out.branches)
      j["branches"].push_back({{"partition_k", br.partition_k},
                               {"side", phase_name(br.side)},
                               {"length_m", br.length},
                               {"steps", br.steps},
                               {"stop", reason_name(br.reason)}});
    j["total_length_m"] = rep.total;
    j["length_bound_m"] = rep.total_bound;
    j["branch_bound_m"] = rep.branch_bound;
    j["within_bounds"] = rep.within_bounds;
    j["contour_fallbacks"] = out.contour_fallbacks;
    j["waypoints"] = out.trajectory.points.size();
    std::ofstream js(out_dir + "/result.json", std::ios::binary);
    js << j.dump(2) << '\n';
  }
  {
    double lo_x = std::min(user.x, scen.bs.x), hi_x = std::max(user.x, scen.bs.x);
    double lo_y = std::min(user.y, scen.bs.y), hi_y = std::max(user.y, scen.bs.y);
    for (const Waypoint& w : out.trajectory.points) {
      lo_x = std::min(lo_x, w.pos.x), hi_x = std::max(hi_x, w.pos.x);
      lo_y = std::min(lo_y, w.pos.y), hi_y = std::max(hi_y, w.pos.y);
    }
    const double pad = 0.05 * std::max(hi_x - lo_x, hi_y - lo_y) + 10.0;
    SvgCanvas svg(lo_x - pad, lo_y - pad, hi_x + pad, hi_y + pad, 800);
    svg.rect(lo_x - pad, lo_y - pad, (hi_x - lo_x) + 2 * pad, (hi_y - lo_y) + 2 * pad, "#f4f0e8");
    render_world(svg, scen);
    std::vector<Point2> axis, right, left;
    for (const Waypoint& w : out.trajectory.points) {
      if (w.phase == SearchPhase::axis) axis.push_back(w.pos);
      else if (w.phase == SearchPhase::right) right.push_back(w.pos);
      else left.push_back(w.pos);
    }
    svg.polyline(axis, "#3060d0", 1.5);
    svg.polyline(right, "#00a040", 2.0);
    svg.polyline(left, "#00a040", 2.0);
    svg.circle(user, 5.0, "#202020");
    svg.circle(scen.bs, 5.0, "#d03020");
    svg.circle(out.record.argmin, 4.0, "#f0a000");
    svg.save(out_dir + "/trajectory.svg");
  }
  std::cout << "search: f_min=" << num(out.record.f_min) << " at (" << num(out.record.argmin.x)
            << ", " << num(out.record.argmin.y) << ") length=" << num(rep.total) << "/"
            << num(rep.total_bound) << (rep.within_bounds ? " within bounds" : " BOUND VIOLATION")
            << "\nwrote " << out_dir << "/trajectory.csv, result.json, trajectory.svg"
            << std::endl;
  return rep.within_bounds ? 0 : 2;
}

int cmd_study_single(const Scenario& scen, const std::string& out_dir, int jobs) {
  const LosProbabilityTable table = study_table(scen);
  const SingleUserStudy study = run_single_user_study(scen, table, jobs);
  write_single_user_outputs(study, scen, out_dir);
  const SchemeAggregate& prop = study.aggregate[static_cast<int>(Scheme::proposed)];
  const SchemeAggregate& prob = study.aggregate[static_cast<int>(Scheme::probabilistic)];
  std::cout << "study single: users=" << study.trials.size()
            << " proposed_tp=" << num(prop.mean_throughput)
            << " probabilistic_tp=" << num(prob.mean_throughput)
            << " proposed_outage_ratio=" << num(prop.mean_ratio) << "\nwrote " << out_dir
            << "/results.csv, cdf.csv, bars.csv, summary.json" << std::endl;
  bool bounds_ok = true;
  for (const UserTrial& t : study.trials)
    bounds_ok = bounds_ok && t.schemes[0].df_bounds_ok && t.schemes[0].af_bounds_ok;
  if (!bounds_ok) {
    std::cerr << "error: a proposed trajectory violated its length bound" << std::endl;
    return 2;
  }
  return 0;
}

int cmd_study_cluster(const Scenario& scen, const std::string& out_dir, int jobs) {
  const LosProbabilityTable table = study_table(scen);
  const ClusterStudy study = run_cluster_study(scen, table, jobs);
  write_cluster_outputs(study, out_dir);
  std::cout << "study cluster: clusters=" << study.clusters << " radii=";
  for (std::size_t i = 0; i < study.by_radius.size(); ++i)
    std::cout << (i ? "/" : "") << num(study.by_radius[i].radius);
  std::cout << " proposed=";
  for (std::size_t i = 0; i < study.by_radius.size(); ++i)
    std::cout << (i ? "/" : "") << num(study.by_radius[i].proposed_mean);
  std::cout << "\nwrote " << out_dir << "/clusters.csv, cluster_summary.json" << std::endl;
  for (const ClusterTrial& t : study.trials)
    if (!t.bounds_ok) {
      std::cerr << "error: a cluster trajectory violated its length bound" << std::endl;
      return 2;
    }
  return 0;
}

int cmd_maps(const Scenario& scen, const std::string& out_dir, bool overlay) {
  const Point2 user = pick_user(scen);
  if (overlay) {
    const auto oracle = scen.oracle_for(user);
    const SearchOutcome out = shaded_contour_search(scen.cost_params(), scen.model, scen.heights,
                                                    scen.bs, user, *oracle, scen.search);
    emit_power_capacity_maps(scen, user, out_dir, &out.trajectory);
  } else {
    emit_power_capacity_maps(scen, user, out_dir, nullptr);
  }
  std::cout << "maps: wrote " << out_dir << "/power_map.{csv,svg}, capacity_map.{csv,svg}"
            << std::endl;
  return 0;
}

int cmd_verify(std::uint64_t seed) {
  const std::vector<CheckResult> results = run_verification(seed);
  for (const CheckResult& r : results)
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << " — " << r.detail << '\n';
  if (!all_passed(results)) {
    std::cerr << "error: verification failed" << std::endl;
    return 2;
  }
  std::cout << "all " << results.size() << " checks passed" << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aerial relay placement: segmented channel simulator and search tools"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--config", config_path, "configuration file (dotted key = value lines)");
  app.add_option("--out", out_dir, "output directory");
  CLI::Option* seed_opt = app.add_option("--seed", seed, "override the scenario master seed");
  app.add_option("--jobs", jobs, "worker threads for studies")->check(CLI::PositiveNumber);

  CLI::App* map_cmd = app.add_subcommand("map", "generate and render the city map");
  CLI::App* lostable_cmd =
      app.add_subcommand("lostable", "build the empirical elevation/LOS probability table");
  CLI::App* search_cmd =
      app.add_subcommand("search", "run one placement search and export the trajectory");
  CLI::App* study_cmd = app.add_subcommand("study", "Monte Carlo studies");
  study_cmd->require_subcommand(1);
  CLI::App* single_cmd = study_cmd->add_subcommand("single", "random single-user sweep");
  CLI::App* cluster_cmd = study_cmd->add_subcommand("cluster", "hotspot cluster radius sweep");
  CLI::App* maps_cmd = app.add_subcommand("maps", "received-power and capacity heatmaps");
  bool overlay = false;
  maps_cmd->add_flag("--overlay", overlay, "overlay a search trajectory on the heatmaps");
  CLI::App* verify_cmd = app.add_subcommand("verify", "run the property suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }

  try {
    const bool seed_set = seed_opt->count() > 0;
    if (app.got_subcommand(verify_cmd)) {
      std::uint64_t s = 1;
      if (seed_set) {
        s = seed;
      } else if (!config_path.empty()) {
        s = load_scenario(config_path, false, 0).seed;
      }
      return cmd_verify(s);
    }
    const Scenario scen = load_scenario(config_path, seed_set, seed);
    if (app.got_subcommand(map_cmd)) return cmd_map(scen, out_dir);
    if (app.got_subcommand(lostable_cmd)) return cmd_lostable(scen, out_dir);
    if (app.got_subcommand(search_cmd)) return cmd_search(scen, out_dir);
    if (app.got_subcommand(study_cmd)) {
      if (study_cmd->got_subcommand(single_cmd)) return cmd_study_single(scen, out_dir, jobs);
      if (study_cmd->got_subcommand(cluster_cmd)) return cmd_study_cluster(scen, out_dir, jobs);
    }
    if (app.got_subcommand(maps_cmd)) return cmd_maps(scen, out_dir, overlay);
    std::cerr << "error: no subcommand" << std::endl;
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
}
