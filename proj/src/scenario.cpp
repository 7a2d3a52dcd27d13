#include "uavrelay/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace uavrelay {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.kv_[key] = value;
  }
  return cfg;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

std::string Config::get_str(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::string Config::get_str(const std::string& key, const std::string& fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::parse_num(const std::string& key, const std::string& raw) const {
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (trim(raw.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config key '" + key + "': not a number: '" + raw + "'");
}

double Config::get_num(const std::string& key) const { return parse_num(key, get_str(key)); }

double Config::get_num(const std::string& key, double fallback) const {
  return has(key) ? get_num(key) : fallback;
}

long Config::get_int(const std::string& key) const {
  const double v = get_num(key);
  const long r = static_cast<long>(std::llround(v));
  if (std::fabs(v - static_cast<double>(r)) > 1e-9)
    throw ConfigError("config key '" + key + "': expected an integer");
  return r;
}

long Config::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Config::get_flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_str(key);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean");
}

std::vector<double> Config::get_list(const std::string& key) const {
  const std::string raw = get_str(key);
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t comma = raw.find(',', pos);
    if (comma == std::string::npos) comma = raw.size();
    const std::string item = trim(raw.substr(pos, comma - pos));
    if (!item.empty()) out.push_back(parse_num(key, item));
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

std::vector<double> Config::get_list(const std::string& key,
                                     const std::vector<double>& fallback) const {
  return has(key) ? get_list(key) : fallback;
}

double dbm_to_effective(double p_dbm, double noise_dbm) {
  return std::pow(10.0, (p_dbm - noise_dbm) / 10.0);
}

CostParams Scenario::cost_params() const { return cost_params(cost_kind); }

CostParams Scenario::cost_params(CostKind kind) const {
  CostParams c;
  c.kind = kind;
  c.p_u = dbm_to_effective(p_u_dbm, noise_dbm);
  c.p_b = dbm_to_effective(p_b_dbm, noise_dbm);
  return c;
}

std::unique_ptr<SegmentOracle> Scenario::oracle_for(const Point2& user_pos) const {
  if (world == WorldKind::map)
    return std::make_unique<MapSegmentOracle>(map, user_pos, heights, model.num_segments());
  return std::make_unique<NestedFieldOracle>(field, user_pos);
}

void Scenario::distance_range(double& d_min, double& d_max) const {
  const double dz = heights.h_uav - heights.h_user;
  d_min = dz;
  d_max = std::sqrt(2.0 * extent * extent + dz * dz);
}

Scenario build_scenario(const Config& cfg) {
  Scenario s;

  const std::string world = cfg.get_str("scenario.world", "map");
  if (world == "map")
    s.world = WorldKind::map;
  else if (world == "nested")
    s.world = WorldKind::nested;
  else
    throw ConfigError("config key 'scenario.world': expected 'map' or 'nested'");

  s.extent = cfg.get_num("scenario.extent_m", 1000.0);
  if (!(s.extent > 0.0)) throw ConfigError("config key 'scenario.extent_m': must be positive");

  const double h_uav = cfg.get_num("scenario.h_uav_m", 50.0);
  const double h_bs = cfg.get_num("scenario.h_bs_m", 45.0);
  const double h_user = cfg.get_num("scenario.h_user_m", 0.0);
  try {
    s.heights = Heights(h_uav, h_bs, h_user);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scenario heights: ") + e.what());
  }

  // Channel model.
  s.model.alpha0 = cfg.get_num("channel.alpha0");
  s.model.log10_beta0 = cfg.get_num("channel.log10beta0");
  const std::vector<double> alphas = cfg.get_list("channel.alpha");
  const std::vector<double> betas = cfg.get_list("channel.log10beta");
  if (alphas.size() != betas.size())
    throw ConfigError("config keys 'channel.alpha'/'channel.log10beta': length mismatch");
  const std::vector<double> sigmas =
      cfg.get_list("channel.sigma_db", std::vector<double>(alphas.size(), 3.0));
  if (sigmas.size() != alphas.size())
    throw ConfigError("config key 'channel.sigma_db': length mismatch with channel.alpha");
  for (std::size_t i = 0; i < alphas.size(); ++i)
    s.model.segments.push_back({alphas[i], betas[i], sigmas[i]});
  validate_model(s.model);
  s.bs_rician_db = cfg.get_num("channel.bs_rician_db", 20.0);
  s.los_rician_db = cfg.get_num("channel.los_rician_db", 9.0);

  // World construction.
  if (s.world == WorldKind::map) {
    if (cfg.has("scenario.map_file")) {
      s.map = load_map(cfg.get_str("scenario.map_file"));
      if (s.map.extent != s.extent && !cfg.has("scenario.extent_m")) s.extent = s.map.extent;
      if (s.map.extent != s.extent)
        throw ConfigError("config key 'scenario.extent_m': disagrees with the map file");
    } else {
      MapLayout layout;
      layout.extent = s.extent;
      layout.blocks = static_cast<int>(cfg.get_int("scenario.blocks", 7));
      layout.street = cfg.get_num("scenario.street_m", 75.0);
      layout.height_min = cfg.get_num("scenario.height_min_m", 5.0);
      layout.height_max = cfg.get_num("scenario.height_max_m", 45.0);
      try {
        s.map = generate_map(static_cast<std::uint64_t>(cfg.get_int("scenario.terrain_seed", 1)),
                             layout);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("scenario map layout: ") + e.what());
      }
    }
    if (s.heights.h_bs < s.map.max_height())
      throw ConfigError("scenario: BS height is below the tallest building");
  } else {
    const int K = static_cast<int>(cfg.get_int("scenario.nested_segments", 3));
    if (K != s.model.num_segments())
      throw ConfigError(
          "config key 'scenario.nested_segments': disagrees with channel segment count");
    s.field = random_nested_field(
        static_cast<std::uint64_t>(cfg.get_int("scenario.nested_seed", 1)), K,
        static_cast<int>(cfg.get_int("scenario.nested_bins", 360)),
        cfg.get_num("scenario.nested_r_min_m", 40.0), cfg.get_num("scenario.nested_r_max_m", 300.0));
  }

  // BS position: default near the top-right corner, on the boundary street.
  const double default_bs = s.extent - 10.0;
  s.bs = {cfg.get_num("scenario.bs_x_m", default_bs), cfg.get_num("scenario.bs_y_m", default_bs)};
  if (s.world == WorldKind::map && !s.map.on_street(s.bs))
    throw ConfigError("scenario: BS ground position must be on a street");

  if (cfg.has("scenario.user_x_m") || cfg.has("scenario.user_y_m")) {
    s.user = {cfg.get_num("scenario.user_x_m"), cfg.get_num("scenario.user_y_m")};
    s.has_user = true;
    if (s.world == WorldKind::map && !s.map.on_street(s.user))
      throw ConfigError("scenario: user position must be on a street");
  }

  // Cost and powers.
  const std::string kind = cfg.get_str("scenario.cost_kind");
  if (kind == "af")
    s.cost_kind = CostKind::af_outage;
  else if (kind == "df")
    s.cost_kind = CostKind::df_rate;
  else
    throw ConfigError("config key 'scenario.cost_kind': expected 'af' or 'df'");
  s.p_b_dbm = cfg.get_num("scenario.p_b_dbm");
  s.p_u_dbm = cfg.get_num("scenario.p_u_dbm");
  s.noise_dbm = cfg.get_num("scenario.noise_dbm");
  if (s.noise_dbm >= std::min(s.p_b_dbm, s.p_u_dbm))
    throw ConfigError("scenario: noise_dbm must sit below both transmit powers");
  s.target_rate = cfg.get_num("scenario.target_rate", 1.0);

  // Channel ordering must hold across every reachable relay-user distance.
  double d_min = 0.0, d_max = 0.0;
  s.distance_range(d_min, d_max);
  if (!ordering_holds(s.model, d_min, d_max))
    throw ConfigError("channel model: segment gain ordering fails over the reachable distances");

  // Search parameters.
  s.search.delta = cfg.get_num("search.delta_m", 5.0);
  if (!(s.search.delta > 0.0)) throw ConfigError("config key 'search.delta_m': must be positive");
  s.search.max_steps = static_cast<int>(cfg.get_int("search.max_steps", 0));
  s.search.contour_tol = cfg.get_num("search.contour_tol", 1e-6);
  s.search.refine_tol = cfg.get_num("search.refine_tol_m", 1e-3);
  s.search.use_detector = cfg.get_flag("search.use_detector", false);
  s.search.detector_seed = static_cast<std::uint64_t>(cfg.get_int("search.detector_seed", 7));
  s.exhaustive_spacing = cfg.get_num("search.exhaustive_spacing_m", 5.0);
  if (!(s.exhaustive_spacing > 0.0))
    throw ConfigError("config key 'search.exhaustive_spacing_m': must be positive");
  s.prob_3d = cfg.get_flag("study.probabilistic_3d", false);

  s.seed = static_cast<std::uint64_t>(cfg.get_int("scenario.seed", 1));

  // Study knobs.
  s.n_users = static_cast<int>(cfg.get_int("study.n_users", 200));
  s.n_clusters = static_cast<int>(cfg.get_int("study.n_clusters", 50));
  s.cluster_users = static_cast<int>(cfg.get_int("study.cluster_users", 20));
  s.cluster_radii = cfg.get_list("study.cluster_radii_m", {0.0, 10.0, 20.0, 40.0});
  s.lostable_users = static_cast<int>(cfg.get_int("study.lostable_users", 2000));
  s.lostable_samples = static_cast<int>(cfg.get_int("study.lostable_samples", 50));
  s.lostable_bins = static_cast<int>(cfg.get_int("study.lostable_bins", 64));
  s.map_resolution = cfg.get_num("study.map_resolution_m", 10.0);
  if (s.n_users < 1 || s.n_clusters < 1 || s.cluster_users < 1)
    throw ConfigError("study sizes must be positive");
  if (!(s.map_resolution > 0.0))
    throw ConfigError("config key 'study.map_resolution_m': must be positive");

  return s;
}

Config default_config() {
  return Config::from_string(R"(# Reference urban scenario.
scenario.world = map
scenario.extent_m = 1000
scenario.blocks = 7
scenario.street_m = 75
scenario.height_min_m = 5
scenario.height_max_m = 45
scenario.terrain_seed = 1
scenario.h_uav_m = 50
scenario.h_bs_m = 45
scenario.h_user_m = 0
scenario.cost_kind = df
scenario.p_b_dbm = 33
scenario.p_u_dbm = 33
scenario.noise_dbm = -80
scenario.seed = 1
channel.alpha0 = 2.08
channel.log10beta0 = -3.85
channel.alpha = 2.14, 3.03
channel.log10beta = -3.69, -3.84
channel.sigma_db = 2.6, 4.4
search.delta_m = 5
)");
}

}  // namespace uavrelay
