#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "uavrelay/baselines.hpp"

namespace uavrelay {

/// Raised for malformed or incomplete configuration; the message names the
/// offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat dotted-key configuration: one `key = value` per line, `#` comments.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { kv_[key] = value; }

  std::string get_str(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& fallback) const;
  double get_num(const std::string& key) const;
  double get_num(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_flag(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

 private:
  double parse_num(const std::string& key, const std::string& raw) const;
  std::map<std::string, std::string> kv_;
};

enum class WorldKind { map, nested };

/// Everything a run needs: world, channel, powers, search and study knobs.
/// Link powers are stored both as configured dBm and folded with the noise
/// floor into the effective linear values the cost laws consume.
struct Scenario {
  WorldKind world = WorldKind::map;
  double extent = 1000.0;
  UrbanMap map;
  NestedBoundaryField field;
  Point2 bs;
  Point2 user{-1.0, -1.0};  ///< fixed user; negative means "sample one"
  bool has_user = false;
  Heights heights{50.0, 45.0, 0.0};
  SegmentModel model;
  CostKind cost_kind = CostKind::df_rate;
  double p_b_dbm = 33.0, p_u_dbm = 33.0, noise_dbm = -80.0;
  double target_rate = 1.0;
  double bs_rician_db = 20.0, los_rician_db = 9.0;
  SearchParams search;
  double exhaustive_spacing = 5.0;
  bool prob_3d = false;  ///< probabilistic baseline measures user distance in 3D
  std::uint64_t seed = 1;

  int n_users = 200;
  int n_clusters = 50;
  int cluster_users = 20;
  std::vector<double> cluster_radii{0.0, 10.0, 20.0, 40.0};
  int lostable_users = 2000;
  int lostable_samples = 50;
  int lostable_bins = 64;
  double map_resolution = 10.0;

  CostParams cost_params() const;
  CostParams cost_params(CostKind kind) const;
  std::unique_ptr<SegmentOracle> oracle_for(const Point2& user_pos) const;
  /// Reachable relay-user 3D distance range over the scenario extent.
  void distance_range(double& d_min, double& d_max) const;
};

double dbm_to_effective(double p_dbm, double noise_dbm);

/// Builds and fully validates a scenario; throws ConfigError naming any
/// missing or inconsistent key.
Scenario build_scenario(const Config& cfg);

/// The reference urban scenario used by the tools when no config is given.
Config default_config();

}  // namespace uavrelay
