#pragma once

#include "zonempc/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace zonempc::config {

// Raised for malformed files, unknown keys or inconsistent spec values.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BandSegment {
  double start_hour = 0;
  double end_hour = 0;
  double t_min_c = 0;
  double t_max_c = 0;

  bool operator==(const BandSegment&) const = default;
};

// Compact generator description of a scenario. materialize() expands it into the
// fully scheduled sim::Scenario; the JSON form round-trips byte-identically.
struct ScenarioSpec {
  std::string name = "custom";
  int zones = 3;
  int days = 7;
  int steps = 0;  // 0 means days worth of dt-sized steps
  double dt_s = 900.0;
  int horizon = 8;
  double comfort_weight = 1e5;
  std::vector<int> priority_of_zone;
  std::vector<double> theta;
  double u_min_w = 0.0;
  double u_max_w = 1500.0;
  std::string mode = "cooling";
  double cap_total_w = 800.0;
  std::string strategy = "distributed-multi-to-one";
  std::uint64_t seed = 0;
  int jobs = 1;
  double plant_temp_noise_c = 0.0;
  std::vector<double> band_offset_c;  // per zone, added to the upper comfort bound
  double occupancy_start_hour = 10.0;
  double occupancy_end_hour = 20.0;
  std::vector<BandSegment> base_band;
  double outdoor_mean_c = 26.0;
  double outdoor_swing_c = 4.0;
  double outdoor_peak_hour = 15.0;
  double internal_gain_w = 240.0;
  double zone_solar_peak_w = 50.0;
  double wall_solar_peak_w = 120.0;
  double initial_temp_c = 26.0;

  bool operator==(const ScenarioSpec&) const = default;

  int effective_steps() const;
  sim::Scenario materialize() const;  // throws ConfigError
};

std::string to_json_string(const ScenarioSpec& spec);
ScenarioSpec spec_from_json_string(const std::string& text);  // throws ConfigError

void save_spec(const ScenarioSpec& spec, const std::filesystem::path& path);
ScenarioSpec load_spec(const std::filesystem::path& path);
sim::Scenario load_scenario(const std::filesystem::path& path);

inline constexpr double kScarceCapSmallW = 800.0;
inline constexpr double kSufficientCapSmallW = 2500.0;
inline constexpr double kScarceCapLargeW = 9600.0;
inline constexpr double kSufficientCapLargeW = 30000.0;

std::vector<std::string> builtin_names();
ScenarioSpec builtin_spec(const std::string& name);  // throws ConfigError

// Three offices with singleton priorities, one week, shared cooling cap.
sim::Scenario build_small_scale(double cap_total_w = kScarceCapSmallW);
// Nine floors of four offices; floor 1 is priority 1, floor 3 priority 2, rest 3.
sim::Scenario build_large_scale(double cap_total_w = kScarceCapLargeW);

}  // namespace zonempc::config
