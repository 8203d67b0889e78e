#include "zonempc/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace zonempc::config {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using nlohmann::json;

void fail(const std::string& msg) { throw ConfigError(msg); }

// Half-sine pulse peaking at `peak_hour`, nonzero over +-width/2 around it.
double solar_pulse(double hour, double peak_hour, double width_hours) {
  const double t = hour - (peak_hour - width_hours / 2.0);
  if (t <= 0 || t >= width_hours) return 0.0;
  return std::sin(std::numbers::pi * t / width_hours);
}

json spec_to_json(const ScenarioSpec& s) {
  json segs = json::array();
  for (const auto& b : s.base_band) {
    segs.push_back(json{{"start_hour", b.start_hour},
                        {"end_hour", b.end_hour},
                        {"t_min_c", b.t_min_c},
                        {"t_max_c", b.t_max_c}});
  }
  return json{
      {"name", s.name},
      {"zones", s.zones},
      {"days", s.days},
      {"steps", s.steps},
      {"dt_s", s.dt_s},
      {"horizon", s.horizon},
      {"comfort_weight", s.comfort_weight},
      {"priority_of_zone", s.priority_of_zone},
      {"theta", s.theta},
      {"u_min_w", s.u_min_w},
      {"u_max_w", s.u_max_w},
      {"mode", s.mode},
      {"cap_total_w", s.cap_total_w},
      {"strategy", s.strategy},
      {"seed", s.seed},
      {"jobs", s.jobs},
      {"plant_temp_noise_c", s.plant_temp_noise_c},
      {"band_offset_c", s.band_offset_c},
      {"occupancy_start_hour", s.occupancy_start_hour},
      {"occupancy_end_hour", s.occupancy_end_hour},
      {"base_band", segs},
      {"outdoor_mean_c", s.outdoor_mean_c},
      {"outdoor_swing_c", s.outdoor_swing_c},
      {"outdoor_peak_hour", s.outdoor_peak_hour},
      {"internal_gain_w", s.internal_gain_w},
      {"zone_solar_peak_w", s.zone_solar_peak_w},
      {"wall_solar_peak_w", s.wall_solar_peak_w},
      {"initial_temp_c", s.initial_temp_c},
  };
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) fail(std::string("missing key: ") + key);
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(std::string("bad value for key ") + key + ": " + e.what());
  }
}

ScenarioSpec spec_from_json(const json& j) {
  if (!j.is_object()) fail("scenario spec must be a JSON object");
  static const std::set<std::string> known = {
      "name", "zones", "days", "steps", "dt_s", "horizon", "comfort_weight",
      "priority_of_zone", "theta", "u_min_w", "u_max_w", "mode", "cap_total_w",
      "strategy", "seed", "jobs", "plant_temp_noise_c", "band_offset_c",
      "occupancy_start_hour", "occupancy_end_hour", "base_band", "outdoor_mean_c",
      "outdoor_swing_c", "outdoor_peak_hour", "internal_gain_w", "zone_solar_peak_w",
      "wall_solar_peak_w", "initial_temp_c"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) fail("unknown key: " + it.key());
  }

  ScenarioSpec s;
  read_field(j, "name", s.name);
  read_field(j, "zones", s.zones);
  read_field(j, "days", s.days);
  read_field(j, "steps", s.steps);
  read_field(j, "dt_s", s.dt_s);
  read_field(j, "horizon", s.horizon);
  read_field(j, "comfort_weight", s.comfort_weight);
  read_field(j, "priority_of_zone", s.priority_of_zone);
  read_field(j, "theta", s.theta);
  read_field(j, "u_min_w", s.u_min_w);
  read_field(j, "u_max_w", s.u_max_w);
  read_field(j, "mode", s.mode);
  read_field(j, "cap_total_w", s.cap_total_w);
  read_field(j, "strategy", s.strategy);
  read_field(j, "seed", s.seed);
  read_field(j, "jobs", s.jobs);
  read_field(j, "plant_temp_noise_c", s.plant_temp_noise_c);
  read_field(j, "band_offset_c", s.band_offset_c);
  read_field(j, "occupancy_start_hour", s.occupancy_start_hour);
  read_field(j, "occupancy_end_hour", s.occupancy_end_hour);
  read_field(j, "outdoor_mean_c", s.outdoor_mean_c);
  read_field(j, "outdoor_swing_c", s.outdoor_swing_c);
  read_field(j, "outdoor_peak_hour", s.outdoor_peak_hour);
  read_field(j, "internal_gain_w", s.internal_gain_w);
  read_field(j, "zone_solar_peak_w", s.zone_solar_peak_w);
  read_field(j, "wall_solar_peak_w", s.wall_solar_peak_w);
  read_field(j, "initial_temp_c", s.initial_temp_c);

  if (!j.contains("base_band") || !j.at("base_band").is_array()) {
    fail("base_band must be an array");
  }
  for (const json& seg : j.at("base_band")) {
    static const std::set<std::string> seg_keys = {"start_hour", "end_hour", "t_min_c",
                                                   "t_max_c"};
    for (auto it = seg.begin(); it != seg.end(); ++it) {
      if (!seg_keys.count(it.key())) fail("unknown key in base_band: " + it.key());
    }
    BandSegment b;
    read_field(seg, "start_hour", b.start_hour);
    read_field(seg, "end_hour", b.end_hour);
    read_field(seg, "t_min_c", b.t_min_c);
    read_field(seg, "t_max_c", b.t_max_c);
    s.base_band.push_back(b);
  }
  return s;
}

}  // namespace

int ScenarioSpec::effective_steps() const {
  if (steps > 0) return steps;
  return static_cast<int>(std::lround(days * 86400.0 / dt_s));
}

sim::Scenario ScenarioSpec::materialize() const {
  if (zones < 1) fail("zones must be >= 1");
  if (days < 1 && steps < 1) fail("either days or steps must be positive");
  if (dt_s <= 0) fail("dt_s must be positive");
  // the allowance bookkeeping shifts plans forward, which needs >= 2 entries
  if (horizon < 2) fail("horizon must be >= 2");
  if (static_cast<int>(priority_of_zone.size()) != zones) {
    fail("priority_of_zone must list every zone");
  }
  if (static_cast<int>(band_offset_c.size()) != zones) {
    fail("band_offset_c must list every zone");
  }
  if (base_band.empty()) fail("base_band must not be empty");
  for (size_t i = 0; i < base_band.size(); ++i) {
    const BandSegment& b = base_band[i];
    if (b.start_hour >= b.end_hour) fail("base_band segment is empty");
    if (b.t_min_c > b.t_max_c) fail("base_band segment inverted");
    if (i > 0 && base_band[i - 1].end_hour != b.start_hour) {
      fail("base_band segments must be contiguous");
    }
  }
  if (base_band.front().start_hour > occupancy_start_hour ||
      base_band.back().end_hour < occupancy_end_hour) {
    fail("base_band must cover the occupancy window");
  }

  sim::Scenario sc;
  sc.name = name;
  sc.dt_s = dt_s;
  sc.steps = effective_steps();
  sc.horizon = horizon;
  sc.comfort_weight = comfort_weight;
  sc.theta_by_level = theta;
  sc.priorities.level_of_zone = priority_of_zone;
  sc.u_min_w = Eigen::VectorXd::Constant(zones, u_min_w);
  sc.u_max_w = Eigen::VectorXd::Constant(zones, u_max_w);
  if (mode == "cooling") {
    sc.mode = thermal::HvacMode::Cooling;
  } else if (mode == "heating") {
    sc.mode = thermal::HvacMode::Heating;
  } else {
    fail("mode must be cooling or heating");
  }
  sc.zone_params.assign(zones, thermal::ZoneThermalParams::reference_office());
  sc.adjacency.assign(zones, {thermal::kAmbient, thermal::kAmbient, thermal::kAmbient,
                              thermal::kAmbient});

  const int len = sc.steps + horizon + 1;
  auto hour_of = [&](int k) { return std::fmod(k * dt_s / 3600.0, 24.0); };

  for (int m = 0; m < zones; ++m) {
    mpc::ComfortSchedule cs;
    cs.t_min_c.resize(len);
    cs.t_max_c.resize(len);
    cs.occupied.resize(len);
    for (int k = 0; k < len; ++k) {
      const double h = hour_of(k);
      const bool occ = h >= occupancy_start_hour && h < occupancy_end_hour;
      cs.occupied[k] = occ ? 1.0 : 0.0;
      if (!occ) {
        cs.t_min_c[k] = -kInf;
        cs.t_max_c[k] = kInf;
        continue;
      }
      bool found = false;
      for (const BandSegment& b : base_band) {
        if (h >= b.start_hour && h < b.end_hour) {
          cs.t_min_c[k] = b.t_min_c;
          cs.t_max_c[k] = b.t_max_c + band_offset_c[m];
          found = true;
          break;
        }
      }
      if (!found) fail("base_band does not cover an occupied hour");
    }
    sc.comfort.push_back(std::move(cs));
  }

  sc.price = mpc::PriceSchedule::shenzhen_time_of_use(len, dt_s);
  sc.cap_w.assign(len, cap_total_w);

  // One shared weather track: sinusoidal ambient, half-sine solar pulses whose
  // peaks move east -> south -> west across the day, gains during occupancy.
  std::vector<thermal::DisturbanceSample> track(len);
  for (int k = 0; k < len; ++k) {
    const double h = hour_of(k);
    thermal::DisturbanceSample& d = track[k];
    const double tout =
        outdoor_mean_c +
        outdoor_swing_c * std::cos(2.0 * std::numbers::pi * (h - outdoor_peak_hour) / 24.0);
    d.outdoor_temp_c = {tout, tout, tout, tout};
    using thermal::Orientation;
    d.wall_solar_w[static_cast<int>(Orientation::North)] =
        0.2 * wall_solar_peak_w * solar_pulse(h, 12.0, 12.0);
    d.wall_solar_w[static_cast<int>(Orientation::East)] =
        wall_solar_peak_w * solar_pulse(h, 9.0, 6.0);
    d.wall_solar_w[static_cast<int>(Orientation::West)] =
        wall_solar_peak_w * solar_pulse(h, 16.0, 6.0);
    d.wall_solar_w[static_cast<int>(Orientation::South)] =
        wall_solar_peak_w * solar_pulse(h, 12.5, 10.0);
    d.zone_solar_w = zone_solar_peak_w * solar_pulse(h, 12.0, 12.0);
    const bool occ = h >= occupancy_start_hour && h < occupancy_end_hour;
    d.internal_gain_w = occ ? internal_gain_w : 0.0;
  }
  sc.disturbance.assign(zones, track);

  sc.initial_zone_temp_c = Eigen::VectorXd::Constant(zones, initial_temp_c);
  try {
    sc.strategy = sim::parse_strategy(strategy);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  sc.seed = seed;
  sc.jobs = jobs;
  sc.plant_temp_noise_c = plant_temp_noise_c;

  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    fail(std::string("inconsistent scenario spec: ") + e.what());
  }
  return sc;
}

std::string to_json_string(const ScenarioSpec& spec) {
  return spec_to_json(spec).dump(2) + "\n";
}

ScenarioSpec spec_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  return spec_from_json(j);
}

void save_spec(const ScenarioSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write " + path.string());
  out << to_json_string(spec);
  if (!out) fail("failed writing " + path.string());
}

ScenarioSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return spec_from_json_string(buf.str());
}

sim::Scenario load_scenario(const std::filesystem::path& path) {
  return load_spec(path).materialize();
}

std::vector<std::string> builtin_names() { return {"small3", "large36"}; }

ScenarioSpec builtin_spec(const std::string& name) {
  ScenarioSpec s;
  s.base_band = {{10.0, 14.0, 22.0, 24.0},
                 {14.0, 17.0, 22.0, 25.0},
                 {17.0, 19.0, 22.0, 24.0},
                 {19.0, 20.0, 22.0, 25.0}};
  s.theta = {1.0, 0.1, 0.01};
  s.days = 7;
  if (name == "small3") {
    s.name = "small3";
    s.zones = 3;
    s.priority_of_zone = {1, 2, 3};
    s.band_offset_c = {0.0, 0.5, 1.0};
    s.cap_total_w = kScarceCapSmallW;
    s.strategy = "distributed-one-to-one";
    return s;
  }
  if (name == "large36") {
    s.name = "large36";
    s.zones = 36;
    s.priority_of_zone.resize(36);
    s.band_offset_c.resize(36);
    for (int m = 0; m < 36; ++m) {
      const int floor = m / 4;
      const int pos = m % 4;
      s.priority_of_zone[m] = floor == 0 ? 1 : (floor == 2 ? 2 : 3);
      s.band_offset_c[m] = 0.5 * pos;
    }
    s.cap_total_w = kScarceCapLargeW;
    s.strategy = "distributed-multi-to-one";
    return s;
  }
  throw ConfigError("unknown builtin scenario: " + name);
}

sim::Scenario build_small_scale(double cap_total_w) {
  ScenarioSpec s = builtin_spec("small3");
  s.cap_total_w = cap_total_w;
  return s.materialize();
}

sim::Scenario build_large_scale(double cap_total_w) {
  ScenarioSpec s = builtin_spec("large36");
  s.cap_total_w = cap_total_w;
  return s.materialize();
}

}  // namespace zonempc::config
