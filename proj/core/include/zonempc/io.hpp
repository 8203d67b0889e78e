#pragma once

#include "zonempc/scenario.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace zonempc::io {

// Shortest representation that round-trips a double; used for all CSV fields so
// repeated runs produce byte-identical files.
std::string format_double(double v);

// step,zone,temperature_c,input_w,allowance_w,deviation_c
void write_trajectories_csv(const std::filesystem::path& path,
                            const sim::SimulationResult& result);

// priority,comfort_index,energy_rate_w,overall_comfort_index,max_cap_violation_w,wall_time_s
void write_metrics_csv(const std::filesystem::path& path, const sim::SimulationResult& result);

// strategy,priority,alpha,energy_cost,comfort_cost
void write_pareto_csv(const std::filesystem::path& path,
                      const std::vector<sim::ParetoPoint>& points);

}  // namespace zonempc::io
