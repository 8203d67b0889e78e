#include "zonempc/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace zonempc::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string format_double(double v) {
  // shortest string that parses back exactly; on equal length prefer plain notation
  // ("100" over "1e+02") since these files are also read by humans
  char best[32];
  std::snprintf(best, sizeof(best), "%.17g", v);
  bool best_plain = std::strchr(best, 'e') == nullptr;
  for (int prec = 1; prec <= 17; ++prec) {
    char cand[32];
    std::snprintf(cand, sizeof(cand), "%.*g", prec, v);
    double parsed = 0.0;
    std::sscanf(cand, "%lf", &parsed);
    if (parsed != v) continue;
    const bool plain = std::strchr(cand, 'e') == nullptr;
    const std::size_t cl = std::strlen(cand), bl = std::strlen(best);
    if (cl < bl || (cl == bl && plain && !best_plain)) {
      std::snprintf(best, sizeof(best), "%s", cand);
      best_plain = plain;
    }
  }
  return best;
}

void write_trajectories_csv(const std::filesystem::path& path,
                            const sim::SimulationResult& result) {
  std::ofstream out = open_out(path);
  out << "step,zone,temperature_c,input_w,allowance_w,deviation_c\n";
  for (int k = 0; k < result.steps; ++k) {
    for (int m = 0; m < result.temperature_c.cols(); ++m) {
      out << k << ',' << m << ',' << format_double(result.temperature_c(k, m)) << ','
          << format_double(result.input_w(k, m)) << ','
          << format_double(result.allowance_w(k, m)) << ','
          << format_double(result.deviation_c(k, m)) << '\n';
    }
  }
  finish(out, path);
}

void write_metrics_csv(const std::filesystem::path& path,
                       const sim::SimulationResult& result) {
  std::ofstream out = open_out(path);
  // no wall time here: files from equal seed+config must be byte-identical
  out << "priority,comfort_index,energy_rate_w,overall_comfort_index,"
         "max_cap_violation_w\n";
  const double max_violation =
      result.cap_violation_w.size() > 0 ? result.cap_violation_w.maxCoeff() : 0.0;
  for (size_t s = 0; s < result.comfort_index_by_level.size(); ++s) {
    out << (s + 1) << ',' << format_double(result.comfort_index_by_level[s]) << ','
        << format_double(result.energy_rate_by_level_w[s]) << ','
        << format_double(result.overall_comfort_index) << ','
        << format_double(max_violation) << '\n';
  }
  finish(out, path);
}

void write_pareto_csv(const std::filesystem::path& path,
                      const std::vector<sim::ParetoPoint>& points) {
  std::ofstream out = open_out(path);
  out << "strategy,priority,alpha,energy_cost,comfort_cost\n";
  for (const sim::ParetoPoint& p : points) {
    out << sim::to_string(p.strategy) << ',' << p.priority << ','
        << format_double(p.alpha) << ',' << format_double(p.energy_cost) << ','
        << format_double(p.comfort_cost) << '\n';
  }
  finish(out, path);
}

}  // namespace zonempc::io
