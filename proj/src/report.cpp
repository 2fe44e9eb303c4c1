#include "qrasp/report.hpp"

#include <sstream>

#include <fmt/format.h>

#include "qrasp/config.hpp"

namespace qrasp {

void write_provenance(std::ostream& os, const SimConfig& cfg, const std::vector<std::string>& extra) {
  os << "# qrasp-sim " << kVersion << '\n';
  os << "# seed = " << cfg.seed << '\n';
  for (const auto& line : extra) os << "# " << line << '\n';
  std::istringstream in(format_config(cfg));
  for (std::string line; std::getline(in, line);) os << "# " << line << '\n';
}

std::string format_result_row(const SweepRow& row) {
  const StatsRecord& s = row.stats;
  const EventCounters& c = s.counters;
  return fmt::format("{},{},{:.6f},{},{},{},{:.6f},{:.6f},{:.6f},{},{},{},{},{},{}", to_string(row.policy),
                     row.pattern, row.rate, row.seed, s.delivered, s.injected, s.mean_latency,
                     s.p99_latency, s.throughput, s.saturated ? 1 : 0, c.qtable_reads, c.qtable_writes,
                     c.learning_flits, c.learning_drops, c.flit_hops);
}

void write_results(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kResultHeader << '\n';
  for (const auto& r : rows) os << format_result_row(r) << '\n';
}

void write_timeseries(std::ostream& os, const StatsRecord& stats) {
  os << "window_start,window_end,pattern,delivered,mean_latency\n";
  for (const auto& w : stats.windows)
    os << fmt::format("{},{},{},{},{:.6f}\n", w.start, w.end, to_string(w.pattern), w.delivered,
                      w.mean_latency);
}

}  // namespace qrasp
