#pragma once

// CSV output. Numbers are formatted without locale, reals with six decimals.
// Provenance (tool version, seed, full config) leads the file as '#' lines.

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "qrasp/engine.hpp"

namespace qrasp {

inline constexpr std::string_view kVersion = "0.3.0";

inline constexpr std::string_view kResultHeader =
    "policy,pattern,rate,seed,delivered,injected,mean_latency,p99_latency,throughput,saturated,"
    "qtable_reads,qtable_writes,learning_flits,learning_drops,flit_hops";

void write_provenance(std::ostream& os, const SimConfig& cfg,
                      const std::vector<std::string>& extra = {});

std::string format_result_row(const SweepRow& row);

// Header plus one row per entry, in the given order.
void write_results(std::ostream& os, const std::vector<SweepRow>& rows);

// window_start,window_end,pattern,delivered,mean_latency
void write_timeseries(std::ostream& os, const StatsRecord& stats);

}  // namespace qrasp
