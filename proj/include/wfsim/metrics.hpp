#pragma once

#include <map>
#include <string>
#include <utility>

#include "wfsim/engine.hpp"
#include "wfsim/events.hpp"
#include "wfsim/series.hpp"

namespace wfsim {

struct RunSummary {
  std::string policy;
  std::string pattern;
  std::string workflow_kind;
  std::uint64_t seed = 0;
  int workflow_count = 0;
  double total_duration_min = 0.0;
  double avg_workflow_duration_min = 0.0;
  double cpu_usage_mean = 0.0;
  double mem_usage_mean = 0.0;
  // Sum of granted memory over the cluster memory capacity, and over the
  // residual memory at each grant instant. Two readings of the same
  // utilization objective; both are reported.
  double objective_capacity = 0.0;
  double objective_residual = 0.0;
  int oom_count = 0;
  std::map<WorkflowId, double> per_workflow_duration_min;
};

// Minutes from the first workflow arrival to the completion of the last
// workflow. Throws IncompleteRun unless every workflow finished in the log.
double total_duration_minutes(const EventLog& log);

// Mean over workflows of (last task end - first task start), in minutes.
double avg_workflow_duration_minutes(const EventLog& log);

// Time-weighted mean of used/capacity per resource over [from, to]
// (trapezoidal weighting across samples). Throws EmptySeries when the
// window holds no samples.
std::pair<double, double> resource_usage(const MetricsSeries& series,
                                         Seconds from, Seconds to);
std::pair<double, double> resource_usage(const MetricsSeries& series);

RunSummary build_summary(const RunResult& result, const EngineConfig& config);

// Writes summary.json, series.csv, events.log and plot.csv under out_dir.
void emit(const RunSummary& summary, const MetricsSeries& series,
          const EventLog& log, const std::string& out_dir);

std::string summary_to_json(const RunSummary& summary);

}  // namespace wfsim
