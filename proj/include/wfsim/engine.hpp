#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wfsim/allocator.hpp"
#include "wfsim/cluster.hpp"
#include "wfsim/events.hpp"
#include "wfsim/knowledge_base.hpp"
#include "wfsim/series.hpp"
#include "wfsim/workload.hpp"

namespace wfsim {

enum class Policy { Aras, Baseline };

const char* policy_name(Policy policy);
std::optional<Policy> policy_from_name(const std::string& name);

struct ClusterConfig {
  int node_count = 6;
  Millicores node_cpu_m = 8000;
  Mebibytes node_mem_mi = 16384;
};

// How a task container actually behaves once started: it touches
// `true_peak_mem_mi` of memory. A pod whose granted memory is below the peak
// plus the beta headroom is killed; CPU shortage never kills and never
// stretches the run time.
struct RuntimeModelConfig {
  Mebibytes true_peak_mem_mi = 1000;
};

struct EngineConfig {
  ClusterConfig cluster;
  Policy policy = Policy::Aras;
  double alpha = 0.8;
  Mebibytes beta_mi = 20;
  ArrivalPattern pattern = default_pattern(ArrivalKind::Constant);
  TopologyKind workflow_kind = TopologyKind::Montage;
  std::uint64_t seed = 0;
  int max_rounds = 100;
  RuntimeModelConfig runtime;
  TaskDefaults task_defaults;
  Seconds cleanup_delay_s = 0;
  Seconds reallocation_delay_s = 0;
  Seconds sample_step_s = 1;
  bool check_invariants = true;
  // When non-empty these workflows are injected instead of pattern-generated
  // ones (ids must be unique; times give the arrival instants).
  std::vector<WorkflowArrivalPlan> explicit_workflows;
};

// One granted allocation, kept for the objective-style summary metrics.
struct AllocationSample {
  Seconds time = 0;
  WorkflowId workflow = 0;
  TaskId task = 0;
  Mebibytes allocated_mem_mi = 0;
  Millicores allocated_cpu_m = 0;
  Mebibytes residual_mem_before_mi = 0;
};

struct RunStats {
  Seconds first_arrival_s = 0;
  Seconds last_completion_s = 0;
  Seconds last_event_s = 0;
  int oom_count = 0;
  int workflow_count = 0;
  ResourceQuantity capacity;
  std::vector<AllocationSample> allocations;
  std::map<WorkflowId, Seconds> workflow_finish_s;
  // Allocation-path diagnostics.
  std::map<std::string, int> branch_counts;
  int parked_rounds = 0;   // failed adaptive evaluation rounds
  int forced_grants = 0;   // grants taken after the retry budget ran out
};

struct RunResult {
  EventLog log;
  MetricsSeries series;
  RunStats stats;
  std::string kb_snapshot;
};

// Runs the configured scenario to completion of every injected workflow.
// Deterministic: identical config and seed give identical logs and series.
// Throws Deadlock when pending work can never be placed.
RunResult run(const EngineConfig& config);

}  // namespace wfsim
