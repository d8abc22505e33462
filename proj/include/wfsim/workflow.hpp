#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wfsim/resources.hpp"

namespace wfsim {

using WorkflowId = std::int64_t;
using TaskId = std::int32_t;

// One workflow step. `cpu_m`/`mem_mi` are the user-declared request,
// `min_cpu_m`/`min_mem_mi` the floor below which the task cannot run.
struct TaskSpec {
  TaskId id = 0;
  std::string image;
  Millicores cpu_m = 0;
  Mebibytes mem_mi = 0;
  Seconds duration_s = 0;
  Millicores min_cpu_m = 0;
  Mebibytes min_mem_mi = 0;
  Seconds deadline_s = 0;  // absolute sim time

  ResourceQuantity request() const { return {cpu_m, mem_mi}; }
};

// DAG of tasks. Task ids are dense indexes into `tasks`; `edges` holds
// (predecessor, successor) pairs. Exactly one entry and one exit node.
struct WorkflowSpec {
  WorkflowId id = 0;
  std::string label;
  std::vector<TaskSpec> tasks;
  std::vector<std::pair<TaskId, TaskId>> edges;
  Seconds deadline_s = 0;  // equals the exit task's deadline
  Seconds inject_time_s = 0;

  int task_count() const { return static_cast<int>(tasks.size()); }
};

enum class TopologyKind { Montage, Epigenomics, CyberShake, Ligo };

int topology_task_count(TopologyKind kind);
const char* topology_name(TopologyKind kind);
std::optional<TopologyKind> topology_from_name(const std::string& name);

// Per-task (start, end) estimate used for the allocator's lookahead.
struct PredictedSchedule {
  struct Window {
    Seconds start = 0;
    Seconds end = 0;
  };
  std::vector<Window> by_task;  // indexed by task id

  const Window& window(TaskId t) const { return by_task.at(static_cast<std::size_t>(t)); }
};

struct ValidationIssue {
  Errc code;
  std::string detail;
};

// nullopt means the workflow is a well-formed single-entry/single-exit DAG.
std::optional<ValidationIssue> validate_dag(const WorkflowSpec& w);

// Tasks whose predecessors are all completed and that are neither completed
// nor in `in_flight`. `completed` must be downward-closed under precedence.
std::set<TaskId> ready_tasks(const WorkflowSpec& w,
                             const std::set<TaskId>& completed,
                             const std::set<TaskId>& in_flight = {});

// Longest-path schedule over declared durations: the entry starts at the
// workflow inject time, every other task starts at the max predicted end of
// its predecessors. Throws on an invalid DAG.
PredictedSchedule predicted_schedule(const WorkflowSpec& w);

std::vector<std::vector<TaskId>> predecessor_lists(const WorkflowSpec& w);
std::vector<std::vector<TaskId>> successor_lists(const WorkflowSpec& w);

// Kahn order over the edge relation. Throws on an invalid DAG.
std::vector<TaskId> topological_order(const WorkflowSpec& w);

// Instantiation defaults for generated topologies.
struct TaskDefaults {
  Millicores cpu_m = 2000;
  Mebibytes mem_mi = 4000;
  Millicores min_cpu_m = 1000;
  Mebibytes min_mem_mi = 1000;
  double deadline_slack = 3.0;  // deadline = predicted end * slack
};

// Builds one of the four fixed scientific-workflow topologies. Task durations
// are drawn uniformly from [10, 20] seconds using `rng_seed`; deadlines come
// from the predicted schedule scaled by `defaults.deadline_slack`.
WorkflowSpec build_topology(TopologyKind kind, Seconds inject_time,
                            std::uint64_t rng_seed,
                            const TaskDefaults& defaults = {});

}  // namespace wfsim
