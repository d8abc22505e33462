#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wfsim/cluster.hpp"
#include "wfsim/resources.hpp"
#include "wfsim/workflow.hpp"

namespace wfsim {

enum class EventKind {
  WorkflowArrival,
  TaskReady,
  PodStarted,
  PodCompleted,
  PodOOMKilled,
  PodDeleted,
  ResourceReleased,
  AllocationRetry,
};

const char* event_kind_name(EventKind kind);

// One time-stamped engine event. Absent fields render as "-".
struct SimEvent {
  Seconds time = 0;
  EventKind kind = EventKind::WorkflowArrival;
  std::optional<WorkflowId> workflow;
  std::optional<TaskId> task;
  std::optional<PodId> pod;
  std::optional<NodeId> node;
  std::optional<Millicores> cpu_m;
  std::optional<Mebibytes> mem_mi;
  std::optional<PodPhase> phase;
};

// Fixed field order for diffable line output.
std::string format_event(const SimEvent& event);

struct EventLog {
  std::vector<SimEvent> events;
  std::map<WorkflowId, int> workflow_task_counts;

  std::string render() const;
};

}  // namespace wfsim
