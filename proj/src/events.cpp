#include "wfsim/events.hpp"

#include <sstream>

namespace wfsim {

const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::WorkflowArrival:
      return "WorkflowArrival";
    case EventKind::TaskReady:
      return "TaskReady";
    case EventKind::PodStarted:
      return "PodStarted";
    case EventKind::PodCompleted:
      return "PodCompleted";
    case EventKind::PodOOMKilled:
      return "PodOOMKilled";
    case EventKind::PodDeleted:
      return "PodDeleted";
    case EventKind::ResourceReleased:
      return "ResourceReleased";
    case EventKind::AllocationRetry:
      return "AllocationRetry";
  }
  return "?";
}

namespace {

template <typename T>
void put(std::ostringstream& os, const char* name,
         const std::optional<T>& value) {
  os << " " << name << "=";
  if (value) {
    os << *value;
  } else {
    os << "-";
  }
}

}  // namespace

std::string format_event(const SimEvent& e) {
  std::ostringstream os;
  os << "t=" << e.time << " kind=" << event_kind_name(e.kind);
  put(os, "wf", e.workflow);
  put(os, "task", e.task);
  put(os, "pod", e.pod);
  put(os, "node", e.node);
  put(os, "cpu_m", e.cpu_m);
  put(os, "mem_mi", e.mem_mi);
  os << " phase=" << (e.phase ? pod_phase_name(*e.phase) : "-");
  return os.str();
}

std::string EventLog::render() const {
  std::ostringstream os;
  for (const SimEvent& e : events) {
    os << format_event(e) << "\n";
  }
  return os.str();
}

}  // namespace wfsim
