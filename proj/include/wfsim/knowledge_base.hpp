#pragma once

#include <compare>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "wfsim/resources.hpp"
#include "wfsim/workflow.hpp"

namespace wfsim {

struct TaskKey {
  WorkflowId workflow = 0;
  TaskId task = 0;

  auto operator<=>(const TaskKey&) const = default;
};

// Task-state record: start, duration, end, cpu, mem, completion flag.
// Start and end hold predictions until the task actually runs or finishes.
// cpu/mem are the user-declared request, not the granted quota.
struct TaskStateRecord {
  TaskKey key;
  Seconds t_start = 0;
  Seconds duration = 0;
  Seconds t_end = 0;
  Millicores cpu_m = 0;
  Mebibytes mem_mi = 0;
  bool complete = false;
};

struct WorkflowStatus {
  WorkflowId id = 0;
  Seconds injected_at = 0;
  int task_count = 0;
  int completed_tasks = 0;
  std::optional<Seconds> finished_at;
};

// In-process store for workflow execution state. Single writer (the engine);
// readers get value snapshots.
class KnowledgeBase {
 public:
  void register_workflow(WorkflowId id, int task_count, Seconds injected_at);

  // Upserts a record. A record whose completion flag is already set can no
  // longer be touched.
  void put_record(const TaskStateRecord& record);

  // All incomplete records whose t_start lies in [start, end), ordered by
  // (workflow id, task id).
  std::vector<TaskStateRecord> query_overlapping(Seconds start,
                                                 Seconds end) const;

  // Flips the completion flag, fixes t_end, and updates the workflow status.
  void mark_complete(const TaskKey& key, Seconds t_end);

  const TaskStateRecord* find(const TaskKey& key) const;
  const WorkflowStatus* workflow(WorkflowId id) const;
  std::vector<WorkflowStatus> workflows() const;
  std::size_t record_count() const { return records_.size(); }

  // Line-delimited dump, one record per line, fields in stored order.
  void write_snapshot(std::ostream& os) const;

 private:
  void reindex(const TaskKey& key, Seconds old_start, Seconds new_start);

  std::map<TaskKey, TaskStateRecord> records_;
  std::multimap<Seconds, TaskKey> by_start_;
  std::map<WorkflowId, WorkflowStatus> workflows_;
};

}  // namespace wfsim
