#include "wfsim/workflow.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace wfsim {

namespace {

bool task_exists(const WorkflowSpec& w, TaskId t) {
  return t >= 0 && t < static_cast<TaskId>(w.tasks.size());
}

}  // namespace

std::vector<std::vector<TaskId>> predecessor_lists(const WorkflowSpec& w) {
  std::vector<std::vector<TaskId>> preds(w.tasks.size());
  for (const auto& [from, to] : w.edges) {
    preds[static_cast<std::size_t>(to)].push_back(from);
  }
  return preds;
}

std::vector<std::vector<TaskId>> successor_lists(const WorkflowSpec& w) {
  std::vector<std::vector<TaskId>> succs(w.tasks.size());
  for (const auto& [from, to] : w.edges) {
    succs[static_cast<std::size_t>(from)].push_back(to);
  }
  return succs;
}

std::optional<ValidationIssue> validate_dag(const WorkflowSpec& w) {
  if (w.tasks.empty()) {
    return ValidationIssue{Errc::MultipleEntryOrExit, "workflow has no tasks"};
  }
  for (const auto& [from, to] : w.edges) {
    if (!task_exists(w, from) || !task_exists(w, to)) {
      std::ostringstream msg;
      msg << "edge (" << from << ", " << to << ") references a missing task";
      return ValidationIssue{Errc::DanglingEdge, msg.str()};
    }
  }

  const auto preds = predecessor_lists(w);
  const auto succs = successor_lists(w);

  int entries = 0;
  int exits = 0;
  for (std::size_t t = 0; t < w.tasks.size(); ++t) {
    if (preds[t].empty()) ++entries;
    if (succs[t].empty()) ++exits;
  }
  if (entries != 1 || exits != 1) {
    std::ostringstream msg;
    msg << "expected exactly one entry and one exit node, found " << entries
        << " entries and " << exits << " exits";
    return ValidationIssue{Errc::MultipleEntryOrExit, msg.str()};
  }

  // Kahn's algorithm; leftover nodes mean a cycle.
  std::vector<int> indegree(w.tasks.size(), 0);
  for (const auto& [from, to] : w.edges) {
    (void)from;
    ++indegree[static_cast<std::size_t>(to)];
  }
  std::deque<TaskId> queue;
  for (std::size_t t = 0; t < w.tasks.size(); ++t) {
    if (indegree[t] == 0) queue.push_back(static_cast<TaskId>(t));
  }
  std::size_t visited = 0;
  while (!queue.empty()) {
    const TaskId t = queue.front();
    queue.pop_front();
    ++visited;
    for (TaskId s : succs[static_cast<std::size_t>(t)]) {
      if (--indegree[static_cast<std::size_t>(s)] == 0) queue.push_back(s);
    }
  }
  if (visited != w.tasks.size()) {
    return ValidationIssue{Errc::CycleDetected,
                           "edge relation contains a cycle"};
  }
  return std::nullopt;
}

std::set<TaskId> ready_tasks(const WorkflowSpec& w,
                             const std::set<TaskId>& completed,
                             const std::set<TaskId>& in_flight) {
  const auto preds = predecessor_lists(w);
  for (TaskId done : completed) {
    if (!task_exists(w, done)) {
      throw SimError(Errc::InvalidCompletedSet,
                     "completed set references a missing task");
    }
    for (TaskId p : preds[static_cast<std::size_t>(done)]) {
      if (!completed.count(p)) {
        std::ostringstream msg;
        msg << "task " << done << " is completed but its predecessor " << p
            << " is not";
        throw SimError(Errc::InvalidCompletedSet, msg.str());
      }
    }
  }

  std::set<TaskId> ready;
  for (std::size_t t = 0; t < w.tasks.size(); ++t) {
    const TaskId id = static_cast<TaskId>(t);
    if (completed.count(id) || in_flight.count(id)) continue;
    const auto& p = preds[t];
    if (std::all_of(p.begin(), p.end(),
                    [&](TaskId x) { return completed.count(x) > 0; })) {
      ready.insert(id);
    }
  }
  return ready;
}

std::vector<TaskId> topological_order(const WorkflowSpec& w) {
  if (auto issue = validate_dag(w)) {
    throw SimError(issue->code, issue->detail);
  }
  const auto succs = successor_lists(w);
  std::vector<int> indegree(w.tasks.size(), 0);
  for (const auto& [from, to] : w.edges) {
    (void)from;
    ++indegree[static_cast<std::size_t>(to)];
  }
  std::deque<TaskId> queue;
  for (std::size_t t = 0; t < w.tasks.size(); ++t) {
    if (indegree[t] == 0) queue.push_back(static_cast<TaskId>(t));
  }
  std::vector<TaskId> order;
  order.reserve(w.tasks.size());
  while (!queue.empty()) {
    const TaskId t = queue.front();
    queue.pop_front();
    order.push_back(t);
    for (TaskId s : succs[static_cast<std::size_t>(t)]) {
      if (--indegree[static_cast<std::size_t>(s)] == 0) queue.push_back(s);
    }
  }
  return order;
}

PredictedSchedule predicted_schedule(const WorkflowSpec& w) {
  const std::vector<TaskId> order = topological_order(w);
  const auto preds = predecessor_lists(w);

  PredictedSchedule sched;
  sched.by_task.resize(w.tasks.size());
  for (TaskId t : order) {
    Seconds start = w.inject_time_s;
    for (TaskId p : preds[static_cast<std::size_t>(t)]) {
      start = std::max(start, sched.by_task[static_cast<std::size_t>(p)].end);
    }
    auto& win = sched.by_task[static_cast<std::size_t>(t)];
    win.start = start;
    win.end = start + w.tasks[static_cast<std::size_t>(t)].duration_s;
  }
  return sched;
}

}  // namespace wfsim
