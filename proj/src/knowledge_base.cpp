#include "wfsim/knowledge_base.hpp"

#include <algorithm>
#include <sstream>

namespace wfsim {

namespace {

std::string key_text(const TaskKey& key) {
  std::ostringstream os;
  os << "(workflow " << key.workflow << ", task " << key.task << ")";
  return os.str();
}

}  // namespace

void KnowledgeBase::register_workflow(WorkflowId id, int task_count,
                                      Seconds injected_at) {
  WorkflowStatus status;
  status.id = id;
  status.task_count = task_count;
  status.injected_at = injected_at;
  workflows_[id] = status;
}

void KnowledgeBase::reindex(const TaskKey& key, Seconds old_start,
                            Seconds new_start) {
  auto [lo, hi] = by_start_.equal_range(old_start);
  for (auto it = lo; it != hi; ++it) {
    if (it->second == key) {
      by_start_.erase(it);
      break;
    }
  }
  by_start_.emplace(new_start, key);
}

void KnowledgeBase::put_record(const TaskStateRecord& record) {
  auto it = records_.find(record.key);
  if (it == records_.end()) {
    records_.emplace(record.key, record);
    by_start_.emplace(record.t_start, record.key);
    return;
  }
  if (it->second.complete) {
    throw SimError(Errc::CompletedRecordMutation,
                   "record " + key_text(record.key) + " is already complete");
  }
  const Seconds old_start = it->second.t_start;
  it->second = record;
  if (old_start != record.t_start) {
    reindex(record.key, old_start, record.t_start);
  }
}

std::vector<TaskStateRecord> KnowledgeBase::query_overlapping(
    Seconds start, Seconds end) const {
  if (start >= end) {
    throw SimError(Errc::EmptyInterval, "query interval is empty");
  }
  std::vector<TaskStateRecord> result;
  for (auto it = by_start_.lower_bound(start);
       it != by_start_.end() && it->first < end; ++it) {
    const TaskStateRecord& record = records_.at(it->second);
    if (!record.complete) result.push_back(record);
  }
  std::sort(result.begin(), result.end(),
            [](const TaskStateRecord& a, const TaskStateRecord& b) {
              return a.key < b.key;
            });
  return result;
}

void KnowledgeBase::mark_complete(const TaskKey& key, Seconds t_end) {
  auto it = records_.find(key);
  if (it == records_.end()) {
    throw SimError(Errc::UnknownKey, "no record for " + key_text(key));
  }
  if (it->second.complete) {
    throw SimError(Errc::AlreadyComplete,
                   "record " + key_text(key) + " is already complete");
  }
  it->second.complete = true;
  it->second.t_end = t_end;

  auto wf = workflows_.find(key.workflow);
  if (wf != workflows_.end()) {
    ++wf->second.completed_tasks;
    if (wf->second.completed_tasks == wf->second.task_count) {
      wf->second.finished_at = t_end;
    }
  }
}

const TaskStateRecord* KnowledgeBase::find(const TaskKey& key) const {
  auto it = records_.find(key);
  return it == records_.end() ? nullptr : &it->second;
}

const WorkflowStatus* KnowledgeBase::workflow(WorkflowId id) const {
  auto it = workflows_.find(id);
  return it == workflows_.end() ? nullptr : &it->second;
}

std::vector<WorkflowStatus> KnowledgeBase::workflows() const {
  std::vector<WorkflowStatus> all;
  all.reserve(workflows_.size());
  for (const auto& [id, status] : workflows_) {
    (void)id;
    all.push_back(status);
  }
  return all;
}

void KnowledgeBase::write_snapshot(std::ostream& os) const {
  for (const auto& [key, r] : records_) {
    os << "workflow=" << key.workflow << " task=" << key.task
       << " t_start=" << r.t_start << " duration=" << r.duration
       << " t_end=" << r.t_end << " cpu=" << r.cpu_m << " mem=" << r.mem_mi
       << " flag=" << (r.complete ? "true" : "false") << "\n";
  }
}

}  // namespace wfsim
