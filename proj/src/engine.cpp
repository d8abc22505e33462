#include "wfsim/engine.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <queue>
#include <random>
#include <sstream>

namespace wfsim {

const char* policy_name(Policy policy) {
  return policy == Policy::Aras ? "aras" : "baseline";
}

std::optional<Policy> policy_from_name(const std::string& name) {
  if (name == "aras") return Policy::Aras;
  if (name == "baseline") return Policy::Baseline;
  return std::nullopt;
}

namespace {

// Same-time events are processed in a fixed kind order: terminal pod
// transitions free resources first, releases wake waiting allocations, new
// work joins afterwards, and start commits come last.
int kind_priority(EventKind kind) {
  switch (kind) {
    case EventKind::PodOOMKilled:
      return 0;
    case EventKind::PodCompleted:
      return 1;
    case EventKind::PodDeleted:
      return 2;
    case EventKind::ResourceReleased:
      return 3;
    case EventKind::WorkflowArrival:
      return 4;
    case EventKind::TaskReady:
      return 5;
    case EventKind::AllocationRetry:
      return 6;
    case EventKind::PodStarted:
      return 7;
  }
  return 8;
}

struct QueuedEvent {
  SimEvent event;
  int priority = 0;
  std::uint64_t seq = 0;
};

struct QueuedEventAfter {
  bool operator()(const QueuedEvent& a, const QueuedEvent& b) const {
    if (a.event.time != b.event.time) return a.event.time > b.event.time;
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.seq > b.seq;
  }
};

enum class ServeTrigger { Ready, Release, Retry };

struct WorkflowRun {
  WorkflowSpec spec;
  PredictedSchedule schedule;
  std::vector<TaskId> topo_order;
  std::set<TaskId> completed;
  std::set<TaskId> dispatched;  // ready-announced or executing
  std::set<TaskId> running;
  bool arrived = false;
  bool finished = false;
};

struct ParkedTask {
  int rounds = 0;           // failed evaluation rounds so far
  bool evaluated = false;   // parked tasks re-evaluate only on releases
  Seconds last_round_at = -1;
};

class Engine {
 public:
  explicit Engine(const EngineConfig& config)
      : config_(config), cluster_(make_nodes(config)) {
    validate_config();
    oom_rng_.seed(mix_seed(config_.seed, 0xf00dULL));
  }

  RunResult run();

 private:
  static std::vector<NodeSpec> make_nodes(const EngineConfig& config) {
    std::vector<NodeSpec> nodes;
    nodes.reserve(static_cast<std::size_t>(std::max(0, config.cluster.node_count)));
    for (int i = 0; i < config.cluster.node_count; ++i) {
      nodes.push_back(
          {static_cast<NodeId>(i),
           {config.cluster.node_cpu_m, config.cluster.node_mem_mi}});
    }
    return nodes;
  }

  void validate_config() const {
    const EngineConfig& c = config_;
    if (c.cluster.node_count < 1 || c.cluster.node_cpu_m <= 0 ||
        c.cluster.node_mem_mi <= 0) {
      throw SimError(Errc::InvalidConfig, "cluster must have resourceful nodes");
    }
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) {
      throw SimError(Errc::InvalidConfig, "alpha must lie in (0, 1)");
    }
    if (c.beta_mi < 20) {
      throw SimError(Errc::InvalidConfig, "beta must be at least 20 MiB");
    }
    if (c.max_rounds < 1) {
      throw SimError(Errc::InvalidConfig, "max_rounds must be positive");
    }
    if (c.sample_step_s < 1) {
      throw SimError(Errc::InvalidConfig, "sample step must be positive");
    }
    if (c.cleanup_delay_s < 0 || c.reallocation_delay_s < 0) {
      throw SimError(Errc::InvalidConfig, "delays must be non-negative");
    }
    if (c.runtime.true_peak_mem_mi <= 0) {
      throw SimError(Errc::InvalidConfig, "true peak memory must be positive");
    }
  }

  void schedule(SimEvent event) {
    queue_.push({event, kind_priority(event.kind), next_seq_++});
  }

  WorkflowRun& wf_run(WorkflowId id) { return workflows_.at(id); }
  const TaskSpec& task_spec(const TaskKey& key) {
    return wf_run(key.workflow)
        .spec.tasks.at(static_cast<std::size_t>(key.task));
  }

  void record_occupancy(Seconds now) {
    occupancy_.emplace_back(now, cluster_.used());
  }

  void check_invariants() {
    // Eq.-style conservation: recompute residuals from the pod list; this
    // throws if any node is oversubscribed. The ledger must agree with it.
    const ResidualMap recomputed = discover_residual(cluster_.nodes(), pods_);
    if (recomputed != cluster_.residual()) {
      throw SimError(Errc::NegativeResidual,
                     "occupancy ledger disagrees with pod-list recomputation");
    }
  }

  // --- event handlers -----------------------------------------------------

  void on_arrival(Seconds now, WorkflowId wf_id) {
    WorkflowRun& run = wf_run(wf_id);
    run.arrived = true;
    kb_.register_workflow(wf_id, run.spec.task_count(), now);
    for (const TaskSpec& task : run.spec.tasks) {
      TaskStateRecord record;
      record.key = {wf_id, task.id};
      record.t_start = run.schedule.window(task.id).start;
      record.duration = task.duration_s;
      record.t_end = run.schedule.window(task.id).end;
      record.cpu_m = task.cpu_m;
      record.mem_mi = task.mem_mi;
      kb_.put_record(record);
    }
    ++unfinished_;

    for (TaskId ready : ready_tasks(run.spec, {}, {})) {
      announce_ready(now, {wf_id, ready});
    }
  }

  void announce_ready(Seconds now, const TaskKey& key) {
    wf_run(key.workflow).dispatched.insert(key.task);
    SimEvent e;
    e.time = now;
    e.kind = EventKind::TaskReady;
    e.workflow = key.workflow;
    e.task = key.task;
    schedule(e);
  }

  void on_task_ready(Seconds now, const TaskKey& key) {
    enqueue_request(key);
    serve(now, ServeTrigger::Ready);
  }

  void enqueue_request(const TaskKey& key) {
    if (config_.policy == Policy::Baseline) {
      fcfs_.push_back(key);
    } else {
      parked_.emplace(key, ParkedTask{});
    }
  }

  void on_retry(Seconds now, const TaskKey& key) {
    enqueue_request(key);
    serve(now, ServeTrigger::Retry);
  }

  void on_release(Seconds now) { serve(now, ServeTrigger::Release); }

  // Records hold the live schedule estimate: actual times once a pod runs,
  // otherwise the longest path rolled forward over observed starts and
  // completions. A task waiting past its estimate keeps a window anchored in
  // the past, so it stops counting stale peers and degrades to a plain
  // full-request grant instead of starving on its own lookahead.
  void record_actual_start(const TaskKey& key, Seconds now) {
    const TaskSpec& task = task_spec(key);
    TaskStateRecord record;
    record.key = key;
    record.t_start = now;
    record.duration = task.duration_s;
    record.t_end = now + task.duration_s;
    record.cpu_m = task.cpu_m;
    record.mem_mi = task.mem_mi;
    kb_.put_record(record);
    repredict(key.workflow);
  }

  // Rolls the longest-path schedule forward over actual execution state and
  // refreshes the knowledge-base records of every task that has not run yet.
  void repredict(WorkflowId wf_id) {
    WorkflowRun& run = wf_run(wf_id);
    if (!run.arrived || run.finished) return;
    const auto preds = predecessor_lists(run.spec);

    std::vector<Seconds> est_end(run.spec.tasks.size(), 0);
    for (TaskId t : run.topo_order) {
      const std::size_t i = static_cast<std::size_t>(t);
      const TaskSpec& task = run.spec.tasks[i];
      const TaskKey key{wf_id, t};
      const TaskStateRecord* record = kb_.find(key);
      if (record && (record->complete || run.running.count(t))) {
        est_end[i] = record->t_end;  // actual end, or actual start + duration
        continue;
      }
      Seconds start = run.spec.inject_time_s;
      for (TaskId p : preds[i]) {
        start = std::max(start, est_end[static_cast<std::size_t>(p)]);
      }
      est_end[i] = start + task.duration_s;

      TaskStateRecord fresh;
      fresh.key = key;
      fresh.t_start = start;
      fresh.duration = task.duration_s;
      fresh.t_end = est_end[i];
      fresh.cpu_m = task.cpu_m;
      fresh.mem_mi = task.mem_mi;
      kb_.put_record(fresh);
    }
  }

  void serve(Seconds now, ServeTrigger trigger) {
    if (config_.policy == Policy::Baseline) {
      serve_baseline(now);
    } else {
      serve_adaptive(now, trigger);
    }
  }

  void serve_baseline(Seconds now) {
    // Strict FCFS: a head that cannot be satisfied blocks the queue.
    while (!fcfs_.empty()) {
      const TaskKey key = fcfs_.front();
      const TaskSpec& task = task_spec(key);
      const ResidualMap residual = discover_residual(cluster_.nodes(), pods_);
      const auto decision = allocate_baseline(task, residual);
      if (!decision) return;
      // A granted baseline decision implies at least one node fits.
      const auto node = place_pod(residual, decision->allocated);
      if (!node) return;
      fcfs_.pop_front();
      start_pod(now, key, decision->allocated, *node);
    }
  }

  void serve_adaptive(Seconds now, ServeTrigger trigger) {
    std::vector<TaskKey> keys;
    keys.reserve(parked_.size());
    for (const auto& [key, park] : parked_) {
      if (trigger == ServeTrigger::Ready && park.evaluated) continue;
      keys.push_back(key);
    }
    for (const TaskKey& key : keys) {
      auto it = parked_.find(key);
      if (it == parked_.end()) continue;
      if (try_allocate_adaptive(now, key, it->second)) {
        parked_.erase(it);
      }
    }
  }

  // Same-instant release clusters are one reallocation opportunity, not
  // many; the retry budget counts distinct instants.
  void count_round(Seconds now, ParkedTask& park) {
    if (park.last_round_at != now) {
      ++park.rounds;
      ++stats_.parked_rounds;
      park.last_round_at = now;
    }
  }

  // One adaptive round for `key`. Returns true when a pod was bound.
  bool try_allocate_adaptive(Seconds now, const TaskKey& key,
                             ParkedTask& park) {
    const TaskSpec& task = task_spec(key);

    AllocatorParams params;
    params.alpha = config_.alpha;
    params.beta_mi = config_.beta_mi;
    params.retry.max_rounds = config_.max_rounds;

    // The lookahead window is the task's stored interval: the longest-path
    // prediction until it has actually run. Peers drop out of the window as
    // they start, so the accumulated competition decays as the wave drains.
    const TaskStateRecord* record = kb_.find(key);
    const Seconds window_start =
        record ? record->t_start : wf_run(key.workflow).schedule.window(key.task).start;
    const Seconds window_end = window_start + task.duration_s;

    const auto decision =
        allocate_adaptive(task, key, window_start, window_end,
                          cluster_.nodes(), pods_, kb_, params);
    park.evaluated = true;
    if (decision && decision->branch) {
      ++stats_.branch_counts[decision->branch->name()];
    }

    if (decision && decision->viable) {
      const auto node = place_pod(cluster_.residual(), decision->allocated);
      if (node) {
        start_pod(now, key, decision->allocated, *node);
        return true;
      }
      count_round(now, park);
      return false;
    }

    count_round(now, park);
    if (park.rounds > config_.max_rounds && decision) {
      // The wait is over: let the latest (non-viable) grant reach a pod so
      // the out-of-memory recovery path can take it from here. Units are
      // clamped to one so the pod object is well-formed.
      ResourceQuantity forced = decision->allocated;
      forced.cpu_m = std::max<Millicores>(1, forced.cpu_m);
      forced.mem_mi = std::max<Mebibytes>(1, forced.mem_mi);
      const auto node = place_pod(cluster_.residual(), forced);
      if (node) {
        ++stats_.forced_grants;
        start_pod(now, key, forced, *node);
        return true;
      }
    }
    return false;
  }

  void start_pod(Seconds now, const TaskKey& key, const ResourceQuantity& alloc,
                 NodeId node) {
    const ClusterTotals before = totals_and_max(cluster_.residual());

    PodRecord pod;
    pod.id = next_pod_id_++;
    pod.workflow = key.workflow;
    pod.task = key.task;
    pod.request = alloc;
    pod.phase = PodPhase::Pending;
    cluster_.bind(pod, node);
    pods_.push_back(pod);
    record_occupancy(now);

    AllocationSample sample;
    sample.time = now;
    sample.workflow = key.workflow;
    sample.task = key.task;
    sample.allocated_cpu_m = alloc.cpu_m;
    sample.allocated_mem_mi = alloc.mem_mi;
    sample.residual_mem_before_mi = before.total_residual.mem_mi;
    stats_.allocations.push_back(sample);

    SimEvent e;
    e.time = now;
    e.kind = EventKind::PodStarted;
    e.workflow = key.workflow;
    e.task = key.task;
    e.pod = pod.id;
    e.node = node;
    e.cpu_m = alloc.cpu_m;
    e.mem_mi = alloc.mem_mi;
    e.phase = PodPhase::Running;
    schedule(e);
  }

  void on_pod_started(Seconds now, PodId pod_id) {
    PodRecord& pod = pods_.at(static_cast<std::size_t>(pod_id - 1));
    pod.phase = PodPhase::Running;
    pod.start_time = now;
    const TaskKey key{pod.workflow, pod.task};
    wf_run(pod.workflow).running.insert(pod.task);
    record_actual_start(key, now);

    const TaskSpec& task = task_spec(key);
    const Mebibytes needed =
        config_.runtime.true_peak_mem_mi + config_.beta_mi;

    SimEvent outcome;
    outcome.workflow = pod.workflow;
    outcome.task = pod.task;
    outcome.pod = pod.id;
    outcome.node = pod.node;
    outcome.cpu_m = pod.request.cpu_m;
    outcome.mem_mi = pod.request.mem_mi;
    if (pod.request.mem_mi < needed) {
      // Memory is incompressible: an under-provisioned pod dies mid-run.
      // CPU shortage neither kills the pod nor stretches its duration.
      const Seconds span = std::max<Seconds>(1, task.duration_s - 1);
      std::uniform_int_distribution<Seconds> delay(1, span);
      outcome.time = now + delay(oom_rng_);
      outcome.kind = EventKind::PodOOMKilled;
      outcome.phase = PodPhase::OOMKilled;
    } else {
      outcome.time = now + task.duration_s;
      outcome.kind = EventKind::PodCompleted;
      outcome.phase = PodPhase::Succeeded;
    }
    schedule(outcome);
  }

  void finish_terminal_pod(Seconds now, PodRecord& pod) {
    cluster_.release(pod);
    record_occupancy(now);

    SimEvent released;
    released.time = now;
    released.kind = EventKind::ResourceReleased;
    released.workflow = pod.workflow;
    released.task = pod.task;
    released.pod = pod.id;
    released.node = pod.node;
    released.cpu_m = pod.request.cpu_m;
    released.mem_mi = pod.request.mem_mi;
    schedule(released);

    SimEvent deleted;
    deleted.time = now + config_.cleanup_delay_s;
    deleted.kind = EventKind::PodDeleted;
    deleted.workflow = pod.workflow;
    deleted.task = pod.task;
    deleted.pod = pod.id;
    deleted.node = pod.node;
    deleted.cpu_m = pod.request.cpu_m;
    deleted.mem_mi = pod.request.mem_mi;
    deleted.phase = PodPhase::Deleted;
    schedule(deleted);
  }

  void on_pod_completed(Seconds now, PodId pod_id) {
    PodRecord& pod = pods_.at(static_cast<std::size_t>(pod_id - 1));
    pod.phase = PodPhase::Succeeded;
    pod.end_time = now;
    finish_terminal_pod(now, pod);

    const TaskKey key{pod.workflow, pod.task};
    kb_.mark_complete(key, now);

    WorkflowRun& run = wf_run(pod.workflow);
    run.running.erase(pod.task);
    run.completed.insert(pod.task);
    repredict(pod.workflow);
    if (static_cast<int>(run.completed.size()) == run.spec.task_count()) {
      run.finished = true;
      --unfinished_;
      stats_.workflow_finish_s[pod.workflow] = now;
      stats_.last_completion_s = std::max(stats_.last_completion_s, now);
    }

    // Readiness fires exactly once: only the final predecessor's completion
    // sees every other predecessor already done.
    const auto preds = predecessor_lists(run.spec);
    const auto succs = successor_lists(run.spec);
    for (TaskId succ : succs[static_cast<std::size_t>(pod.task)]) {
      if (run.dispatched.count(succ)) continue;
      const auto& need = preds[static_cast<std::size_t>(succ)];
      if (std::all_of(need.begin(), need.end(), [&](TaskId p) {
            return run.completed.count(p) > 0;
          })) {
        announce_ready(now, {pod.workflow, succ});
      }
    }
  }

  void on_pod_oomkilled(Seconds now, PodId pod_id) {
    PodRecord& pod = pods_.at(static_cast<std::size_t>(pod_id - 1));
    pod.phase = PodPhase::OOMKilled;
    pod.end_time = now;
    ++stats_.oom_count;
    wf_run(pod.workflow).running.erase(pod.task);
    repredict(pod.workflow);
    finish_terminal_pod(now, pod);

    // Grants never exceed the declared request, so a pod that dies with its
    // full request can never succeed on a retry.
    const TaskSpec& task = task_spec({pod.workflow, pod.task});
    if (pod.request.covers(task.request())) {
      std::ostringstream msg;
      msg << "task (workflow " << pod.workflow << ", task " << pod.task
          << ") exceeds its declared memory request even at full grant "
          << pod.request << "; it can never complete";
      throw SimError(Errc::Deadlock, msg.str());
    }

    // Regenerate the task: it re-enters allocation under a fresh pod id.
    SimEvent retry;
    retry.time = now + config_.reallocation_delay_s;
    retry.kind = EventKind::AllocationRetry;
    retry.workflow = pod.workflow;
    retry.task = pod.task;
    schedule(retry);
  }

  void on_pod_deleted(PodId pod_id) {
    pods_.at(static_cast<std::size_t>(pod_id - 1)).phase = PodPhase::Deleted;
  }

  // --- stuck-run handling ---------------------------------------------------

  [[noreturn]] void report_deadlock(Seconds now) {
    std::ostringstream msg;
    msg << "no progress possible at t=" << now << "s;";
    if (config_.policy == Policy::Baseline && !fcfs_.empty()) {
      const TaskKey head = fcfs_.front();
      const TaskSpec& task = task_spec(head);
      msg << " head-of-line task (workflow " << head.workflow << ", task "
          << head.task << ") requires " << task.request()
          << " but no node can ever satisfy it";
    } else if (!parked_.empty()) {
      msg << " " << parked_.size()
          << " task(s) parked with no placeable allocation";
    } else {
      msg << " workflows incomplete with no queued work";
    }
    msg << "; " << unfinished_ << " workflow(s) unfinished";
    throw SimError(Errc::Deadlock, msg.str());
  }

  // Called when the event queue drains with workflows still unfinished.
  // With nothing running there will never be another release, so the engine
  // polls once per second instead: the re-evaluation loop keeps spinning
  // while simulated time flows, lookahead windows slide past stale
  // predictions, and either a grant becomes viable or the retry budget runs
  // out and the latest grant is forced through.
  bool drain_stalled(Seconds now) {
    if (config_.policy == Policy::Baseline || parked_.empty()) {
      report_deadlock(now);
    }
    SimEvent tick;
    tick.time = now + 1;
    tick.kind = EventKind::AllocationRetry;
    tick.workflow = parked_.begin()->first.workflow;
    tick.task = parked_.begin()->first.task;
    schedule(tick);
    return true;
  }

  RunResult finalize();

  EngineConfig config_;
  Cluster cluster_;
  KnowledgeBase kb_;
  std::vector<PodRecord> pods_;
  std::map<WorkflowId, WorkflowRun> workflows_;
  std::map<TaskKey, ParkedTask> parked_;
  std::deque<TaskKey> fcfs_;
  std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, QueuedEventAfter>
      queue_;
  std::uint64_t next_seq_ = 0;
  PodId next_pod_id_ = 1;
  int unfinished_ = 0;
  std::mt19937_64 oom_rng_;
  EventLog log_;
  RunStats stats_;
  std::vector<std::pair<Seconds, ResourceQuantity>> occupancy_;
};

RunResult Engine::run() {
  std::vector<WorkflowArrivalPlan> plan;
  if (!config_.explicit_workflows.empty()) {
    plan = config_.explicit_workflows;
  } else {
    plan = plan_injections(generate_arrivals(config_.pattern),
                           config_.workflow_kind, config_.seed,
                           config_.task_defaults);
  }

  bool first = true;
  for (const WorkflowArrivalPlan& item : plan) {
    if (auto issue = validate_dag(item.workflow)) {
      throw SimError(issue->code, "workflow " + std::to_string(item.workflow.id) +
                                      ": " + issue->detail);
    }
    if (workflows_.count(item.workflow.id)) {
      throw SimError(Errc::InvalidConfig, "duplicate workflow id");
    }
    WorkflowRun run;
    run.spec = item.workflow;
    run.spec.inject_time_s = item.time;
    run.schedule = predicted_schedule(run.spec);
    run.topo_order = topological_order(run.spec);
    workflows_.emplace(item.workflow.id, std::move(run));
    log_.workflow_task_counts[item.workflow.id] = item.workflow.task_count();

    SimEvent arrival;
    arrival.time = item.time;
    arrival.kind = EventKind::WorkflowArrival;
    arrival.workflow = item.workflow.id;
    schedule(arrival);

    if (first || item.time < stats_.first_arrival_s) {
      stats_.first_arrival_s = item.time;
      first = false;
    }
  }
  stats_.workflow_count = static_cast<int>(plan.size());
  stats_.capacity = cluster_.capacity();

  Seconds now = 0;
  std::uint64_t processed = 0;
  // Far beyond any desk-scale run; trips only on a livelocked configuration.
  const std::uint64_t event_cap = 50'000'000;
  while (true) {
    if (queue_.empty()) {
      if (unfinished_ == 0 && fcfs_.empty() && parked_.empty()) break;
      drain_stalled(now);
      continue;
    }
    if (++processed > event_cap) {
      throw SimError(Errc::Deadlock, "run exceeded the event budget without "
                                     "finishing every workflow");
    }
    const QueuedEvent queued = queue_.top();
    queue_.pop();
    const SimEvent& e = queued.event;
    now = e.time;
    log_.events.push_back(e);

    switch (e.kind) {
      case EventKind::WorkflowArrival:
        on_arrival(now, *e.workflow);
        break;
      case EventKind::TaskReady:
        on_task_ready(now, {*e.workflow, *e.task});
        break;
      case EventKind::PodStarted:
        on_pod_started(now, *e.pod);
        break;
      case EventKind::PodCompleted:
        on_pod_completed(now, *e.pod);
        break;
      case EventKind::PodOOMKilled:
        on_pod_oomkilled(now, *e.pod);
        break;
      case EventKind::PodDeleted:
        on_pod_deleted(*e.pod);
        break;
      case EventKind::ResourceReleased:
        on_release(now);
        break;
      case EventKind::AllocationRetry:
        on_retry(now, {*e.workflow, *e.task});
        break;
    }
    if (config_.check_invariants) check_invariants();
    stats_.last_event_s = now;
  }

  return finalize();
}

RunResult Engine::finalize() {
  RunResult result;
  result.log = std::move(log_);
  result.stats = std::move(stats_);

  MetricsSeries series;
  series.step_s = config_.sample_step_s;
  const ResourceQuantity cap = cluster_.capacity();
  std::size_t i = 0;
  ResourceQuantity current;
  for (Seconds t = 0; t <= result.stats.last_event_s;
       t += config_.sample_step_s) {
    while (i < occupancy_.size() && occupancy_[i].first <= t) {
      current = occupancy_[i].second;
      ++i;
    }
    series.samples.push_back(
        {t, current.cpu_m, current.mem_mi, cap.cpu_m, cap.mem_mi});
  }
  result.series = std::move(series);

  std::ostringstream snapshot;
  kb_.write_snapshot(snapshot);
  result.kb_snapshot = snapshot.str();
  return result;
}

}  // namespace

RunResult run(const EngineConfig& config) { return Engine(config).run(); }

}  // namespace wfsim
