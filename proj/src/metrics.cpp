#include "wfsim/metrics.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace wfsim {

namespace {

struct WorkflowTimes {
  Seconds arrival = 0;
  std::optional<Seconds> first_start;
  std::optional<Seconds> last_end;
  std::set<TaskId> completed;
};

std::map<WorkflowId, WorkflowTimes> collect_times(const EventLog& log) {
  std::map<WorkflowId, WorkflowTimes> times;
  for (const SimEvent& e : log.events) {
    if (!e.workflow) continue;
    WorkflowTimes& t = times[*e.workflow];
    switch (e.kind) {
      case EventKind::WorkflowArrival:
        t.arrival = e.time;
        break;
      case EventKind::PodStarted:
        if (!t.first_start) t.first_start = e.time;
        break;
      case EventKind::PodCompleted:
        t.last_end = std::max(t.last_end.value_or(e.time), e.time);
        if (e.task) t.completed.insert(*e.task);
        break;
      default:
        break;
    }
  }
  return times;
}

void require_all_finished(const EventLog& log,
                          const std::map<WorkflowId, WorkflowTimes>& times) {
  for (const auto& [wf, count] : log.workflow_task_counts) {
    auto it = times.find(wf);
    if (it == times.end() ||
        static_cast<int>(it->second.completed.size()) != count) {
      std::ostringstream msg;
      msg << "workflow " << wf << " did not finish in the log";
      throw SimError(Errc::IncompleteRun, msg.str());
    }
  }
}

}  // namespace

double total_duration_minutes(const EventLog& log) {
  const auto times = collect_times(log);
  require_all_finished(log, times);
  if (times.empty()) {
    throw SimError(Errc::IncompleteRun, "log holds no workflows");
  }
  Seconds first_arrival = std::numeric_limits<Seconds>::max();
  Seconds last_finish = 0;
  for (const auto& [wf, t] : times) {
    (void)wf;
    first_arrival = std::min(first_arrival, t.arrival);
    last_finish = std::max(last_finish, t.last_end.value_or(0));
  }
  return static_cast<double>(last_finish - first_arrival) / 60.0;
}

double avg_workflow_duration_minutes(const EventLog& log) {
  const auto times = collect_times(log);
  require_all_finished(log, times);
  if (times.empty()) {
    throw SimError(Errc::IncompleteRun, "log holds no workflows");
  }
  double sum = 0.0;
  for (const auto& [wf, t] : times) {
    (void)wf;
    sum += static_cast<double>(*t.last_end - *t.first_start) / 60.0;
  }
  return sum / static_cast<double>(times.size());
}

std::pair<double, double> resource_usage(const MetricsSeries& series,
                                         Seconds from, Seconds to) {
  std::vector<const MetricsSeries::Sample*> window;
  for (const auto& s : series.samples) {
    if (s.t >= from && s.t <= to) window.push_back(&s);
  }
  if (window.empty()) {
    throw SimError(Errc::EmptySeries, "no samples in the requested window");
  }
  auto frac_cpu = [](const MetricsSeries::Sample* s) {
    return static_cast<double>(s->cpu_used_m) /
           static_cast<double>(s->cpu_cap_m);
  };
  auto frac_mem = [](const MetricsSeries::Sample* s) {
    return static_cast<double>(s->mem_used_mi) /
           static_cast<double>(s->mem_cap_mi);
  };
  if (window.size() == 1) {
    return {frac_cpu(window.front()), frac_mem(window.front())};
  }
  double cpu_area = 0.0;
  double mem_area = 0.0;
  for (std::size_t i = 0; i + 1 < window.size(); ++i) {
    const double dt =
        static_cast<double>(window[i + 1]->t - window[i]->t);
    cpu_area += 0.5 * (frac_cpu(window[i]) + frac_cpu(window[i + 1])) * dt;
    mem_area += 0.5 * (frac_mem(window[i]) + frac_mem(window[i + 1])) * dt;
  }
  const double span =
      static_cast<double>(window.back()->t - window.front()->t);
  return {cpu_area / span, mem_area / span};
}

std::pair<double, double> resource_usage(const MetricsSeries& series) {
  if (series.samples.empty()) {
    throw SimError(Errc::EmptySeries, "series holds no samples");
  }
  return resource_usage(series, series.samples.front().t,
                        series.samples.back().t);
}

RunSummary build_summary(const RunResult& result, const EngineConfig& config) {
  RunSummary summary;
  summary.policy = policy_name(config.policy);
  summary.pattern = config.explicit_workflows.empty()
                        ? arrival_kind_name(config.pattern.kind)
                        : "file";
  summary.workflow_kind = topology_name(config.workflow_kind);
  summary.seed = config.seed;
  summary.workflow_count = result.stats.workflow_count;
  summary.oom_count = result.stats.oom_count;
  summary.total_duration_min = total_duration_minutes(result.log);
  summary.avg_workflow_duration_min = avg_workflow_duration_minutes(result.log);

  const auto usage =
      resource_usage(result.series, result.stats.first_arrival_s,
                     result.stats.last_completion_s);
  summary.cpu_usage_mean = usage.first;
  summary.mem_usage_mean = usage.second;

  double allocated_mem = 0.0;
  double residual_ratio = 0.0;
  for (const AllocationSample& a : result.stats.allocations) {
    allocated_mem += static_cast<double>(a.allocated_mem_mi);
    if (a.residual_mem_before_mi > 0) {
      residual_ratio += static_cast<double>(a.allocated_mem_mi) /
                        static_cast<double>(a.residual_mem_before_mi);
    }
  }
  summary.objective_capacity =
      allocated_mem / static_cast<double>(result.stats.capacity.mem_mi);
  summary.objective_residual = residual_ratio;

  const auto times = collect_times(result.log);
  for (const auto& [wf, t] : times) {
    if (t.first_start && t.last_end) {
      summary.per_workflow_duration_min[wf] =
          static_cast<double>(*t.last_end - *t.first_start) / 60.0;
    }
  }
  return summary;
}

std::string summary_to_json(const RunSummary& s) {
  nlohmann::ordered_json j;
  j["policy"] = s.policy;
  j["pattern"] = s.pattern;
  j["workflow_kind"] = s.workflow_kind;
  j["seed"] = s.seed;
  j["workflow_count"] = s.workflow_count;
  j["total_duration_min"] = s.total_duration_min;
  j["avg_workflow_duration_min"] = s.avg_workflow_duration_min;
  j["cpu_usage_mean"] = s.cpu_usage_mean;
  j["mem_usage_mean"] = s.mem_usage_mean;
  j["objective_capacity"] = s.objective_capacity;
  j["objective_residual"] = s.objective_residual;
  j["oom_count"] = s.oom_count;
  nlohmann::ordered_json per;
  for (const auto& [wf, minutes] : s.per_workflow_duration_min) {
    per[std::to_string(wf)] = minutes;
  }
  j["per_workflow_duration_min"] = per;
  return j.dump(2) + "\n";
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw SimError(Errc::IoError, "cannot open " + path.string());
  }
  out << body;
  if (!out) {
    throw SimError(Errc::IoError, "write failed for " + path.string());
  }
}

}  // namespace

void emit(const RunSummary& summary, const MetricsSeries& series,
          const EventLog& log, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw SimError(Errc::IoError, "cannot create " + out_dir);
  }
  const std::filesystem::path dir(out_dir);

  write_file(dir / "summary.json", summary_to_json(summary));

  std::ostringstream csv;
  csv << "t,cpu_used_m,mem_used_mi,cpu_cap_m,mem_cap_mi\n";
  for (const auto& s : series.samples) {
    csv << s.t << "," << s.cpu_used_m << "," << s.mem_used_mi << ","
        << s.cpu_cap_m << "," << s.mem_cap_mi << "\n";
  }
  write_file(dir / "series.csv", csv.str());

  write_file(dir / "events.log", log.render());

  // Arrival counts aligned with the usage curve.
  std::map<Seconds, int> arrivals;
  for (const SimEvent& e : log.events) {
    if (e.kind == EventKind::WorkflowArrival) ++arrivals[e.time];
  }
  std::ostringstream plot;
  plot << "t,workflows_arrived,cpu_used_m,mem_used_mi\n";
  int arrived = 0;
  auto next_arrival = arrivals.begin();
  for (const auto& s : series.samples) {
    while (next_arrival != arrivals.end() && next_arrival->first <= s.t) {
      arrived += next_arrival->second;
      ++next_arrival;
    }
    plot << s.t << "," << arrived << "," << s.cpu_used_m << ","
         << s.mem_used_mi << "\n";
  }
  write_file(dir / "plot.csv", plot.str());
}

}  // namespace wfsim
