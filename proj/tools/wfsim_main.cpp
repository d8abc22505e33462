// wfsim: discrete-event simulation of DAG workflow execution on a small
// container cluster, comparing an adaptive vertical-scaling allocator (aras)
// against a first-come-first-serve baseline.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wfsim/engine.hpp"
#include "wfsim/metrics.hpp"

namespace {

using nlohmann::json;

// One document per workflow: either a named topology or an explicit task
// list with dependencies.
wfsim::WorkflowArrivalPlan parse_workflow_doc(const json& doc,
                                              wfsim::WorkflowId id,
                                              std::uint64_t run_seed,
                                              const wfsim::TaskDefaults& defaults) {
  wfsim::WorkflowArrivalPlan plan;
  plan.time = doc.value("inject_time_s", 0);

  wfsim::TaskDefaults local = defaults;
  local.deadline_slack = doc.value("slack_factor", defaults.deadline_slack);
  if (local.deadline_slack < 1.0) {
    throw wfsim::SimError(wfsim::Errc::InvalidConfig,
                          "slack_factor must be at least 1");
  }

  if (doc.contains("kind")) {
    const auto kind = wfsim::topology_from_name(doc.at("kind").get<std::string>());
    if (!kind) {
      throw wfsim::SimError(wfsim::Errc::InvalidConfig,
                            "unknown workflow kind in file");
    }
    plan.workflow = wfsim::build_topology(
        *kind, plan.time, wfsim::mix_seed(run_seed, static_cast<std::uint64_t>(id)),
        local);
  } else if (doc.contains("tasks")) {
    wfsim::WorkflowSpec w;
    w.inject_time_s = plan.time;
    std::map<std::string, wfsim::TaskId> ids;
    for (const auto& t : doc.at("tasks")) {
      const auto name = t.at("id").get<std::string>();
      if (ids.count(name)) {
        throw wfsim::SimError(wfsim::Errc::InvalidConfig,
                              "duplicate task id '" + name + "'");
      }
      wfsim::TaskSpec task;
      task.id = static_cast<wfsim::TaskId>(w.tasks.size());
      ids[name] = task.id;
      task.image = t.value("image", "user-task:" + name);
      task.cpu_m = t.value("cpu_m", local.cpu_m);
      task.mem_mi = t.value("mem_mi", local.mem_mi);
      task.min_cpu_m = t.value("min_cpu_m", local.min_cpu_m);
      task.min_mem_mi = t.value("min_mem_mi", local.min_mem_mi);
      task.duration_s = t.value("duration_s", 10);
      if (task.cpu_m < task.min_cpu_m || task.min_cpu_m <= 0 ||
          task.mem_mi < task.min_mem_mi || task.min_mem_mi <= 0 ||
          task.duration_s <= 0) {
        throw wfsim::SimError(wfsim::Errc::InvalidConfig,
                              "task '" + name + "' violates resource bounds");
      }
      w.tasks.push_back(task);
    }
    for (const auto& t : doc.at("tasks")) {
      const auto to = ids.at(t.at("id").get<std::string>());
      for (const auto& dep : t.value("deps", std::vector<std::string>{})) {
        auto from = ids.find(dep);
        if (from == ids.end()) {
          throw wfsim::SimError(wfsim::Errc::InvalidConfig,
                                "dependency '" + dep + "' names no task");
        }
        w.edges.emplace_back(from->second, to);
      }
    }
    if (auto issue = wfsim::validate_dag(w)) {
      throw wfsim::SimError(issue->code, issue->detail);
    }
    const auto sched = wfsim::predicted_schedule(w);
    for (auto& task : w.tasks) {
      task.deadline_s = static_cast<wfsim::Seconds>(std::llround(
          static_cast<double>(sched.window(task.id).end) * local.deadline_slack));
    }
    for (std::size_t t = 0; t < w.tasks.size(); ++t) {
      if (wfsim::successor_lists(w)[t].empty()) {
        w.deadline_s = w.tasks[t].deadline_s;
      }
    }
    plan.workflow = std::move(w);
  } else {
    throw wfsim::SimError(wfsim::Errc::InvalidConfig,
                          "workflow document needs 'kind' or 'tasks'");
  }

  plan.workflow.id = id;
  if (doc.contains("workflow_id")) {
    plan.workflow.label = doc.at("workflow_id").is_string()
                              ? doc.at("workflow_id").get<std::string>()
                              : doc.at("workflow_id").dump();
  }
  return plan;
}

std::vector<wfsim::WorkflowArrivalPlan> load_workflow_file(
    const std::string& path, std::uint64_t run_seed,
    const wfsim::TaskDefaults& defaults) {
  std::ifstream in(path);
  if (!in) {
    throw wfsim::SimError(wfsim::Errc::IoError, "cannot read " + path);
  }
  json body = json::parse(in);
  std::vector<wfsim::WorkflowArrivalPlan> plans;
  if (body.is_array()) {
    for (const auto& doc : body) {
      plans.push_back(parse_workflow_doc(
          doc, static_cast<wfsim::WorkflowId>(plans.size()), run_seed, defaults));
    }
  } else {
    plans.push_back(parse_workflow_doc(body, 0, run_seed, defaults));
  }
  return plans;
}

void print_summary(std::ostream& os, const wfsim::RunSummary& s) {
  os << s.policy << ": total " << s.total_duration_min << " min, avg workflow "
     << s.avg_workflow_duration_min << " min, cpu usage " << s.cpu_usage_mean
     << ", mem usage " << s.mem_usage_mean << ", oom " << s.oom_count << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Discrete-event simulator of DAG scientific workflows on a container "
      "cluster with adaptive (aras) and FCFS (baseline) resource allocation"};
  app.set_config("--config", "", "Read options from a config file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::string policy = "aras";
  std::string pattern = "constant";
  std::string workflow = "montage";
  std::string workflow_file;
  std::string out_dir;
  int nodes = 6;
  std::int64_t node_cpu_m = 8000;
  std::int64_t node_mem_mi = 16384;
  std::int64_t interval_s = 300;
  double alpha = 0.8;
  std::int64_t beta_mi = 20;
  std::uint64_t seed = 0;
  bool compare = false;
  int max_rounds = 100;
  std::int64_t true_peak_mem_mi = 1000;
  std::int64_t cleanup_delay_s = 0;
  std::int64_t realloc_delay_s = 0;
  double slack = 3.0;
  bool kb_snapshot = false;

  app.add_option("--policy", policy, "Allocation policy")
      ->check(CLI::IsMember({"aras", "baseline"}));
  app.add_option("--pattern", pattern, "Workflow arrival pattern")
      ->check(CLI::IsMember({"constant", "linear", "pyramid"}));
  app.add_option("--workflow", workflow, "Workflow topology")
      ->check(CLI::IsMember({"montage", "epigenomics", "cybershake", "ligo"}));
  app.add_option("--workflow-file", workflow_file,
                 "JSON file with explicit workflow documents (overrides "
                 "--pattern/--workflow)");
  app.add_option("--nodes", nodes, "Cluster node count")->check(CLI::PositiveNumber);
  app.add_option("--node-cpu-m", node_cpu_m, "Allocatable CPU per node, millicores")
      ->check(CLI::PositiveNumber);
  app.add_option("--node-mem-mi", node_mem_mi, "Allocatable memory per node, MiB")
      ->check(CLI::PositiveNumber);
  app.add_option("--interval-s", interval_s, "Seconds between request bursts")
      ->check(CLI::PositiveNumber);
  app.add_option("--alpha", alpha, "Scaling factor for the richest node, in (0,1)");
  app.add_option("--beta-mi", beta_mi, "Memory headroom constant, MiB (>= 20)");
  app.add_option("--seed", seed, "Run seed");
  app.add_option("--out", out_dir, "Output directory for result files");
  app.add_flag("--compare", compare,
               "Run both policies over identical arrivals and print both");
  app.add_option("--max-rounds", max_rounds,
                 "Non-viable evaluation rounds before a grant is forced");
  app.add_option("--true-peak-mem-mi", true_peak_mem_mi,
                 "Memory a task container actually touches at runtime, MiB");
  app.add_option("--cleanup-delay-s", cleanup_delay_s,
                 "Delay between pod termination and deletion");
  app.add_option("--realloc-delay-s", realloc_delay_s,
                 "Delay before an OOM-killed task re-enters allocation");
  app.add_option("--slack", slack, "Deadline slack over the predicted schedule");
  app.add_flag("--kb-snapshot", kb_snapshot,
               "Also write the task-state store snapshot (kb_snapshot.log)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    wfsim::EngineConfig config;
    config.cluster.node_count = nodes;
    config.cluster.node_cpu_m = node_cpu_m;
    config.cluster.node_mem_mi = node_mem_mi;
    config.policy = *wfsim::policy_from_name(policy);
    config.alpha = alpha;
    config.beta_mi = beta_mi;
    config.workflow_kind = *wfsim::topology_from_name(workflow);
    config.pattern = wfsim::default_pattern(*wfsim::arrival_kind_from_name(pattern));
    config.pattern.interval_s = interval_s;
    config.seed = seed;
    config.max_rounds = max_rounds;
    config.runtime.true_peak_mem_mi = true_peak_mem_mi;
    config.cleanup_delay_s = cleanup_delay_s;
    config.reallocation_delay_s = realloc_delay_s;
    config.task_defaults.deadline_slack = slack;
    if (!workflow_file.empty()) {
      config.explicit_workflows =
          load_workflow_file(workflow_file, seed, config.task_defaults);
    }

    const auto run_one = [&](wfsim::Policy p, const std::string& subdir) {
      wfsim::EngineConfig c = config;
      c.policy = p;
      const wfsim::RunResult result = wfsim::run(c);
      const wfsim::RunSummary summary = wfsim::build_summary(result, c);
      if (!out_dir.empty()) {
        const std::string dir =
            subdir.empty() ? out_dir
                           : (std::filesystem::path(out_dir) / subdir).string();
        wfsim::emit(summary, result.series, result.log, dir);
        if (kb_snapshot) {
          std::ofstream snap(std::filesystem::path(dir) / "kb_snapshot.log",
                             std::ios::binary);
          snap << result.kb_snapshot;
        }
      }
      return summary;
    };

    if (compare) {
      const wfsim::RunSummary aras = run_one(wfsim::Policy::Aras, "aras");
      const wfsim::RunSummary base = run_one(wfsim::Policy::Baseline, "baseline");
      print_summary(std::cout, aras);
      print_summary(std::cout, base);
      std::cout << "total duration saving: "
                << (base.total_duration_min - aras.total_duration_min)
                << " min, workflow duration saving: "
                << (base.avg_workflow_duration_min - aras.avg_workflow_duration_min)
                << " min\n";
    } else {
      print_summary(std::cout, run_one(config.policy, ""));
    }
  } catch (const wfsim::SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
