#include <cmath>
#include <random>
#include <sstream>

#include "wfsim/workflow.hpp"

namespace wfsim {

namespace {

struct TopologyTable {
  int task_count;
  std::vector<std::pair<TaskId, TaskId>> edges;
};

// Fixed structural stand-ins for the four scientific workflows. Node 0 is the
// virtual entrance, node (count-1) the virtual exit.

// Astronomy mosaic pipeline: projection fan-out, pairwise difference fits,
// a model/correction bottleneck, per-image background layer, then a linear
// assembly tail. Fork-join layers, 21 nodes.
TopologyTable montage() {
  TopologyTable t;
  t.task_count = 21;
  // entry -> projections 1..4
  for (TaskId p = 1; p <= 4; ++p) t.edges.push_back({0, p});
  // pairwise fits 5..10
  const std::pair<TaskId, TaskId> pairs[] = {{1, 2}, {2, 3}, {3, 4},
                                             {1, 3}, {2, 4}, {1, 4}};
  TaskId fit = 5;
  for (const auto& [a, b] : pairs) {
    t.edges.push_back({a, fit});
    t.edges.push_back({b, fit});
    ++fit;
  }
  // fits -> concat 11 -> model 12
  for (TaskId f = 5; f <= 10; ++f) t.edges.push_back({f, 11});
  t.edges.push_back({11, 12});
  // backgrounds 13..16 need the model and their projection
  for (TaskId i = 0; i < 4; ++i) {
    t.edges.push_back({12, static_cast<TaskId>(13 + i)});
    t.edges.push_back({static_cast<TaskId>(1 + i), static_cast<TaskId>(13 + i)});
  }
  // gather 17, add 18, shrink 19, exit 20
  for (TaskId b = 13; b <= 16; ++b) t.edges.push_back({b, 17});
  t.edges.push_back({17, 18});
  t.edges.push_back({18, 19});
  t.edges.push_back({19, 20});
  return t;
}

// Genome sequencing: a split stage feeding four parallel four-stage
// pipelines that merge into a final analysis step. 20 nodes.
TopologyTable epigenomics() {
  TopologyTable t;
  t.task_count = 20;
  t.edges.push_back({0, 1});
  for (int lane = 0; lane < 4; ++lane) {
    const TaskId head = static_cast<TaskId>(2 + lane * 4);
    t.edges.push_back({1, head});
    for (TaskId s = head; s < head + 3; ++s) t.edges.push_back({s, static_cast<TaskId>(s + 1)});
    t.edges.push_back({static_cast<TaskId>(head + 3), 18});
  }
  t.edges.push_back({18, 19});
  return t;
}

// Earthquake hazard: two extraction roots fanning out to eight synthesis
// tasks, each with a peak-value stage, gathered by two zip steps. Wide
// fork-join, 22 nodes.
TopologyTable cybershake() {
  TopologyTable t;
  t.task_count = 22;
  t.edges.push_back({0, 1});
  t.edges.push_back({0, 2});
  for (TaskId s = 3; s <= 6; ++s) t.edges.push_back({1, s});
  for (TaskId s = 7; s <= 10; ++s) t.edges.push_back({2, s});
  for (TaskId s = 3; s <= 10; ++s) {
    t.edges.push_back({s, static_cast<TaskId>(s + 8)});  // peak stage 11..18
    t.edges.push_back({s, 19});                          // seismogram zip
  }
  for (TaskId p = 11; p <= 18; ++p) t.edges.push_back({p, 20});  // peak zip
  t.edges.push_back({19, 21});
  t.edges.push_back({20, 21});
  return t;
}

// Gravitational-wave inspiral analysis: two template-bank/matched-filter
// groups each joined by a coincidence stage, then a second filtering pass.
// Grouped fork-joins, 23 nodes.
TopologyTable ligo() {
  TopologyTable t;
  t.task_count = 23;
  for (TaskId b = 1; b <= 4; ++b) {
    t.edges.push_back({0, b});
    t.edges.push_back({b, static_cast<TaskId>(b + 4)});  // matched filter 5..8
    t.edges.push_back({static_cast<TaskId>(b + 4), 9});  // coincidence A
  }
  for (TaskId b = 10; b <= 13; ++b) {
    t.edges.push_back({0, b});
    t.edges.push_back({b, static_cast<TaskId>(b + 4)});  // matched filter 14..17
    t.edges.push_back({static_cast<TaskId>(b + 4), 18});  // coincidence B
  }
  t.edges.push_back({9, 19});
  t.edges.push_back({9, 20});
  t.edges.push_back({18, 21});
  t.edges.push_back({19, 22});
  t.edges.push_back({20, 22});
  t.edges.push_back({21, 22});
  return t;
}

const TopologyTable& table_for(TopologyKind kind) {
  static const TopologyTable kMontage = montage();
  static const TopologyTable kEpigenomics = epigenomics();
  static const TopologyTable kCyberShake = cybershake();
  static const TopologyTable kLigo = ligo();
  switch (kind) {
    case TopologyKind::Montage:
      return kMontage;
    case TopologyKind::Epigenomics:
      return kEpigenomics;
    case TopologyKind::CyberShake:
      return kCyberShake;
    case TopologyKind::Ligo:
      return kLigo;
  }
  throw SimError(Errc::InvalidConfig, "unknown topology kind");
}

}  // namespace

int topology_task_count(TopologyKind kind) { return table_for(kind).task_count; }

const char* topology_name(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::Montage:
      return "montage";
    case TopologyKind::Epigenomics:
      return "epigenomics";
    case TopologyKind::CyberShake:
      return "cybershake";
    case TopologyKind::Ligo:
      return "ligo";
  }
  return "?";
}

std::optional<TopologyKind> topology_from_name(const std::string& name) {
  if (name == "montage") return TopologyKind::Montage;
  if (name == "epigenomics") return TopologyKind::Epigenomics;
  if (name == "cybershake") return TopologyKind::CyberShake;
  if (name == "ligo") return TopologyKind::Ligo;
  return std::nullopt;
}

WorkflowSpec build_topology(TopologyKind kind, Seconds inject_time,
                            std::uint64_t rng_seed,
                            const TaskDefaults& defaults) {
  const TopologyTable& table = table_for(kind);

  WorkflowSpec w;
  w.inject_time_s = inject_time;
  w.edges = table.edges;
  w.tasks.resize(static_cast<std::size_t>(table.task_count));

  std::mt19937_64 rng(rng_seed);
  std::uniform_int_distribution<Seconds> duration(10, 20);
  for (int i = 0; i < table.task_count; ++i) {
    auto& task = w.tasks[static_cast<std::size_t>(i)];
    task.id = static_cast<TaskId>(i);
    std::ostringstream image;
    image << topology_name(kind) << "-task:" << i;
    task.image = image.str();
    task.cpu_m = defaults.cpu_m;
    task.mem_mi = defaults.mem_mi;
    task.min_cpu_m = defaults.min_cpu_m;
    task.min_mem_mi = defaults.min_mem_mi;
    task.duration_s = duration(rng);
  }

  const PredictedSchedule sched = predicted_schedule(w);
  for (auto& task : w.tasks) {
    const Seconds end = sched.window(task.id).end;
    task.deadline_s = static_cast<Seconds>(
        std::llround(static_cast<double>(end) * defaults.deadline_slack));
  }
  const auto succs = successor_lists(w);
  for (std::size_t t = 0; t < w.tasks.size(); ++t) {
    if (succs[t].empty()) w.deadline_s = w.tasks[t].deadline_s;
  }
  return w;
}

}  // namespace wfsim
