#include "wfsim/workload.hpp"

#include <sstream>

namespace wfsim {

const char* arrival_kind_name(ArrivalKind kind) {
  switch (kind) {
    case ArrivalKind::Constant:
      return "constant";
    case ArrivalKind::Linear:
      return "linear";
    case ArrivalKind::Pyramid:
      return "pyramid";
  }
  return "?";
}

std::optional<ArrivalKind> arrival_kind_from_name(const std::string& name) {
  if (name == "constant") return ArrivalKind::Constant;
  if (name == "linear") return ArrivalKind::Linear;
  if (name == "pyramid") return ArrivalKind::Pyramid;
  return std::nullopt;
}

ArrivalPattern default_pattern(ArrivalKind kind) {
  ArrivalPattern pattern;
  pattern.kind = kind;
  pattern.total = (kind == ArrivalKind::Pyramid) ? 34 : 30;
  return pattern;
}

namespace {

// Size of the i-th burst of the unbounded pattern sequence.
int burst_size_at(const ArrivalPattern& p, int i) {
  switch (p.kind) {
    case ArrivalKind::Constant:
      return p.constant_burst;
    case ArrivalKind::Linear:
      return p.linear_initial + p.linear_step * i;
    case ArrivalKind::Pyramid: {
      // One sweep goes start..peak..start; consecutive sweeps repeat the
      // start value (the descent ends where the next ascent begins).
      const int up = (p.pyramid_peak - p.pyramid_start) / p.pyramid_step;
      const int sweep = 2 * up + 1;
      const int pos = i % sweep;
      const int steps = pos <= up ? pos : sweep - 1 - pos;
      return p.pyramid_start + steps * p.pyramid_step;
    }
  }
  return 0;
}

void check_params(const ArrivalPattern& p) {
  bool ok = p.interval_s > 0 && p.total > 0;
  switch (p.kind) {
    case ArrivalKind::Constant:
      ok = ok && p.constant_burst > 0;
      break;
    case ArrivalKind::Linear:
      ok = ok && p.linear_initial > 0 && p.linear_step >= 0;
      break;
    case ArrivalKind::Pyramid:
      ok = ok && p.pyramid_start > 0 && p.pyramid_step > 0 &&
           p.pyramid_peak >= p.pyramid_start &&
           (p.pyramid_peak - p.pyramid_start) % p.pyramid_step == 0;
      break;
  }
  if (!ok) {
    throw SimError(Errc::InvalidConfig, "invalid arrival pattern parameters");
  }
}

}  // namespace

std::vector<Burst> generate_arrivals(const ArrivalPattern& pattern) {
  check_params(pattern);

  std::vector<Burst> bursts;
  int sent = 0;
  for (int i = 0; sent < pattern.total; ++i) {
    const int size = burst_size_at(pattern, i);
    if (sent + size > pattern.total) {
      std::ostringstream msg;
      msg << "no burst prefix sums to " << pattern.total << " (reached "
          << sent << ", next burst " << size << ")";
      throw SimError(Errc::UnreachableTotal, msg.str());
    }
    bursts.push_back({pattern.interval_s * i, size});
    sent += size;
  }
  return bursts;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 step over the combined value.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<WorkflowArrivalPlan> plan_injections(
    const std::vector<Burst>& bursts, TopologyKind kind,
    std::uint64_t run_seed, const TaskDefaults& defaults) {
  std::vector<WorkflowArrivalPlan> plan;
  WorkflowId next_id = 0;
  for (const Burst& burst : bursts) {
    for (int i = 0; i < burst.count; ++i) {
      WorkflowArrivalPlan item;
      item.time = burst.time;
      item.workflow =
          build_topology(kind, burst.time,
                         mix_seed(run_seed, static_cast<std::uint64_t>(next_id)),
                         defaults);
      item.workflow.id = next_id;
      std::ostringstream label;
      label << topology_name(kind) << "-" << next_id;
      item.workflow.label = label.str();
      ++next_id;
      plan.push_back(std::move(item));
    }
  }
  return plan;
}

}  // namespace wfsim
