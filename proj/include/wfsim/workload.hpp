#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wfsim/workflow.hpp"

namespace wfsim {

enum class ArrivalKind { Constant, Linear, Pyramid };

const char* arrival_kind_name(ArrivalKind kind);
std::optional<ArrivalKind> arrival_kind_from_name(const std::string& name);

// Burst schedule for workflow requests. Bursts fire every `interval_s`
// seconds starting at 0; their sizes follow the selected shape and must sum
// exactly to `total`.
struct ArrivalPattern {
  ArrivalKind kind = ArrivalKind::Constant;
  Seconds interval_s = 300;
  int total = 30;
  // constant: y requests per burst
  int constant_burst = 5;
  // linear: y = k*x + d
  int linear_initial = 2;
  int linear_step = 2;
  // pyramid: up from start to peak by step, back down, repeat
  int pyramid_start = 2;
  int pyramid_step = 2;
  int pyramid_peak = 6;
};

ArrivalPattern default_pattern(ArrivalKind kind);

struct Burst {
  Seconds time = 0;
  int count = 0;
};

// Expands the pattern into timed bursts. Throws UnreachableTotal when no
// prefix of the burst-size sequence sums exactly to the requested total.
std::vector<Burst> generate_arrivals(const ArrivalPattern& pattern);

struct WorkflowArrivalPlan {
  Seconds time = 0;
  WorkflowSpec workflow;
};

// Materializes one workflow per request with fresh sequential ids and a
// per-workflow seed derived from the run seed.
std::vector<WorkflowArrivalPlan> plan_injections(
    const std::vector<Burst>& bursts, TopologyKind kind,
    std::uint64_t run_seed, const TaskDefaults& defaults = {});

// Deterministic seed mixer used to derive per-workflow seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace wfsim
