#pragma once

#include <optional>
#include <span>
#include <string>

#include "wfsim/cluster.hpp"
#include "wfsim/knowledge_base.hpp"
#include "wfsim/resources.hpp"
#include "wfsim/workflow.hpp"

namespace wfsim {

// Inputs of one evaluation round.
//   task_req       resources asked for by the requesting task
//   request        task_req plus every lookahead request in its lifecycle
//   total_residual cluster-wide remaining resources
//   re_max         remaining resources of the CPU-richest node
struct AllocationContext {
  ResourceQuantity task_req;
  Seconds t_start = 0;
  Seconds t_end = 0;
  ResourceQuantity request;
  ResourceQuantity total_residual;
  ResourceQuantity re_max;
  double alpha = 0.8;        // node-level scaling factor, in (0,1)
  Mebibytes beta_mi = 20;    // runtime memory headroom, >= 20
  Millicores min_cpu_m = 0;  // viability floors of the requesting task
  Mebibytes min_mem_mi = 0;
};

// The evaluation walks one of four macro cases picked by the cluster-wide
// comparisons A1/A2, then one of four sub-branches picked by the per-node
// comparisons (B1/B2, C1/B2, B1/C2, or C1/C2 depending on the macro case).
enum class MacroCase : int {
  BothSufficient = 1,  // A1 and A2
  CpuShort = 2,        // !A1 and A2
  MemShort = 3,        // A1 and !A2
  BothShort = 4,       // !A1 and !A2
};

struct BranchTaken {
  MacroCase macro = MacroCase::BothSufficient;
  bool cond1 = false;  // B1 or C1, whichever the macro case consults
  bool cond2 = false;  // B2 or C2

  int index() const {
    return (static_cast<int>(macro) - 1) * 4 + (cond1 ? 0 : 2) +
           (cond2 ? 0 : 1);
  }
  std::string name() const;
  bool operator==(const BranchTaken&) const = default;
};

struct AllocationDecision {
  ResourceQuantity allocated;
  std::optional<BranchTaken> branch;  // absent for the baseline policy
  bool viable = false;  // allocated >= (min_cpu, min_mem + beta)
};

// Proportional scale-down: each component of the task request multiplied by
// total residual over accumulated request, floored to integer units.
ResourceQuantity scale_cut(const ResourceQuantity& task_req,
                           const ResourceQuantity& total_residual,
                           const ResourceQuantity& request);

// Floor of an alpha-scaled component.
inline std::int64_t alpha_scaled(std::int64_t value, double alpha) {
  return static_cast<std::int64_t>(static_cast<double>(value) * alpha);
}

// One evaluation round over the four macro cases. All comparisons are
// strict; equality always falls to the negated branch.
AllocationDecision evaluate(const AllocationContext& ctx);

// task_req plus the requests of all incomplete records (other than the
// requester's own) whose t_start lies in [t_start, t_end).
ResourceQuantity accumulate_requests(const TaskSpec& task, const TaskKey& self,
                                     Seconds t_start, Seconds t_end,
                                     const KnowledgeBase& kb);

struct RetryPolicy {
  int max_rounds = 100;  // non-viable rounds before the engine stops waiting
};

struct AllocatorParams {
  double alpha = 0.8;
  Mebibytes beta_mi = 20;
  RetryPolicy retry;
};

// One adaptive round: lookahead accumulation over the task's predicted
// window [window_start, window_end), residual discovery, totals, then
// evaluation. Returns nullopt when no node has positive residual in both
// components, i.e. there is nothing to evaluate against. Non-viable
// decisions are re-tried by the engine on later resource releases.
std::optional<AllocationDecision> allocate_adaptive(
    const TaskSpec& task, const TaskKey& key, Seconds window_start,
    Seconds window_end, std::span<const NodeSpec> nodes,
    std::span<const PodRecord> pods, const KnowledgeBase& kb,
    const AllocatorParams& params);

// First-come-first-serve baseline: grants exactly the task request if some
// node can hold it, otherwise tells the caller to wait.
std::optional<AllocationDecision> allocate_baseline(
    const TaskSpec& task, const ResidualMap& residual);

}  // namespace wfsim
