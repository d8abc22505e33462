#include "wfsim/allocator.hpp"

#include <sstream>

namespace wfsim {

std::string BranchTaken::name() const {
  std::ostringstream os;
  os << static_cast<int>(macro) << ":";
  const char* first = (macro == MacroCase::CpuShort ||
                       macro == MacroCase::BothShort)
                          ? "C1"
                          : "B1";
  const char* second = (macro == MacroCase::MemShort ||
                        macro == MacroCase::BothShort)
                           ? "C2"
                           : "B2";
  os << (cond1 ? "" : "!") << first << "&" << (cond2 ? "" : "!") << second;
  return os.str();
}

ResourceQuantity scale_cut(const ResourceQuantity& task_req,
                           const ResourceQuantity& total_residual,
                           const ResourceQuantity& request) {
  if (request.cpu_m == 0 || request.mem_mi == 0) {
    throw SimError(Errc::DivisionByZero,
                   "accumulated request has a zero component");
  }
  // Non-negative operands, so integer division is the floor.
  return {task_req.cpu_m * total_residual.cpu_m / request.cpu_m,
          task_req.mem_mi * total_residual.mem_mi / request.mem_mi};
}

AllocationDecision evaluate(const AllocationContext& ctx) {
  const ResourceQuantity cut =
      scale_cut(ctx.task_req, ctx.total_residual, ctx.request);

  const bool a1 = ctx.request.cpu_m < ctx.total_residual.cpu_m;
  const bool a2 = ctx.request.mem_mi < ctx.total_residual.mem_mi;
  const bool b1 = ctx.task_req.cpu_m < ctx.re_max.cpu_m;
  const bool b2 = ctx.task_req.mem_mi < ctx.re_max.mem_mi;
  const bool c1 = cut.cpu_m < ctx.re_max.cpu_m;
  const bool c2 = cut.mem_mi < ctx.re_max.mem_mi;

  const Millicores alpha_cpu = alpha_scaled(ctx.re_max.cpu_m, ctx.alpha);
  const Mebibytes alpha_mem = alpha_scaled(ctx.re_max.mem_mi, ctx.alpha);

  AllocationDecision decision;
  BranchTaken branch;
  if (a1 && a2) {
    // (1) The remaining resources are sufficient.
    branch.macro = MacroCase::BothSufficient;
    branch.cond1 = b1;
    branch.cond2 = b2;
    if (b1 && b2) {
      decision.allocated = ctx.task_req;
    } else if (!b1 && b2) {
      decision.allocated = {alpha_cpu, ctx.task_req.mem_mi};
    } else if (b1 && !b2) {
      decision.allocated = {ctx.task_req.cpu_m, alpha_mem};
    } else {
      decision.allocated = {alpha_cpu, alpha_mem};
    }
  } else if (!a1 && a2) {
    // (2) The remaining CPU resource is insufficient.
    branch.macro = MacroCase::CpuShort;
    branch.cond1 = c1;
    branch.cond2 = b2;
    if (c1 && b2) {
      decision.allocated = {cut.cpu_m, ctx.task_req.mem_mi};
    } else if (!c1 && b2) {
      decision.allocated = {alpha_cpu, ctx.task_req.mem_mi};
    } else if (c1 && !b2) {
      decision.allocated = {cut.cpu_m, alpha_mem};
    } else {
      decision.allocated = {alpha_cpu, alpha_mem};
    }
  } else if (a1 && !a2) {
    // (3) The remaining memory resource is insufficient.
    branch.macro = MacroCase::MemShort;
    branch.cond1 = b1;
    branch.cond2 = c2;
    if (b1 && c2) {
      decision.allocated = {ctx.task_req.cpu_m, cut.mem_mi};
    } else if (!b1 && c2) {
      decision.allocated = {alpha_cpu, cut.mem_mi};
    } else if (b1 && !c2) {
      decision.allocated = {ctx.task_req.cpu_m, alpha_mem};
    } else {
      decision.allocated = {alpha_cpu, alpha_mem};
    }
  } else {
    // (4) Both residual resources are insufficient.
    branch.macro = MacroCase::BothShort;
    branch.cond1 = c1;
    branch.cond2 = c2;
    decision.allocated = cut;
  }

  decision.branch = branch;
  decision.viable = decision.allocated.cpu_m >= ctx.min_cpu_m &&
                    decision.allocated.mem_mi >= ctx.min_mem_mi + ctx.beta_mi;
  return decision;
}

ResourceQuantity accumulate_requests(const TaskSpec& task, const TaskKey& self,
                                     Seconds t_start, Seconds t_end,
                                     const KnowledgeBase& kb) {
  ResourceQuantity request = task.request();
  for (const TaskStateRecord& record : kb.query_overlapping(t_start, t_end)) {
    if (record.key == self) continue;
    request += {record.cpu_m, record.mem_mi};
  }
  return request;
}

std::optional<AllocationDecision> allocate_adaptive(
    const TaskSpec& task, const TaskKey& key, Seconds window_start,
    Seconds window_end, std::span<const NodeSpec> nodes,
    std::span<const PodRecord> pods, const KnowledgeBase& kb,
    const AllocatorParams& params) {
  if (nodes.empty()) {
    throw SimError(Errc::ClusterUnavailable, "cluster has no nodes");
  }

  const ResourceQuantity request =
      accumulate_requests(task, key, window_start, window_end, kb);
  const ResidualMap residual = discover_residual(nodes, pods);
  const ClusterTotals totals = totals_and_max(residual);

  if (!totals.re_max.positive()) {
    // Even the richest node has nothing to offer on some component.
    return std::nullopt;
  }

  AllocationContext ctx;
  ctx.task_req = task.request();
  ctx.t_start = window_start;
  ctx.t_end = window_end;
  ctx.request = request;
  ctx.total_residual = totals.total_residual;
  ctx.re_max = totals.re_max;
  ctx.alpha = params.alpha;
  ctx.beta_mi = params.beta_mi;
  ctx.min_cpu_m = task.min_cpu_m;
  ctx.min_mem_mi = task.min_mem_mi;
  return evaluate(ctx);
}

std::optional<AllocationDecision> allocate_baseline(
    const TaskSpec& task, const ResidualMap& residual) {
  for (const auto& [node, amount] : residual) {
    (void)node;
    if (amount.covers(task.request())) {
      AllocationDecision decision;
      decision.allocated = task.request();
      decision.viable = true;
      return decision;
    }
  }
  return std::nullopt;
}

}  // namespace wfsim
