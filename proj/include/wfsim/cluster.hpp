#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "wfsim/resources.hpp"
#include "wfsim/workflow.hpp"

namespace wfsim {

using NodeId = std::int32_t;
using PodId = std::int64_t;

struct NodeSpec {
  NodeId id = 0;
  ResourceQuantity allocatable;  // constant for a run
};

enum class PodPhase { Pending, Running, Succeeded, Failed, OOMKilled, Deleted };

const char* pod_phase_name(PodPhase phase);

// Pending and Running pods occupy node resources; terminal phases do not.
inline bool pod_occupies(PodPhase phase) {
  return phase == PodPhase::Pending || phase == PodPhase::Running;
}

inline bool pod_terminal(PodPhase phase) {
  return phase == PodPhase::Succeeded || phase == PodPhase::Failed ||
         phase == PodPhase::OOMKilled;
}

// One pod execution. `request` is the granted quota (requests == limits, so
// the pod runs in the Guaranteed class). A pod id is never reused.
struct PodRecord {
  PodId id = 0;
  WorkflowId workflow = 0;
  TaskId task = 0;
  std::optional<NodeId> node;
  PodPhase phase = PodPhase::Pending;
  ResourceQuantity request;
  std::optional<Seconds> start_time;
  std::optional<Seconds> end_time;
};

// Remaining resources per node.
using ResidualMap = std::map<NodeId, ResourceQuantity>;

// Recomputes per-node residuals from the pod list: allocatable minus the
// summed requests of Pending/Running pods. Throws UnknownNodeReference for a
// pod placed on a missing node and NegativeResidual if accounting is corrupt.
ResidualMap discover_residual(std::span<const NodeSpec> nodes,
                              std::span<const PodRecord> pods);

struct ClusterTotals {
  ResourceQuantity total_residual;
  ResourceQuantity re_max;  // both components from the CPU-richest node
  NodeId max_node = 0;
};

// Sums the residual map and finds the node with the maximum remaining CPU
// (ties to the smallest node id). Its memory residual is reported alongside,
// on the working assumption that the CPU-richest node is also the
// memory-richest one.
ClusterTotals totals_and_max(const ResidualMap& residual);

// Picks the node with the most residual memory among those that can hold
// `alloc` (ties to the smallest id); nullopt when nothing fits.
std::optional<NodeId> place_pod(const ResidualMap& residual,
                                const ResourceQuantity& alloc);

// Occupancy ledger. Only the engine mutates it; reads are snapshots.
class Cluster {
 public:
  explicit Cluster(std::vector<NodeSpec> nodes);

  const std::vector<NodeSpec>& nodes() const { return nodes_; }
  ResourceQuantity capacity() const;
  ResourceQuantity used() const;
  ResidualMap residual() const;

  // Marks `pod` placed on `node` and reserves its request.
  void bind(PodRecord& pod, NodeId node);

  // Returns a terminal pod's reservation to its node.
  void release(const PodRecord& pod);

 private:
  std::size_t index_of(NodeId node) const;

  std::vector<NodeSpec> nodes_;
  std::vector<ResourceQuantity> used_;
};

}  // namespace wfsim
