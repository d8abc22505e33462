#include "wfsim/cluster.hpp"

#include <algorithm>
#include <sstream>

namespace wfsim {

const char* pod_phase_name(PodPhase phase) {
  switch (phase) {
    case PodPhase::Pending:
      return "Pending";
    case PodPhase::Running:
      return "Running";
    case PodPhase::Succeeded:
      return "Succeeded";
    case PodPhase::Failed:
      return "Failed";
    case PodPhase::OOMKilled:
      return "OOMKilled";
    case PodPhase::Deleted:
      return "Deleted";
  }
  return "?";
}

ResidualMap discover_residual(std::span<const NodeSpec> nodes,
                              std::span<const PodRecord> pods) {
  std::map<NodeId, ResourceQuantity> requested;
  for (const NodeSpec& node : nodes) {
    requested.emplace(node.id, ResourceQuantity{});
  }
  for (const PodRecord& pod : pods) {
    if (!pod_occupies(pod.phase)) continue;
    if (!pod.node) continue;
    auto it = requested.find(*pod.node);
    if (it == requested.end()) {
      std::ostringstream msg;
      msg << "pod " << pod.id << " is placed on unknown node " << *pod.node;
      throw SimError(Errc::UnknownNodeReference, msg.str());
    }
    it->second += pod.request;
  }

  ResidualMap residual;
  for (const NodeSpec& node : nodes) {
    const ResourceQuantity& occupied = requested.at(node.id);
    if (!node.allocatable.covers(occupied)) {
      std::ostringstream msg;
      msg << "node " << node.id << " holds requests " << occupied
          << " beyond allocatable " << node.allocatable;
      throw SimError(Errc::NegativeResidual, msg.str());
    }
    residual[node.id] = subtract_checked(node.allocatable, occupied);
  }
  return residual;
}

ClusterTotals totals_and_max(const ResidualMap& residual) {
  if (residual.empty()) {
    throw SimError(Errc::EmptyCluster, "residual map has no nodes");
  }
  ClusterTotals totals;
  bool first = true;
  for (const auto& [node, amount] : residual) {
    totals.total_residual += amount;
    // Strict > keeps the smallest node id on ties; map order is ascending.
    if (first || amount.cpu_m > totals.re_max.cpu_m) {
      totals.re_max = amount;
      totals.max_node = node;
      first = false;
    }
  }
  return totals;
}

std::optional<NodeId> place_pod(const ResidualMap& residual,
                                const ResourceQuantity& alloc) {
  std::optional<NodeId> best;
  Mebibytes best_mem = -1;
  for (const auto& [node, amount] : residual) {
    if (!amount.covers(alloc)) continue;
    if (amount.mem_mi > best_mem) {
      best = node;
      best_mem = amount.mem_mi;
    }
  }
  return best;
}

Cluster::Cluster(std::vector<NodeSpec> nodes) : nodes_(std::move(nodes)) {
  used_.resize(nodes_.size());
}

ResourceQuantity Cluster::capacity() const {
  ResourceQuantity total;
  for (const NodeSpec& node : nodes_) total += node.allocatable;
  return total;
}

ResourceQuantity Cluster::used() const {
  ResourceQuantity total;
  for (const ResourceQuantity& u : used_) total += u;
  return total;
}

ResidualMap Cluster::residual() const {
  ResidualMap residual;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    residual[nodes_[i].id] = subtract_checked(nodes_[i].allocatable, used_[i]);
  }
  return residual;
}

std::size_t Cluster::index_of(NodeId node) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id == node) return i;
  }
  std::ostringstream msg;
  msg << "node " << node << " is not part of the cluster";
  throw SimError(Errc::UnknownNodeReference, msg.str());
}

void Cluster::bind(PodRecord& pod, NodeId node) {
  if (pod.node) {
    throw SimError(Errc::InvalidPhase, "pod is already bound to a node");
  }
  const std::size_t i = index_of(node);
  const ResourceQuantity after = used_[i] + pod.request;
  if (!nodes_[i].allocatable.covers(after)) {
    std::ostringstream msg;
    msg << "binding pod " << pod.id << " " << pod.request << " on node "
        << node << " would exceed allocatable " << nodes_[i].allocatable;
    throw SimError(Errc::OverCommit, msg.str());
  }
  used_[i] = after;
  pod.node = node;
}

void Cluster::release(const PodRecord& pod) {
  if (!pod_terminal(pod.phase)) {
    std::ostringstream msg;
    msg << "pod " << pod.id << " cannot release resources in phase "
        << pod_phase_name(pod.phase);
    throw SimError(Errc::InvalidPhase, msg.str());
  }
  if (!pod.node) {
    throw SimError(Errc::InvalidPhase, "pod was never bound to a node");
  }
  const std::size_t i = index_of(*pod.node);
  used_[i] = subtract_checked(used_[i], pod.request);
}

}  // namespace wfsim
