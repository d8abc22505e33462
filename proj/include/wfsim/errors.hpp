#pragma once

#include <stdexcept>
#include <string>

namespace wfsim {

// Error conditions surfaced by the simulator. Most indicate contract
// violations by the caller; Deadlock and IncompleteRun describe run outcomes.
enum class Errc {
  // workflow model
  CycleDetected,
  DanglingEdge,
  MultipleEntryOrExit,
  InvalidCompletedSet,
  // cluster model
  UnknownNodeReference,
  NegativeResidual,
  EmptyCluster,
  NoFit,
  OverCommit,
  InvalidPhase,
  // allocator
  DivisionByZero,
  ClusterUnavailable,
  // knowledge base
  CompletedRecordMutation,
  EmptyInterval,
  UnknownKey,
  AlreadyComplete,
  // workload generator
  UnreachableTotal,
  // engine
  Deadlock,
  // metrics
  IncompleteRun,
  EmptySeries,
  IoError,
  // configuration
  InvalidConfig,
};

const char* errc_name(Errc code);

class SimError : public std::runtime_error {
 public:
  SimError(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace wfsim
