#include "wfsim/errors.hpp"

namespace wfsim {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::CycleDetected:
      return "CycleDetected";
    case Errc::DanglingEdge:
      return "DanglingEdge";
    case Errc::MultipleEntryOrExit:
      return "MultipleEntryOrExit";
    case Errc::InvalidCompletedSet:
      return "InvalidCompletedSet";
    case Errc::UnknownNodeReference:
      return "UnknownNodeReference";
    case Errc::NegativeResidual:
      return "NegativeResidual";
    case Errc::EmptyCluster:
      return "EmptyCluster";
    case Errc::NoFit:
      return "NoFit";
    case Errc::OverCommit:
      return "OverCommit";
    case Errc::InvalidPhase:
      return "InvalidPhase";
    case Errc::DivisionByZero:
      return "DivisionByZero";
    case Errc::ClusterUnavailable:
      return "ClusterUnavailable";
    case Errc::CompletedRecordMutation:
      return "CompletedRecordMutation";
    case Errc::EmptyInterval:
      return "EmptyInterval";
    case Errc::UnknownKey:
      return "UnknownKey";
    case Errc::AlreadyComplete:
      return "AlreadyComplete";
    case Errc::UnreachableTotal:
      return "UnreachableTotal";
    case Errc::Deadlock:
      return "Deadlock";
    case Errc::IncompleteRun:
      return "IncompleteRun";
    case Errc::EmptySeries:
      return "EmptySeries";
    case Errc::IoError:
      return "IoError";
    case Errc::InvalidConfig:
      return "InvalidConfig";
  }
  return "UnknownError";
}

}  // namespace wfsim
