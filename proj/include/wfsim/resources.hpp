#pragma once

#include <cstdint>
#include <ostream>

#include "wfsim/errors.hpp"

namespace wfsim {

using Millicores = std::int64_t;
using Mebibytes = std::int64_t;
using Seconds = std::int64_t;

// Paired CPU/memory amount. Components are non-negative integers in the
// orchestrator's units (millicores, MiB).
struct ResourceQuantity {
  Millicores cpu_m = 0;
  Mebibytes mem_mi = 0;

  bool operator==(const ResourceQuantity&) const = default;

  ResourceQuantity& operator+=(const ResourceQuantity& other) {
    cpu_m += other.cpu_m;
    mem_mi += other.mem_mi;
    return *this;
  }

  friend ResourceQuantity operator+(ResourceQuantity lhs,
                                    const ResourceQuantity& rhs) {
    lhs += rhs;
    return lhs;
  }

  // Component-wise containment: every component of `want` is available here.
  bool covers(const ResourceQuantity& want) const {
    return cpu_m >= want.cpu_m && mem_mi >= want.mem_mi;
  }

  bool positive() const { return cpu_m > 0 && mem_mi > 0; }
};

// Component-wise subtraction; never produces a negative component.
inline ResourceQuantity subtract_checked(const ResourceQuantity& from,
                                         const ResourceQuantity& amount) {
  if (!from.covers(amount)) {
    throw SimError(Errc::NegativeResidual,
                   "subtraction would drive a resource component below zero");
  }
  return {from.cpu_m - amount.cpu_m, from.mem_mi - amount.mem_mi};
}

inline std::ostream& operator<<(std::ostream& os, const ResourceQuantity& q) {
  return os << "(" << q.cpu_m << "m, " << q.mem_mi << "Mi)";
}

}  // namespace wfsim
