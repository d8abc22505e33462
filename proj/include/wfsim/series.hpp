#pragma once

#include <vector>

#include "wfsim/resources.hpp"

namespace wfsim {

// Sampled cluster occupancy over time. Occupancy only changes at events, so
// samples are exact values of a step function.
struct MetricsSeries {
  struct Sample {
    Seconds t = 0;
    Millicores cpu_used_m = 0;
    Mebibytes mem_used_mi = 0;
    Millicores cpu_cap_m = 0;
    Mebibytes mem_cap_mi = 0;
  };

  Seconds step_s = 1;
  std::vector<Sample> samples;

  bool empty() const { return samples.empty(); }
};

}  // namespace wfsim
