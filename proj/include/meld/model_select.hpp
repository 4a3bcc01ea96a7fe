#pragma once

#include <string>
#include <vector>

#include "meld/estimator.hpp"

namespace meld {

// FI = 1 - Q / (e' A e), with e the concatenation of the data-only moment
// targets. At most 1; can be negative.
double fitness_index(double q_value, const MomentStats& stats, const BlockWeights* weights,
                     int order);

struct SelectionReport {
  struct Entry {
    int k = 0;
    double fi_stage1 = 0.0;
    double fi_stage2 = 0.0;
    bool has_stage2 = false;
    int sweeps = 0;
    bool converged = false;
    bool failed = false;
    std::string error;
  };
  std::vector<Entry> entries;
  int chosen_k = 0;
};

// Fits each k with a fresh seeded initialization and a symmetric Dir(alpha_h)
// prior of matching length; selects the argmax of stage-1 FI, ties toward
// smaller k.
SelectionReport sweep_k(const Dataset& data, const std::vector<int>& k_values,
                        const FitConfig& base_config, double alpha_per_component);

}  // namespace meld
