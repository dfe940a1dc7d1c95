#pragma once

#include <cstddef>

namespace qpsim {

/// Metrics logged at one step of a trajectory.
struct TrajectoryRecord {
    std::size_t step = 0;
    double train_loss = 0.0;
    double test_error = 0.0;
    double linf = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double linf_err_support = 0.0;  // ||v_S - v*_S||_inf
    double l1_off_support = 0.0;    // ||v_{S^c}||_1
    double potential = 0.0;         // sum_k sqrt(v_k); NaN if v has a negative entry
    double min_entry = 0.0;
    bool diverged = false;
};

}  // namespace qpsim
