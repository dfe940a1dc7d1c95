#pragma once
// Potential functions and stage predicates evaluated on iterates.

#include <span>
#include <vector>

#include "qpsim/core_model.hpp"
#include "qpsim/trajectory_record.hpp"

namespace qpsim {

enum class PotentialKind {
    SqrtSum,                // sum_k sqrt(v_k)
    BoundedSqrtSum,         // sum_k sqrt(v_k) while ||v||_1 <= b, else 0
    SupportBoundedSqrtSum,  // sum_{k not in S} sqrt(v_k) while ||v_{S^c}||_1 <= eps and
                            // ||v_S||_inf <= b, else 0
};

struct PotentialSpec {
    PotentialKind kind = PotentialKind::SqrtSum;
    double b = 1.0;
    double epsilon = 1.0;
    std::vector<std::size_t> support;  // sorted

    static PotentialSpec sqrt_sum() { return {}; }
    static PotentialSpec bounded(double b) { return {PotentialKind::BoundedSqrtSum, b, 1.0, {}}; }
    static PotentialSpec support_bounded(double b, double epsilon,
                                         std::vector<std::size_t> support) {
        return {PotentialKind::SupportBoundedSqrtSum, b, epsilon, std::move(support)};
    }

    void validate() const;
};

/// Throws ParameterError if v has a negative (or NaN) entry.
double potential(std::span<const double> v, const PotentialSpec& spec);

/// Default constant in the stage-0 lower bound exp(-C / (eta delta)).
inline constexpr double kDefaultStage0C = 15.0;

struct Stage0Verdict {
    bool passed = false;
    double linf = 0.0;
    double min_entry = 0.0;
    double min_entry_bound = 0.0;
};

/// Passed iff ||v||_inf <= 1/d and min_k v_k >= exp(-C / eta_delta).
Stage0Verdict stage0_verdict(std::span<const double> v, std::size_t d, double eta_delta,
                             double c = kDefaultStage0C);

struct Stage1Verdict {
    bool passed = false;
    double linf_on_support = 0.0;
    double l1_off_support = 0.0;
};

/// Passed iff ||v_S - v*_S||_inf <= support_tol and ||v_{S^c} - v*_{S^c}||_1 <= eps1,
/// where S is the support of vstar.
Stage1Verdict stage1_verdict(std::span<const double> v, std::span<const double> vstar,
                             double eps1, double support_tol = 0.1);

/// Mean of Phi(v_{t+1}) / Phi(v_t) over consecutive pairs with Phi(v_t) > 0.
/// Throws InsufficientDataError with fewer than 10 usable pairs.
double contraction_estimate(std::span<const ParamVector> slice, const PotentialSpec& spec);
double contraction_estimate_from_potentials(std::span<const double> potentials);

/// Norm bound b0 = 6 tau d / rho on ||v_t||_2.
double norm_bound(double tau, std::size_t d, double rho);
/// True iff every logged record is finite and has ||v_t||_2 <= b0.
bool norm_bound_check(std::span<const TrajectoryRecord> trajectory, double tau, std::size_t d,
                      double rho);

}  // namespace qpsim
