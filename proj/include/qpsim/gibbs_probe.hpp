#pragma once
// Probes of the Gibbs partition function for Gaussian-noise dynamics.
//
// In u = v .* v coordinates the loss only sees the projection of u onto the
// span of the data, so it is constant along u + X^perp. When X^perp contains a
// strictly positive direction mu, a cone around the ray u* + z mu stays inside
// the positive orthant, and integrating the Jacobian prod_i u_i^{-1/2} over that
// cone gives
//
//   I(Z) = int_0^Z (2 c z)^{d-n-1} prod_i (u*_i + 2 mu_i z)^{-1/2} dz,
//
// which grows like Z^{d/2 - n}. The probes below construct mu, the cone
// constant c and the partial integrals I(Z).

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "qpsim/core_model.hpp"

namespace qpsim {

/// n x d matrix whose rows are the training inputs.
Eigen::MatrixXd design_matrix(const Dataset& ds);

/// Orthonormal basis (d x (d - n)) of the subspace orthogonal to every row of x.
/// Throws NumericalError if the rows are linearly dependent.
Eigen::MatrixXd orthocomplement_basis(const Eigen::MatrixXd& x);
Eigen::MatrixXd orthocomplement_basis(const Dataset& ds);

struct PositiveDirection {
    bool feasible = false;
    Eigen::VectorXd mu;   // unit l2 norm, strictly positive, in the column span
    double margin = 0.0;  // min_i mu_i
};

/// Searches span(basis) for a strictly positive vector by maximizing t subject
/// to mu >= t, sum(mu) = 1, mu orthogonal to the complement of the span.
/// Throws NumericalError if the LP solver fails (distinct from infeasibility).
PositiveDirection find_positive_direction(const Eigen::MatrixXd& basis);

struct StatDimEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Fills its argument with one sample of g.
using GaussianSource = std::function<void(std::span<double>)>;

/// Monte Carlo estimate of E ||Pi_C(g)||^2 for the nonnegative orthant C.
StatDimEstimate statistical_dimension_mc(std::size_t d, std::size_t samples, std::uint64_t seed);
StatDimEstimate statistical_dimension_mc(std::size_t d, std::size_t samples,
                                         const GaussianSource& source);

/// Fraction of trials in which the orthocomplement of n Gaussian points in R^d
/// contains a strictly positive vector.
double intersection_probability_mc(std::size_t d, std::size_t n, std::size_t trials,
                                   std::uint64_t seed);

/// mu together with an orthonormal basis of the rest of X^perp.
struct ConeBasis {
    Eigen::VectorXd mu;
    Eigen::MatrixXd others;  // d x (dim X^perp - 1)
};

ConeBasis make_cone_basis(const Eigen::MatrixXd& orthocomplement, const Eigen::VectorXd& mu);

/// c = min_i mu_i / (q * max_j |others_ij|), q = others.cols(). Every point
/// u* + z mu + others * w with |w_j| <= c z, z >= 0 then stays >= u*.
/// Returns nullopt when q == 0 (only the ray remains).
std::optional<double> cone_constant(const Eigen::VectorXd& mu, const Eigen::MatrixXd& others);

struct ConeProbeReport {
    std::size_t d = 0;
    std::size_t n = 0;
    bool feasible = false;
    std::optional<Eigen::VectorXd> mu;
    double margin = 0.0;
    std::optional<double> cone_c;
    std::vector<double> z;
    std::vector<double> log_integral;  // log I(Z)
    double fitted_slope = 0.0;
    double theoretical_slope = 0.0;
    double top_decade_increase = 0.0;  // I(Zmax) / I(Zmax / 10) - 1
    bool diverges = false;
};

/// Log-spaced grid with points_per_decade points per factor of 10, ending at hi.
std::vector<double> log_spaced_grid(double lo, double hi, std::size_t points_per_decade);

/// Partial integrals on z_grid (strictly increasing, positive). u_star defaults to mu.
ConeProbeReport partition_divergence_probe(const Dataset& ds,
                                           const std::optional<Eigen::VectorXd>& u_star,
                                           const std::vector<double>& z_grid);
ConeProbeReport partition_divergence_probe(const Eigen::MatrixXd& x,
                                           const std::optional<Eigen::VectorXd>& u_star,
                                           const std::vector<double>& z_grid);

nlohmann::json to_json(const ConeProbeReport& report);

}  // namespace qpsim
