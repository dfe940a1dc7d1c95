#pragma once
// Dense two-phase simplex for small standard-form LPs:
//   minimize c^T x  subject to  A x = b,  x >= 0.
// Bland's rule is used throughout, so degenerate problems terminate.

#include <Eigen/Dense>

namespace qpsim::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Result {
    Status status = Status::IterationLimit;
    Eigen::VectorXd x;
    double objective = 0.0;
    std::size_t iterations = 0;
};

struct Options {
    double pivot_tol = 1e-10;
    double feasibility_tol = 1e-9;
    std::size_t max_iterations = 50000;
};

Result solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
             const Options& options = {});

}  // namespace qpsim::lp
