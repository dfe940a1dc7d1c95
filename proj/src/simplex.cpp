#include "qpsim/simplex.hpp"

#include <limits>
#include <vector>

#include "qpsim/errors.hpp"

namespace qpsim::lp {
namespace {

class Tableau {
public:
    Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b)
        : m_(a.rows()), n_(a.cols()), t_(Eigen::MatrixXd::Zero(m_ + 1, n_ + m_ + 1)), basis_(m_) {
        for (Eigen::Index i = 0; i < m_; ++i) {
            const double sign = b(i) < 0.0 ? -1.0 : 1.0;
            t_.row(i).head(n_) = sign * a.row(i);
            t_(i, n_ + i) = 1.0;
            t_(i, rhs()) = sign * b(i);
            basis_[i] = n_ + i;
        }
    }

    Eigen::Index rhs() const { return n_ + m_; }
    Eigen::Index rows() const { return m_; }
    Eigen::Index vars() const { return n_; }
    Eigen::MatrixXd& t() { return t_; }
    std::vector<Eigen::Index>& basis() { return basis_; }

    void pivot(Eigen::Index r, Eigen::Index c) {
        t_.row(r) /= t_(r, c);
        for (Eigen::Index i = 0; i <= m_; ++i) {
            if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
        }
        basis_[r] = c;
    }

    // Runs Bland-rule iterations over columns [0, ncols). Objective row is row m.
    Status iterate(Eigen::Index ncols, const Options& opt, std::size_t& iterations) {
        while (iterations < opt.max_iterations) {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < ncols; ++j) {
                if (t_(m_, j) < -opt.pivot_tol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return Status::Optimal;

            Eigen::Index leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < m_; ++i) {
                const double coef = t_(i, enter);
                if (coef > opt.pivot_tol) {
                    const double ratio = t_(i, rhs()) / coef;
                    if (ratio < best - 1e-14 ||
                        (ratio <= best + 1e-14 && leave >= 0 && basis_[i] < basis_[leave])) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return Status::Unbounded;
            pivot(leave, enter);
            ++iterations;
        }
        return Status::IterationLimit;
    }

private:
    Eigen::Index m_;
    Eigen::Index n_;
    Eigen::MatrixXd t_;
    std::vector<Eigen::Index> basis_;
};

}  // namespace

Result solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
             const Options& options) {
    if (a.rows() != b.size() || a.cols() != c.size()) {
        throw DimensionError("LP: inconsistent shapes");
    }
    Result result;
    Tableau tab(a, b);
    auto& t = tab.t();
    const Eigen::Index m = tab.rows();
    const Eigen::Index n = tab.vars();

    // Phase 1: minimize the sum of artificials.
    t.row(m).setZero();
    for (Eigen::Index i = 0; i < m; ++i) {
        t.row(m).head(n) -= t.row(i).head(n);
        t(m, tab.rhs()) -= t(i, tab.rhs());
    }
    Status st = tab.iterate(n + m, options, result.iterations);
    if (st == Status::IterationLimit) {
        result.status = st;
        return result;
    }
    if (-t(m, tab.rhs()) > options.feasibility_tol) {
        result.status = Status::Infeasible;
        return result;
    }

    // Move remaining artificials out of the basis where possible.
    for (Eigen::Index i = 0; i < m; ++i) {
        if (tab.basis()[i] < n) continue;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::abs(t(i, j)) > options.pivot_tol) {
                tab.pivot(i, j);
                break;
            }
        }
    }

    // Phase 2 over the original columns only.
    t.row(m).setZero();
    t.row(m).head(n) = c.transpose();
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index bi = tab.basis()[i];
        const double cb = bi < n ? c(bi) : 0.0;
        if (cb != 0.0) t.row(m) -= cb * t.row(i);
    }
    st = tab.iterate(n, options, result.iterations);
    result.status = st;
    if (st != Status::Optimal) return result;

    result.x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (tab.basis()[i] < n) result.x(tab.basis()[i]) = t(i, tab.rhs());
    }
    result.objective = c.dot(result.x);
    return result;
}

}  // namespace qpsim::lp
