#include "qpsim/gibbs_probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qpsim/errors.hpp"
#include "qpsim/rng.hpp"
#include "qpsim/simd.hpp"
#include "qpsim/simplex.hpp"

namespace qpsim {
namespace {

// Orthonormal basis of the complement of span(a) in R^rows, given that a has
// full column rank.
Eigen::MatrixXd complement_of_columns(const Eigen::MatrixXd& a) {
    const Eigen::Index d = a.rows();
    const Eigen::Index k = a.cols();
    if (k == 0) return Eigen::MatrixXd::Identity(d, d);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() != k) throw NumericalError("columns are linearly dependent");
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
    return q.rightCols(d - k);
}

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

Eigen::MatrixXd design_matrix(const Dataset& ds) {
    Eigen::MatrixXd x(ds.n, ds.d);
    for (std::size_t i = 0; i < ds.n; ++i) {
        for (std::size_t k = 0; k < ds.d; ++k) x(i, k) = ds.x[i * ds.d + k];
    }
    return x;
}

Eigen::MatrixXd orthocomplement_basis(const Eigen::MatrixXd& x) {
    if (x.rows() > x.cols()) throw DimensionError("more data rows than dimensions");
    try {
        return complement_of_columns(x.transpose());
    } catch (const NumericalError&) {
        throw NumericalError("data rows are linearly dependent; X^perp is not (d - n)-dimensional");
    }
}

Eigen::MatrixXd orthocomplement_basis(const Dataset& ds) { return orthocomplement_basis(design_matrix(ds)); }

PositiveDirection find_positive_direction(const Eigen::MatrixXd& basis) {
    const Eigen::Index d = basis.rows();
    if (d == 0) throw DimensionError("empty basis");
    PositiveDirection out;
    if (basis.cols() == 0) return out;

    // Variables (t, nu) >= 0 with mu = t * 1 + nu. Constraints keep mu in the
    // span (orthogonal to its complement) and fix the scale by sum(mu) = 1.
    const Eigen::MatrixXd comp = complement_of_columns(basis);
    const Eigen::Index m = comp.cols();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 1, d + 1);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
    a.block(0, 0, m, 1) = comp.transpose().rowwise().sum();
    a.block(0, 1, m, d) = comp.transpose();
    a(m, 0) = static_cast<double>(d);
    a.block(m, 1, 1, d).setOnes();
    b(m) = 1.0;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(d + 1);
    c(0) = -1.0;

    const lp::Result res = lp::solve(a, b, c);
    // No nonzero nonnegative vector in the span at all.
    if (res.status == lp::Status::Infeasible) return out;
    if (res.status != lp::Status::Optimal) throw NumericalError("positive-direction LP did not converge");

    Eigen::VectorXd mu = Eigen::VectorXd::Constant(d, res.x(0)) + res.x.tail(d);
    mu = basis * (basis.transpose() * mu);
    const double norm = mu.norm();
    if (!(norm > 0.0)) return out;
    mu /= norm;
    const double margin = mu.minCoeff();
    if (margin >= 1e-10) {
        out.feasible = true;
        out.mu = std::move(mu);
        out.margin = margin;
    }
    return out;
}

StatDimEstimate statistical_dimension_mc(std::size_t d, std::size_t samples, const GaussianSource& source) {
    if (d == 0) throw ParameterError("statistical dimension needs d >= 1");
    if (samples < 100) throw ParameterError("statistical dimension needs at least 100 samples");
    std::vector<double> g(d);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        source(g);
        const double val = simd::positive_part_sq_sum(g);
        const double delta = val - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (val - mean);
    }
    const double var = m2 / static_cast<double>(samples - 1);
    return {mean, std::sqrt(var / static_cast<double>(samples))};
}

StatDimEstimate statistical_dimension_mc(std::size_t d, std::size_t samples, std::uint64_t seed) {
    RngStream rng(seed);
    return statistical_dimension_mc(d, samples, [&rng](std::span<double> g) {
        for (double& x : g) x = rng.normal();
    });
}

double intersection_probability_mc(std::size_t d, std::size_t n, std::size_t trials, std::uint64_t seed) {
    if (trials < 10) throw ParameterError("intersection probability needs at least 10 trials");
    if (n >= d) throw ParameterError("intersection probability needs n < d");
    const RngStream root(seed);
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream rng = root.substream(t);
        Eigen::MatrixXd x(n, d);
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            for (Eigen::Index k = 0; k < x.cols(); ++k) x(i, k) = rng.normal();
        }
        if (find_positive_direction(orthocomplement_basis(x)).feasible) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

ConeBasis make_cone_basis(const Eigen::MatrixXd& orthocomplement, const Eigen::VectorXd& mu) {
    if (mu.size() != orthocomplement.rows()) throw DimensionError("mu and basis dimensions differ");
    if (orthocomplement.cols() == 0) throw ParameterError("empty orthocomplement");
    ConeBasis out;
    out.mu = mu / mu.norm();
    const Eigen::Index q = orthocomplement.cols() - 1;
    if (q == 0) {
        out.others.resize(mu.size(), 0);
        return out;
    }
    const Eigen::MatrixXd rest = orthocomplement - out.mu * (out.mu.transpose() * orthocomplement);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(rest);
    if (qr.rank() != q) throw NumericalError("mu does not lie in the orthocomplement");
    const Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(rest.rows(), rest.rows());
    out.others = full.leftCols(q);
    return out;
}

std::optional<double> cone_constant(const Eigen::VectorXd& mu, const Eigen::MatrixXd& others) {
    if (mu.size() != others.rows()) throw DimensionError("mu and basis dimensions differ");
    if (!(mu.size() > 0 && mu.minCoeff() > 0.0)) throw ParameterError("mu must be strictly positive");
    const Eigen::Index q = others.cols();
    if (q == 0) return std::nullopt;
    double c = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        const double worst = others.row(i).cwiseAbs().maxCoeff();
        if (worst > 0.0) c = std::min(c, mu(i) / (static_cast<double>(q) * worst));
    }
    return c;
}

std::vector<double> log_spaced_grid(double lo, double hi, std::size_t points_per_decade) {
    if (!(lo > 0.0 && hi > lo) || points_per_decade == 0) {
        throw ParameterError("grid needs 0 < lo < hi and points_per_decade >= 1");
    }
    const double step = 1.0 / static_cast<double>(points_per_decade);
    const double span = std::log10(hi / lo);
    const auto count = static_cast<std::size_t>(std::floor(span / step + 1e-9));
    std::vector<double> z;
    for (std::size_t k = count + 1; k-- > 0;) z.push_back(hi * std::pow(10.0, -step * static_cast<double>(k)));
    return z;
}

ConeProbeReport partition_divergence_probe(const Eigen::MatrixXd& x,
                                           const std::optional<Eigen::VectorXd>& u_star,
                                           const std::vector<double>& z_grid) {
    if (z_grid.size() < 2) throw ParameterError("z grid needs at least two points");
    for (std::size_t k = 0; k < z_grid.size(); ++k) {
        if (!(z_grid[k] > 0.0) || !std::isfinite(z_grid[k]) || (k > 0 && !(z_grid[k] > z_grid[k - 1]))) {
            throw ParameterError("z grid must be positive and strictly increasing");
        }
    }
    ConeProbeReport rep;
    rep.d = static_cast<std::size_t>(x.cols());
    rep.n = static_cast<std::size_t>(x.rows());
    rep.theoretical_slope = static_cast<double>(rep.d) / 2.0 - static_cast<double>(rep.n);

    const Eigen::MatrixXd basis = orthocomplement_basis(x);
    const PositiveDirection dir = find_positive_direction(basis);
    rep.feasible = dir.feasible;
    if (!dir.feasible) return rep;
    rep.mu = dir.mu;
    rep.margin = dir.margin;

    const Eigen::VectorXd ustar = u_star.value_or(dir.mu);
    if (ustar.size() != dir.mu.size()) throw DimensionError("u_star has the wrong dimension");
    if (!(ustar.minCoeff() > 0.0)) throw ParameterError("u_star must be strictly positive");

    const ConeBasis cone = make_cone_basis(basis, dir.mu);
    rep.cone_c = cone_constant(cone.mu, cone.others);
    const double q = static_cast<double>(cone.others.cols());
    const double two_c = rep.cone_c ? 2.0 * *rep.cone_c : 1.0;

    const auto log_f = [&](double z) {
        double acc = q > 0.0 ? q * std::log(two_c * z) : 0.0;
        for (Eigen::Index i = 0; i < ustar.size(); ++i) acc -= 0.5 * std::log(ustar(i) + 2.0 * cone.mu(i) * z);
        return acc;
    };

    using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
    constexpr double kTol = 1e-8;
    constexpr unsigned kDepth = 15;
    double log_total = -std::numeric_limits<double>::infinity();

    // Leading segment [0, z_0] in z; the integrand is bounded there.
    {
        const double shift = log_f(z_grid.front());
        double err = 0.0;
        const double val = Quad::integrate(
            [&](double z) { return std::exp(log_f(z) - shift); },
            0.0, z_grid.front(), kDepth, kTol, &err);
        if (!std::isfinite(val) || !(val > 0.0)) throw NumericalError("quadrature failed on the leading segment");
        log_total = std::log(val) + shift;
    }
    rep.z.push_back(z_grid.front());
    rep.log_integral.push_back(log_total);

    // Remaining panels in s = log z.
    for (std::size_t k = 1; k < z_grid.size(); ++k) {
        const double s0 = std::log(z_grid[k - 1]);
        const double s1 = std::log(z_grid[k]);
        const double shift = std::max(log_f(z_grid[k - 1]) + s0, log_f(z_grid[k]) + s1);
        double err = 0.0;
        const double val = Quad::integrate(
            [&](double s) { return std::exp(log_f(std::exp(s)) + s - shift); }, s0, s1, kDepth, kTol, &err);
        if (!std::isfinite(val) || !(val > 0.0)) throw NumericalError("quadrature failed on a log panel");
        log_total = log_add(log_total, std::log(val) + shift);
        rep.z.push_back(z_grid[k]);
        rep.log_integral.push_back(log_total);
    }

    // Least squares over the top decade.
    const double zmax = rep.z.back();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t cnt = 0;
    for (std::size_t k = 0; k < rep.z.size(); ++k) {
        if (rep.z[k] < zmax / 10.0 * (1.0 - 1e-9)) continue;
        const double lx = std::log(rep.z[k]);
        const double ly = rep.log_integral[k];
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
    }
    if (cnt < 2) throw ParameterError("z grid needs at least two points in its top decade");
    const double nn = static_cast<double>(cnt);
    rep.fitted_slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);

    // log I at zmax / 10 by log-log interpolation.
    const double target = std::log(zmax / 10.0);
    double log_i_lo = rep.log_integral.front();
    for (std::size_t k = 1; k < rep.z.size(); ++k) {
        const double a = std::log(rep.z[k - 1]);
        const double b = std::log(rep.z[k]);
        if (target >= a && target <= b) {
            const double w = (target - a) / (b - a);
            log_i_lo = (1.0 - w) * rep.log_integral[k - 1] + w * rep.log_integral[k];
            break;
        }
    }
    rep.top_decade_increase = std::expm1(rep.log_integral.back() - log_i_lo);
    // d/2 - n is a multiple of 1/2, so 0.25 separates growth from convergence.
    rep.diverges = rep.fitted_slope > 0.25;
    return rep;
}

ConeProbeReport partition_divergence_probe(const Dataset& ds, const std::optional<Eigen::VectorXd>& u_star,
                                           const std::vector<double>& z_grid) {
    return partition_divergence_probe(design_matrix(ds), u_star, z_grid);
}

nlohmann::json to_json(const ConeProbeReport& r) {
    nlohmann::json j;
    j["d"] = r.d;
    j["n"] = r.n;
    j["feasible"] = r.feasible;
    if (r.mu) {
        j["mu"] = std::vector<double>(r.mu->data(), r.mu->data() + r.mu->size());
    } else {
        j["mu"] = nullptr;
    }
    j["margin"] = r.margin;
    j["cone_constant"] = r.cone_c ? nlohmann::json(*r.cone_c) : nlohmann::json(nullptr);
    nlohmann::json pts = nlohmann::json::array();
    for (std::size_t k = 0; k < r.z.size(); ++k) pts.push_back({{"z", r.z[k]}, {"log_integral", r.log_integral[k]}});
    j["partial_integrals"] = std::move(pts);
    j["fitted_slope"] = r.fitted_slope;
    j["theoretical_slope"] = r.theoretical_slope;
    j["top_decade_increase"] = r.top_decade_increase;
    j["diverges"] = r.diverges;
    return j;
}

}  // namespace qpsim
