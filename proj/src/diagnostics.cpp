#include "qpsim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qpsim/errors.hpp"

namespace qpsim {

void PotentialSpec::validate() const {
    if (kind != PotentialKind::SqrtSum && !(b > 0.0)) {
        throw ParameterError("potential bound b must be positive");
    }
    if (kind == PotentialKind::SupportBoundedSqrtSum && !(epsilon > 0.0)) {
        throw ParameterError("potential epsilon must be positive");
    }
    if (!std::is_sorted(support.begin(), support.end())) {
        throw ParameterError("potential support must be sorted");
    }
}

double potential(std::span<const double> v, const PotentialSpec& spec) {
    spec.validate();
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!(v[k] >= 0.0)) {
            throw ParameterError("potential is defined on nonnegative vectors; entry " +
                                 std::to_string(k) + " is " + std::to_string(v[k]));
        }
    }

    switch (spec.kind) {
        case PotentialKind::SqrtSum: {
            double s = 0.0;
            for (double x : v) s += std::sqrt(x);
            return s;
        }
        case PotentialKind::BoundedSqrtSum: {
            double l1 = 0.0;
            double s = 0.0;
            for (double x : v) {
                l1 += x;
                s += std::sqrt(x);
            }
            return l1 <= spec.b ? s : 0.0;
        }
        case PotentialKind::SupportBoundedSqrtSum: {
            double off_l1 = 0.0;
            double off_sqrt = 0.0;
            double on_linf = 0.0;
            for (std::size_t k = 0; k < v.size(); ++k) {
                if (std::binary_search(spec.support.begin(), spec.support.end(), k)) {
                    on_linf = std::max(on_linf, v[k]);
                } else {
                    off_l1 += v[k];
                    off_sqrt += std::sqrt(v[k]);
                }
            }
            return (off_l1 <= spec.epsilon && on_linf <= spec.b) ? off_sqrt : 0.0;
        }
    }
    return 0.0;
}

Stage0Verdict stage0_verdict(std::span<const double> v, std::size_t d, double eta_delta,
                             double c) {
    if (d == 0 || !(eta_delta > 0.0)) throw ParameterError("stage0 verdict needs d > 0, eta*delta > 0");
    Stage0Verdict out;
    out.min_entry = v.empty() ? 0.0 : v[0];
    for (double x : v) {
        out.linf = std::max(out.linf, std::abs(x));
        out.min_entry = std::min(out.min_entry, x);
    }
    out.min_entry_bound = std::exp(-c / eta_delta);
    out.passed = out.linf <= 1.0 / static_cast<double>(d) && out.min_entry >= out.min_entry_bound;
    return out;
}

Stage1Verdict stage1_verdict(std::span<const double> v, std::span<const double> vstar,
                             double eps1, double support_tol) {
    if (v.size() != vstar.size()) throw DimensionError("stage1 verdict: dimension mismatch");
    Stage1Verdict out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double diff = std::abs(v[k] - vstar[k]);
        if (vstar[k] != 0.0) {
            out.linf_on_support = std::max(out.linf_on_support, diff);
        } else {
            out.l1_off_support += diff;
        }
    }
    out.passed = out.linf_on_support <= support_tol && out.l1_off_support <= eps1;
    return out;
}

double contraction_estimate_from_potentials(std::span<const double> potentials) {
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t t = 0; t + 1 < potentials.size(); ++t) {
        if (potentials[t] > 0.0 && std::isfinite(potentials[t]) &&
            std::isfinite(potentials[t + 1])) {
            sum += potentials[t + 1] / potentials[t];
            ++used;
        }
    }
    if (used < 10) {
        throw InsufficientDataError("contraction estimate needs at least 10 usable pairs, got " +
                                    std::to_string(used));
    }
    return sum / static_cast<double>(used);
}

double contraction_estimate(std::span<const ParamVector> slice, const PotentialSpec& spec) {
    std::vector<double> phis;
    phis.reserve(slice.size());
    for (const auto& v : slice) phis.push_back(potential(v, spec));
    return contraction_estimate_from_potentials(phis);
}

double norm_bound(double tau, std::size_t d, double rho) {
    if (!(tau > 0.0) || d == 0 || !(rho > 0.0)) throw ParameterError("norm bound needs tau, d, rho > 0");
    return 6.0 * tau * static_cast<double>(d) / rho;
}

bool norm_bound_check(std::span<const TrajectoryRecord> trajectory, double tau, std::size_t d,
                      double rho) {
    const double b0 = norm_bound(tau, d, rho);
    return std::all_of(trajectory.begin(), trajectory.end(), [b0](const TrajectoryRecord& rec) {
        return !rec.diverged && rec.l2 <= b0;
    });
}

}  // namespace qpsim
