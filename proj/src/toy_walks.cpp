#include "qpsim/toy_walks.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "qpsim/errors.hpp"
#include "qpsim/rng.hpp"

namespace qpsim {
namespace {

class WalkState {
public:
    explicit WalkState(const WalkConfig& cfg) : cfg_(cfg), v_(cfg.dims, cfg.v0) {}

    std::vector<double>& v() { return v_; }

    template <class Xi>
    void step(Xi&& next_xi) {
        const double scale = cfg_.shared_variance ? cfg_.eta * l2() : cfg_.eta;
        for (double& x : v_) {
            const double xi = next_xi();
            if (cfg_.shared_variance || cfg_.kind == WalkKind::Additive) {
                x += scale * xi;
            } else {
                x += scale * xi * x;
            }
        }
    }

    double draw(RngStream& rng) const {
        return cfg_.kind == WalkKind::Multiplicative ? static_cast<double>(rng.sign()) : rng.normal();
    }

private:
    double l2() const {
        double s = 0.0;
        for (double x : v_) s += x * x;
        return std::sqrt(s);
    }

    const WalkConfig& cfg_;
    std::vector<double> v_;
};

double sqrt_potential(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::sqrt(std::abs(x));
    return s;
}

}  // namespace

std::string to_string(WalkKind k) { return k == WalkKind::Multiplicative ? "multiplicative" : "additive"; }

WalkKind parse_walk_kind(const std::string& s) {
    if (s == "multiplicative") return WalkKind::Multiplicative;
    if (s == "additive") return WalkKind::Additive;
    throw ParameterError("unknown walk kind '" + s + "'");
}

void WalkConfig::validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw ParameterError("walk eta must be positive");
    if (kind == WalkKind::Multiplicative && !(eta < 1.0)) {
        throw ParameterError("multiplicative walk needs eta < 1");
    }
    if (dims == 0) throw ParameterError("walk needs at least one dimension");
    if (!std::isfinite(v0)) throw ParameterError("walk v0 must be finite");
}

std::vector<WalkPoint> run_walk(const WalkConfig& cfg, std::span<const double> forced_xi) {
    cfg.validate();
    if (!forced_xi.empty() && forced_xi.size() < cfg.steps * cfg.dims) {
        throw DimensionError("forced noise sequence is shorter than steps * dims");
    }
    WalkState state(cfg);
    RngStream rng(cfg.seed, 1);
    std::size_t cursor = 0;
    std::vector<WalkPoint> out;
    out.reserve(cfg.steps + 1);
    out.push_back({0, state.v(), sqrt_potential(state.v())});
    for (std::size_t t = 1; t <= cfg.steps; ++t) {
        if (forced_xi.empty()) {
            state.step([&] { return state.draw(rng); });
        } else {
            state.step([&] { return forced_xi[cursor++]; });
        }
        out.push_back({t, state.v(), sqrt_potential(state.v())});
    }
    return out;
}

std::vector<WalkCheckpoint> walk_ensemble_stats(const WalkConfig& cfg, std::size_t trials, double threshold) {
    cfg.validate();
    if (trials < 100) throw ParameterError("walk ensemble needs at least 100 trials");
    if (!(threshold > 0.0)) throw ParameterError("walk threshold must be positive");

    std::vector<std::size_t> checkpoints;
    for (std::size_t t = 1; t <= cfg.steps; t *= 2) checkpoints.push_back(t);
    if (checkpoints.empty() || checkpoints.back() != cfg.steps) checkpoints.push_back(cfg.steps);

    struct Acc {
        double mean = 0.0, m2 = 0.0, smean = 0.0, sm2 = 0.0;
        std::size_t below = 0;
    };
    std::vector<Acc> acc(checkpoints.size());
    const RngStream root(cfg.seed, 1);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        RngStream rng = root.substream(trial);
        WalkState state(cfg);
        std::size_t next = 0;
        for (std::size_t t = 1; t <= cfg.steps && next < checkpoints.size(); ++t) {
            state.step([&] { return state.draw(rng); });
            if (t != checkpoints[next]) continue;
            const double v = state.v()[0];
            const double s = std::sqrt(std::abs(v));
            Acc& a = acc[next];
            const double k = static_cast<double>(trial + 1);
            const double dv = v - a.mean;
            a.mean += dv / k;
            a.m2 += dv * (v - a.mean);
            const double ds = s - a.smean;
            a.smean += ds / k;
            a.sm2 += ds * (s - a.smean);
            if (std::abs(v) < threshold) ++a.below;
            ++next;
        }
    }

    std::vector<WalkCheckpoint> out;
    const double n = static_cast<double>(trials);
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        const Acc& a = acc[c];
        WalkCheckpoint w;
        w.step = checkpoints[c];
        w.mean_v = a.mean;
        w.var_v = a.m2 / (n - 1.0);
        w.stderr_v = std::sqrt(w.var_v / n);
        w.mean_sqrt_v = a.smean;
        w.stderr_sqrt_v = std::sqrt(a.sm2 / (n - 1.0) / n);
        w.frac_below = static_cast<double>(a.below) / n;
        out.push_back(w);
    }
    return out;
}

double multiplicative_sqrt_factor(double eta) { return (std::sqrt(1.0 + eta) + std::sqrt(1.0 - eta)) / 2.0; }

double multiplicative_sd(double eta, std::size_t t, double v0) {
    return std::abs(v0) * std::sqrt(std::expm1(static_cast<double>(t) * std::log1p(eta * eta)));
}

void write_walk_csv(const std::filesystem::path& path, std::span<const WalkCheckpoint> stats) {
    std::ofstream out(path);
    if (!out) throw ParameterError("cannot write " + path.string());
    out << kWalkCsvHeader << '\n';
    char buf[256];
    for (const auto& w : stats) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", w.step, w.mean_v,
                      w.mean_sqrt_v, w.frac_below, w.stderr_v, w.stderr_sqrt_v, w.var_v);
        out << buf;
    }
    if (!out) throw NumericalError("failed while writing " + path.string());
}

}  // namespace qpsim
