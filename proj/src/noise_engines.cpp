#include "qpsim/noise_engines.hpp"

#include <cmath>
#include <sstream>

#include "qpsim/errors.hpp"
#include "qpsim/simd.hpp"

namespace qpsim {
namespace {

std::string compact(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

std::string to_string(LabelNoiseForm form) {
    return form == LabelNoiseForm::SingleExample ? "single_example" : "full_gradient";
}

LabelNoiseForm parse_label_form(const std::string& s) {
    if (s == "single_example") return LabelNoiseForm::SingleExample;
    if (s == "full_gradient") return LabelNoiseForm::FullGradient;
    throw ParameterError("unknown label noise form '" + s + "'");
}

void require_eta(double eta) {
    if (!std::isfinite(eta) || eta < 0.0) {
        throw ParameterError("learning rate must be finite and nonnegative");
    }
}

}  // namespace

std::string to_string(EngineKind kind) {
    switch (kind) {
        case EngineKind::GD:
            return "gd";
        case EngineKind::PlainSGD:
            return "plain_sgd";
        case EngineKind::LabelNoise:
            return "label_noise";
        case EngineKind::MiniBatchSim:
            return "minibatch";
        case EngineKind::Gaussian:
            return "gaussian";
    }
    return "unknown";
}

EngineKind parse_engine_kind(const std::string& name) {
    for (EngineKind k : {EngineKind::GD, EngineKind::PlainSGD, EngineKind::LabelNoise,
                         EngineKind::MiniBatchSim, EngineKind::Gaussian}) {
        if (to_string(k) == name) return k;
    }
    throw ParameterError("unknown engine '" + name + "'");
}

void NoiseSpec::validate() const {
    if (!std::isfinite(delta) || delta < 0.0) throw ParameterError("delta must be finite and >= 0");
    const bool uses_delta = kind == EngineKind::LabelNoise || kind == EngineKind::MiniBatchSim;
    if (!uses_delta && delta != 0.0) {
        throw ParameterError("delta is not a parameter of engine " + to_string(kind));
    }
    if (kind == EngineKind::Gaussian) {
        if (sigma.has_value() == lambda_temp.has_value()) {
            throw ParameterError("gaussian engine needs exactly one of sigma or lambda");
        }
        if (sigma && (!std::isfinite(*sigma) || *sigma < 0.0)) {
            throw ParameterError("sigma must be finite and >= 0");
        }
        if (lambda_temp && (!std::isfinite(*lambda_temp) || *lambda_temp <= 0.0)) {
            throw ParameterError("lambda must be finite and > 0");
        }
    } else if (sigma || lambda_temp) {
        throw ParameterError("sigma/lambda are only parameters of the gaussian engine");
    }
}

double NoiseSpec::gaussian_sigma(double eta) const {
    if (sigma) return *sigma;
    if (!lambda_temp) throw ParameterError("gaussian engine has no noise parameter");
    if (!(eta > 0.0)) throw ParameterError("langevin sigma needs a positive learning rate");
    return std::sqrt(2.0 / (*lambda_temp * eta));
}

std::string NoiseSpec::label() const {
    if (kind == EngineKind::Gaussian) {
        return sigma ? "gaussian_s" + compact(*sigma) : "langevin_l" + compact(*lambda_temp);
    }
    return to_string(kind);
}

nlohmann::json to_json(const NoiseSpec& spec) {
    nlohmann::json j{{"kind", to_string(spec.kind)}, {"delta", spec.delta}};
    if (spec.sigma) j["sigma"] = *spec.sigma;
    if (spec.lambda_temp) j["lambda"] = *spec.lambda_temp;
    if (spec.kind == EngineKind::LabelNoise) j["label_form"] = to_string(spec.label_form);
    return j;
}

NoiseSpec noise_spec_from_json(const nlohmann::json& j) {
    NoiseSpec spec;
    spec.kind = parse_engine_kind(j.at("kind").get<std::string>());
    spec.delta = j.value("delta", 0.0);
    if (j.contains("sigma")) spec.sigma = j.at("sigma").get<double>();
    if (j.contains("lambda")) spec.lambda_temp = j.at("lambda").get<double>();
    if (j.contains("label_form")) spec.label_form = parse_label_form(j.at("label_form"));
    spec.validate();
    return spec;
}

bool is_diverged(std::span<const double> v) {
    const double m = simd::max_abs(v);
    return !std::isfinite(m) || m > kDivergenceThreshold;
}

Stepper::Stepper(const Dataset& ds, NoiseSpec spec)
    : ds_(ds), spec_(spec), grad_(ds.d, 0.0), xi_(ds.d, 0.0) {
    spec_.validate();
    if (ds.n == 0) throw InsufficientDataError("cannot step on an empty dataset");
}

void Stepper::step(std::span<double> v, double eta, RngStream& rng) {
    require_eta(eta);
    if (v.size() != ds_.d) throw DimensionError("iterate dimension differs from dataset");

    switch (spec_.kind) {
        case EngineKind::GD:
            full_grad_into(v, ds_, grad_);
            simd::axpy(-eta, grad_, v);
            return;

        case EngineKind::PlainSGD: {
            const std::size_t i = rng.index(ds_.n);
            accumulate_example_grad(v, ds_, i, -eta, v);
            return;
        }

        case EngineKind::LabelNoise: {
            if (spec_.label_form == LabelNoiseForm::SingleExample) {
                const std::size_t i = rng.index(ds_.n);
                const double s = spec_.delta * rng.sign();
                const auto xi = ds_.row(i);
                const double res = predict(v, xi) - ds_.y[i];
                simd::hadamard_axpy(-eta * (res - s), xi, v, v);
            } else {
                full_grad_into(v, ds_, grad_);
                const std::size_t i = rng.index(ds_.n);
                const double s = spec_.delta * rng.sign();
                simd::hadamard_axpy(-s, ds_.row(i), v, grad_);
                simd::axpy(-eta, grad_, v);
            }
            return;
        }

        case EngineKind::MiniBatchSim: {
            full_grad_into(v, ds_, grad_);
            const std::size_t i = rng.index(ds_.n);
            const std::size_t j = rng.index(ds_.n);
            if (spec_.delta != 0.0 && i != j) {
                accumulate_example_grad(v, ds_, i, spec_.delta, grad_);
                accumulate_example_grad(v, ds_, j, -spec_.delta, grad_);
            }
            simd::axpy(-eta, grad_, v);
            return;
        }

        case EngineKind::Gaussian: {
            full_grad_into(v, ds_, grad_);
            for (double& z : xi_) z = rng.normal();
            const double scale = eta > 0.0 ? eta * spec_.gaussian_sigma(eta) : 0.0;
            simd::axpy(-eta, grad_, v);
            simd::axpy(scale, xi_, v);
            return;
        }
    }
}

namespace {

ParamVector run_one(const NoiseSpec& spec, const ParamVector& v, const Dataset& ds,
                    StepContext& ctx) {
    ParamVector out = v;
    Stepper(ds, spec).step(out, ctx.eta, ctx.rng);
    return out;
}

}  // namespace

ParamVector step_gd(const ParamVector& v, const Dataset& ds, StepContext& ctx) {
    return run_one(NoiseSpec::gd(), v, ds, ctx);
}

ParamVector step_plain_sgd(const ParamVector& v, const Dataset& ds, StepContext& ctx) {
    return run_one(NoiseSpec::plain_sgd(), v, ds, ctx);
}

ParamVector step_label_noise(const ParamVector& v, const Dataset& ds, StepContext& ctx,
                             double delta) {
    return run_one(NoiseSpec::label_noise(delta), v, ds, ctx);
}

ParamVector step_minibatch_sim(const ParamVector& v, const Dataset& ds, StepContext& ctx,
                               double delta) {
    return run_one(NoiseSpec::minibatch(delta), v, ds, ctx);
}

ParamVector step_gaussian(const ParamVector& v, const Dataset& ds, StepContext& ctx,
                          double sigma) {
    return run_one(NoiseSpec::gaussian(sigma), v, ds, ctx);
}

ParamVector step_langevin(const ParamVector& v, const Dataset& ds, StepContext& ctx,
                          double lambda) {
    require_eta(ctx.eta);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("lambda must be > 0");
    ParamVector out = v;
    ParamVector g(v.size());
    full_grad_into(v, ds, g);
    ParamVector xi(v.size());
    for (double& z : xi) z = ctx.rng.normal();
    simd::axpy(-ctx.eta, g, out);
    simd::axpy(std::sqrt(2.0 * ctx.eta / lambda), xi, out);
    return out;
}

ParamVector step(const NoiseSpec& spec, const ParamVector& v, const Dataset& ds,
                 StepContext& ctx) {
    return run_one(spec, v, ds, ctx);
}

ParamVector label_noise_update(const ParamVector& v, const Dataset& ds, double eta,
                               std::size_t i, double s) {
    require_eta(eta);
    if (i >= ds.n) throw ParameterError("example index out of range");
    ParamVector out = v;
    const auto xi = ds.row(i);
    const double res = predict(v, xi) - ds.y[i];
    simd::hadamard_axpy(-eta * (res - s), xi, v, out);
    return out;
}

ParamVector minibatch_noise(const ParamVector& v, const Dataset& ds, double delta, std::size_t i,
                            std::size_t j) {
    ParamVector out(v.size(), 0.0);
    if (i >= ds.n || j >= ds.n) throw ParameterError("example index out of range");
    if (delta != 0.0 && i != j) {
        accumulate_example_grad(v, ds, i, delta, out);
        accumulate_example_grad(v, ds, j, -delta, out);
    }
    return out;
}

ParamVector gaussian_update(const ParamVector& v, const Dataset& ds, double eta, double sigma,
                            std::span<const double> xi) {
    require_eta(eta);
    if (xi.size() != v.size()) throw DimensionError("noise vector dimension mismatch");
    ParamVector out = v;
    ParamVector g(v.size());
    full_grad_into(v, ds, g);
    simd::axpy(-eta, g, out);
    simd::axpy(eta * sigma, xi, out);
    return out;
}

}  // namespace qpsim
