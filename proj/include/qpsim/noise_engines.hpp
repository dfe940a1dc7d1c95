#pragma once
// One optimization step for each update rule under study.
//
// Random draws come from a single stream per trajectory in a fixed order:
// example indices first, then the label sign or the Gaussian vector. This is
// what makes a trajectory replayable from (seed, config).

#include <optional>
#include <span>
#include <string>

#include "json.hpp"
#include "qpsim/core_model.hpp"
#include "qpsim/rng.hpp"

namespace qpsim {

enum class EngineKind { GD, PlainSGD, LabelNoise, MiniBatchSim, Gaussian };

/// Where the label-noise perturbation is applied.
enum class LabelNoiseForm {
    /// Gradient of one sampled example with a perturbed label (pure SGD).
    SingleExample,
    /// Full gradient plus grad l~_i - grad l_i = -s x_i .* v for a sampled i.
    FullGradient,
};

std::string to_string(EngineKind kind);
EngineKind parse_engine_kind(const std::string& name);

struct NoiseSpec {
    EngineKind kind = EngineKind::GD;
    double delta = 0.0;                 // LabelNoise, MiniBatchSim
    std::optional<double> sigma;        // Gaussian, per-coordinate std of the gradient noise
    std::optional<double> lambda_temp;  // Gaussian, Langevin inverse temperature
    LabelNoiseForm label_form = LabelNoiseForm::SingleExample;

    static NoiseSpec gd() { return {}; }
    static NoiseSpec plain_sgd() {
        return {EngineKind::PlainSGD, 0.0, std::nullopt, std::nullopt, LabelNoiseForm::SingleExample};
    }
    static NoiseSpec label_noise(double delta,
                                 LabelNoiseForm form = LabelNoiseForm::SingleExample) {
        return {EngineKind::LabelNoise, delta, std::nullopt, std::nullopt, form};
    }
    static NoiseSpec minibatch(double delta) {
        return {EngineKind::MiniBatchSim, delta, std::nullopt, std::nullopt, LabelNoiseForm::SingleExample};
    }
    static NoiseSpec gaussian(double sigma) {
        return {EngineKind::Gaussian, 0.0, sigma, std::nullopt, LabelNoiseForm::SingleExample};
    }
    static NoiseSpec langevin(double lambda) {
        return {EngineKind::Gaussian, 0.0, std::nullopt, lambda, LabelNoiseForm::SingleExample};
    }

    /// Throws ParameterError when the active parameterization is missing,
    /// doubled, or out of range.
    void validate() const;

    /// Gaussian noise std at learning rate eta: sigma itself, or sqrt(2/(lambda eta)).
    double gaussian_sigma(double eta) const;

    /// Short label used for output directories, e.g. "label_noise", "gaussian_s0.5".
    std::string label() const;
};

nlohmann::json to_json(const NoiseSpec& spec);
NoiseSpec noise_spec_from_json(const nlohmann::json& j);

struct StepContext {
    double eta;
    RngStream& rng;
};

/// Non-finite entries, or an entry above this magnitude, end a trajectory.
inline constexpr double kDivergenceThreshold = 1e12;
bool is_diverged(std::span<const double> v);

// Pure step functions; each returns the next iterate.
ParamVector step_gd(const ParamVector& v, const Dataset& ds, StepContext& ctx);
ParamVector step_plain_sgd(const ParamVector& v, const Dataset& ds, StepContext& ctx);
ParamVector step_label_noise(const ParamVector& v, const Dataset& ds, StepContext& ctx,
                             double delta);
ParamVector step_minibatch_sim(const ParamVector& v, const Dataset& ds, StepContext& ctx,
                               double delta);
ParamVector step_gaussian(const ParamVector& v, const Dataset& ds, StepContext& ctx,
                          double sigma);
/// v - eta grad L(v) + sqrt(2 eta / lambda) xi, drawing xi like step_gaussian.
ParamVector step_langevin(const ParamVector& v, const Dataset& ds, StepContext& ctx,
                          double lambda);
ParamVector step(const NoiseSpec& spec, const ParamVector& v, const Dataset& ds,
                 StepContext& ctx);

// Updates with the randomness supplied explicitly.
/// v - eta ((f_v(x_i) - y_i) - s) x_i .* v
ParamVector label_noise_update(const ParamVector& v, const Dataset& ds, double eta,
                               std::size_t i, double s);
/// delta (grad l_i(v) - grad l_j(v)); exactly zero when i == j.
ParamVector minibatch_noise(const ParamVector& v, const Dataset& ds, double delta, std::size_t i,
                            std::size_t j);
/// v - eta grad L(v) + eta sigma xi
ParamVector gaussian_update(const ParamVector& v, const Dataset& ds, double eta, double sigma,
                            std::span<const double> xi);

/// In-place stepping with preallocated scratch, used by the trainer.
class Stepper {
public:
    Stepper(const Dataset& ds, NoiseSpec spec);

    const NoiseSpec& spec() const { return spec_; }
    void step(std::span<double> v, double eta, RngStream& rng);

private:
    const Dataset& ds_;
    NoiseSpec spec_;
    ParamVector grad_;
    ParamVector xi_;
};

}  // namespace qpsim
