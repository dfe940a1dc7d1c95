#pragma once
// Multi-stage trajectories: schedule + engine + logging.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qpsim/core_model.hpp"
#include "qpsim/noise_engines.hpp"
#include "qpsim/trajectory_record.hpp"

namespace qpsim {

struct Stage {
    double eta = 0.0;
    std::size_t steps = 0;
};

/// Piecewise-constant learning rate plan.
struct ScheduleSpec {
    std::vector<Stage> stages;

    static ScheduleSpec constant(double eta, std::size_t steps) { return {{{eta, steps}}}; }

    std::size_t total_steps() const;
    /// Learning rate used for the update that produces iterate t+1 from iterate t.
    double eta_at(std::size_t t) const;
    /// Index of the first step of stage k.
    std::size_t stage_start(std::size_t k) const;
    void validate() const;
};

nlohmann::json to_json(const ScheduleSpec& s);
ScheduleSpec schedule_from_json(const nlohmann::json& j);

/// Multipliers for the three-stage label-noise schedule:
///   eta0 = c0 / delta,         T0 = ceil(k0 / (eta0 delta)^2)
///   eta1 = c1 / delta^2,       T1 = ceil(k1 / eta1)
///   eta2 = c2 eps^2 / delta^2, T2 = ceil(k2 / eta2)
/// Defaults come from a calibration sweep at d=100, n=40, r=5, tau=1 (see README).
struct ThreeStageOptions {
    double c0 = 0.1;
    double c1 = 0.2;
    double c2 = 0.25;
    double k0 = 100.0;
    double k1 = 2000.0;
    double k2 = 10.0;
    std::optional<std::size_t> t0;
    std::optional<std::size_t> t1;
    std::optional<std::size_t> t2;
};

/// Noise level used with the calibrated three-stage schedule.
inline constexpr double kCalibratedDelta = 70.0;

ScheduleSpec three_stage_schedule(double delta, double epsilon, const ThreeStageOptions& opts = {});

struct TrajectoryResult {
    std::vector<TrajectoryRecord> records;
    ParamVector final_v;
    std::size_t steps_run = 0;
    bool diverged = false;
};

/// Called after every update with (t+1, eta used, new iterate).
using StepObserver = std::function<void(std::size_t, double, std::span<const double>)>;

TrajectoryRecord make_record(std::size_t step, std::span<const double> v, const Dataset& ds);

/// Runs the engine along the schedule, logging at steps 0, log_every, 2*log_every, ...
/// and at the final step. Stops at the first diverged iterate, whose record
/// is the last one emitted.
TrajectoryResult run_trajectory(const Dataset& ds, const ParamVector& v0, const NoiseSpec& engine,
                                const ScheduleSpec& schedule, std::size_t log_every,
                                std::uint64_t seed, const StepObserver& observer = {});

/// Bundled configuration for the synthetic comparison of update rules.
struct EngineRun {
    NoiseSpec engine;
    ScheduleSpec schedule;
};

struct Figure1Preset {
    std::size_t d = 100;
    std::size_t n = 40;
    std::size_t r = 5;
    double tau = 1.0;
    double eta = 0.01;
    double delta = 1.0;
    std::size_t steps = 300000;
    std::size_t gaussian_steps = 1200000;
    std::vector<double> gaussian_sigmas{0.1, 0.5, 1.0, 2.0};

    EngineRun gd() const;
    EngineRun label_noise() const;
    EngineRun minibatch() const;
    std::vector<EngineRun> gaussian() const;
    std::vector<EngineRun> all() const;
};

Figure1Preset figure1_preset();

// CSV trajectory files.
inline constexpr const char* kTrajectoryCsvHeader =
    "step,train_loss,test_error,linf,l1,l2,linf_err_S,l1_Sbar,potential,min_entry,diverged";
void write_trajectory_csv(const std::filesystem::path& path,
                          std::span<const TrajectoryRecord> records);
std::vector<TrajectoryRecord> read_trajectory_csv(const std::filesystem::path& path);

/// Identifier of the build that produced a run (git describe at configure time).
std::string build_id();

}  // namespace qpsim
