#include "qpsim/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qpsim/errors.hpp"
#include "qpsim/rng.hpp"
#include "qpsim/simd.hpp"

#ifndef QPSIM_BUILD_ID
#define QPSIM_BUILD_ID "unknown"
#endif

namespace qpsim {

std::size_t ScheduleSpec::total_steps() const {
    std::size_t total = 0;
    for (const Stage& s : stages) total += s.steps;
    return total;
}

double ScheduleSpec::eta_at(std::size_t t) const {
    std::size_t start = 0;
    for (const Stage& s : stages) {
        if (t < start + s.steps) return s.eta;
        start += s.steps;
    }
    throw ParameterError("step " + std::to_string(t) + " is past the end of the schedule");
}

std::size_t ScheduleSpec::stage_start(std::size_t k) const {
    if (k > stages.size()) throw ParameterError("stage index out of range");
    std::size_t start = 0;
    for (std::size_t i = 0; i < k; ++i) start += stages[i].steps;
    return start;
}

void ScheduleSpec::validate() const {
    if (stages.empty()) throw ParameterError("schedule has no stages");
    for (const Stage& s : stages) {
        if (!std::isfinite(s.eta) || !(s.eta > 0.0)) {
            throw ParameterError("schedule learning rates must be positive and finite");
        }
    }
}

nlohmann::json to_json(const ScheduleSpec& s) {
    nlohmann::json stages = nlohmann::json::array();
    for (const Stage& st : s.stages) stages.push_back({{"eta", st.eta}, {"steps", st.steps}});
    return stages;
}

ScheduleSpec schedule_from_json(const nlohmann::json& j) {
    ScheduleSpec s;
    for (const auto& st : j) s.stages.push_back({st.at("eta").get<double>(), st.at("steps").get<std::size_t>()});
    s.validate();
    return s;
}

ScheduleSpec three_stage_schedule(double delta, double epsilon, const ThreeStageOptions& o) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ParameterError("delta must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
    for (double c : {o.c0, o.c1, o.c2, o.k0, o.k1, o.k2}) {
        if (!(c > 0.0) || !std::isfinite(c)) throw ParameterError("schedule multipliers must be positive");
    }
    const double eta0 = o.c0 / delta;
    const double eta1 = o.c1 / (delta * delta);
    const double eta2 = o.c2 * epsilon * epsilon / (delta * delta);
    const auto steps = [](double x) { return static_cast<std::size_t>(std::ceil(x)); };
    const std::size_t t0 = o.t0.value_or(steps(o.k0 / ((eta0 * delta) * (eta0 * delta))));
    const std::size_t t1 = o.t1.value_or(steps(o.k1 / eta1));
    const std::size_t t2 = o.t2.value_or(steps(o.k2 / eta2));
    ScheduleSpec s{{{eta0, t0}, {eta1, t1}, {eta2, t2}}};
    s.validate();
    return s;
}

TrajectoryRecord make_record(std::size_t step, std::span<const double> v, const Dataset& ds) {
    TrajectoryRecord rec;
    rec.step = step;
    rec.diverged = is_diverged(v);
    rec.train_loss = full_loss(v, ds);
    rec.test_error = test_error(v, ds.ground_truth);
    rec.min_entry = v.empty() ? 0.0 : v[0];
    double l2sq = 0.0;
    double sqrt_sum = 0.0;
    bool nonnegative = true;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double a = std::abs(v[k]);
        rec.linf = std::max(rec.linf, a);
        rec.l1 += a;
        l2sq += a * a;
        rec.min_entry = std::min(rec.min_entry, v[k]);
        if (v[k] >= 0.0) {
            sqrt_sum += std::sqrt(v[k]);
        } else {
            nonnegative = false;
        }
        if (ds.ground_truth[k] != 0.0) {
            rec.linf_err_support = std::max(rec.linf_err_support, std::abs(v[k] - ds.ground_truth[k]));
        } else {
            rec.l1_off_support += a;
        }
    }
    rec.l2 = std::sqrt(l2sq);
    rec.potential = nonnegative ? sqrt_sum : std::nan("");
    if (std::any_of(v.begin(), v.end(), [](double x) { return std::isnan(x); })) {
        rec.linf = rec.l1 = rec.l2 = std::nan("");
    }
    return rec;
}

TrajectoryResult run_trajectory(const Dataset& ds, const ParamVector& v0, const NoiseSpec& engine,
                                const ScheduleSpec& schedule, std::size_t log_every,
                                std::uint64_t seed, const StepObserver& observer) {
    if (log_every == 0) throw ParameterError("log_every must be at least 1");
    if (v0.size() != ds.d) throw DimensionError("initial iterate dimension differs from dataset");
    schedule.validate();
    engine.validate();

    TrajectoryResult out;
    out.final_v = v0;
    std::span<double> v(out.final_v);
    RngStream rng(seed, /*stream=*/1);
    Stepper stepper(ds, engine);

    out.records.push_back(make_record(0, v, ds));
    if (out.records.back().diverged) {
        out.diverged = true;
        return out;
    }

    const std::size_t total = schedule.total_steps();
    std::size_t t = 0;
    for (const Stage& stage : schedule.stages) {
        for (std::size_t s = 0; s < stage.steps; ++s, ++t) {
            stepper.step(v, stage.eta, rng);
            const std::size_t next = t + 1;
            if (observer) observer(next, stage.eta, v);
            // Checking every step is O(d); the engines themselves are O(d) or O(nd).
            if (is_diverged(v)) {
                out.records.push_back(make_record(next, v, ds));
                out.records.back().diverged = true;
                out.diverged = true;
                out.steps_run = next;
                return out;
            }
            if (next % log_every == 0 || next == total) out.records.push_back(make_record(next, v, ds));
        }
    }
    out.steps_run = total;
    return out;
}

EngineRun Figure1Preset::gd() const { return {NoiseSpec::gd(), ScheduleSpec::constant(eta, steps)}; }

EngineRun Figure1Preset::label_noise() const {
    // Decays by 10x at one third and two thirds of the run.
    const std::size_t third = steps / 3;
    return {NoiseSpec::label_noise(delta, LabelNoiseForm::FullGradient),
            ScheduleSpec{{{eta, third}, {eta / 10.0, third}, {eta / 100.0, steps - 2 * third}}}};
}

EngineRun Figure1Preset::minibatch() const {
    return {NoiseSpec::minibatch(delta), ScheduleSpec::constant(eta, steps)};
}

std::vector<EngineRun> Figure1Preset::gaussian() const {
    std::vector<EngineRun> runs;
    for (double s : gaussian_sigmas) {
        runs.push_back({NoiseSpec::gaussian(s), ScheduleSpec::constant(eta, gaussian_steps)});
    }
    return runs;
}

std::vector<EngineRun> Figure1Preset::all() const {
    std::vector<EngineRun> runs{gd(), label_noise(), minibatch()};
    for (auto& g : gaussian()) runs.push_back(std::move(g));
    return runs;
}

Figure1Preset figure1_preset() { return {}; }

void write_trajectory_csv(const std::filesystem::path& path,
                          std::span<const TrajectoryRecord> records) {
    std::ofstream out(path);
    if (!out) throw ParameterError("cannot write " + path.string());
    out << kTrajectoryCsvHeader << '\n';
    char buf[512];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                      r.step, r.train_loss, r.test_error, r.linf, r.l1, r.l2, r.linf_err_support,
                      r.l1_off_support, r.potential, r.min_entry, r.diverged ? 1 : 0);
        out << buf;
    }
    if (!out) throw NumericalError("failed while writing " + path.string());
}

std::vector<TrajectoryRecord> read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kTrajectoryCsvHeader) {
        throw ParameterError(path.string() + ": unexpected CSV header");
    }
    std::vector<TrajectoryRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 11) throw ParameterError(path.string() + ": malformed row '" + line + "'");
        const auto num = [](const std::string& c) { return std::strtod(c.c_str(), nullptr); };
        TrajectoryRecord r;
        r.step = std::stoull(cells[0]);
        r.train_loss = num(cells[1]);
        r.test_error = num(cells[2]);
        r.linf = num(cells[3]);
        r.l1 = num(cells[4]);
        r.l2 = num(cells[5]);
        r.linf_err_support = num(cells[6]);
        r.l1_off_support = num(cells[7]);
        r.potential = num(cells[8]);
        r.min_entry = num(cells[9]);
        r.diverged = cells[10] == "1";
        records.push_back(r);
    }
    return records;
}

std::string build_id() { return QPSIM_BUILD_ID; }

}  // namespace qpsim
