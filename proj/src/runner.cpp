#include "qpsim/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "qpsim/errors.hpp"
#include "qpsim/gibbs_probe.hpp"
#include "qpsim/rng.hpp"
#include "qpsim/simd.hpp"
#include "qpsim/toy_walks.hpp"

namespace qpsim {
namespace fs = std::filesystem;
namespace {

void write_json(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw ParameterError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw NumericalError("failed while writing " + path.string());
}

double quantile(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    const double pos = q * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * xs[lo] + w * xs[hi];
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = std::abs(a[k] - b[k]);
        if (std::isnan(diff)) return diff;
        m = std::max(m, diff);
    }
    return m;
}

nlohmann::json json_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

Dataset dataset_for(const ExperimentConfig& cfg, std::uint64_t seed) {
    if (cfg.dataset_file) return load_dataset(*cfg.dataset_file);
    return generate_dataset(cfg.d, cfg.n, cfg.r, cfg.dataset_seed.value_or(seed));
}

void run_one(const ExperimentConfig& cfg, const EngineRun& run, std::uint64_t seed) {
    const Dataset ds = dataset_for(cfg, seed);
    const fs::path dir = cfg.out / run.engine.label() / std::to_string(seed);
    fs::create_directories(dir);
    const TrajectoryResult res =
        run_trajectory(ds, constant_vector(ds.d, cfg.tau), run.engine, run.schedule, cfg.log_every, seed);
    write_trajectory_csv(dir / "trajectory.csv", res.records);

    nlohmann::json m;
    m["experiment"] = cfg.kind;
    m["build_id"] = build_id();
    m["rng"] = RngStream::kAlgorithm;
    m["simd"] = simd::to_string(simd::active_level());
    m["seed"] = seed;
    m["engine"] = to_json(run.engine);
    m["engine_label"] = run.engine.label();
    m["schedule"] = to_json(run.schedule);
    m["tau"] = cfg.tau;
    m["log_every"] = cfg.log_every;
    m["dataset"] = {{"d", ds.d}, {"n", ds.n}, {"r", ds.r()}, {"seed", ds.seed}};
    if (cfg.dataset_file) m["dataset"]["file"] = fs::absolute(*cfg.dataset_file).string();
    m["steps_run"] = res.steps_run;
    m["diverged"] = res.diverged;
    const TrajectoryRecord& last = res.records.back();
    m["final"] = {{"train_loss", json_or_null(last.train_loss)},
                  {"test_error", json_or_null(last.test_error)},
                  {"linf_error", json_or_null(linf_distance(res.final_v, ds.ground_truth))}};
    write_json(dir / "manifest.json", m);
}

}  // namespace

void ExperimentConfig::validate() const {
    if (runs.empty()) throw ParameterError("experiment has no engines");
    if (seeds.empty()) throw ParameterError("experiment has no seeds");
    std::set<std::uint64_t> uniq(seeds.begin(), seeds.end());
    if (uniq.size() != seeds.size()) throw ParameterError("seed list contains duplicates");
    std::set<std::string> labels;
    for (const EngineRun& r : runs) {
        r.engine.validate();
        r.schedule.validate();
        if (!labels.insert(r.engine.label()).second) {
            throw ParameterError("two runs share the engine label " + r.engine.label());
        }
    }
    if (dataset_file && !fs::exists(*dataset_file)) {
        throw ParameterError("dataset file not found: " + dataset_file->string());
    }
    if (!dataset_file && (r > d || n == 0 || d == 0)) throw ParameterError("invalid dataset dimensions");
    if (log_every == 0) throw ParameterError("log_every must be at least 1");
    if (!std::isfinite(tau)) throw ParameterError("tau must be finite");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string item;
    const auto num = [&](const std::string& s) {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
            throw ParameterError("bad seed list '" + text + "'");
        }
        return static_cast<std::uint64_t>(std::stoull(s));
    };
    while (std::getline(ss, item, ',')) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            seeds.push_back(num(item));
            continue;
        }
        const std::uint64_t lo = num(item.substr(0, dots));
        const std::uint64_t hi = num(item.substr(dots + 2));
        if (hi < lo) throw ParameterError("bad seed range '" + item + "'");
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    }
    if (seeds.empty()) throw ParameterError("empty seed list");
    return seeds;
}

std::size_t effective_workers(std::size_t requested) {
    std::size_t n = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* cap = std::getenv(kWorkersEnv)) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(cap, &end, 10);
        if (end != cap && *end == '\0' && v > 0) n = std::min<std::size_t>(n, v);
    }
    return n;
}

void run_parallel(const std::vector<std::function<void()>>& jobs, std::size_t workers) {
    workers = std::max<std::size_t>(1, std::min(workers, jobs.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex mu;
    const auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            {
                std::lock_guard lock(mu);
                if (first) return;
            }
            try {
                jobs[k]();
            } catch (...) {
                std::lock_guard lock(mu);
                if (!first) first = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first) std::rethrow_exception(first);
}

nlohmann::json run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.out);
    std::vector<std::function<void()>> jobs;
    for (const EngineRun& run : cfg.runs) {
        for (std::uint64_t seed : cfg.seeds) jobs.push_back([&cfg, &run, seed] { run_one(cfg, run, seed); });
    }
    run_parallel(jobs, effective_workers(cfg.workers));
    nlohmann::json summary = summarize_runs(cfg.out);
    write_json(cfg.out / "summary.json", summary);
    return summary;
}

nlohmann::json summarize_runs(const fs::path& run_dir, double epsilon) {
    if (!fs::is_directory(run_dir)) throw ParameterError("not a directory: " + run_dir.string());
    struct Run {
        std::string seed;
        TrajectoryRecord last;
        double linf_error;
    };
    std::map<std::string, std::vector<Run>> by_engine;
    for (const auto& engine_dir : fs::directory_iterator(run_dir)) {
        if (!engine_dir.is_directory()) continue;
        for (const auto& seed_dir : fs::directory_iterator(engine_dir.path())) {
            const fs::path csv = seed_dir.path() / "trajectory.csv";
            if (!fs::is_regular_file(csv)) continue;
            const auto records = read_trajectory_csv(csv);
            if (records.empty()) throw ParameterError(csv.string() + " has no rows");
            Run run{seed_dir.path().filename().string(), records.back(), std::nan("")};
            // Without a manifest the CSV only bounds the error: the largest
            // off-support entry is at most the off-support l1 norm.
            run.linf_error = std::max(run.last.linf_err_support, run.last.l1_off_support);
            const fs::path manifest = seed_dir.path() / "manifest.json";
            if (fs::is_regular_file(manifest)) {
                std::ifstream in(manifest);
                const auto m = nlohmann::json::parse(in, nullptr, false);
                if (!m.is_discarded() && m.contains("final") && m["final"].contains("linf_error")) {
                    const auto& e = m["final"]["linf_error"];
                    run.linf_error = e.is_number() ? e.get<double>() : std::nan("");
                }
            }
            by_engine[engine_dir.path().filename().string()].push_back(run);
        }
    }
    if (by_engine.empty()) throw ParameterError("no runs found under " + run_dir.string());

    nlohmann::json out;
    out["epsilon"] = epsilon;
    out["engines"] = nlohmann::json::object();
    for (auto& [engine, runs] : by_engine) {
        std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) { return a.seed < b.seed; });
        std::vector<double> test;
        std::vector<double> train;
        std::size_t diverged = 0;
        std::size_t recovered = 0;
        nlohmann::json per_seed = nlohmann::json::object();
        for (const Run& r : runs) {
            if (r.last.diverged) ++diverged;
            const bool ok = !r.last.diverged && r.linf_error <= epsilon;
            if (ok) ++recovered;
            if (std::isfinite(r.last.test_error)) test.push_back(r.last.test_error);
            if (std::isfinite(r.last.train_loss)) train.push_back(r.last.train_loss);
            per_seed[r.seed] = {{"final_test_error", json_or_null(r.last.test_error)},
                                {"final_train_loss", json_or_null(r.last.train_loss)},
                                {"linf_error", json_or_null(r.linf_error)},
                                {"diverged", r.last.diverged},
                                {"recovered", ok}};
        }
        nlohmann::json e;
        e["runs"] = runs.size();
        e["diverged"] = diverged;
        e["success_rate"] = static_cast<double>(recovered) / static_cast<double>(runs.size());
        if (!test.empty()) {
            e["final_test_error"] = {{"min", quantile(test, 0.0)},
                                     {"q25", quantile(test, 0.25)},
                                     {"median", quantile(test, 0.5)},
                                     {"q75", quantile(test, 0.75)},
                                     {"max", quantile(test, 1.0)}};
        } else {
            e["final_test_error"] = nullptr;
        }
        e["final_train_loss_median"] = train.empty() ? nlohmann::json(nullptr) : nlohmann::json(quantile(train, 0.5));
        e["seeds"] = std::move(per_seed);
        out["engines"][engine] = std::move(e);
    }
    return out;
}

namespace {

struct CommonOpts {
    std::string out = "runs";
    std::string seeds = "0";
    std::size_t workers = 0;
};

struct DataOpts {
    std::size_t d = 100;
    std::size_t n = 40;
    std::size_t r = 5;
    std::optional<std::uint64_t> dataset_seed;
    std::string dataset;
    double tau = 1.0;
    std::size_t log_every = 1000;
};

void add_data_options(CLI::App* sub, DataOpts& o) {
    sub->add_option("--d", o.d, "dimension")->capture_default_str();
    sub->add_option("--n", o.n, "number of examples")->capture_default_str();
    sub->add_option("--r", o.r, "support size of v*")->capture_default_str();
    sub->add_option("--dataset-seed", o.dataset_seed, "fixed dataset seed (default: the run seed)");
    sub->add_option("--dataset", o.dataset, "dataset JSON file instead of generated data")->check(CLI::ExistingFile);
    sub->add_option("--tau", o.tau, "initialization scale, v0 = tau * 1")->capture_default_str();
    sub->add_option("--log-every", o.log_every, "logging cadence in steps")->capture_default_str();
}

void add_common_options(CLI::App* sub, CommonOpts& o) {
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--seeds", o.seeds, "seed list, e.g. 0..9 or 1,3,5")->capture_default_str();
    sub->add_option("--workers", o.workers, std::string("worker threads (0 = all cores; capped by ") + kWorkersEnv + ")");
}

ExperimentConfig make_config(const std::string& kind, const DataOpts& data, const CommonOpts& common) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.d = data.d;
    cfg.n = data.n;
    cfg.r = data.r;
    cfg.dataset_seed = data.dataset_seed;
    if (!data.dataset.empty()) cfg.dataset_file = data.dataset;
    cfg.tau = data.tau;
    cfg.log_every = data.log_every;
    cfg.out = common.out;
    cfg.seeds = parse_seed_list(common.seeds);
    cfg.workers = common.workers;
    return cfg;
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << std::endl; }

void log_spaced_csv(const fs::path& path, const ConeProbeReport& rep) {
    std::ofstream out(path);
    if (!out) throw ParameterError("cannot write " + path.string());
    out << "z,log_integral\n";
    char buf[128];
    for (std::size_t k = 0; k < rep.z.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", rep.z[k], rep.log_integral[k]);
        out << buf;
    }
}

}  // namespace

int run_command(int argc, const char* const* argv) {
    CLI::App app{"Simulation lab for quadratically parameterized regression under SGD noise", "qpsim"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.set_config("--config", "", "key-value config file; a [train]-style section per subcommand, flags override it");

    // train
    CommonOpts train_common;
    DataOpts train_data;
    std::string engine = "label_noise";
    std::optional<double> delta;
    std::optional<double> sigma;
    std::optional<double> lambda;
    std::string label_form = "single";
    std::string schedule = "auto";
    double eta = 0.01;
    std::size_t steps = 300000;
    double epsilon = 0.1;
    ThreeStageOptions stages3;
    auto* train = app.add_subcommand("train", "run one engine over a seed list");
    add_common_options(train, train_common);
    add_data_options(train, train_data);
    train->add_option("--engine", engine, "gd, plain_sgd, label_noise, minibatch, gaussian or langevin")
        ->capture_default_str();
    train->add_option("--delta", delta, "label-noise / mini-batch noise level");
    train->add_option("--sigma", sigma, "Gaussian noise scale");
    train->add_option("--lambda", lambda, "Langevin inverse temperature");
    train->add_option("--label-form", label_form, "label noise form: single or full")->capture_default_str();
    train->add_option("--schedule", schedule,
                      "constant, three_stage or auto (three_stage for label_noise, constant otherwise)")
        ->capture_default_str();
    train->add_option("--eta", eta, "learning rate of the constant schedule")->capture_default_str();
    train->add_option("--steps", steps, "steps of the constant schedule")->capture_default_str();
    train->add_option("--epsilon", epsilon, "target accuracy of the three-stage schedule")->capture_default_str();
    train->add_option("--c0", stages3.c0)->capture_default_str();
    train->add_option("--c1", stages3.c1)->capture_default_str();
    train->add_option("--c2", stages3.c2)->capture_default_str();
    train->add_option("--k0", stages3.k0)->capture_default_str();
    train->add_option("--k1", stages3.k1)->capture_default_str();
    train->add_option("--k2", stages3.k2)->capture_default_str();
    train->add_option("--t0", stages3.t0, "stage-0 length override");
    train->add_option("--t1", stages3.t1, "stage-1 length override");
    train->add_option("--t2", stages3.t2, "stage-2 length override");

    // figure1
    CommonOpts fig_common;
    fig_common.seeds = "0..4";
    DataOpts fig_data;
    std::string fig_engines = "all";
    Figure1Preset preset = figure1_preset();
    auto* fig = app.add_subcommand("figure1", "run the synthetic engine comparison preset");
    add_common_options(fig, fig_common);
    add_data_options(fig, fig_data);
    fig->add_option("--engines", fig_engines, "all, or a comma list of gd,label_noise,minibatch,gaussian")
        ->capture_default_str();
    fig->add_option("--steps", preset.steps, "steps for gd, label noise and mini-batch")->capture_default_str();
    fig->add_option("--gaussian-steps", preset.gaussian_steps, "steps for Gaussian runs")->capture_default_str();
    fig->add_option("--sigmas", preset.gaussian_sigmas, "Gaussian noise sweep")->delimiter(',');
    fig->add_option("--eta", preset.eta)->capture_default_str();
    fig->add_option("--delta", preset.delta)->capture_default_str();

    // gibbs
    std::size_t g_d = 30, g_n = 10, g_ppd = 10;
    std::uint64_t g_seed = 0;
    double g_zmin = 1e-2, g_zmax = 1e6;
    std::string g_dataset, g_out;
    auto* gibbs = app.add_subcommand("gibbs", "partition-function divergence probe");
    gibbs->add_option("--d", g_d)->capture_default_str();
    gibbs->add_option("--n", g_n)->capture_default_str();
    gibbs->add_option("--seed", g_seed)->capture_default_str();
    gibbs->add_option("--dataset", g_dataset, "dataset JSON file instead of Gaussian inputs")->check(CLI::ExistingFile);
    gibbs->add_option("--zmin", g_zmin)->capture_default_str();
    gibbs->add_option("--zmax", g_zmax)->capture_default_str();
    gibbs->add_option("--points-per-decade", g_ppd)->capture_default_str();
    gibbs->add_option("--out", g_out, "directory for report.json and integrals.csv");

    // statdim
    std::size_t s_d = 200, s_samples = 100000;
    std::uint64_t s_seed = 0;
    auto* statdim = app.add_subcommand("statdim", "Monte Carlo statistical dimension of the orthant");
    statdim->add_option("--d", s_d)->capture_default_str();
    statdim->add_option("--samples", s_samples)->capture_default_str();
    statdim->add_option("--seed", s_seed)->capture_default_str();

    // intersect
    std::size_t i_d = 400, i_n = 20, i_trials = 200;
    std::uint64_t i_seed = 0;
    auto* intersect = app.add_subcommand("intersect", "how often X^perp meets the positive orthant");
    intersect->add_option("--d", i_d)->capture_default_str();
    intersect->add_option("--n", i_n)->capture_default_str();
    intersect->add_option("--trials", i_trials)->capture_default_str();
    intersect->add_option("--seed", i_seed)->capture_default_str();

    // walk
    WalkConfig wc;
    std::string w_kind = "multiplicative";
    std::size_t w_trials = 10000;
    double w_threshold = 1e-3;
    std::string w_out;
    auto* walk = app.add_subcommand("walk", "one-dimensional multiplicative or additive walks");
    walk->add_option("--kind", w_kind, "multiplicative or additive")->capture_default_str();
    walk->add_option("--eta", wc.eta)->capture_default_str();
    walk->add_option("--steps", wc.steps)->capture_default_str();
    walk->add_option("--v0", wc.v0)->capture_default_str();
    walk->add_option("--seed", wc.seed)->capture_default_str();
    walk->add_option("--dims", wc.dims)->capture_default_str();
    walk->add_flag("--shared-variance", wc.shared_variance, "noise of size eta * ||v||_2 on every coordinate");
    walk->add_option("--trials", w_trials)->capture_default_str();
    walk->add_option("--threshold", w_threshold)->capture_default_str();
    walk->add_option("--out", w_out, "directory for walk.csv");

    // report
    std::string rep_dir;
    double rep_eps = 0.1;
    auto* report = app.add_subcommand("report", "summarize a run directory");
    report->add_option("--run-dir", rep_dir, "directory produced by train or figure1")->required();
    report->add_option("--epsilon", rep_eps, "recovery threshold on ||v - v*||_inf")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (train->parsed()) {
            ExperimentConfig cfg = make_config("train", train_data, train_common);
            const EngineKind kind = engine == "langevin" ? EngineKind::Gaussian : parse_engine_kind(engine);
            if (schedule == "auto") schedule = kind == EngineKind::LabelNoise ? "three_stage" : "constant";
            if (schedule != "constant" && schedule != "three_stage") {
                throw ParameterError("unknown schedule '" + schedule + "'");
            }
            NoiseSpec spec;
            if (engine == "langevin") {
                if (!lambda) throw ParameterError("langevin needs --lambda");
                spec = NoiseSpec::langevin(*lambda);
            } else if (kind == EngineKind::Gaussian) {
                if (!sigma) throw ParameterError("gaussian needs --sigma");
                spec = NoiseSpec::gaussian(*sigma);
            } else if (kind == EngineKind::LabelNoise) {
                if (label_form != "single" && label_form != "full") {
                    throw ParameterError("label form must be single or full");
                }
                spec = NoiseSpec::label_noise(delta.value_or(schedule == "three_stage" ? kCalibratedDelta : 1.0),
                                              label_form == "full" ? LabelNoiseForm::FullGradient
                                                                   : LabelNoiseForm::SingleExample);
            } else if (kind == EngineKind::MiniBatchSim) {
                spec = NoiseSpec::minibatch(delta.value_or(1.0));
            } else {
                spec = kind == EngineKind::GD ? NoiseSpec::gd() : NoiseSpec::plain_sgd();
            }
            ScheduleSpec sched = schedule == "three_stage"
                                     ? three_stage_schedule(spec.delta > 0.0 ? spec.delta : kCalibratedDelta, epsilon, stages3)
                                     : ScheduleSpec::constant(eta, steps);
            cfg.runs.push_back({spec, sched});
            run_experiment(cfg);
            write_json(cfg.out / "summary.json", summarize_runs(cfg.out, epsilon));
            std::cout << "wrote " << (cfg.out / "summary.json").string() << std::endl;
        } else if (fig->parsed()) {
            ExperimentConfig cfg = make_config("figure1", fig_data, fig_common);
            preset.d = cfg.d;
            preset.n = cfg.n;
            preset.r = cfg.r;
            if (fig_engines == "all") {
                cfg.runs = preset.all();
            } else {
                std::stringstream ss(fig_engines);
                std::string name;
                while (std::getline(ss, name, ',')) {
                    if (name == "gd") {
                        cfg.runs.push_back(preset.gd());
                    } else if (name == "label_noise") {
                        cfg.runs.push_back(preset.label_noise());
                    } else if (name == "minibatch") {
                        cfg.runs.push_back(preset.minibatch());
                    } else if (name == "gaussian") {
                        for (auto& g : preset.gaussian()) cfg.runs.push_back(std::move(g));
                    } else {
                        throw ParameterError("unknown figure1 engine '" + name + "'");
                    }
                }
            }
            run_experiment(cfg);
            std::cout << "wrote " << (cfg.out / "summary.json").string() << std::endl;
        } else if (gibbs->parsed()) {
            const Dataset ds = g_dataset.empty() ? generate_dataset(g_d, g_n, 0, g_seed) : load_dataset(g_dataset);
            const ConeProbeReport rep =
                partition_divergence_probe(ds, std::nullopt, log_spaced_grid(g_zmin, g_zmax, g_ppd));
            const nlohmann::json j = to_json(rep);
            if (!g_out.empty()) {
                fs::create_directories(g_out);
                write_json(fs::path(g_out) / "report.json", j);
                log_spaced_csv(fs::path(g_out) / "integrals.csv", rep);
            }
            print_json(j);
        } else if (statdim->parsed()) {
            const StatDimEstimate est = statistical_dimension_mc(s_d, s_samples, s_seed);
            print_json({{"d", s_d},
                        {"samples", s_samples},
                        {"seed", s_seed},
                        {"estimate", est.estimate},
                        {"std_error", est.std_error},
                        {"expected", static_cast<double>(s_d) / 2.0}});
        } else if (intersect->parsed()) {
            const double p = intersection_probability_mc(i_d, i_n, i_trials, i_seed);
            print_json({{"d", i_d}, {"n", i_n}, {"trials", i_trials}, {"seed", i_seed}, {"fraction", p}});
        } else if (walk->parsed()) {
            wc.kind = parse_walk_kind(w_kind);
            const auto stats = walk_ensemble_stats(wc, w_trials, w_threshold);
            if (!w_out.empty()) {
                fs::create_directories(w_out);
                write_walk_csv(fs::path(w_out) / "walk.csv", stats);
            }
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& s : stats) {
                rows.push_back({{"step", s.step},
                                {"mean_v", s.mean_v},
                                {"mean_sqrt_v", s.mean_sqrt_v},
                                {"frac_below", s.frac_below},
                                {"var_v", s.var_v}});
            }
            print_json({{"kind", to_string(wc.kind)}, {"eta", wc.eta}, {"trials", w_trials}, {"checkpoints", rows}});
        } else if (report->parsed()) {
            const nlohmann::json summary = summarize_runs(rep_dir, rep_eps);
            write_json(fs::path(rep_dir) / "summary.json", summary);
            print_json(summary);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed input: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 0;
}

int run_command(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("qpsim");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_command(static_cast<int>(argv.size()), argv.data());
}

}  // namespace qpsim
