#pragma once
// Command-line driver: experiment configs, the seed/engine worker pool, the
// on-disk run layout and run summaries.
//
// Layout of a run directory:
//   <out>/<engine label>/<seed>/trajectory.csv
//   <out>/<engine label>/<seed>/manifest.json
//   <out>/summary.json

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qpsim/trainer.hpp"

namespace qpsim {

/// Environment variable that caps the number of worker threads.
inline constexpr const char* kWorkersEnv = "QPSIM_MAX_WORKERS";

struct ExperimentConfig {
    std::string kind = "train";
    std::size_t d = 100;
    std::size_t n = 40;
    std::size_t r = 5;
    /// Dataset seed; when absent every run seed also seeds its own dataset.
    std::optional<std::uint64_t> dataset_seed;
    std::optional<std::filesystem::path> dataset_file;
    std::vector<EngineRun> runs;
    double tau = 1.0;
    std::size_t log_every = 1000;
    std::filesystem::path out = "runs";
    std::vector<std::uint64_t> seeds{0};
    /// Requested worker count, 0 for one per hardware thread. Capped by kWorkersEnv.
    std::size_t workers = 0;

    void validate() const;
};

/// Parses "0..9", "1,4,7" or mixtures such as "0..2,10".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// Effective worker count after applying the environment cap.
std::size_t effective_workers(std::size_t requested);

/// Runs every job on at most `workers` threads. The first exception thrown by
/// a job is rethrown after all workers have stopped.
void run_parallel(const std::vector<std::function<void()>>& jobs, std::size_t workers);

/// Executes the (engine, seed) grid, writes the layout above and returns the summary.
nlohmann::json run_experiment(const ExperimentConfig& cfg);

/// Per-engine statistics over every trajectory.csv found under run_dir:
/// final test error quantiles, divergence counts and the fraction of runs
/// whose final ||v - v*||_inf is at most epsilon. Throws ParameterError if
/// run_dir holds no runs.
nlohmann::json summarize_runs(const std::filesystem::path& run_dir, double epsilon = 0.1);

/// Entry point of the command-line tool. Returns 0 on success, 1 on
/// configuration errors and 2 on runtime failures.
int run_command(int argc, const char* const* argv);
int run_command(const std::vector<std::string>& args);

}  // namespace qpsim
