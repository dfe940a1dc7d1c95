#pragma once
// Quadratically parameterized linear regression: f_v(x) = <v .* v, x>.
//
// Per-example loss is (f_v(x_i) - y_i)^2 / 4, so its gradient is
// (f_v(x_i) - y_i) * (x_i .* v). The empirical loss averages over examples.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"

namespace qpsim {

using ParamVector = std::vector<double>;

struct DatasetOptions {
    /// Draw the support uniformly at random (under the dataset seed) instead
    /// of taking the first r coordinates.
    bool random_support = false;
    /// Value of v* on its support.
    double support_value = 1.0;
};

/// Training set together with the ground truth that produced it.
struct Dataset {
    std::size_t d = 0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> support;  // sorted, |support| = r
    ParamVector ground_truth;          // v*, length d
    std::vector<double> x;             // n x d, row-major
    std::vector<double> y;             // length n

    std::size_t r() const { return support.size(); }
    std::span<const double> row(std::size_t i) const { return {x.data() + i * d, d}; }
    bool in_support(std::size_t k) const;

    /// Throws ParameterError/DimensionError if shapes or label invariants fail.
    void validate() const;
};

struct DatasetStats {
    double bx = 0.0;                 // max_i ||x_i||_inf
    double min_second_moment = 0.0;  // min_k mean_i x_ik^2
    double cross_corr = 0.0;         // max_{j != k} |mean_i x_ij x_ik|
};

Dataset generate_dataset(std::size_t d, std::size_t n, std::size_t r, std::uint64_t seed,
                         const DatasetOptions& options = {});

/// Builds a dataset from given inputs, computing labels from the ground truth.
Dataset make_dataset(std::size_t d, std::vector<double> x, ParamVector ground_truth,
                     std::uint64_t seed = 0);

/// Labels are recomputed with an ordered scalar sum so that datasets do not
/// depend on which SIMD variant is active.
double label_for(std::span<const double> ground_truth, std::span<const double> x);

double predict(std::span<const double> v, std::span<const double> x);
double example_loss(std::span<const double> v, const Dataset& ds, std::size_t i);
ParamVector example_grad(std::span<const double> v, const Dataset& ds, std::size_t i);
/// out += scale * grad l_i(v); returns the residual f_v(x_i) - y_i.
double accumulate_example_grad(std::span<const double> v, const Dataset& ds, std::size_t i,
                               double scale, std::span<double> out);

double full_loss(std::span<const double> v, const Dataset& ds);
ParamVector full_grad(std::span<const double> v, const Dataset& ds);
/// Writes grad L(v) into out (length d).
void full_grad_into(std::span<const double> v, const Dataset& ds, std::span<double> out);

double test_error(std::span<const double> v, std::span<const double> vstar);

DatasetStats dataset_stats(const Dataset& ds);

ParamVector constant_vector(std::size_t d, double tau);

nlohmann::json dataset_to_json(const Dataset& ds);
Dataset dataset_from_json(const nlohmann::json& j);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace qpsim
