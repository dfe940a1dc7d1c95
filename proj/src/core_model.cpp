#include "qpsim/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "qpsim/errors.hpp"
#include "qpsim/rng.hpp"
#include "qpsim/simd.hpp"

namespace qpsim {
namespace {

void require_same_size(std::span<const double> a, std::span<const double> b, const char* what) {
    if (a.size() != b.size()) {
        throw DimensionError(std::string(what) + ": dimension mismatch (" +
                             std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
}

void require_index(const Dataset& ds, std::size_t i) {
    if (i >= ds.n) {
        throw ParameterError("example index " + std::to_string(i) + " out of range for n=" +
                             std::to_string(ds.n));
    }
}

std::vector<std::size_t> support_of(std::span<const double> ground_truth) {
    std::vector<std::size_t> s;
    for (std::size_t k = 0; k < ground_truth.size(); ++k) {
        if (ground_truth[k] != 0.0) s.push_back(k);
    }
    return s;
}

}  // namespace

bool Dataset::in_support(std::size_t k) const {
    return std::binary_search(support.begin(), support.end(), k);
}

void Dataset::validate() const {
    if (d == 0) throw ParameterError("dataset dimension d must be positive");
    if (ground_truth.size() != d) throw DimensionError("ground truth length differs from d");
    if (x.size() != n * d) throw DimensionError("design matrix size differs from n*d");
    if (y.size() != n) throw DimensionError("label count differs from n");
    if (support != support_of(ground_truth)) {
        throw ParameterError("support does not match the nonzero entries of the ground truth");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double expected = label_for(ground_truth, row(i));
        const double scale = std::max(1.0, std::abs(expected));
        if (std::abs(expected - y[i]) > 1e-12 * scale) {
            throw ParameterError("label " + std::to_string(i) +
                                 " is not generated by the ground truth");
        }
    }
}

double label_for(std::span<const double> ground_truth, std::span<const double> x) {
    require_same_size(ground_truth, x, "label_for");
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += ground_truth[k] * ground_truth[k] * x[k];
    return s;
}

Dataset generate_dataset(std::size_t d, std::size_t n, std::size_t r, std::uint64_t seed,
                         const DatasetOptions& options) {
    if (d == 0) throw ParameterError("d must be positive");
    if (n == 0) throw ParameterError("n must be at least 1");
    if (r > d) throw ParameterError("sparsity r must not exceed d");
    if (!(options.support_value != 0.0) || !std::isfinite(options.support_value)) {
        throw ParameterError("support value must be finite and nonzero");
    }

    // Draw order: support permutation (only if randomized), then x row-major.
    RngStream rng(seed, /*stream=*/0);
    std::vector<std::size_t> support(r);
    if (options.random_support) {
        std::vector<std::size_t> perm(d);
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t k = 0; k < r; ++k) {
            std::swap(perm[k], perm[k + rng.index(d - k)]);
        }
        std::copy_n(perm.begin(), r, support.begin());
        std::sort(support.begin(), support.end());
    } else {
        std::iota(support.begin(), support.end(), 0);
    }

    ParamVector vstar(d, 0.0);
    for (std::size_t k : support) vstar[k] = options.support_value;

    std::vector<double> x(n * d);
    for (double& xi : x) xi = rng.normal();

    return make_dataset(d, std::move(x), std::move(vstar), seed);
}

Dataset make_dataset(std::size_t d, std::vector<double> x, ParamVector ground_truth,
                     std::uint64_t seed) {
    if (d == 0) throw ParameterError("d must be positive");
    if (ground_truth.size() != d) throw DimensionError("ground truth length differs from d");
    if (x.size() % d != 0) throw DimensionError("design matrix size is not a multiple of d");
    Dataset ds;
    ds.d = d;
    ds.n = x.size() / d;
    ds.seed = seed;
    ds.support = support_of(ground_truth);
    ds.ground_truth = std::move(ground_truth);
    ds.x = std::move(x);
    ds.y.resize(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) ds.y[i] = label_for(ds.ground_truth, ds.row(i));
    return ds;
}

double predict(std::span<const double> v, std::span<const double> x) {
    require_same_size(v, x, "predict");
    return simd::sq_weighted_dot(v, x);
}

double example_loss(std::span<const double> v, const Dataset& ds, std::size_t i) {
    require_index(ds, i);
    const double res = predict(v, ds.row(i)) - ds.y[i];
    return 0.25 * res * res;
}

double accumulate_example_grad(std::span<const double> v, const Dataset& ds, std::size_t i,
                               double scale, std::span<double> out) {
    require_index(ds, i);
    require_same_size(v, out, "accumulate_example_grad");
    const auto xi = ds.row(i);
    const double res = predict(v, xi) - ds.y[i];
    simd::hadamard_axpy(scale * res, xi, v, out);
    return res;
}

ParamVector example_grad(std::span<const double> v, const Dataset& ds, std::size_t i) {
    ParamVector g(v.size(), 0.0);
    accumulate_example_grad(v, ds, i, 1.0, g);
    return g;
}

double full_loss(std::span<const double> v, const Dataset& ds) {
    if (ds.n == 0) throw InsufficientDataError("full loss of an empty dataset");
    double s = 0.0;
    for (std::size_t i = 0; i < ds.n; ++i) {
        const double res = predict(v, ds.row(i)) - ds.y[i];
        s += res * res;
    }
    return 0.25 * s / static_cast<double>(ds.n);
}

void full_grad_into(std::span<const double> v, const Dataset& ds, std::span<double> out) {
    if (ds.n == 0) throw InsufficientDataError("full gradient of an empty dataset");
    require_same_size(v, out, "full_grad");
    require_same_size(v, ds.ground_truth, "full_grad");
    // grad L = v .* (1/n sum_i r_i x_i): accumulate the data term first, scale once.
    std::fill(out.begin(), out.end(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) {
        const auto xi = ds.row(i);
        const double res = simd::sq_weighted_dot(v, xi) - ds.y[i];
        simd::axpy(res * inv_n, xi, out);
    }
    for (std::size_t k = 0; k < out.size(); ++k) out[k] *= v[k];
}

ParamVector full_grad(std::span<const double> v, const Dataset& ds) {
    ParamVector g(v.size());
    full_grad_into(v, ds, g);
    return g;
}

double test_error(std::span<const double> v, std::span<const double> vstar) {
    require_same_size(v, vstar, "test_error");
    return simd::sq_diff_of_squares(v, vstar);
}

DatasetStats dataset_stats(const Dataset& ds) {
    DatasetStats st;
    if (ds.n == 0) return st;
    const double inv_n = 1.0 / static_cast<double>(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) st.bx = std::max(st.bx, simd::max_abs(ds.row(i)));

    // Gram matrix of the columns, G = X^T X / n.
    std::vector<double> gram(ds.d * ds.d, 0.0);
    for (std::size_t i = 0; i < ds.n; ++i) {
        const auto xi = ds.row(i);
        for (std::size_t j = 0; j < ds.d; ++j) {
            simd::axpy(xi[j] * inv_n, xi, std::span<double>(gram.data() + j * ds.d, ds.d));
        }
    }
    st.min_second_moment = gram[0];
    for (std::size_t j = 0; j < ds.d; ++j) {
        st.min_second_moment = std::min(st.min_second_moment, gram[j * ds.d + j]);
        for (std::size_t k = 0; k < ds.d; ++k) {
            if (j != k) st.cross_corr = std::max(st.cross_corr, std::abs(gram[j * ds.d + k]));
        }
    }
    return st;
}

ParamVector constant_vector(std::size_t d, double tau) { return ParamVector(d, tau); }

nlohmann::json dataset_to_json(const Dataset& ds) {
    return nlohmann::json{
        {"d", ds.d},
        {"n", ds.n},
        {"r", ds.r()},
        {"seed", ds.seed},
        {"support", ds.support},
        {"ground_truth", ds.ground_truth},
        {"x", ds.x},
        {"y", ds.y},
    };
}

Dataset dataset_from_json(const nlohmann::json& j) {
    try {
        const auto d = j.at("d").get<std::size_t>();
        const auto n = j.at("n").get<std::size_t>();
        const auto r = j.at("r").get<std::size_t>();
        const auto support = j.at("support").get<std::vector<std::size_t>>();
        if (support.size() != r) throw ParameterError("support size differs from r");
        ParamVector vstar(d, 0.0);
        if (j.contains("ground_truth")) {
            vstar = j.at("ground_truth").get<ParamVector>();
        } else {
            for (std::size_t k : support) {
                if (k >= d) throw ParameterError("support index out of range");
                vstar[k] = 1.0;
            }
        }
        Dataset ds;
        ds.d = d;
        ds.n = n;
        ds.seed = j.value("seed", std::uint64_t{0});
        ds.support = support;
        ds.ground_truth = std::move(vstar);
        ds.x = j.at("x").get<std::vector<double>>();
        ds.y = j.at("y").get<std::vector<double>>();
        ds.validate();
        return ds;
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("malformed dataset document: ") + e.what());
    }
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParameterError("cannot write dataset to " + path.string());
    out << dataset_to_json(ds).dump() << '\n';
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open dataset file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError("malformed dataset file " + path.string() + ": " + e.what());
    }
    return dataset_from_json(j);
}

}  // namespace qpsim
