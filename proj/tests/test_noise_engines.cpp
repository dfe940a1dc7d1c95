#include <cmath>
#include <random>

#include "doctest.h"
#include "qpsim/errors.hpp"
#include "qpsim/noise_engines.hpp"
#include "qpsim/rng.hpp"
#include "test_helpers.hpp"

using namespace qpsim;

namespace {

ParamVector sgd_step(const ParamVector& v, const Dataset& ds, double eta, std::size_t i) {
    ParamVector out = v;
    const ParamVector g = example_grad(v, ds, i);
    for (std::size_t k = 0; k < v.size(); ++k) out[k] -= eta * g[k];
    return out;
}

ParamVector gd_step(const ParamVector& v, const Dataset& ds, double eta) {
    ParamVector out = v;
    const ParamVector g = full_grad(v, ds);
    for (std::size_t k = 0; k < v.size(); ++k) out[k] -= eta * g[k];
    return out;
}

}  // namespace

TEST_CASE("label noise step on a one-dimensional hand case") {
    // x = 1, v* = 1, v = 1: residual 0, so v' = 1 + eta s.
    const Dataset ds = make_dataset(1, {1.0}, {1.0});
    const ParamVector v{1.0};
    CHECK(label_noise_update(v, ds, 1.0, 0, 0.1)[0] == doctest::Approx(1.1));
    CHECK(label_noise_update(v, ds, 1.0, 0, -0.1)[0] == doctest::Approx(0.9));
    // v = 2: f = 4, residual 3, v' = 2 - 0.5 * (3 - 1) * 2 = 0.
    CHECK(label_noise_update(ParamVector{2.0}, ds, 0.5, 0, 1.0)[0] == doctest::Approx(0.0));
}

TEST_CASE("averaging the label-noise update over both signs gives the SGD step") {
    const Dataset ds = generate_dataset(12, 5, 3, 1);
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto v = testutil::random_vector(gen, 12, 0.0, 1.5);
        const double delta = 0.5 + trial;
        const double eta = 0.01;
        for (std::size_t i = 0; i < ds.n; ++i) {
            const auto up = label_noise_update(v, ds, eta, i, delta);
            const auto down = label_noise_update(v, ds, eta, i, -delta);
            const auto sgd = sgd_step(v, ds, eta, i);
            for (std::size_t k = 0; k < 12; ++k) CHECK(std::abs(0.5 * (up[k] + down[k]) - sgd[k]) <= 1e-12);
        }
    }
}

TEST_CASE("mini-batch noise averages to zero over ordered pairs") {
    const Dataset ds = generate_dataset(10, 6, 2, 8);
    std::mt19937_64 gen(5);
    const auto v = testutil::random_vector(gen, 10);
    std::vector<double> sum(10, 0.0);
    for (std::size_t i = 0; i < ds.n; ++i) {
        for (std::size_t j = 0; j < ds.n; ++j) {
            const auto z = minibatch_noise(v, ds, 2.0, i, j);
            for (std::size_t k = 0; k < 10; ++k) sum[k] += z[k];
        }
    }
    for (double s : sum) CHECK(std::abs(s / 36.0) <= 1e-12);
    for (double z : minibatch_noise(v, ds, 2.0, 3, 3)) CHECK(z == 0.0);
}

TEST_CASE("gd step is v - eta grad L") {
    const Dataset ds = generate_dataset(9, 4, 2, 0);
    std::mt19937_64 gen(9);
    const auto v = testutil::random_vector(gen, 9);
    RngStream rng(1);
    StepContext ctx{0.05, rng};
    CHECK(testutil::max_abs_diff(step_gd(v, ds, ctx), gd_step(v, ds, 0.05)) <= 1e-14);
}

TEST_CASE("seeded steps replay the documented draw order") {
    const Dataset ds = generate_dataset(8, 5, 2, 3);
    std::mt19937_64 gen(11);
    const auto v = testutil::random_vector(gen, 8, 0.1, 1.0);
    const double eta = 0.02;

    SUBCASE("label noise draws the index, then the sign") {
        RngStream a(77, 1);
        RngStream b(77, 1);
        StepContext ctx{eta, a};
        const auto got = step_label_noise(v, ds, ctx, 3.0);
        const std::size_t i = b.index(ds.n);
        const double s = 3.0 * b.sign();
        CHECK(testutil::max_abs_diff(got, label_noise_update(v, ds, eta, i, s)) <= 1e-14);
    }
    SUBCASE("mini-batch draws i then j") {
        RngStream a(78, 1);
        RngStream b(78, 1);
        StepContext ctx{eta, a};
        const auto got = step_minibatch_sim(v, ds, ctx, 0.7);
        const std::size_t i = b.index(ds.n);
        const std::size_t j = b.index(ds.n);
        auto want = gd_step(v, ds, eta);
        const auto z = minibatch_noise(v, ds, 0.7, i, j);
        for (std::size_t k = 0; k < 8; ++k) want[k] -= eta * z[k];
        CHECK(testutil::max_abs_diff(got, want) <= 1e-13);
    }
    SUBCASE("gaussian draws d normals") {
        RngStream a(79, 1);
        RngStream b(79, 1);
        StepContext ctx{eta, a};
        const auto got = step_gaussian(v, ds, ctx, 0.3);
        std::vector<double> xi(8);
        for (double& x : xi) x = b.normal();
        CHECK(testutil::max_abs_diff(got, gaussian_update(v, ds, eta, 0.3, xi)) <= 1e-14);
    }
    SUBCASE("plain SGD draws one index") {
        RngStream a(80, 1);
        RngStream b(80, 1);
        StepContext ctx{eta, a};
        const auto got = step_plain_sgd(v, ds, ctx);
        CHECK(testutil::max_abs_diff(got, sgd_step(v, ds, eta, b.index(ds.n))) <= 1e-14);
    }
}

TEST_CASE("full-gradient label noise adds eta s x_i .* v to the GD step") {
    const Dataset ds = generate_dataset(6, 4, 1, 2);
    const ParamVector v(6, 0.5);
    RngStream a(5, 1);
    RngStream b(5, 1);
    const NoiseSpec spec = NoiseSpec::label_noise(2.0, LabelNoiseForm::FullGradient);
    StepContext ctx{0.01, a};
    const auto got = step(spec, v, ds, ctx);
    const std::size_t i = b.index(ds.n);
    const double s = 2.0 * b.sign();
    auto want = gd_step(v, ds, 0.01);
    for (std::size_t k = 0; k < 6; ++k) want[k] += 0.01 * s * ds.x[i * 6 + k] * v[k];
    CHECK(testutil::max_abs_diff(got, want) <= 1e-14);
}

TEST_CASE("sampled example indices are uniform") {
    // Chi-square goodness of fit on 10 cells; 27.88 is the 0.999 quantile with 9 dof.
    RngStream rng(123);
    std::vector<double> counts(10, 0.0);
    const int draws = 100000;
    for (int t = 0; t < draws; ++t) counts[rng.index(10)] += 1.0;
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - draws / 10.0) * (c - draws / 10.0) / (draws / 10.0);
    CHECK(chi2 < 27.88);
    int plus = 0;
    for (int t = 0; t < draws; ++t) plus += rng.sign() > 0;
    CHECK(std::abs(plus - draws / 2) < 4 * std::sqrt(draws / 4.0));
}

TEST_CASE("gaussian noise has the configured variance") {
    const Dataset ds = generate_dataset(20, 5, 2, 4);
    const ParamVector v(20, 0.3);
    const double eta = 0.1;
    const double sigma = 0.7;
    const auto base = gd_step(v, ds, eta);
    RngStream rng(9, 1);
    StepContext ctx{eta, rng};
    double sq = 0.0;
    double mean = 0.0;
    const int reps = 2000;
    for (int r = 0; r < reps; ++r) {
        const auto out = step_gaussian(v, ds, ctx, sigma);
        for (std::size_t k = 0; k < 20; ++k) {
            const double z = (out[k] - base[k]) / (eta * sigma);
            sq += z * z;
            mean += z;
        }
    }
    const double n = reps * 20.0;
    CHECK(std::abs(mean / n) < 0.03);
    CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("langevin equals gaussian noise with sigma = sqrt(2 / (lambda eta))") {
    const Dataset ds = generate_dataset(7, 3, 2, 6);
    const ParamVector v(7, 0.8);
    const double eta = 0.01;
    const double lambda = 50.0;
    RngStream a(31, 1);
    RngStream b(31, 1);
    StepContext ca{eta, a};
    StepContext cb{eta, b};
    const auto lang = step_langevin(v, ds, ca, lambda);
    const auto gauss = step_gaussian(v, ds, cb, std::sqrt(2.0 / (lambda * eta)));
    CHECK(testutil::max_abs_diff(lang, gauss) <= 1e-14);
    CHECK(NoiseSpec::langevin(lambda).gaussian_sigma(eta) == doctest::Approx(std::sqrt(2.0 / (lambda * eta))));

    RngStream c(31, 1);
    StepContext cc{eta, c};
    CHECK(testutil::max_abs_diff(step(NoiseSpec::langevin(lambda), v, ds, cc), lang) <= 1e-14);
}

TEST_CASE("zero noise levels reduce to gradient descent") {
    const Dataset ds = generate_dataset(10, 4, 2, 2);
    const ParamVector v(10, 0.6);
    RngStream rng(4, 1);
    StepContext ctx{0.03, rng};
    const auto gd = gd_step(v, ds, 0.03);
    CHECK(testutil::max_abs_diff(step_minibatch_sim(v, ds, ctx, 0.0), gd) <= 1e-14);
    CHECK(testutil::max_abs_diff(step_gaussian(v, ds, ctx, 0.0), gd) <= 1e-14);
    CHECK(testutil::max_abs_diff(step(NoiseSpec::label_noise(0.0, LabelNoiseForm::FullGradient), v, ds, ctx),
                                 gd) <= 1e-14);
}

TEST_CASE("stepper matches the pure step functions") {
    const Dataset ds = generate_dataset(16, 6, 3, 12);
    const ParamVector v0(16, 1.0);
    for (const NoiseSpec& spec : {NoiseSpec::gd(), NoiseSpec::plain_sgd(), NoiseSpec::label_noise(4.0),
                                  NoiseSpec::minibatch(1.0), NoiseSpec::gaussian(0.2)}) {
        CAPTURE(spec.label());
        RngStream a(3, 1);
        RngStream b(3, 1);
        ParamVector in_place = v0;
        ParamVector pure = v0;
        Stepper stepper(ds, spec);
        for (int t = 0; t < 50; ++t) {
            stepper.step(in_place, 0.001, a);
            StepContext ctx{0.001, b};
            pure = step(spec, pure, ds, ctx);
        }
        CHECK(in_place == pure);
    }
}

TEST_CASE("engine specs validate and serialize") {
    CHECK_NOTHROW(NoiseSpec::gaussian(0.5).validate());
    CHECK_THROWS_AS(NoiseSpec::gaussian(-1.0).validate(), ParameterError);
    CHECK_THROWS_AS(NoiseSpec::langevin(0.0).validate(), ParameterError);
    CHECK_THROWS_AS(NoiseSpec::label_noise(-1.0).validate(), ParameterError);
    NoiseSpec both = NoiseSpec::gaussian(1.0);
    both.lambda_temp = 2.0;
    CHECK_THROWS_AS(both.validate(), ParameterError);
    NoiseSpec gd_with_delta = NoiseSpec::gd();
    gd_with_delta.delta = 1.0;
    CHECK_THROWS_AS(gd_with_delta.validate(), ParameterError);
    CHECK_THROWS_AS(parse_engine_kind("adam"), ParameterError);

    for (const NoiseSpec& spec : {NoiseSpec::gd(), NoiseSpec::label_noise(2.5, LabelNoiseForm::FullGradient),
                                  NoiseSpec::minibatch(1.0), NoiseSpec::gaussian(0.5), NoiseSpec::langevin(3.0)}) {
        const NoiseSpec back = noise_spec_from_json(to_json(spec));
        CHECK(back.kind == spec.kind);
        CHECK(back.delta == spec.delta);
        CHECK(back.sigma == spec.sigma);
        CHECK(back.lambda_temp == spec.lambda_temp);
        CHECK(back.label_form == spec.label_form);
        CHECK(back.label() == spec.label());
    }
    CHECK(NoiseSpec::gaussian(0.5).label() == "gaussian_s0.5");
}

TEST_CASE("divergence detection") {
    CHECK_FALSE(is_diverged(std::vector<double>{1.0, -5.0}));
    CHECK(is_diverged(std::vector<double>{1.0, std::nan("")}));
    CHECK(is_diverged(std::vector<double>{1.0, INFINITY}));
    CHECK(is_diverged(std::vector<double>{2e12}));
}

TEST_CASE("negative learning rate and wrong dimension are rejected") {
    const Dataset ds = generate_dataset(4, 2, 1, 0);
    RngStream rng(0);
    Stepper s(ds, NoiseSpec::gd());
    ParamVector v(4, 1.0);
    CHECK_THROWS_AS(s.step(v, -0.1, rng), ParameterError);
    ParamVector w(3, 1.0);
    CHECK_THROWS_AS(s.step(w, 0.1, rng), DimensionError);
}
