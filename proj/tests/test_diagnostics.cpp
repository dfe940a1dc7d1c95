#include <cmath>

#include "doctest.h"
#include "qpsim/diagnostics.hpp"
#include "qpsim/errors.hpp"
#include "qpsim/trainer.hpp"

using namespace qpsim;

TEST_CASE("potentials on hand values") {
    const std::vector<double> zero(4, 0.0);
    const std::vector<double> ones(4, 1.0);
    CHECK(potential(zero, PotentialSpec::sqrt_sum()) == 0.0);
    CHECK(potential(zero, PotentialSpec::bounded(1.0)) == 0.0);
    CHECK(potential(zero, PotentialSpec::support_bounded(1.0, 1.0, {0})) == 0.0);
    CHECK(potential(ones, PotentialSpec::sqrt_sum()) == 4.0);
    CHECK(potential(ones, PotentialSpec::bounded(1.0)) == 0.0);
    CHECK(potential(ones, PotentialSpec::bounded(4.0)) == 4.0);

    // Off-support sum of square roots, gated on both bounds.
    const std::vector<double> v{0.9, 0.04, 0.01};
    CHECK(potential(v, PotentialSpec::support_bounded(1.0, 0.1, {0})) == doctest::Approx(0.3));
    CHECK(potential(v, PotentialSpec::support_bounded(1.0, 0.04, {0})) == 0.0);
    CHECK(potential(v, PotentialSpec::support_bounded(0.5, 0.1, {0})) == 0.0);
}

TEST_CASE("potentials reject negative entries and bad specs") {
    const std::vector<double> v{1.0, -0.1};
    CHECK_THROWS_AS(potential(v, PotentialSpec::sqrt_sum()), ParameterError);
    CHECK_THROWS_AS(potential(std::vector<double>{1.0}, PotentialSpec::bounded(0.0)), ParameterError);
    CHECK_THROWS_AS(potential(std::vector<double>{1.0}, PotentialSpec::support_bounded(1.0, -1.0, {})),
                    ParameterError);
}

TEST_CASE("stage-0 verdict") {
    const std::size_t d = 10;
    const std::vector<double> half(d, 1.0 / (2.0 * d));
    const Stage0Verdict ok = stage0_verdict(half, d, 0.1, 100.0);
    CHECK(ok.passed);
    CHECK(ok.linf == doctest::Approx(0.05));

    std::vector<double> big = half;
    big[3] = 2.0 / d;
    const Stage0Verdict bad = stage0_verdict(big, d, 0.1, 100.0);
    CHECK_FALSE(bad.passed);
    CHECK(bad.linf == doctest::Approx(0.2));

    // Lower bound exp(-C / (eta delta)).
    std::vector<double> tiny = half;
    tiny[0] = 1e-30;
    const Stage0Verdict low = stage0_verdict(tiny, d, 0.1, 1.0);
    CHECK_FALSE(low.passed);
    CHECK(low.min_entry == 1e-30);
    CHECK(low.min_entry_bound == doctest::Approx(std::exp(-10.0)));
}

TEST_CASE("stage-1 verdict") {
    std::vector<double> vstar{1.0, 1.0, 0.0, 0.0};
    const Stage1Verdict exact = stage1_verdict(vstar, vstar, 0.01);
    CHECK(exact.passed);
    CHECK(exact.linf_on_support == 0.0);
    CHECK(exact.l1_off_support == 0.0);

    std::vector<double> v = vstar;
    v[1] += 0.2;
    const Stage1Verdict off = stage1_verdict(v, vstar, 0.01);
    CHECK_FALSE(off.passed);
    CHECK(off.linf_on_support == doctest::Approx(0.2));

    std::vector<double> w = vstar;
    w[2] = 0.02;
    w[3] = 0.02;
    CHECK_FALSE(stage1_verdict(w, vstar, 0.03).passed);
    CHECK(stage1_verdict(w, vstar, 0.05).passed);
}

TEST_CASE("contraction estimate") {
    std::vector<ParamVector> flat(12, ParamVector(5, 0.3));
    CHECK(contraction_estimate(flat, PotentialSpec::sqrt_sum()) == doctest::Approx(1.0));

    std::vector<double> phis;
    double p = 1.0;
    for (int t = 0; t < 20; ++t) {
        phis.push_back(p);
        p *= 0.9;
    }
    CHECK(contraction_estimate_from_potentials(phis) == doctest::Approx(0.9));

    std::vector<ParamVector> short_slice(5, ParamVector(3, 1.0));
    CHECK_THROWS_AS(contraction_estimate(short_slice, PotentialSpec::sqrt_sum()), InsufficientDataError);
    std::vector<double> zeros(30, 0.0);
    CHECK_THROWS_AS(contraction_estimate_from_potentials(zeros), InsufficientDataError);
}

TEST_CASE("norm bound") {
    CHECK(norm_bound(1.0, 100, 0.01) == doctest::Approx(60000.0));
    CHECK_THROWS_AS(norm_bound(1.0, 100, 0.0), ParameterError);

    const Dataset ds = generate_dataset(20, 8, 2, 3);
    const auto gd = run_trajectory(ds, constant_vector(20, 1.0), NoiseSpec::gd(), ScheduleSpec::constant(0.01, 2000),
                                   50, 0);
    CHECK(norm_bound_check(gd.records, 1.0, 20, 0.01));

    const auto fixed = run_trajectory(ds, ds.ground_truth, NoiseSpec::gd(), ScheduleSpec::constant(0.01, 100), 10, 0);
    CHECK(norm_bound_check(fixed.records, 1.0, 20, 0.01));

    const auto blown = run_trajectory(ds, constant_vector(20, 1.0), NoiseSpec::gaussian(100.0),
                                      ScheduleSpec::constant(0.5, 10000), 10, 0);
    REQUIRE(blown.diverged);
    CHECK_FALSE(norm_bound_check(blown.records, 1.0, 20, 0.01));
}
