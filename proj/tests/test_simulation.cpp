#include "calibrated_runs.hpp"
#include "doctest.h"

using namespace qpsim;

TEST_CASE("calibrated preset passes the stage-0 and stage-1 checks") {
    int stage0_pass = 0;
    int stage1_pass = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const calibrated::Run run = calibrated::run(seed);
        REQUIRE_FALSE(run.diverged);
        const Stage0Verdict v0 = stage0_verdict(run.end_stage0, calibrated::kD, calibrated::eta_delta_stage0());
        const Stage1Verdict v1 = stage1_verdict(run.end_stage1, run.ground_truth, calibrated::kEpsilon);
        MESSAGE("seed " << seed << ": stage0 linf " << v0.linf << " min " << v0.min_entry << ", stage1 S "
                        << v1.linf_on_support << " Sbar " << v1.l1_off_support);
        stage0_pass += v0.passed;
        stage1_pass += v1.passed;
    }
    CHECK(stage0_pass >= 9);
    CHECK(stage1_pass >= 9);
}

TEST_CASE("stage-0 potential contracts faster under label noise than under GD") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto ln = calibrated::stage0_slice(seed, NoiseSpec::label_noise(kCalibratedDelta));
        const auto gd = calibrated::stage0_slice(seed, NoiseSpec::gd());
        const double c_ln = contraction_estimate_from_potentials(ln.potentials);
        const double c_gd = contraction_estimate_from_potentials(gd.potentials);
        CAPTURE(seed);
        CHECK(c_ln < 1.0);
        CHECK(c_ln < c_gd);
        CHECK(ln.potentials.back() < gd.potentials.back());
    }
}
