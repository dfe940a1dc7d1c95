#include <cmath>
#include <fstream>

#include "doctest.h"
#include "qpsim/errors.hpp"
#include "qpsim/trainer.hpp"
#include "test_helpers.hpp"

using namespace qpsim;

TEST_CASE("three-stage schedule arithmetic") {
    ThreeStageOptions o;
    o.c0 = o.c1 = o.c2 = 1.0;
    const ScheduleSpec s = three_stage_schedule(10.0, 0.1, o);
    REQUIRE(s.stages.size() == 3);
    CHECK(s.stages[0].eta == doctest::Approx(0.1));
    CHECK(s.stages[1].eta == doctest::Approx(0.01));
    CHECK(s.stages[2].eta == doctest::Approx(1e-4));
    CHECK(s.stages[0].steps == static_cast<std::size_t>(std::ceil(o.k0)));
    CHECK(s.stages[1].steps == static_cast<std::size_t>(std::ceil(o.k1 / 0.01)));
    CHECK(s.stages[2].steps == static_cast<std::size_t>(std::ceil(o.k2 / 1e-4 - 1e-6)));

    o.t1 = 17;
    CHECK(three_stage_schedule(10.0, 0.1, o).stages[1].steps == 17);

    CHECK_THROWS_AS(three_stage_schedule(0.0, 0.1), ParameterError);
    CHECK_THROWS_AS(three_stage_schedule(10.0, 1.5), ParameterError);
    ThreeStageOptions bad;
    bad.c1 = -1.0;
    CHECK_THROWS_AS(three_stage_schedule(10.0, 0.1, bad), ParameterError);
}

TEST_CASE("learning rates decrease across stages") {
    for (double delta : {1.0, 2.0, 40.0, 300.0}) {
        for (double eps : {0.01, 0.1, 0.9}) {
            ThreeStageOptions o;
            o.c0 = o.c1 = o.c2 = 1.0;
            const ScheduleSpec s = three_stage_schedule(delta, eps, o);
            CHECK(s.stages[0].eta >= s.stages[1].eta);
            CHECK(s.stages[1].eta >= s.stages[2].eta);
        }
    }
    const ScheduleSpec def = three_stage_schedule(kCalibratedDelta, 0.1);
    CHECK(def.stages[0].eta >= def.stages[1].eta);
    CHECK(def.stages[1].eta >= def.stages[2].eta);
}

TEST_CASE("schedule lookup and JSON round trip") {
    const ScheduleSpec s{{{0.1, 3}, {0.01, 2}}};
    CHECK(s.total_steps() == 5);
    CHECK(s.eta_at(0) == 0.1);
    CHECK(s.eta_at(2) == 0.1);
    CHECK(s.eta_at(3) == 0.01);
    CHECK(s.stage_start(1) == 3);
    CHECK_THROWS_AS(s.eta_at(5), ParameterError);
    const ScheduleSpec back = schedule_from_json(to_json(s));
    REQUIRE(back.stages.size() == 2);
    CHECK(back.stages[1].eta == 0.01);
    CHECK(back.stages[1].steps == 2);
    CHECK_THROWS_AS(ScheduleSpec{}.validate(), ParameterError);
}

TEST_CASE("ground truth is a fixed point of noiseless and mini-batch dynamics") {
    Dataset ds = generate_dataset(10, 6, 3, 1);
    for (const NoiseSpec& spec : {NoiseSpec::gd(), NoiseSpec::minibatch(2.0)}) {
        const auto res = run_trajectory(ds, ds.ground_truth, spec, ScheduleSpec::constant(0.05, 500), 100, 0);
        // Residuals at v* are zero up to the summation order of the active kernels.
        CHECK(testutil::max_abs_diff(res.final_v, ds.ground_truth) <= 1e-12);
        CHECK(res.records.back().test_error <= 1e-24);
        CHECK(res.records.back().train_loss <= 1e-28);
    }
}

TEST_CASE("gradient descent decreases the training loss at small step size") {
    const Dataset ds = generate_dataset(10, 20, 3, 5);
    const auto res = run_trajectory(ds, constant_vector(10, 1.0), NoiseSpec::gd(),
                                    ScheduleSpec::constant(1e-3, 5000), 50, 0);
    for (std::size_t k = 1; k < res.records.size(); ++k) {
        CHECK(res.records[k].train_loss <= res.records[k - 1].train_loss);
    }
    CHECK(res.records.back().train_loss < res.records.front().train_loss);
}

TEST_CASE("trajectories replay exactly from the seed") {
    const Dataset ds = generate_dataset(20, 8, 2, 3);
    const auto spec = NoiseSpec::label_noise(2.0);
    const auto sched = ScheduleSpec{{{0.01, 700}, {0.001, 300}}};
    const auto a = run_trajectory(ds, constant_vector(20, 1.0), spec, sched, 10, 42);
    const auto b = run_trajectory(ds, constant_vector(20, 1.0), spec, sched, 10, 42);
    const auto c = run_trajectory(ds, constant_vector(20, 1.0), spec, sched, 10, 43);
    CHECK(a.final_v == b.final_v);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) CHECK(a.records[k].train_loss == b.records[k].train_loss);
    CHECK(a.final_v != c.final_v);
}

TEST_CASE("records land on the logging cadence and the final step") {
    const Dataset ds = generate_dataset(5, 3, 1, 0);
    const auto res = run_trajectory(ds, constant_vector(5, 1.0), NoiseSpec::gd(), ScheduleSpec::constant(0.01, 25),
                                    10, 0);
    std::vector<std::size_t> steps;
    for (const auto& r : res.records) steps.push_back(r.step);
    CHECK(steps == std::vector<std::size_t>{0, 10, 20, 25});
    CHECK(res.steps_run == 25);
    CHECK_THROWS_AS(run_trajectory(ds, constant_vector(5, 1.0), NoiseSpec::gd(), ScheduleSpec::constant(0.01, 5), 0,
                                   0),
                    ParameterError);
    CHECK_THROWS_AS(run_trajectory(ds, constant_vector(4, 1.0), NoiseSpec::gd(), ScheduleSpec::constant(0.01, 5), 1,
                                   0),
                    DimensionError);
}

TEST_CASE("observer sees every step with the stage learning rate") {
    const Dataset ds = generate_dataset(6, 3, 1, 0);
    const ScheduleSpec sched{{{0.1, 4}, {0.01, 3}, {0.001, 2}}};
    std::vector<std::size_t> seen;
    std::vector<double> etas;
    run_trajectory(ds, constant_vector(6, 0.5), NoiseSpec::gd(), sched, 100, 0,
                   [&](std::size_t t, double eta, std::span<const double>) {
                       seen.push_back(t);
                       etas.push_back(eta);
                   });
    REQUIRE(seen.size() == 9);
    for (std::size_t k = 0; k < 9; ++k) {
        CHECK(seen[k] == k + 1);
        CHECK(etas[k] == sched.eta_at(k));
    }
}

TEST_CASE("divergent runs stop with a flagged final record") {
    const Dataset ds = generate_dataset(10, 5, 2, 0);
    const auto res = run_trajectory(ds, constant_vector(10, 1.0), NoiseSpec::gaussian(100.0),
                                    ScheduleSpec::constant(0.5, 10000), 100, 0);
    CHECK(res.diverged);
    CHECK(res.records.back().diverged);
    CHECK(res.steps_run < 10000);
    CHECK(res.records.back().step == res.steps_run);
}

TEST_CASE("record fields") {
    const Dataset ds = generate_dataset(4, 2, 2, 0);
    const std::vector<double> v{1.5, 1.0, -0.5, 0.25};
    const TrajectoryRecord r = make_record(7, v, ds);
    CHECK(r.step == 7);
    CHECK(r.linf == 1.5);
    CHECK(r.l1 == 3.25);
    CHECK(r.l2 == doctest::Approx(std::sqrt(2.25 + 1.0 + 0.25 + 0.0625)));
    CHECK(r.linf_err_support == 0.5);
    CHECK(r.l1_off_support == 0.75);
    CHECK(std::isnan(r.potential));
    CHECK(r.min_entry == -0.5);
    CHECK(r.test_error == doctest::Approx(test_error(v, ds.ground_truth)));
    const std::vector<double> pos{1.0, 4.0, 0.0, 0.25};
    CHECK(make_record(0, pos, ds).potential == doctest::Approx(3.5));
}

TEST_CASE("trajectory CSV round trip is exact") {
    const Dataset ds = generate_dataset(12, 5, 2, 9);
    const auto res = run_trajectory(ds, constant_vector(12, 1.0), NoiseSpec::label_noise(1.0),
                                    ScheduleSpec::constant(0.01, 200), 20, 1);
    const auto dir = testutil::scratch_dir("trainer_csv");
    write_trajectory_csv(dir / "t.csv", res.records);
    const auto back = read_trajectory_csv(dir / "t.csv");
    REQUIRE(back.size() == res.records.size());
    for (std::size_t k = 0; k < back.size(); ++k) {
        CHECK(back[k].step == res.records[k].step);
        CHECK(back[k].train_loss == res.records[k].train_loss);
        CHECK(back[k].test_error == res.records[k].test_error);
        CHECK(back[k].l2 == res.records[k].l2);
        CHECK(back[k].potential == res.records[k].potential);
        CHECK(back[k].diverged == res.records[k].diverged);
    }
    std::ofstream(dir / "bad.csv") << "a,b\n1,2\n";
    CHECK_THROWS_AS(read_trajectory_csv(dir / "bad.csv"), ParameterError);
}

TEST_CASE("figure preset values") {
    const Figure1Preset p = figure1_preset();
    CHECK(p.d == 100);
    CHECK(p.n == 40);
    CHECK(p.r == 5);
    CHECK(p.tau == 1.0);
    CHECK(p.steps == 300000);
    CHECK(p.gaussian_steps == 4 * p.steps);
    const EngineRun ln = p.label_noise();
    CHECK(ln.engine.delta == 1.0);
    CHECK(ln.engine.label_form == LabelNoiseForm::FullGradient);
    CHECK(ln.schedule.eta_at(0) == 0.01);
    CHECK(ln.schedule.eta_at(99999) == 0.01);
    CHECK(ln.schedule.eta_at(100000) == doctest::Approx(0.001));
    CHECK(ln.schedule.eta_at(200000) == doctest::Approx(0.0001));
    CHECK(ln.schedule.total_steps() == 300000);
    CHECK(p.gd().schedule.total_steps() == 300000);
    CHECK(p.minibatch().engine.kind == EngineKind::MiniBatchSim);
    const auto g = p.gaussian();
    REQUIRE(g.size() == 4);
    CHECK(*g[1].engine.sigma == 0.5);
    CHECK(g[0].schedule.total_steps() == 1200000);
    CHECK(p.all().size() == 7);
}
