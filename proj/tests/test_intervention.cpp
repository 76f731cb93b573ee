#include "adoptnet/intervention.hpp"

#include "adoptnet/amplification.hpp"
#include "adoptnet/csv.hpp"
#include "adoptnet/dynamics.hpp"
#include "adoptnet/errors.hpp"
#include "adoptnet/graph.hpp"
#include "adoptnet/jumps.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

using namespace adoptnet;

namespace {

struct Bench {
    SpatialNetwork net;
    OperatorSet ops;
    ModelParams params;
    JumpParams jumps;
    AmplificationReport report;

    Bench() {
        net = generate_network(NetworkKind::random, 20, GeneratorParams{}, 1);
        net.adjacency *= 0.004;
        ops = build_operators(net, SpatialKernel::knn(4, 0.004));
        params.nu_s = 0.5;
        params.nu_n = 0.8;
        params.lambda_x = 0.3;
        params.kappa = 0.15;
        params.dt = 0.05;
        params.t_end = 20.0;
        jumps.lambda0 = 0.0;
        jumps.lambda1 = 0.06;
        jumps.tau_star = 0.35;
        jumps.absorb_level = 0.95;
        report = build_report(ops, params);
    }
};

} // namespace

TEST_CASE("shock schedule targets the top-ranked nodes") {
    Bench b;
    ShockSpec shock;
    shock.intensity = 0.4;
    shock.duration = 5.0;
    shock.node_count = 4;
    shock.start_time = 1.0;
    SourceSchedule schedule = shock_schedule(b.report, shock);
    REQUIRE(schedule.windows().size() == 1);
    const SourceWindow& win = schedule.windows()[0];
    CHECK(win.t_start == 1.0);
    CHECK(win.t_end == 6.0);
    CHECK(win.intensity == 0.4);
    std::vector<int> expected = b.report.top_nodes(4);
    CHECK(win.nodes == expected);

    shock.duration = 0.0;
    CHECK(shock_schedule(b.report, shock).empty());

    shock.duration = 5.0;
    shock.intensity = -0.1;
    CHECK_THROWS_AS(shock_schedule(b.report, shock), ConfigError);
    shock.intensity = 0.4;
    shock.node_count = 0;
    CHECK_THROWS_AS(shock_schedule(b.report, shock), ConfigError);
    shock.node_count = 25; // more than the system has
    CHECK_THROWS_AS(shock_schedule(b.report, shock), ConfigError);
}

TEST_CASE("single shock outcome summarises its trajectory") {
    Bench b;
    ShockSpec shock;
    shock.intensity = 0.33;
    shock.duration = 6.0;
    shock.node_count = 15;
    SourceSchedule schedule = shock_schedule(b.report, shock);
    Eigen::VectorXd tau0 = Eigen::VectorXd::Zero(20);
    ShockOutcome outcome = run_single_shock(b.ops, b.params, b.jumps, schedule, tau0, 7);
    CHECK(outcome.seed == 7);
    CHECK(outcome.terminal_mean >= 0.0);
    CHECK(outcome.terminal_mean <= 1.0);
    CHECK(outcome.frac_above_090 + outcome.frac_below_010 <= 1.0 + 1e-12);
    if (outcome.crossed) {
        CHECK(outcome.crossing_time >= 0.0);
    } else {
        CHECK(std::isnan(outcome.crossing_time));
        CHECK(outcome.jump_count == 0); // rate below threshold is zero here
    }

    // identical seeds reproduce the outcome exactly
    ShockOutcome again = run_single_shock(b.ops, b.params, b.jumps, schedule, tau0, 7);
    CHECK(again.terminal_mean == outcome.terminal_mean);
    CHECK(again.jump_count == outcome.jump_count);
}

TEST_CASE("duration sweep pairs seeds across durations") {
    Bench b;
    ShockSpec base;
    base.intensity = 0.33;
    base.node_count = 15;
    std::vector<double> durations{1.0, 4.0};
    std::vector<std::uint64_t> seeds{11, 12, 13};
    std::vector<ShockOutcome> sweep = run_duration_sweep(b.ops, b.params, b.jumps,
                                                         b.report, base, durations,
                                                         seeds, Eigen::VectorXd::Zero(20));
    REQUIRE(sweep.size() == 6);
    // every (duration, seed) pair appears once
    std::set<std::pair<double, std::uint64_t>> cells;
    for (const ShockOutcome& o : sweep) cells.insert({o.duration, o.seed});
    CHECK(cells.size() == 6);

    // zero-rate deterministic core: at equal seeds a longer pulse can only
    // raise the terminal mean (more injected mass, same stream)
    for (std::uint64_t seed : seeds) {
        double short_term = -1.0;
        double long_term = -1.0;
        for (const ShockOutcome& o : sweep) {
            if (o.seed != seed) continue;
            if (o.duration == 1.0) short_term = o.terminal_mean;
            if (o.duration == 4.0) long_term = o.terminal_mean;
        }
        CHECK(long_term >= short_term - 1e-12);
    }
}

TEST_CASE("summaries group by duration preserving first-appearance order") {
    Bench b;
    ShockSpec base;
    base.intensity = 0.33;
    base.node_count = 15;
    std::vector<double> durations{2.0, 7.0};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::vector<ShockOutcome> sweep = run_duration_sweep(b.ops, b.params, b.jumps,
                                                         b.report, base, durations,
                                                         seeds, Eigen::VectorXd::Zero(20));
    std::vector<DurationSummary> summary = summarize_durations(sweep);
    REQUIRE(summary.size() == 2);
    CHECK(summary[0].duration == 2.0);
    CHECK(summary[1].duration == 7.0);
    for (const DurationSummary& s : summary) {
        CHECK(s.lower_quartile <= s.median_terminal + 1e-12);
        CHECK(s.median_terminal <= s.upper_quartile + 1e-12);
        CHECK(s.crossed_fraction >= 0.0);
        CHECK(s.crossed_fraction <= 1.0);
    }
    // the longer pulse dominates in the median too
    CHECK(summary[1].median_terminal >= summary[0].median_terminal - 1e-12);
}

TEST_CASE("shock grid replicates intensities over seeds") {
    Bench b;
    ShockSpec base;
    base.duration = 6.0;
    base.node_count = 15;
    std::vector<double> intensities{0.1, 0.4};
    std::vector<std::uint64_t> seeds{21, 22};
    std::vector<ShockOutcome> grid = run_shock_grid(b.ops, b.params, b.jumps, b.report,
                                                    base, intensities, seeds,
                                                    Eigen::VectorXd::Zero(20));
    REQUIRE(grid.size() == 4);
    for (const ShockOutcome& o : grid) {
        CHECK((o.shock_intensity == 0.1 || o.shock_intensity == 0.4));
        CHECK(o.duration == 6.0);
    }
    // stronger pulse, same seed: terminal mean cannot fall
    for (std::uint64_t seed : seeds) {
        double weak = -1.0;
        double strong = -1.0;
        for (const ShockOutcome& o : grid) {
            if (o.seed != seed) continue;
            if (o.shock_intensity == 0.1) weak = o.terminal_mean;
            if (o.shock_intensity == 0.4) strong = o.terminal_mean;
        }
        CHECK(strong >= weak - 1e-12);
    }
}

TEST_CASE("threshold check integrates the schedule mass") {
    Bench b;
    ShockSpec shock;
    shock.intensity = 0.25;
    shock.duration = 4.0;
    shock.node_count = 3;
    SourceSchedule schedule = shock_schedule(b.report, shock);
    ThresholdCheck check = threshold_check(b.report, b.jumps, schedule, 0.05);
    // injected mass: intensity * duration * node count
    CHECK(check.injected == doctest::Approx(0.25 * 4.0 * 3.0).epsilon(1e-12));
    CHECK(check.mean_amplification == doctest::Approx(b.report.mean_total()).epsilon(1e-12));
    CHECK(check.lhs == doctest::Approx(check.injected * check.mean_amplification)
                           .epsilon(1e-12));
    CHECK(check.gap == doctest::Approx((0.35 - 0.05) * 20.0).epsilon(1e-12));
    CHECK(check.predicted_permanent == (check.lhs > check.gap));

    // a pulse that dwarfs the gap predicts permanence
    shock.intensity = 5.0;
    shock.duration = 10.0;
    shock.node_count = 15;
    ThresholdCheck big = threshold_check(b.report, b.jumps,
                                         shock_schedule(b.report, shock), 0.05);
    CHECK(big.predicted_permanent);
}

TEST_CASE("sweep CSV export round-trips") {
    Bench b;
    ShockSpec base;
    base.intensity = 0.33;
    base.node_count = 15;
    std::vector<ShockOutcome> sweep = run_duration_sweep(b.ops, b.params, b.jumps,
                                                         b.report, base, {1.0, 2.0},
                                                         {5, 6},
                                                         Eigen::VectorXd::Zero(20));
    const std::string path = "sweep_export.csv";
    write_sweep_csv(sweep, path);
    csv::Table t = csv::read_file(path);
    CHECK(t.header == std::vector<std::string>{"seed", "duration", "terminal_mean",
                                               "crossed", "crossing_time"});
    CHECK(t.rows.size() == 4);
    std::remove(path.c_str());

    const std::string grid_path = "grid_export.csv";
    std::vector<ShockOutcome> grid = run_shock_grid(b.ops, b.params, b.jumps, b.report,
                                                    base, {0.2}, {5},
                                                    Eigen::VectorXd::Zero(20));
    write_shock_grid_csv(grid, grid_path);
    csv::Table g = csv::read_file(grid_path);
    CHECK(g.header == std::vector<std::string>{"shock", "seed", "terminal_mean",
                                               "crossed", "crossing_time",
                                               "frac_above_090", "frac_below_010"});
    CHECK(g.rows.size() == 1);
    std::remove(grid_path.c_str());
}
