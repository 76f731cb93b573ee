#pragma once

#include "adoptnet/amplification.hpp"
#include "adoptnet/dynamics.hpp"
#include "adoptnet/jumps.hpp"

#include <cstdint>
#include <string>
#include <vector>

// Intervention experiments: inject a finite subsidy pulse at the
// highest-amplification nodes, run the jump-diffusion model over an ensemble
// of seeds, and summarise whether the system tipped into the fast regime.
// A closed-form mass balance predicts tipping from the integrated shock, the
// mean amplification, and the distance to the regime threshold.

namespace adoptnet {

struct ShockSpec {
    double intensity = 0.3; // source rate applied to each targeted node, >= 0
    double duration = 6.0;  // length of the pulse window, >= 0
    int node_count = 3;     // number of top-ranked nodes to target
    double start_time = 0.0;

    void validate() const;
};

struct ShockOutcome {
    std::uint64_t seed = 0;
    double shock_intensity = 0.0;
    double duration = 0.0;
    double terminal_mean = 0.0;
    bool crossed = false;
    double crossing_time = 0.0; // NaN when the mean never crossed
    double frac_above_090 = 0.0;
    double frac_below_010 = 0.0;
    int jump_count = 0;
    int absorb_count = 0;
};

// Per-duration ensemble summary of terminal mean adoption.
struct DurationSummary {
    double duration = 0.0;
    double median_terminal = 0.0;
    double lower_quartile = 0.0;
    double upper_quartile = 0.0;
    double crossed_fraction = 0.0;
};

struct ThresholdCheck {
    double injected = 0.0;           // integral of the node-summed intensity
    double mean_amplification = 0.0; // system mean of the per-node totals
    double lhs = 0.0;                // injected mass scaled by mean amplification
    double gap = 0.0;                // threshold mass minus initial mass
    bool predicted_permanent = false;
};

// Pulse schedule covering the top-ranked nodes from the report; empty when
// the duration is zero.
SourceSchedule shock_schedule(const AmplificationReport& report,
                              const ShockSpec& shock);

// One jump-diffusion run under an arbitrary schedule; the outcome records
// the terminal distribution shape alongside the regime summary.
ShockOutcome run_single_shock(const OperatorSet& ops, const ModelParams& params,
                              const JumpParams& jumps,
                              const SourceSchedule& schedule,
                              const Eigen::VectorXd& tau0, std::uint64_t seed);

// One shock specification replicated over seeds.
std::vector<ShockOutcome> run_shock_experiment(
    const OperatorSet& ops, const ModelParams& params, const JumpParams& jumps,
    const AmplificationReport& report, const ShockSpec& shock,
    const std::vector<std::uint64_t>& seeds, const Eigen::VectorXd& tau0);

// Same pulse intensity at several durations; seed s uses the same stream at
// every duration, so outcomes are paired across durations.
std::vector<ShockOutcome> run_duration_sweep(
    const OperatorSet& ops, const ModelParams& params, const JumpParams& jumps,
    const AmplificationReport& report, const ShockSpec& base,
    const std::vector<double>& durations, const std::vector<std::uint64_t>& seeds,
    const Eigen::VectorXd& tau0);

// Same pulse duration at several intensities, replicated over seeds.
std::vector<ShockOutcome> run_shock_grid(
    const OperatorSet& ops, const ModelParams& params, const JumpParams& jumps,
    const AmplificationReport& report, const ShockSpec& base,
    const std::vector<double>& intensities,
    const std::vector<std::uint64_t>& seeds, const Eigen::VectorXd& tau0);

// Median and quartiles of terminal mean adoption, grouped by duration (in
// the order durations first appear in the outcome list).
std::vector<DurationSummary> summarize_durations(
    const std::vector<ShockOutcome>& outcomes);

// Mass-balance tipping predictor: lhs integrates the node-summed intensity
// scaled by the mean amplification factor; gap is the threshold mass
// tau_star * n minus the initial mass tau0_mean * n.
ThresholdCheck threshold_check(const AmplificationReport& report,
                               const JumpParams& jumps,
                               const SourceSchedule& schedule, double tau0_mean);

// CSV: "seed,duration,terminal_mean,crossed,crossing_time".
void write_sweep_csv(const std::vector<ShockOutcome>& outcomes,
                     const std::string& path);

// CSV: "shock,seed,terminal_mean,crossed,crossing_time,frac_above_090,
// frac_below_010".
void write_shock_grid_csv(const std::vector<ShockOutcome>& outcomes,
                          const std::string& path);

} // namespace adoptnet
