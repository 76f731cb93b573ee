#include "adoptnet/intervention.hpp"

#include "adoptnet/csv.hpp"
#include "adoptnet/errors.hpp"
#include "adoptnet/stats.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace adoptnet {

void ShockSpec::validate() const {
    if (intensity < 0.0) {
        throw ConfigError("shock intensity must be non-negative");
    }
    if (duration < 0.0) {
        throw ConfigError("shock duration must be non-negative");
    }
    if (node_count < 1) {
        throw ConfigError("shock must target at least one node");
    }
    if (start_time < 0.0) {
        throw ConfigError("shock start time must be non-negative");
    }
}

SourceSchedule shock_schedule(const AmplificationReport& report,
                              const ShockSpec& shock) {
    shock.validate();
    const int n = static_cast<int>(report.entries.size());
    if (shock.node_count > n) {
        std::ostringstream msg;
        msg << "shock targets " << shock.node_count << " nodes but the system has "
            << n;
        throw ConfigError(msg.str());
    }
    SourceSchedule schedule;
    if (shock.duration > 0.0) {
        schedule.add({shock.start_time, shock.start_time + shock.duration,
                      report.top_nodes(shock.node_count), shock.intensity});
    }
    return schedule;
}

ShockOutcome run_single_shock(const OperatorSet& ops, const ModelParams& params,
                              const JumpParams& jumps,
                              const SourceSchedule& schedule,
                              const Eigen::VectorXd& tau0, std::uint64_t seed) {
    const Trajectory traj =
        simulate_jump_diffusion(ops, params, jumps, schedule, tau0, seed);
    const RegimeReport regime = regime_summary(traj, jumps);

    ShockOutcome outcome;
    outcome.seed = seed;
    outcome.terminal_mean = traj.final_mean();
    outcome.crossed = regime.crossed;
    outcome.crossing_time = regime.crossed
                                ? regime.crossing_time
                                : std::numeric_limits<double>::quiet_NaN();

    const Eigen::VectorXd& final = traj.final_state();
    const int n = static_cast<int>(final.size());
    int above = 0;
    int below = 0;
    for (int i = 0; i < n; ++i) {
        if (final[i] > 0.9) {
            ++above;
        }
        if (final[i] < 0.1) {
            ++below;
        }
    }
    outcome.frac_above_090 = static_cast<double>(above) / n;
    outcome.frac_below_010 = static_cast<double>(below) / n;

    for (const TrajectoryEvent& event : traj.events) {
        if (event.kind == TrajectoryEvent::Kind::jump) {
            ++outcome.jump_count;
        } else {
            ++outcome.absorb_count;
        }
    }
    return outcome;
}

std::vector<ShockOutcome> run_shock_experiment(
    const OperatorSet& ops, const ModelParams& params, const JumpParams& jumps,
    const AmplificationReport& report, const ShockSpec& shock,
    const std::vector<std::uint64_t>& seeds, const Eigen::VectorXd& tau0) {
    if (seeds.empty()) {
        throw ConfigError("shock experiment needs at least one seed");
    }
    const SourceSchedule schedule = shock_schedule(report, shock);
    std::vector<ShockOutcome> outcomes;
    outcomes.reserve(seeds.size());
    for (std::uint64_t seed : seeds) {
        ShockOutcome outcome =
            run_single_shock(ops, params, jumps, schedule, tau0, seed);
        outcome.shock_intensity = shock.intensity;
        outcome.duration = shock.duration;
        outcomes.push_back(outcome);
    }
    return outcomes;
}

std::vector<ShockOutcome> run_duration_sweep(
    const OperatorSet& ops, const ModelParams& params, const JumpParams& jumps,
    const AmplificationReport& report, const ShockSpec& base,
    const std::vector<double>& durations, const std::vector<std::uint64_t>& seeds,
    const Eigen::VectorXd& tau0) {
    if (durations.empty()) {
        throw ConfigError("duration sweep needs at least one duration");
    }
    std::vector<ShockOutcome> outcomes;
    outcomes.reserve(durations.size() * seeds.size());
    for (double duration : durations) {
        ShockSpec spec = base;
        spec.duration = duration;
        const std::vector<ShockOutcome> batch =
            run_shock_experiment(ops, params, jumps, report, spec, seeds, tau0);
        outcomes.insert(outcomes.end(), batch.begin(), batch.end());
    }
    return outcomes;
}

std::vector<ShockOutcome> run_shock_grid(
    const OperatorSet& ops, const ModelParams& params, const JumpParams& jumps,
    const AmplificationReport& report, const ShockSpec& base,
    const std::vector<double>& intensities,
    const std::vector<std::uint64_t>& seeds, const Eigen::VectorXd& tau0) {
    if (intensities.empty()) {
        throw ConfigError("shock grid needs at least one intensity");
    }
    std::vector<ShockOutcome> outcomes;
    outcomes.reserve(intensities.size() * seeds.size());
    for (double intensity : intensities) {
        ShockSpec spec = base;
        spec.intensity = intensity;
        const std::vector<ShockOutcome> batch =
            run_shock_experiment(ops, params, jumps, report, spec, seeds, tau0);
        outcomes.insert(outcomes.end(), batch.begin(), batch.end());
    }
    return outcomes;
}

std::vector<DurationSummary> summarize_durations(
    const std::vector<ShockOutcome>& outcomes) {
    std::vector<DurationSummary> summaries;
    std::vector<double> seen;
    for (const ShockOutcome& o : outcomes) {
        bool known = false;
        for (double d : seen) {
            if (d == o.duration) {
                known = true;
                break;
            }
        }
        if (known) {
            continue;
        }
        seen.push_back(o.duration);

        std::vector<double> terminals;
        int crossed = 0;
        int count = 0;
        for (const ShockOutcome& other : outcomes) {
            if (other.duration != o.duration) {
                continue;
            }
            terminals.push_back(other.terminal_mean);
            crossed += other.crossed ? 1 : 0;
            ++count;
        }
        DurationSummary summary;
        summary.duration = o.duration;
        summary.median_terminal = stats::median(terminals);
        summary.lower_quartile = stats::quantile(terminals, 0.25);
        summary.upper_quartile = stats::quantile(terminals, 0.75);
        summary.crossed_fraction = static_cast<double>(crossed) / count;
        summaries.push_back(summary);
    }
    return summaries;
}

ThresholdCheck threshold_check(const AmplificationReport& report,
                               const JumpParams& jumps,
                               const SourceSchedule& schedule, double tau0_mean) {
    jumps.validate();
    if (report.entries.empty()) {
        throw ConfigError("threshold check needs a non-empty amplification report");
    }
    const int n = static_cast<int>(report.entries.size());
    schedule.validate(n);

    ThresholdCheck check;
    for (const SourceWindow& window : schedule.windows()) {
        check.injected += (window.t_end - window.t_start) * window.intensity *
                          static_cast<double>(window.nodes.size());
    }
    check.mean_amplification = report.mean_total();
    check.lhs = check.injected * check.mean_amplification;
    check.gap = (jumps.tau_star - tau0_mean) * static_cast<double>(n);
    check.predicted_permanent = check.lhs > check.gap;
    return check;
}

void write_sweep_csv(const std::vector<ShockOutcome>& outcomes,
                     const std::string& path) {
    csv::Writer writer(path,
                       {"seed", "duration", "terminal_mean", "crossed",
                        "crossing_time"});
    for (const ShockOutcome& o : outcomes) {
        writer.row({std::to_string(o.seed), csv::format_double(o.duration),
                          csv::format_double(o.terminal_mean),
                          o.crossed ? "1" : "0",
                          csv::format_double(o.crossing_time)});
    }
}

void write_shock_grid_csv(const std::vector<ShockOutcome>& outcomes,
                          const std::string& path) {
    csv::Writer writer(path,
                       {"shock", "seed", "terminal_mean", "crossed",
                        "crossing_time", "frac_above_090", "frac_below_010"});
    for (const ShockOutcome& o : outcomes) {
        writer.row({csv::format_double(o.shock_intensity),
                          std::to_string(o.seed),
                          csv::format_double(o.terminal_mean),
                          o.crossed ? "1" : "0",
                          csv::format_double(o.crossing_time),
                          csv::format_double(o.frac_above_090),
                          csv::format_double(o.frac_below_010)});
    }
}

} // namespace adoptnet
