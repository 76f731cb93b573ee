#include "adoptnet/jumps.hpp"

#include "adoptnet/csv.hpp"
#include "adoptnet/errors.hpp"
#include "adoptnet/rng.hpp"

#include <cmath>
#include <vector>

namespace adoptnet {

JumpTarget parse_jump_target(const std::string& name) {
    if (name == "uniform_neighbor") {
        return JumpTarget::uniform_neighbor;
    }
    if (name == "weighted_neighbor") {
        return JumpTarget::weighted_neighbor;
    }
    throw ConfigError("unknown jump target '" + name +
                      "' (expected uniform_neighbor or weighted_neighbor)");
}

std::string to_string(JumpTarget target) {
    return target == JumpTarget::uniform_neighbor ? "uniform_neighbor" : "weighted_neighbor";
}

void JumpParams::validate() const {
    if (lambda0 < 0.0 || lambda1 < 0.0) {
        throw ConfigError("jump rates must be >= 0");
    }
    if (!(absorb_level > 0.0 && absorb_level <= 1.0)) {
        throw ConfigError("absorb_level must lie in (0,1], got " +
                          csv::format_double(absorb_level));
    }
}

namespace {

struct Neighbor {
    int node;
    double weight;
    double cumulative; // running sum for weighted draws
};

// Relationship neighbours per node, read off the relational operator's
// off-diagonal entries.
std::vector<std::vector<Neighbor>> neighbor_lists(const OperatorSet& ops) {
    const int n = ops.size();
    std::vector<std::vector<Neighbor>> lists(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) {
                continue;
            }
            const double w = ops.relational(i, j);
            if (w > 0.0) {
                acc += w;
                lists[i].push_back({j, w, acc});
            }
        }
    }
    return lists;
}

int draw_neighbor(const std::vector<Neighbor>& nbrs, JumpTarget target,
                  std::mt19937_64& eng) {
    if (target == JumpTarget::uniform_neighbor) {
        return nbrs[uniform_index(eng, nbrs.size())].node;
    }
    const double total = nbrs.back().cumulative;
    const double u = uniform01(eng) * total;
    for (const Neighbor& nb : nbrs) {
        if (u < nb.cumulative) {
            return nb.node;
        }
    }
    return nbrs.back().node;
}

} // namespace

Trajectory simulate_jump_diffusion(const OperatorSet& ops, const ModelParams& params,
                                   const JumpParams& jumps, const SourceSchedule& source,
                                   const Eigen::VectorXd& tau0, std::uint64_t seed) {
    params.validate();
    jumps.validate();
    const int n = ops.size();
    if (tau0.size() != n) {
        throw ConfigError("simulate_jump_diffusion: tau0 has size " +
                          std::to_string(tau0.size()) + ", operators have size " +
                          std::to_string(n));
    }
    source.validate(n);
    const double stable = max_stable_dt(ops, params);
    if (!(params.dt < stable)) {
        throw NumericError("unstable step size dt=" + csv::format_double(params.dt) +
                           "; the largest stable step for these operators is " +
                           csv::format_double(stable));
    }

    const Eigen::MatrixXd drift = drift_matrix(ops, params);
    const auto nbrs = neighbor_lists(ops);
    std::mt19937_64 eng = make_engine(seed);
    const long n_steps = static_cast<long>(std::ceil(params.t_end / params.dt - 1e-9));

    Trajectory traj;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);

    Eigen::VectorXd tau = tau0.cwiseMax(0.0).cwiseMin(1.0);
    std::vector<char> adopted(n, 0);

    // Nodes already at the absorption level are permanent from the start.
    if (jumps.absorbing) {
        for (int i = 0; i < n; ++i) {
            if (tau[i] >= jumps.absorb_level) {
                adopted[i] = 1;
                tau[i] = 1.0;
                traj.events.push_back({0.0, i, TrajectoryEvent::Kind::absorb,
                                       tau.mean() >= jumps.tau_star});
            }
        }
    }

    traj.times.push_back(0.0);
    traj.states.push_back(tau);

    Eigen::VectorXd source_now(n);
    for (long k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * params.dt;
        const double t_next = static_cast<double>(k + 1) * params.dt;

        // Drift, then re-pin permanent adopters: their state is final but
        // they keep pulling neighbours through the diffusion terms.
        source.fill(t, source_now);
        tau = euler_step(drift, params, tau, source_now, true);
        for (int i = 0; i < n; ++i) {
            if (adopted[i]) {
                tau[i] = 1.0;
            }
        }

        // Regime for this step, from the post-drift mean.
        const bool above = tau.mean() >= jumps.tau_star;
        const double rate = above ? jumps.lambda1 : jumps.lambda0;

        if (rate > 0.0) {
            const double fire_prob = 1.0 - std::exp(-rate * params.dt);
            for (int i = 0; i < n; ++i) {
                if (uniform01(eng) >= fire_prob) {
                    continue;
                }
                if (nbrs[i].empty()) {
                    continue; // no relationship partners: firing is a no-op
                }
                const int j = draw_neighbor(nbrs[i], jumps.target, eng);
                tau[i] = std::max(tau[i], tau[j]);
                traj.events.push_back({t_next, i, TrajectoryEvent::Kind::jump, above});
            }
        }

        if (jumps.absorbing) {
            for (int i = 0; i < n; ++i) {
                if (!adopted[i] && tau[i] >= jumps.absorb_level) {
                    adopted[i] = 1;
                    tau[i] = 1.0;
                    traj.events.push_back({t_next, i, TrajectoryEvent::Kind::absorb, above});
                }
            }
        }

        traj.times.push_back(t_next);
        traj.states.push_back(tau);
    }
    return traj;
}

RegimeReport regime_summary(const Trajectory& traj, const JumpParams& jumps) {
    RegimeReport report;
    if (traj.times.empty()) {
        return report;
    }
    const int n = traj.node_count();
    const double t_end = traj.times.back();

    std::optional<double> crossing = traj.first_mean_crossing(jumps.tau_star);
    report.crossed = crossing.has_value();
    report.crossing_time = crossing.value_or(t_end);

    const double t_cross = report.crossing_time;
    report.node_time_below = t_cross * n;
    report.node_time_above = (t_end - t_cross) * n;

    for (const TrajectoryEvent& e : traj.events) {
        if (e.kind != TrajectoryEvent::Kind::jump) {
            continue;
        }
        if (e.above_threshold) {
            ++report.jumps_above;
        } else {
            ++report.jumps_below;
        }
    }

    // Mean adoption velocity over each regime's span of the trajectory.
    const double mean_start = traj.states.front().mean();
    const double mean_end = traj.states.back().mean();
    if (report.crossed) {
        std::size_t k_cross = 0;
        while (traj.states[k_cross].mean() < jumps.tau_star) {
            ++k_cross;
        }
        const double mean_cross = traj.states[k_cross].mean();
        if (t_cross > 0.0) {
            report.velocity_below = (mean_cross - mean_start) / t_cross;
        }
        if (t_end > t_cross) {
            report.velocity_above = (mean_end - mean_cross) / (t_end - t_cross);
        }
    } else if (t_end > 0.0) {
        report.velocity_below = (mean_end - mean_start) / t_end;
    }
    return report;
}

} // namespace adoptnet
