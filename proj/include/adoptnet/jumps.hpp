#pragma once

#include "adoptnet/dynamics.hpp"
#include "adoptnet/graph.hpp"

#include <cstdint>
#include <optional>

// Stochastic contagion layer on top of the deterministic drift: nodes fire
// Poisson-thinned copy events along relationship edges, the firing rate
// switches between a quiet and an excited level when mean adoption crosses
// the critical-mass threshold, and nodes that reach the absorption level
// become permanent adopters.

namespace adoptnet {

enum class JumpTarget { uniform_neighbor, weighted_neighbor };

JumpTarget parse_jump_target(const std::string& name);
std::string to_string(JumpTarget target);

struct JumpParams {
    double lambda0 = 0.0;      // firing rate below threshold, >= 0
    double lambda1 = 0.0;      // firing rate at or above threshold, >= 0
    double tau_star = 0.35;    // critical-mass threshold on the cross-node mean
    JumpTarget target = JumpTarget::uniform_neighbor;
    double absorb_level = 0.95; // adoption becomes permanent at this level, in (0,1]
    bool absorbing = true;

    void validate() const;
};

// Simulates the jump-diffusion path over [0, t_end].  Each step applies the
// shared Euler drift (clamped), then any fired copy events
// tau_i <- max(tau_i, tau_j) with j drawn from the node's relationship
// neighbours, then the absorption scan.  Absorbed nodes are pinned at 1 and
// no longer decay or drift; they still influence and fire (their copies are
// no-ops), so per-node firing statistics stay at the nominal rate.  With
// lambda0 = lambda1 = 0 and no absorption the path reproduces
// dynamics::integrate bit-for-bit.
Trajectory simulate_jump_diffusion(const OperatorSet& ops, const ModelParams& params,
                                   const JumpParams& jumps, const SourceSchedule& source,
                                   const Eigen::VectorXd& tau0, std::uint64_t seed);

struct RegimeReport {
    bool crossed = false;
    double crossing_time = 0.0;   // meaningful only when crossed
    long jumps_below = 0;         // copy events fired in each regime
    long jumps_above = 0;
    double node_time_below = 0.0; // node-time spent in each regime
    double node_time_above = 0.0;
    double velocity_below = 0.0;  // mean d(mean adoption)/dt per regime
    double velocity_above = 0.0;
};

RegimeReport regime_summary(const Trajectory& traj, const JumpParams& jumps);

} // namespace adoptnet
