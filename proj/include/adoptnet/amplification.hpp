#pragma once

#include "adoptnet/dynamics.hpp"
#include "adoptnet/graph.hpp"

#include <string>
#include <vector>

// Influence accounting: a unit impulse at one node produces a total
// time-integrated adoption across the system, computed in closed form from
// the stationary resolvent.  The ratio of system response to own response is
// the node's amplification factor; holding one diffusion channel at a time
// splits it into spatial, relational and interaction contributions.

namespace adoptnet {

struct AmplificationComponents {
    double total = 0.0;
    double spatial = 0.0;     // channel through geographic diffusion alone
    double network = 0.0;     // channel through relationship diffusion alone
    double interaction = 0.0; // remainder; negative when channels overlap
};

struct AmplificationEntry {
    int node = 0;
    AmplificationComponents parts;
    int rank = 0; // 1 = largest total
};

struct AmplificationReport {
    std::vector<AmplificationEntry> entries; // indexed by node

    double mean_total() const;
    // Node indices ordered by descending total (ties by node index).
    std::vector<int> ranked_nodes() const;
    std::vector<int> top_nodes(int count) const;
};

// Amplification factor for one node.  Throws NumericError (reporting the
// smallest eigenvalue) when the stationary system matrix is not positive
// definite.
double amplification_factor(const OperatorSet& ops, const ModelParams& params, int node);

// Channel split for one node: spatial and network parts are each the excess
// amplification with the other channels switched off; the interaction part
// is the remainder, so 1 + spatial + network + interaction = total exactly.
AmplificationComponents decompose(const OperatorSet& ops, const ModelParams& params,
                                  int node);

AmplificationReport build_report(const OperatorSet& ops, const ModelParams& params);

// Correlation between the closed-form totals and time-integrated adoption
// from unclamped unit-impulse simulations, one per node.
double validate_against_simulation(const OperatorSet& ops, const ModelParams& params,
                                   double t_end);

// CSV: "node,total,spatial,network,interaction,rank".
void write_amplification_csv(const AmplificationReport& report, const std::string& path);

} // namespace adoptnet
