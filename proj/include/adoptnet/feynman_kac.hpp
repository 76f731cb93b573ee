#pragma once

#include "adoptnet/dynamics.hpp"
#include "adoptnet/graph.hpp"

#include <cstdint>
#include <vector>

// Probabilistic solver: node values are recovered as discounted expectations
// over continuous-time random walks whose generator is the assembled drift
// operator.  Valid whenever that operator has nonnegative off-diagonal
// entries (a proper jump-chain generator).

namespace adoptnet {

struct WalkGenerator {
    Eigen::MatrixXd rates;   // generator matrix: off-diagonal >= 0, rows sum to 0
    Eigen::VectorXd holding; // holding rate per node (= -diagonal)

    int size() const { return static_cast<int>(rates.rows()); }
};

// Assembles the walk generator from the operators.  Off-diagonal entries more
// negative than -1e-9 mean the drift is not a valid jump-chain generator
// (the cross-layer term can push entries negative); construction then fails
// with a NumericError suggesting lambda_x = 0.  Entries in [-1e-9, 0) are
// rounded up to zero and the diagonal is recomputed so rows sum exactly to 0.
WalkGenerator make_walk_generator(const OperatorSet& ops, const ModelParams& params);

struct FkEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
};

// Monte Carlo estimate of the node's value at time t: discounted terminal
// condition plus the exactly-integrated discounted source along each sampled
// walk.  Paths are seeded by (seed, path index), so results do not depend on
// evaluation order.  Requires n_paths >= 100.
FkEstimate estimate(const WalkGenerator& gen, double kappa, const SourceSchedule& source,
                    const Eigen::VectorXd& tau0, int node, double t, long n_paths,
                    std::uint64_t seed);

// Same estimator with compound-Poisson node jumps layered onto the walk:
// at rate jump_rate the walk relocates to a uniformly drawn relationship
// neighbour (no-op for nodes without neighbours).  jump_rate = 0 reduces to
// the plain estimator.
FkEstimate estimate_with_node_jumps(const WalkGenerator& gen, double kappa,
                                    const SourceSchedule& source, const Eigen::VectorXd& tau0,
                                    int node, double t, long n_paths, std::uint64_t seed,
                                    double jump_rate, const Eigen::MatrixXd& adjacency);

// Discrete-time discount weights for a step-dt chain over `steps` steps:
// weight (1 - kappa dt)^(steps - s) applied to the source at step s.
std::vector<double> discrete_weights(double kappa, double dt, int steps);

} // namespace adoptnet
