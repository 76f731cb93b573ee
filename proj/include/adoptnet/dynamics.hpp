#pragma once

#include "adoptnet/graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Deterministic adoption dynamics: linear diffusion over the operator set,
// exponential abandonment, and scheduled exogenous pushes, advanced with a
// stability-checked explicit Euler step and clamped to the unit interval.

namespace adoptnet {

struct ModelParams {
    double nu_s = 0.5;     // spatial diffusion coefficient, >= 0
    double nu_n = 0.8;     // relational diffusion coefficient, >= 0
    double lambda_x = 0.3; // cross-layer coefficient (any sign)
    double kappa = 0.15;   // abandonment rate, > 0
    double dt = 0.01;      // step size, > 0
    double t_end = 10.0;   // horizon, > 0

    void validate() const; // throws ConfigError on out-of-range values
};

// Assembled drift matrix nu_s S + nu_n R + lambda X.
Eigen::MatrixXd drift_matrix(const OperatorSet& ops, const ModelParams& params);

// Largest stable Euler step for these operators and parameters.
double max_stable_dt(const OperatorSet& ops, const ModelParams& params);

// Piecewise-constant exogenous input: each window pushes a node set with a
// constant per-time intensity over [t_start, t_end).
struct SourceWindow {
    double t_start = 0.0;
    double t_end = 0.0;
    std::vector<int> nodes;
    double intensity = 0.0;
};

class SourceSchedule {
public:
    SourceSchedule() = default;
    explicit SourceSchedule(std::vector<SourceWindow> windows);

    void add(const SourceWindow& window);
    const std::vector<SourceWindow>& windows() const { return windows_; }
    bool empty() const { return windows_.empty(); }

    // Throws ConfigError if any window has t_start >= t_end, a negative
    // intensity, or a node index outside [0, n).
    void validate(int n) const;

    double value(int node, double t) const;
    void fill(double t, Eigen::VectorXd& out) const; // out sized n, overwritten
    double total_intensity(double t) const;          // sum over nodes at time t
    double latest_end() const;

private:
    std::vector<SourceWindow> windows_;
};

struct TrajectoryEvent {
    enum class Kind { jump, absorb };
    double time = 0.0;
    int node = -1;
    Kind kind = Kind::jump;
    bool above_threshold = false; // regime at the moment the event fired
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    std::vector<TrajectoryEvent> events;

    int node_count() const { return states.empty() ? 0 : static_cast<int>(states[0].size()); }
    std::size_t step_count() const { return times.size(); }
    double mean_at(std::size_t idx) const { return states[idx].mean(); }
    const Eigen::VectorXd& final_state() const { return states.back(); }
    double final_mean() const { return states.back().mean(); }

    // First time the cross-node mean reaches `level`, if it ever does.
    std::optional<double> first_mean_crossing(double level) const;
};

// One explicit Euler step: tau + dt (A tau - kappa tau + s).  `clamp` keeps
// the result inside [0,1] componentwise.  Shared by the deterministic and
// stochastic integrators so the drift arithmetic is identical in both.
Eigen::VectorXd euler_step(const Eigen::MatrixXd& drift, const ModelParams& params,
                           const Eigen::VectorXd& tau, const Eigen::VectorXd& source_now,
                           bool clamp);

// Integrates from tau0 over [0, t_end], recording every step (including the
// initial state).  Throws NumericError if dt violates the stability bound,
// reporting the largest admissible step.
Trajectory integrate(const OperatorSet& ops, const ModelParams& params,
                     const SourceSchedule& source, const Eigen::VectorXd& tau0,
                     bool clamp = true);

// Solves (kappa I - A) tau = s for the stationary profile.  Throws
// NumericError (reporting the smallest eigenvalue) if the system matrix is
// singular or indefinite.
Eigen::VectorXd steady_state(const OperatorSet& ops, const ModelParams& params,
                             const Eigen::VectorXd& source);

// Sampled long-run variance of the scalar mean-reverting process
// d tau = -kappa tau dt + sigma dB, for comparison against sigma^2/(2 kappa).
double ou_stationary_variance(double kappa, double sigma, double horizon, double dt,
                              std::uint64_t seed);

// Long-format trajectory export: "t,node,tau" / events: "t,node,kind,regime".
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
void write_events_csv(const Trajectory& traj, const std::string& path);

} // namespace adoptnet
