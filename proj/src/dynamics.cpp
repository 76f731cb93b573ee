#include "adoptnet/dynamics.hpp"

#include "adoptnet/csv.hpp"
#include "adoptnet/errors.hpp"
#include "adoptnet/rng.hpp"

#include <algorithm>
#include <cmath>

namespace adoptnet {

void ModelParams::validate() const {
    if (nu_s < 0.0) {
        throw ConfigError("nu_s must be >= 0, got " + csv::format_double(nu_s));
    }
    if (nu_n < 0.0) {
        throw ConfigError("nu_n must be >= 0, got " + csv::format_double(nu_n));
    }
    if (!(kappa > 0.0)) {
        throw ConfigError("kappa must be > 0, got " + csv::format_double(kappa));
    }
    if (!(dt > 0.0)) {
        throw ConfigError("dt must be > 0, got " + csv::format_double(dt));
    }
    if (!(t_end > 0.0)) {
        throw ConfigError("t_end must be > 0, got " + csv::format_double(t_end));
    }
}

Eigen::MatrixXd drift_matrix(const OperatorSet& ops, const ModelParams& params) {
    return params.nu_s * ops.spatial + params.nu_n * ops.relational +
           params.lambda_x * ops.cross;
}

double max_stable_dt(const OperatorSet& ops, const ModelParams& params) {
    const double radius = spectral_radius_sym(drift_matrix(ops, params));
    return 2.0 / (params.kappa + radius);
}

SourceSchedule::SourceSchedule(std::vector<SourceWindow> windows)
    : windows_(std::move(windows)) {}

void SourceSchedule::add(const SourceWindow& window) {
    windows_.push_back(window);
}

void SourceSchedule::validate(int n) const {
    for (std::size_t w = 0; w < windows_.size(); ++w) {
        const SourceWindow& win = windows_[w];
        if (!(win.t_start < win.t_end)) {
            throw ConfigError("source window " + std::to_string(w) +
                              ": t_start must be < t_end");
        }
        if (win.intensity < 0.0) {
            throw ConfigError("source window " + std::to_string(w) +
                              ": intensity must be >= 0");
        }
        for (int node : win.nodes) {
            if (node < 0 || node >= n) {
                throw ConfigError("source window " + std::to_string(w) + ": node " +
                                  std::to_string(node) + " out of range [0," +
                                  std::to_string(n - 1) + "]");
            }
        }
    }
}

double SourceSchedule::value(int node, double t) const {
    double v = 0.0;
    for (const SourceWindow& win : windows_) {
        if (t >= win.t_start && t < win.t_end &&
            std::find(win.nodes.begin(), win.nodes.end(), node) != win.nodes.end()) {
            v += win.intensity;
        }
    }
    return v;
}

void SourceSchedule::fill(double t, Eigen::VectorXd& out) const {
    out.setZero();
    for (const SourceWindow& win : windows_) {
        if (t >= win.t_start && t < win.t_end) {
            for (int node : win.nodes) {
                out[node] += win.intensity;
            }
        }
    }
}

double SourceSchedule::total_intensity(double t) const {
    double v = 0.0;
    for (const SourceWindow& win : windows_) {
        if (t >= win.t_start && t < win.t_end) {
            v += win.intensity * static_cast<double>(win.nodes.size());
        }
    }
    return v;
}

double SourceSchedule::latest_end() const {
    double latest = 0.0;
    for (const SourceWindow& win : windows_) {
        latest = std::max(latest, win.t_end);
    }
    return latest;
}

std::optional<double> Trajectory::first_mean_crossing(double level) const {
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (states[k].mean() >= level) {
            return times[k];
        }
    }
    return std::nullopt;
}

Eigen::VectorXd euler_step(const Eigen::MatrixXd& drift, const ModelParams& params,
                           const Eigen::VectorXd& tau, const Eigen::VectorXd& source_now,
                           bool clamp) {
    Eigen::VectorXd next =
        tau + params.dt * (drift * tau - params.kappa * tau + source_now);
    if (clamp) {
        next = next.cwiseMax(0.0).cwiseMin(1.0);
    }
    return next;
}

namespace {

void check_stability(const OperatorSet& ops, const ModelParams& params) {
    const double bound = max_stable_dt(ops, params);
    if (!(params.dt < bound)) {
        throw NumericError("unstable step size dt=" + csv::format_double(params.dt) +
                           "; the largest stable step for these operators is " +
                           csv::format_double(bound));
    }
}

} // namespace

Trajectory integrate(const OperatorSet& ops, const ModelParams& params,
                     const SourceSchedule& source, const Eigen::VectorXd& tau0,
                     bool clamp) {
    params.validate();
    const int n = ops.size();
    if (tau0.size() != n) {
        throw ConfigError("integrate: tau0 has size " + std::to_string(tau0.size()) +
                          ", operators have size " + std::to_string(n));
    }
    source.validate(n);
    check_stability(ops, params);

    const Eigen::MatrixXd drift = drift_matrix(ops, params);
    const long n_steps = static_cast<long>(std::ceil(params.t_end / params.dt - 1e-9));

    Trajectory traj;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    Eigen::VectorXd tau = tau0;
    if (clamp) {
        tau = tau.cwiseMax(0.0).cwiseMin(1.0);
    }
    traj.times.push_back(0.0);
    traj.states.push_back(tau);

    Eigen::VectorXd source_now(n);
    for (long k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * params.dt;
        source.fill(t, source_now);
        tau = euler_step(drift, params, tau, source_now, clamp);
        traj.times.push_back(static_cast<double>(k + 1) * params.dt);
        traj.states.push_back(tau);
    }
    return traj;
}

Eigen::VectorXd steady_state(const OperatorSet& ops, const ModelParams& params,
                             const Eigen::VectorXd& source) {
    params.validate();
    const int n = ops.size();
    if (source.size() != n) {
        throw ConfigError("steady_state: source has size " + std::to_string(source.size()) +
                          ", operators have size " + std::to_string(n));
    }
    const Eigen::MatrixXd system =
        params.kappa * Eigen::MatrixXd::Identity(n, n) - drift_matrix(ops, params);
    const double smallest = min_eigenvalue_sym(system);
    if (smallest <= 1e-12) {
        throw NumericError("stationary system matrix is singular or indefinite "
                           "(smallest eigenvalue " +
                           csv::format_double(smallest) + ")");
    }
    return system.ldlt().solve(source);
}

double ou_stationary_variance(double kappa, double sigma, double horizon, double dt,
                              std::uint64_t seed) {
    if (!(kappa > 0.0) || !(dt > 0.0) || !(horizon > dt)) {
        throw ConfigError("ou_stationary_variance: need kappa > 0, dt > 0, horizon > dt");
    }
    std::mt19937_64 eng = make_engine(seed);
    const long n_steps = static_cast<long>(horizon / dt);
    const double burn_time = std::min(horizon * 0.1, 20.0 / kappa);
    const long burn = static_cast<long>(burn_time / dt);
    const double noise_scale = sigma * std::sqrt(dt);

    double x = 0.0;
    double sum = 0.0;
    double sum_sq = 0.0;
    long count = 0;
    for (long k = 0; k < n_steps; ++k) {
        x += -kappa * x * dt + noise_scale * normal01(eng);
        if (k >= burn) {
            sum += x;
            sum_sq += x * x;
            ++count;
        }
    }
    const double mean = sum / static_cast<double>(count);
    return sum_sq / static_cast<double>(count) - mean * mean;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    csv::Writer out(path, {"t", "node", "tau"});
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        for (int i = 0; i < traj.states[k].size(); ++i) {
            out.row({csv::format_double(traj.times[k]), std::to_string(i),
                     csv::format_double(traj.states[k][i])});
        }
    }
}

void write_events_csv(const Trajectory& traj, const std::string& path) {
    csv::Writer out(path, {"t", "node", "kind", "regime"});
    for (const TrajectoryEvent& e : traj.events) {
        out.row({csv::format_double(e.time), std::to_string(e.node),
                 e.kind == TrajectoryEvent::Kind::jump ? "jump" : "absorb",
                 e.above_threshold ? "above" : "below"});
    }
}

} // namespace adoptnet
