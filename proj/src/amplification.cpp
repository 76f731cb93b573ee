#include "adoptnet/amplification.hpp"

#include "adoptnet/csv.hpp"
#include "adoptnet/errors.hpp"
#include "adoptnet/stats.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace adoptnet {

namespace {

Eigen::MatrixXd stationary_system(const OperatorSet& ops, const ModelParams& params) {
    const Eigen::MatrixXd drift = drift_matrix(ops, params);
    const int n = static_cast<int>(drift.rows());
    Eigen::MatrixXd system =
        params.kappa * Eigen::MatrixXd::Identity(n, n) - drift;
    const double smallest = min_eigenvalue_sym(system);
    if (smallest <= 1e-12) {
        std::ostringstream msg;
        msg << "stationary system matrix is singular or indefinite (smallest "
               "eigenvalue "
            << smallest << "); reduce coupling rates or increase the decay rate";
        throw NumericError(msg.str());
    }
    return system;
}

void check_node(const OperatorSet& ops, int node) {
    const int n = static_cast<int>(ops.spatial.rows());
    if (node < 0 || node >= n) {
        std::ostringstream msg;
        msg << "node index " << node << " out of range [0, " << n << ")";
        throw ConfigError(msg.str());
    }
}

// Ratio of system-wide response to own response for a unit impulse at each
// node; column i of the inverse is the response profile for node i.
Eigen::VectorXd factors_from_inverse(const Eigen::MatrixXd& inverse) {
    const int n = static_cast<int>(inverse.rows());
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) {
        out[i] = inverse.col(i).sum() / inverse(i, i);
    }
    return out;
}

Eigen::MatrixXd checked_inverse(const OperatorSet& ops, const ModelParams& params) {
    const Eigen::MatrixXd system = stationary_system(ops, params);
    const int n = static_cast<int>(system.rows());
    return system.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
}

} // namespace

double amplification_factor(const OperatorSet& ops, const ModelParams& params,
                            int node) {
    check_node(ops, node);
    const Eigen::MatrixXd system = stationary_system(ops, params);
    const int n = static_cast<int>(system.rows());
    Eigen::VectorXd impulse = Eigen::VectorXd::Zero(n);
    impulse[node] = 1.0;
    const Eigen::VectorXd response = system.ldlt().solve(impulse);
    return response.sum() / response[node];
}

AmplificationComponents decompose(const OperatorSet& ops, const ModelParams& params,
                                  int node) {
    check_node(ops, node);

    ModelParams spatial_only = params;
    spatial_only.nu_n = 0.0;
    spatial_only.lambda_x = 0.0;

    ModelParams network_only = params;
    network_only.nu_s = 0.0;
    network_only.lambda_x = 0.0;

    AmplificationComponents parts;
    parts.total = amplification_factor(ops, params, node);
    parts.spatial = amplification_factor(ops, spatial_only, node) - 1.0;
    parts.network = amplification_factor(ops, network_only, node) - 1.0;
    parts.interaction = parts.total - 1.0 - parts.spatial - parts.network;
    return parts;
}

AmplificationReport build_report(const OperatorSet& ops, const ModelParams& params) {
    ModelParams spatial_only = params;
    spatial_only.nu_n = 0.0;
    spatial_only.lambda_x = 0.0;

    ModelParams network_only = params;
    network_only.nu_s = 0.0;
    network_only.lambda_x = 0.0;

    const Eigen::VectorXd totals = factors_from_inverse(checked_inverse(ops, params));
    const Eigen::VectorXd spatial =
        factors_from_inverse(checked_inverse(ops, spatial_only));
    const Eigen::VectorXd network =
        factors_from_inverse(checked_inverse(ops, network_only));

    const int n = static_cast<int>(totals.size());
    AmplificationReport report;
    report.entries.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        AmplificationEntry& entry = report.entries[static_cast<std::size_t>(i)];
        entry.node = i;
        entry.parts.total = totals[i];
        entry.parts.spatial = spatial[i] - 1.0;
        entry.parts.network = network[i] - 1.0;
        entry.parts.interaction =
            entry.parts.total - 1.0 - entry.parts.spatial - entry.parts.network;
    }

    const std::vector<int> order = report.ranked_nodes();
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        report.entries[static_cast<std::size_t>(order[pos])].rank =
            static_cast<int>(pos) + 1;
    }
    return report;
}

double AmplificationReport::mean_total() const {
    if (entries.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const AmplificationEntry& entry : entries) {
        sum += entry.parts.total;
    }
    return sum / static_cast<double>(entries.size());
}

std::vector<int> AmplificationReport::ranked_nodes() const {
    std::vector<int> order(entries.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [this](int a, int b) {
        const double ta = entries[static_cast<std::size_t>(a)].parts.total;
        const double tb = entries[static_cast<std::size_t>(b)].parts.total;
        if (ta != tb) {
            return ta > tb;
        }
        return a < b;
    });
    return order;
}

std::vector<int> AmplificationReport::top_nodes(int count) const {
    if (count < 0) {
        throw ConfigError("top_nodes count must be non-negative");
    }
    std::vector<int> order = ranked_nodes();
    if (static_cast<std::size_t>(count) < order.size()) {
        order.resize(static_cast<std::size_t>(count));
    }
    return order;
}

double validate_against_simulation(const OperatorSet& ops, const ModelParams& params,
                                   double t_end) {
    const Eigen::MatrixXd system = stationary_system(ops, params);
    const int n = static_cast<int>(system.rows());
    const Eigen::MatrixXd inverse =
        system.ldlt().solve(Eigen::MatrixXd::Identity(n, n));

    ModelParams sim = params;
    sim.t_end = t_end;

    std::vector<double> theory(static_cast<std::size_t>(n));
    std::vector<double> simulated(static_cast<std::size_t>(n));
    const SourceSchedule no_source;
    for (int i = 0; i < n; ++i) {
        // Total integrated response is 1/kappa for every impulse (mass
        // conservation), so the informative quantity is the ratio of system
        // response to own response.
        theory[static_cast<std::size_t>(i)] = inverse.col(i).sum() / inverse(i, i);

        Eigen::VectorXd impulse = Eigen::VectorXd::Zero(n);
        impulse[i] = 1.0;
        // Unclamped so the decaying impulse response matches the linear model.
        const Trajectory traj = integrate(ops, sim, no_source, impulse, false);
        double total_integral = 0.0;
        double own_integral = 0.0;
        for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
            total_integral += traj.states[k].sum() * sim.dt;
            own_integral += traj.states[k][i] * sim.dt;
        }
        simulated[static_cast<std::size_t>(i)] = total_integral / own_integral;
    }
    return stats::pearson(theory, simulated);
}

void write_amplification_csv(const AmplificationReport& report,
                             const std::string& path) {
    csv::Writer writer(path,
                       {"node", "total", "spatial", "network", "interaction", "rank"});
    for (const AmplificationEntry& entry : report.entries) {
        writer.row({std::to_string(entry.node),
                          csv::format_double(entry.parts.total),
                          csv::format_double(entry.parts.spatial),
                          csv::format_double(entry.parts.network),
                          csv::format_double(entry.parts.interaction),
                          std::to_string(entry.rank)});
    }
}

} // namespace adoptnet
