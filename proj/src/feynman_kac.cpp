#include "adoptnet/feynman_kac.hpp"

#include "adoptnet/csv.hpp"
#include "adoptnet/errors.hpp"
#include "adoptnet/rng.hpp"

#include <algorithm>
#include <cmath>

namespace adoptnet {

WalkGenerator make_walk_generator(const OperatorSet& ops, const ModelParams& params) {
    params.validate();
    const int n = ops.size();
    Eigen::MatrixXd q = drift_matrix(ops, params);
    double worst = 0.0;
    int worst_i = -1;
    int worst_j = -1;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && q(i, j) < worst) {
                worst = q(i, j);
                worst_i = i;
                worst_j = j;
            }
        }
    }
    if (worst < -1e-9) {
        throw NumericError("drift operator is not a walk generator: entry (" +
                           std::to_string(worst_i) + "," + std::to_string(worst_j) +
                           ") = " + csv::format_double(worst) +
                           " is negative; rerun with lambda_x = 0");
    }
    WalkGenerator gen;
    gen.rates = q;
    gen.holding = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            gen.rates(i, j) = std::max(0.0, gen.rates(i, j));
            row += gen.rates(i, j);
        }
        gen.rates(i, i) = -row;
        gen.holding[i] = row;
    }
    return gen;
}

namespace {

struct Transition {
    int node;
    double cumulative;
};

std::vector<std::vector<Transition>> transition_lists(const Eigen::MatrixXd& rates) {
    const int n = static_cast<int>(rates.rows());
    std::vector<std::vector<Transition>> lists(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j != i && rates(i, j) > 0.0) {
                acc += rates(i, j);
                lists[i].push_back({j, acc});
            }
        }
    }
    return lists;
}

int draw_transition(const std::vector<Transition>& list, std::mt19937_64& eng) {
    const double u = uniform01(eng) * list.back().cumulative;
    for (const Transition& tr : list) {
        if (u < tr.cumulative) {
            return tr.node;
        }
    }
    return list.back().node;
}

// Discounted source integral along a holding interval: the walk sits at
// `node` for walk-times sigma in [a, b], which correspond to physical times
// t - sigma, so each piecewise-constant window contributes a closed-form
// slice of exp(-kappa sigma).
double discounted_source(const SourceSchedule& source, int node, double t, double kappa,
                         double a, double b) {
    double acc = 0.0;
    for (const SourceWindow& win : source.windows()) {
        if (win.intensity == 0.0 ||
            std::find(win.nodes.begin(), win.nodes.end(), node) == win.nodes.end()) {
            continue;
        }
        const double lo = std::max(a, t - win.t_end);
        const double hi = std::min(b, t - win.t_start);
        if (hi > lo) {
            acc += win.intensity * (std::exp(-kappa * lo) - std::exp(-kappa * hi)) / kappa;
        }
    }
    return acc;
}

struct PathConfig {
    double kappa;
    double t;
    int start;
    double jump_rate;                           // extra relocation rate, 0 for none
    const std::vector<std::vector<Transition>>* walk_moves;
    const std::vector<std::vector<Transition>>* jump_moves; // may be null
};

double sample_path_value(const PathConfig& cfg, const WalkGenerator& gen,
                         const SourceSchedule& source, const Eigen::VectorXd& tau0,
                         std::mt19937_64& eng) {
    int v = cfg.start;
    double sigma = 0.0;
    double acc = 0.0;
    while (sigma < cfg.t) {
        const double walk_rate = gen.holding[v];
        const double total = walk_rate + cfg.jump_rate;
        double segment_end = cfg.t;
        bool moved = false;
        bool relocation = false;
        if (total > 0.0) {
            const double u = 1.0 - uniform01(eng); // in (0,1]
            const double hold = -std::log(u) / total;
            if (sigma + hold < cfg.t) {
                segment_end = sigma + hold;
                moved = true;
                relocation = cfg.jump_rate > 0.0 &&
                             uniform01(eng) * total >= walk_rate;
            }
        }
        acc += discounted_source(source, v, cfg.t, cfg.kappa, sigma, segment_end);
        sigma = segment_end;
        if (moved) {
            if (relocation) {
                const auto& options = (*cfg.jump_moves)[v];
                if (!options.empty()) {
                    v = draw_transition(options, eng);
                }
            } else {
                v = draw_transition((*cfg.walk_moves)[v], eng);
            }
        }
    }
    return acc + std::exp(-cfg.kappa * cfg.t) * tau0[v];
}

FkEstimate run_paths(const PathConfig& cfg, const WalkGenerator& gen,
                     const SourceSchedule& source, const Eigen::VectorXd& tau0,
                     long n_paths, std::uint64_t seed) {
    // Welford's update: stable when the per-path values are (nearly) equal,
    // where the textbook sum-of-squares formula cancels catastrophically.
    double mean = 0.0;
    double m2 = 0.0;
    for (long p = 0; p < n_paths; ++p) {
        std::mt19937_64 eng = make_engine(seed, static_cast<std::uint64_t>(p) + 1);
        const double x = sample_path_value(cfg, gen, source, tau0, eng);
        const double delta = x - mean;
        mean += delta / static_cast<double>(p + 1);
        m2 += delta * (x - mean);
    }
    FkEstimate est;
    est.n_paths = n_paths;
    est.value = mean;
    const double var = std::max(0.0, m2 / static_cast<double>(n_paths - 1));
    est.std_error = std::sqrt(var / static_cast<double>(n_paths));
    return est;
}

void check_estimate_args(const WalkGenerator& gen, double kappa,
                         const SourceSchedule& source, const Eigen::VectorXd& tau0,
                         int node, double t, long n_paths) {
    const int n = gen.size();
    if (tau0.size() != n) {
        throw ConfigError("estimate: tau0 has size " + std::to_string(tau0.size()) +
                          ", generator has size " + std::to_string(n));
    }
    if (node < 0 || node >= n) {
        throw ConfigError("estimate: node " + std::to_string(node) + " out of range [0," +
                          std::to_string(n - 1) + "]");
    }
    if (!(t > 0.0)) {
        throw ConfigError("estimate: t must be > 0");
    }
    if (!(kappa > 0.0)) {
        throw ConfigError("estimate: kappa must be > 0");
    }
    if (n_paths < 100) {
        throw ConfigError("estimate: n_paths must be >= 100, got " + std::to_string(n_paths));
    }
    source.validate(n);
}

} // namespace

FkEstimate estimate(const WalkGenerator& gen, double kappa, const SourceSchedule& source,
                    const Eigen::VectorXd& tau0, int node, double t, long n_paths,
                    std::uint64_t seed) {
    check_estimate_args(gen, kappa, source, tau0, node, t, n_paths);
    const auto moves = transition_lists(gen.rates);
    PathConfig cfg{kappa, t, node, 0.0, &moves, nullptr};
    return run_paths(cfg, gen, source, tau0, n_paths, seed);
}

FkEstimate estimate_with_node_jumps(const WalkGenerator& gen, double kappa,
                                    const SourceSchedule& source, const Eigen::VectorXd& tau0,
                                    int node, double t, long n_paths, std::uint64_t seed,
                                    double jump_rate, const Eigen::MatrixXd& adjacency) {
    check_estimate_args(gen, kappa, source, tau0, node, t, n_paths);
    if (jump_rate < 0.0) {
        throw ConfigError("estimate: jump_rate must be >= 0");
    }
    if (adjacency.rows() != gen.size() || adjacency.cols() != gen.size()) {
        throw ConfigError("estimate: adjacency shape does not match the generator");
    }
    const auto moves = transition_lists(gen.rates);
    const auto jumps = transition_lists(adjacency);
    PathConfig cfg{kappa, t, node, jump_rate, &moves, &jumps};
    return run_paths(cfg, gen, source, tau0, n_paths, seed);
}

std::vector<double> discrete_weights(double kappa, double dt, int steps) {
    if (steps < 1 || !(dt > 0.0) || !(kappa > 0.0)) {
        throw ConfigError("discrete_weights: need steps >= 1, dt > 0, kappa > 0");
    }
    std::vector<double> w(steps);
    for (int s = 0; s < steps; ++s) {
        w[s] = std::pow(1.0 - kappa * dt, steps - s);
    }
    return w;
}

} // namespace adoptnet
