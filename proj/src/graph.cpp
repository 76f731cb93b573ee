#include "adoptnet/graph.hpp"

#include "adoptnet/csv.hpp"
#include "adoptnet/errors.hpp"
#include "adoptnet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace adoptnet {

namespace {

void check_square_sym(const Eigen::MatrixXd& m, int n, const char* what) {
    if (m.rows() != n || m.cols() != n) {
        throw ConfigError(std::string(what) + " must be " + std::to_string(n) + "x" +
                          std::to_string(n));
    }
    for (int i = 0; i < n; ++i) {
        if (m(i, i) != 0.0) {
            throw ConfigError(std::string(what) + " must have a zero diagonal");
        }
        for (int j = i + 1; j < n; ++j) {
            if (m(i, j) < 0.0 || m(j, i) < 0.0) {
                throw ConfigError(std::string(what) + " must be nonnegative");
            }
            if (std::abs(m(i, j) - m(j, i)) > 1e-12 * std::max(1.0, std::abs(m(i, j)))) {
                throw ConfigError(std::string(what) + " must be symmetric");
            }
        }
    }
}

Eigen::MatrixXd draw_coords(int n, std::mt19937_64& eng) {
    Eigen::MatrixXd coords(n, 2);
    for (int i = 0; i < n; ++i) {
        coords(i, 0) = uniform01(eng);
        coords(i, 1) = uniform01(eng);
    }
    return coords;
}

Eigen::MatrixXd random_adjacency(int n, double p, std::mt19937_64& eng) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (uniform01(eng) < p) {
                g(i, j) = g(j, i) = 1.0;
            }
        }
    }
    return g;
}

// Preferential attachment: a seed pair plus one node at a time, each new node
// linking to `m` distinct existing nodes chosen proportionally to degree.
Eigen::MatrixXd scale_free_adjacency(int n, int m, std::mt19937_64& eng) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    std::vector<int> endpoints; // each edge contributes both endpoints
    g(0, 1) = g(1, 0) = 1.0;
    endpoints.push_back(0);
    endpoints.push_back(1);
    for (int v = 2; v < n; ++v) {
        const int want = std::min(m, v);
        std::vector<int> picked;
        while (static_cast<int>(picked.size()) < want) {
            const int target = endpoints[uniform_index(eng, endpoints.size())];
            if (std::find(picked.begin(), picked.end(), target) == picked.end()) {
                picked.push_back(target);
            }
        }
        for (int target : picked) {
            g(v, target) = g(target, v) = 1.0;
            endpoints.push_back(v);
            endpoints.push_back(target);
        }
    }
    return g;
}

// Indices of the k geographically nearest nodes to `i`, ties broken by index.
std::vector<int> nearest_neighbors(const Eigen::MatrixXd& coords, int i, int k) {
    const int n = static_cast<int>(coords.rows());
    std::vector<std::pair<double, int>> dist;
    dist.reserve(n - 1);
    for (int j = 0; j < n; ++j) {
        if (j == i) {
            continue;
        }
        const double d = (coords.row(i) - coords.row(j)).norm();
        dist.emplace_back(d, j);
    }
    std::sort(dist.begin(), dist.end());
    std::vector<int> out;
    const int take = std::min<int>(k, static_cast<int>(dist.size()));
    for (int t = 0; t < take; ++t) {
        out.push_back(dist[t].second);
    }
    return out;
}

Eigen::MatrixXd clustered_adjacency(const Eigen::MatrixXd& coords, int k) {
    const int n = static_cast<int>(coords.rows());
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j : nearest_neighbors(coords, i, k)) {
            g(i, j) = g(j, i) = 1.0;
        }
    }
    return g;
}

std::string params_summary(NetworkKind kind, int n, const GeneratorParams& p) {
    switch (kind) {
    case NetworkKind::random:
        return "random(n=" + std::to_string(n) + ", edge_prob=" + csv::format_double(p.edge_prob) + ")";
    case NetworkKind::scale_free:
        return "scale_free(n=" + std::to_string(n) + ", attach_count=" + std::to_string(p.attach_count) + ")";
    case NetworkKind::clustered:
        return "clustered(n=" + std::to_string(n) + ", neighbor_count=" + std::to_string(p.neighbor_count) + ")";
    }
    return "unknown";
}

// Graph Laplacian acting as (L tau)_i = sum_j w_ij (tau_j - tau_i).
Eigen::MatrixXd weights_to_laplacian(const Eigen::MatrixXd& w) {
    Eigen::MatrixXd lap = w;
    for (int i = 0; i < w.rows(); ++i) {
        lap(i, i) = -w.row(i).sum();
    }
    return lap;
}

} // namespace

void SpatialNetwork::validate() const {
    if (n < 2) {
        throw ConfigError("network must have at least 2 nodes, got " + std::to_string(n));
    }
    if (coords.rows() != n || coords.cols() != 2) {
        throw ConfigError("coords must be n x 2");
    }
    check_square_sym(adjacency, n, "adjacency");
    check_square_sym(spatial_weights, n, "spatial_weights");
}

int SpatialNetwork::degree(int node) const {
    int d = 0;
    for (int j = 0; j < n; ++j) {
        if (adjacency(node, j) > 0.0) {
            ++d;
        }
    }
    return d;
}

bool SpatialNetwork::is_connected() const {
    if (n == 0) {
        return false;
    }
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (int j = 0; j < n; ++j) {
            if (!seen[j] && adjacency(v, j) > 0.0) {
                seen[j] = 1;
                ++count;
                q.push(j);
            }
        }
    }
    return count == n;
}

NetworkKind parse_network_kind(const std::string& name) {
    if (name == "random") {
        return NetworkKind::random;
    }
    if (name == "scale_free") {
        return NetworkKind::scale_free;
    }
    if (name == "clustered") {
        return NetworkKind::clustered;
    }
    throw ConfigError("unknown network kind '" + name + "' (expected random, scale_free or clustered)");
}

std::string to_string(NetworkKind kind) {
    switch (kind) {
    case NetworkKind::random:
        return "random";
    case NetworkKind::scale_free:
        return "scale_free";
    case NetworkKind::clustered:
        return "clustered";
    }
    return "unknown";
}

SpatialNetwork generate_network(NetworkKind kind, int n, const GeneratorParams& params,
                                std::uint64_t seed) {
    if (n < 2) {
        throw ConfigError("generate_network: n must be >= 2, got " + std::to_string(n));
    }
    switch (kind) {
    case NetworkKind::random:
        if (!(params.edge_prob > 0.0 && params.edge_prob <= 1.0)) {
            throw ConfigError("generate_network: edge_prob must lie in (0,1], got " +
                              csv::format_double(params.edge_prob));
        }
        break;
    case NetworkKind::scale_free:
        if (params.attach_count < 1) {
            throw ConfigError("generate_network: attach_count must be >= 1");
        }
        break;
    case NetworkKind::clustered:
        if (params.neighbor_count < 1) {
            throw ConfigError("generate_network: neighbor_count must be >= 1");
        }
        break;
    }

    for (int attempt = 0; attempt < 100; ++attempt) {
        std::mt19937_64 eng = make_engine(seed, static_cast<std::uint64_t>(attempt));
        SpatialNetwork net;
        net.n = n;
        net.coords = draw_coords(n, eng);
        switch (kind) {
        case NetworkKind::random:
            net.adjacency = random_adjacency(n, params.edge_prob, eng);
            break;
        case NetworkKind::scale_free:
            net.adjacency = scale_free_adjacency(n, params.attach_count, eng);
            break;
        case NetworkKind::clustered:
            net.adjacency = clustered_adjacency(net.coords, params.neighbor_count);
            break;
        }
        if (net.is_connected()) {
            // Default geographic weights; build_operators refreshes them for
            // whichever kernel the caller actually uses.
            net.spatial_weights = Eigen::MatrixXd::Zero(n, n);
            SpatialKernel def = SpatialKernel::knn(4);
            OperatorSet ignored = build_operators(net, def);
            (void)ignored;
            return net;
        }
    }
    throw ConfigError("generate_network: no connected instance after 100 attempts for " +
                      params_summary(kind, n, params));
}

SpatialKernel SpatialKernel::knn(int k, double scale) {
    SpatialKernel s;
    s.kind = Kind::knn;
    s.k = k;
    s.scale = scale;
    return s;
}

SpatialKernel SpatialKernel::gaussian(double bandwidth, double scale) {
    SpatialKernel s;
    s.kind = Kind::gaussian;
    s.bandwidth = bandwidth;
    s.scale = scale;
    return s;
}

OperatorSet build_operators(SpatialNetwork& net, const SpatialKernel& kernel) {
    net.validate();
    if (!(kernel.scale > 0.0)) {
        throw ConfigError("spatial kernel: weight scale must be > 0, got " +
                          csv::format_double(kernel.scale));
    }
    const int n = net.n;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    switch (kernel.kind) {
    case SpatialKernel::Kind::knn: {
        if (kernel.k < 1) {
            throw ConfigError("spatial kernel: knn neighbour count must be >= 1");
        }
        for (int i = 0; i < n; ++i) {
            for (int j : nearest_neighbors(net.coords, i, kernel.k)) {
                w(i, j) = w(j, i) = kernel.scale;
            }
        }
        break;
    }
    case SpatialKernel::Kind::gaussian: {
        if (!(kernel.bandwidth > 0.0)) {
            throw ConfigError("spatial kernel: gaussian bandwidth must be > 0, got " +
                              csv::format_double(kernel.bandwidth));
        }
        const double denom = 2.0 * kernel.bandwidth * kernel.bandwidth;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double d2 = (net.coords.row(i) - net.coords.row(j)).squaredNorm();
                w(i, j) = w(j, i) = kernel.scale * std::exp(-d2 / denom);
            }
        }
        break;
    }
    }
    net.spatial_weights = w;

    OperatorSet ops;
    ops.spatial = weights_to_laplacian(w);
    ops.relational = weights_to_laplacian(net.adjacency);
    Eigen::MatrixXd product =
        0.5 * (ops.spatial * ops.relational + ops.relational * ops.spatial);
    const double radius = spectral_radius_sym(product);
    ops.cross = product / std::max(1.0, radius);
    return ops;
}

double spectral_radius_sym(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
}

double min_eigenvalue_sym(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void write_edges_csv(const SpatialNetwork& net, const std::string& path) {
    csv::Writer out(path, {"i", "j", "weight"});
    for (int i = 0; i < net.n; ++i) {
        for (int j = i + 1; j < net.n; ++j) {
            if (net.adjacency(i, j) > 0.0) {
                out.row({std::to_string(i), std::to_string(j),
                         csv::format_double(net.adjacency(i, j))});
            }
        }
    }
}

void write_coords_csv(const SpatialNetwork& net, const std::string& path) {
    csv::Writer out(path, {"i", "x", "y"});
    for (int i = 0; i < net.n; ++i) {
        out.row({std::to_string(i), csv::format_double(net.coords(i, 0)),
                 csv::format_double(net.coords(i, 1))});
    }
}

SpatialNetwork load_network_csv(const std::string& edges_path, const std::string& coords_path) {
    csv::Table coords = csv::read_file(coords_path);
    const std::size_t ci = coords.column("i");
    const std::size_t cx = coords.column("x");
    const std::size_t cy = coords.column("y");
    const int n = static_cast<int>(coords.rows.size());
    if (n < 2) {
        throw ConfigError(coords_path + ": need at least 2 nodes, got " + std::to_string(n));
    }

    SpatialNetwork net;
    net.n = n;
    net.coords = Eigen::MatrixXd::Zero(n, 2);
    std::vector<char> seen(n, 0);
    for (std::size_t r = 0; r < coords.rows.size(); ++r) {
        const long id = csv::to_long(coords, r, ci);
        if (id < 0 || id >= n) {
            throw ConfigError(coords_path + ": row " + std::to_string(r + 1) +
                              ": node id " + std::to_string(id) + " out of range [0," +
                              std::to_string(n - 1) + "]");
        }
        if (seen[id]) {
            throw ConfigError(coords_path + ": duplicate node id " + std::to_string(id));
        }
        seen[id] = 1;
        net.coords(id, 0) = csv::to_double(coords, r, cx);
        net.coords(id, 1) = csv::to_double(coords, r, cy);
    }

    csv::Table edges = csv::read_file(edges_path);
    const std::size_t ei = edges.column("i");
    const std::size_t ej = edges.column("j");
    const std::size_t ew = edges.column("weight");
    net.adjacency = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t r = 0; r < edges.rows.size(); ++r) {
        const long a = csv::to_long(edges, r, ei);
        const long b = csv::to_long(edges, r, ej);
        const double w = csv::to_double(edges, r, ew);
        if (a < 0 || a >= n || b < 0 || b >= n) {
            throw ConfigError(edges_path + ": row " + std::to_string(r + 1) +
                              ": edge endpoint out of range");
        }
        if (a == b) {
            throw ConfigError(edges_path + ": row " + std::to_string(r + 1) +
                              ": self-loops are not allowed");
        }
        if (w < 0.0) {
            throw ConfigError(edges_path + ": row " + std::to_string(r + 1) +
                              ": negative edge weight");
        }
        net.adjacency(a, b) = net.adjacency(b, a) = w;
    }

    net.spatial_weights = Eigen::MatrixXd::Zero(n, n);
    SpatialKernel def = SpatialKernel::knn(4);
    build_operators(net, def);
    return net;
}

} // namespace adoptnet
