#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>

// Coupled spatial/relational structure: every unit has a position in the
// unit square plus a weighted relationship graph, and the dynamics run on
// diffusion operators built from both layers.

namespace adoptnet {

struct SpatialNetwork {
    int n = 0;
    Eigen::MatrixXd coords;          // n x 2, positions in [0,1]^2
    Eigen::MatrixXd adjacency;       // n x n symmetric, nonnegative, zero diagonal
    Eigen::MatrixXd spatial_weights; // n x n symmetric geographic weights, zero diagonal

    // Throws ConfigError if shapes or symmetry/diagonal constraints are violated.
    void validate() const;

    int degree(int node) const;
    bool is_connected() const;
};

enum class NetworkKind { random, scale_free, clustered };

NetworkKind parse_network_kind(const std::string& name);
std::string to_string(NetworkKind kind);

struct GeneratorParams {
    double edge_prob = 0.2;  // random: independent edge probability in (0,1]
    int attach_count = 2;    // scale_free: edges added per new node, >= 1
    int neighbor_count = 3;  // clustered: geographic nearest neighbours linked, >= 1
};

// Builds a connected instance with coordinates drawn uniformly on [0,1]^2 and
// unit edge weights.  Identical (kind, n, params, seed) inputs reproduce the
// instance bit-for-bit.  Disconnected draws are retried with a salted seed up
// to 100 times; persistent failure raises ConfigError naming kind and params.
SpatialNetwork generate_network(NetworkKind kind, int n, const GeneratorParams& params,
                                std::uint64_t seed);

struct SpatialKernel {
    enum class Kind { knn, gaussian };
    Kind kind = Kind::knn;
    int k = 4;              // knn: neighbour count (ties broken by node index)
    double bandwidth = 0.1; // gaussian: w_ij = exp(-d^2 / (2 b^2)), b > 0
    double scale = 1.0;     // multiplies every weight; sets the coupling unit

    static SpatialKernel knn(int k = 4, double scale = 1.0);
    static SpatialKernel gaussian(double bandwidth, double scale = 1.0);
};

// The three diffusion operators.  Rows sum to zero, the spatial and
// relational operators are symmetric negative-semidefinite, and the
// cross-layer operator is the symmetrized product of the other two, scaled
// down when its spectral radius exceeds one so its coefficient stays
// comparable in magnitude to the layer coefficients.
struct OperatorSet {
    Eigen::MatrixXd spatial;     // from geographic weights
    Eigen::MatrixXd relational;  // from the relationship graph
    Eigen::MatrixXd cross;       // 0.5 (S R + R S), spectrally rescaled

    int size() const { return static_cast<int>(spatial.rows()); }
};

// Derives spatial weights from the kernel (recorded back on the network) and
// assembles the operator set.
OperatorSet build_operators(SpatialNetwork& net, const SpatialKernel& kernel);

// Spectral helpers for symmetric matrices.
double spectral_radius_sym(const Eigen::MatrixXd& m);
double min_eigenvalue_sym(const Eigen::MatrixXd& m);

// File interchange.  Edges: header "i,j,weight", one row per undirected edge
// (i < j), 0-based ids.  Coordinates: header "i,x,y".
void write_edges_csv(const SpatialNetwork& net, const std::string& path);
void write_coords_csv(const SpatialNetwork& net, const std::string& path);
SpatialNetwork load_network_csv(const std::string& edges_path, const std::string& coords_path);

} // namespace adoptnet
