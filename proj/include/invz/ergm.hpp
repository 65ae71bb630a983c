#ifndef INVZ_ERGM_HPP
#define INVZ_ERGM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "invz/rng.hpp"

namespace invz::ergm {

// Simple undirected graph held as a symmetric adjacency matrix with zero
// diagonal.
struct GraphState {
    int n_nodes = 0;
    std::vector<std::uint8_t> adj; // n*n, row-major

    explicit GraphState(int n = 0)
        : n_nodes(n), adj(static_cast<std::size_t>(n) * n, 0) {}

    bool edge(int i, int j) const {
        return adj[static_cast<std::size_t>(i) * n_nodes + j] != 0;
    }
    void set_edge(int i, int j, bool present);
};

struct ErgmStats {
    std::int64_t edges = 0;
    double avg_two_stars = 0.0; // (1/n) sum_i C(d_i, 2)
};

ErgmStats graph_stats(const GraphState& x);

// theta = (theta_e, theta_s); p*(x) = exp(theta_e * edges +
// theta_s * avg_two_stars).
struct ErgmParams {
    double theta_e = 0.0;
    double theta_s = 0.0;
};

// Edge-list file: comment lines start with '#'; the first data line is the
// node count; remaining data lines are "u v" 0-based pairs. Duplicate edges
// are idempotent; self-loops and out-of-range indices are rejected with the
// offending line number.
GraphState load_graph_edgelist(const std::string& path);

class ErgmModel {
public:
    using State = GraphState;

    ErgmModel(ErgmParams params, int n_nodes);

    const ErgmParams& params() const { return params_; }
    int n_nodes() const { return n_nodes_; }

    double log_unnorm(const GraphState& x, double inv_temp) const;

    // Systematic scan over node pairs; each edge is toggled under a
    // Metropolis accept/reject at the level distribution.
    void kernel_sweep(GraphState& x, double inv_temp, RngStream& rng) const;

    GraphState sample_uniform(RngStream& rng) const;
    double log_z_base() const; // C(n,2) * ln 2

    // Exact log Z by enumerating all 2^C(n,2) graphs; requires n <= 5.
    double log_z_bruteforce() const;

private:
    ErgmParams params_;
    int n_nodes_;
};

} // namespace invz::ergm

#endif
