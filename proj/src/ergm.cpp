#include "invz/ergm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "invz/signed_log.hpp"

namespace invz::ergm {

void GraphState::set_edge(int i, int j, bool present) {
    if (i == j) throw std::invalid_argument("GraphState: self-loops not allowed");
    adj[static_cast<std::size_t>(i) * n_nodes + j] = present ? 1 : 0;
    adj[static_cast<std::size_t>(j) * n_nodes + i] = present ? 1 : 0;
}

ErgmStats graph_stats(const GraphState& x) {
    const int n = x.n_nodes;
    ErgmStats stats;
    double two_stars = 0.0;
    for (int i = 0; i < n; ++i) {
        std::int64_t d = 0;
        for (int j = 0; j < n; ++j)
            if (j != i && x.edge(i, j)) ++d;
        two_stars += 0.5 * static_cast<double>(d) * static_cast<double>(d - 1);
        for (int j = i + 1; j < n; ++j)
            if (x.edge(i, j)) ++stats.edges;
    }
    stats.avg_two_stars = n > 0 ? two_stars / n : 0.0;
    return stats;
}

GraphState load_graph_edgelist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_graph_edgelist: cannot open " + path);

    std::string line;
    int line_no = 0;
    int n_nodes = -1;
    GraphState graph;

    const auto fail = [&](const std::string& what) {
        throw std::runtime_error("load_graph_edgelist: " + what + " at " + path +
                                 ":" + std::to_string(line_no));
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        if (n_nodes < 0) {
            if (!(fields >> n_nodes) || n_nodes < 1) fail("bad node-count header");
            std::string extra;
            if (fields >> extra) fail("trailing tokens after node count");
            graph = GraphState(n_nodes);
            continue;
        }
        int u = 0, v = 0;
        if (!(fields >> u >> v)) fail("malformed edge line");
        std::string extra;
        if (fields >> extra) fail("trailing tokens on edge line");
        if (u == v) fail("self-loop");
        if (u < 0 || v < 0 || u >= n_nodes || v >= n_nodes) fail("node index out of range");
        graph.set_edge(u, v, true);
    }
    if (n_nodes < 0) {
        line_no = 0;
        fail("missing node-count header");
    }
    return graph;
}

ErgmModel::ErgmModel(ErgmParams params, int n_nodes)
    : params_(params), n_nodes_(n_nodes) {
    if (n_nodes_ < 1) throw std::invalid_argument("ErgmModel: need at least one node");
    if (!std::isfinite(params_.theta_e) || !std::isfinite(params_.theta_s))
        throw std::invalid_argument("ErgmModel: non-finite parameters");
}

double ErgmModel::log_unnorm(const GraphState& x, double inv_temp) const {
    const ErgmStats s = graph_stats(x);
    return inv_temp * (params_.theta_e * static_cast<double>(s.edges) +
                       params_.theta_s * s.avg_two_stars);
}

void ErgmModel::kernel_sweep(GraphState& x, double inv_temp, RngStream& rng) const {
    const int n = n_nodes_;
    // Maintain degrees so the two-star change is O(1) per toggle.
    std::vector<std::int64_t> degree(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (j != i && x.edge(i, j)) ++degree[static_cast<std::size_t>(i)];

    const auto choose2 = [](std::int64_t d) {
        return 0.5 * static_cast<double>(d) * static_cast<double>(d - 1);
    };

    // Propose a uniform candidate state for each pair (so an inv_temp of 0
    // resamples edges i.i.d.), accept the implied toggle by Metropolis.
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const bool present = x.edge(i, j);
            const bool candidate = rng.bernoulli(0.5);
            if (candidate == present) continue;
            const double delta = present ? -1.0 : 1.0;
            const std::int64_t di = degree[static_cast<std::size_t>(i)];
            const std::int64_t dj = degree[static_cast<std::size_t>(j)];
            const double d_two_stars =
                (choose2(di + static_cast<std::int64_t>(delta)) - choose2(di) +
                 choose2(dj + static_cast<std::int64_t>(delta)) - choose2(dj)) /
                n;
            const double d_log_unnorm =
                inv_temp * (params_.theta_e * delta + params_.theta_s * d_two_stars);
            if (std::log(rng.uniform_open()) < d_log_unnorm) {
                x.set_edge(i, j, candidate);
                degree[static_cast<std::size_t>(i)] += static_cast<std::int64_t>(delta);
                degree[static_cast<std::size_t>(j)] += static_cast<std::int64_t>(delta);
            }
        }
    }
}

GraphState ErgmModel::sample_uniform(RngStream& rng) const {
    GraphState x(n_nodes_);
    for (int i = 0; i < n_nodes_; ++i)
        for (int j = i + 1; j < n_nodes_; ++j)
            x.set_edge(i, j, rng.bernoulli(0.5));
    return x;
}

double ErgmModel::log_z_base() const {
    return 0.5 * n_nodes_ * (n_nodes_ - 1) * M_LN2;
}

double ErgmModel::log_z_bruteforce() const {
    if (n_nodes_ > 5)
        throw std::invalid_argument("log_z_bruteforce: refusing more than 5 nodes");
    const int n_pairs = n_nodes_ * (n_nodes_ - 1) / 2;
    GraphState x(n_nodes_);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n_nodes_; ++i)
        for (int j = i + 1; j < n_nodes_; ++j) pairs.emplace_back(i, j);

    double h_max = kNegInf;
    std::vector<double> energies;
    energies.reserve(std::size_t{1} << n_pairs);
    for (std::uint32_t mask = 0; mask < (1u << n_pairs); ++mask) {
        for (int p = 0; p < n_pairs; ++p)
            x.set_edge(pairs[static_cast<std::size_t>(p)].first,
                       pairs[static_cast<std::size_t>(p)].second, (mask >> p) & 1u);
        const double h = log_unnorm(x, 1.0);
        energies.push_back(h);
        h_max = std::max(h_max, h);
    }
    double sum = 0.0;
    for (double h : energies) sum += std::exp(h - h_max);
    return h_max + std::log(sum);
}

} // namespace invz::ergm
