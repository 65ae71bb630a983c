#include "invz/ising.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "invz/signed_log.hpp"

namespace invz::ising {

std::vector<std::pair<int, int>> grid_edges(int rows, int cols) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(rows) * (cols - 1) +
                  static_cast<std::size_t>(rows - 1) * cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int site = r * cols + c;
            if (c + 1 < cols) edges.emplace_back(site, site + 1);
            if (r + 1 < rows) edges.emplace_back(site, site + cols);
        }
    }
    return edges;
}

IsingParams IsingParams::homogeneous(int rows, int cols, double alpha, double beta) {
    IsingParams p;
    p.rows = rows;
    p.cols = cols;
    p.alpha.assign(static_cast<std::size_t>(rows) * cols, alpha);
    p.beta.assign(grid_edges(rows, cols).size(), beta);
    return p;
}

IsingParams sample_tau_params(int rows, int cols, double tau, RngStream& rng) {
    if (tau < 0.0) throw std::invalid_argument("sample_tau_params: tau must be >= 0");
    IsingParams p;
    p.rows = rows;
    p.cols = cols;
    p.alpha.resize(static_cast<std::size_t>(rows) * cols);
    p.beta.resize(grid_edges(rows, cols).size());
    for (double& a : p.alpha) a = rng.uniform_range(-tau, tau);
    for (double& b : p.beta) b = rng.uniform_range(-tau, tau);
    return p;
}

IsingModel::IsingModel(IsingParams params) : params_(std::move(params)) {
    if (params_.rows < 1 || params_.cols < 1)
        throw std::invalid_argument("IsingModel: lattice dimensions must be positive");
    edges_ = grid_edges(params_.rows, params_.cols);
    if (params_.alpha.size() != static_cast<std::size_t>(params_.n_sites()))
        throw std::invalid_argument("IsingModel: alpha length must equal rows*cols");
    if (params_.beta.size() != edges_.size())
        throw std::invalid_argument("IsingModel: beta length must equal the grid edge count");
    for (double a : params_.alpha)
        if (!std::isfinite(a)) throw std::invalid_argument("IsingModel: non-finite alpha");
    for (double b : params_.beta)
        if (!std::isfinite(b)) throw std::invalid_argument("IsingModel: non-finite beta");

    // Build flat adjacency for the Gibbs sweep.
    const int n = params_.n_sites();
    std::vector<int> degree(static_cast<std::size_t>(n), 0);
    for (const auto& [a, b] : edges_) {
        ++degree[static_cast<std::size_t>(a)];
        ++degree[static_cast<std::size_t>(b)];
    }
    nbr_offset_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 0; i < n; ++i)
        nbr_offset_[static_cast<std::size_t>(i) + 1] =
            nbr_offset_[static_cast<std::size_t>(i)] + degree[static_cast<std::size_t>(i)];
    nbr_site_.resize(static_cast<std::size_t>(nbr_offset_.back()));
    nbr_beta_.resize(nbr_site_.size());
    std::vector<int> fill(nbr_offset_.begin(), nbr_offset_.end() - 1);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto [a, b] = edges_[e];
        const double beta = params_.beta[e];
        nbr_site_[static_cast<std::size_t>(fill[static_cast<std::size_t>(a)])] = b;
        nbr_beta_[static_cast<std::size_t>(fill[static_cast<std::size_t>(a)]++)] = beta;
        nbr_site_[static_cast<std::size_t>(fill[static_cast<std::size_t>(b)])] = a;
        nbr_beta_[static_cast<std::size_t>(fill[static_cast<std::size_t>(b)]++)] = beta;
    }
}

double IsingModel::log_unnorm(const SpinState& x, double inv_temp) const {
    if (x.size() != static_cast<std::size_t>(params_.n_sites()))
        throw std::invalid_argument("IsingModel::log_unnorm: state size mismatch");
    double h = 0.0;
    for (int i = 0; i < params_.n_sites(); ++i)
        h += params_.alpha[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    for (std::size_t e = 0; e < edges_.size(); ++e)
        h += params_.beta[e] * x[static_cast<std::size_t>(edges_[e].first)] *
             x[static_cast<std::size_t>(edges_[e].second)];
    return inv_temp * h;
}

void IsingModel::kernel_sweep(SpinState& x, double inv_temp, RngStream& rng) const {
    const int n = params_.n_sites();
    for (int i = 0; i < n; ++i) {
        double field = params_.alpha[static_cast<std::size_t>(i)];
        const int lo = nbr_offset_[static_cast<std::size_t>(i)];
        const int hi = nbr_offset_[static_cast<std::size_t>(i) + 1];
        for (int k = lo; k < hi; ++k)
            field += nbr_beta_[static_cast<std::size_t>(k)] *
                     x[static_cast<std::size_t>(nbr_site_[static_cast<std::size_t>(k)])];
        // p(x_i = +1 | rest) = 1 / (1 + exp(-2 * inv_temp * field))
        const double p_up = 1.0 / (1.0 + std::exp(-2.0 * inv_temp * field));
        x[static_cast<std::size_t>(i)] = rng.uniform() < p_up ? 1 : -1;
    }
}

SpinState IsingModel::sample_uniform(RngStream& rng) const {
    SpinState x(static_cast<std::size_t>(params_.n_sites()));
    for (auto& s : x) s = rng.bernoulli(0.5) ? 1 : -1;
    return x;
}

double IsingModel::log_z_base() const {
    return params_.n_sites() * M_LN2;
}

double IsingModel::log_z_bruteforce() const {
    const int n = params_.n_sites();
    if (n > 20)
        throw std::invalid_argument("log_z_bruteforce: refusing more than 20 sites");
    SpinState x(static_cast<std::size_t>(n));
    // Two passes: find the max energy first, then accumulate shifted.
    double h_max = kNegInf;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        for (int i = 0; i < n; ++i)
            x[static_cast<std::size_t>(i)] = (mask >> i) & 1u ? 1 : -1;
        h_max = std::max(h_max, log_unnorm(x, 1.0));
    }
    double sum = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        for (int i = 0; i < n; ++i)
            x[static_cast<std::size_t>(i)] = (mask >> i) & 1u ? 1 : -1;
        sum += std::exp(log_unnorm(x, 1.0) - h_max);
    }
    return h_max + std::log(sum);
}

double IsingModel::log_z_transfer() const {
    const int rows = params_.rows;
    const int cols = params_.cols;
    if (rows > 14)
        throw std::invalid_argument("log_z_transfer: refusing more than 14 rows");

    // Column states: bit r of the mask is the spin of row r (+1 when set).
    const std::size_t n_states = std::size_t{1} << rows;
    const auto spin = [](std::size_t mask, int r) {
        return (mask >> r) & 1u ? 1.0 : -1.0;
    };

    std::unordered_map<long long, std::size_t> eidx;
    eidx.reserve(edges_.size());
    const int n = params_.n_sites();
    for (std::size_t e = 0; e < edges_.size(); ++e)
        eidx[static_cast<long long>(edges_[e].first) * n + edges_[e].second] = e;
    const auto edge_index = [&](int site_a, int site_b) {
        return eidx.at(static_cast<long long>(site_a) * n + site_b);
    };

    const auto alpha_at = [&](int r, int c) {
        return params_.alpha[static_cast<std::size_t>(r * cols + c)];
    };
    const auto beta_vert = [&](int r, int c) { // (r,c)-(r+1,c)
        return params_.beta[edge_index(r * cols + c, (r + 1) * cols + c)];
    };
    const auto beta_horiz = [&](int r, int c) { // (r,c)-(r,c+1)
        return params_.beta[edge_index(r * cols + c, r * cols + c + 1)];
    };

    // Within-column weight of state s in column c.
    const auto column_energy = [&](std::size_t s, int c) {
        double h = 0.0;
        for (int r = 0; r < rows; ++r) h += alpha_at(r, c) * spin(s, r);
        for (int r = 0; r + 1 < rows; ++r)
            h += beta_vert(r, c) * spin(s, r) * spin(s, r + 1);
        return h;
    };

    std::vector<double> v(n_states);
    std::vector<double> energy(n_states);
    double log_offset = 0.0;

    // Fold the column energies in with a max shift so no single column can
    // overflow, then rescale the running vector after each column.
    const auto apply_column = [&](int c) {
        double e_max = kNegInf;
        for (std::size_t s = 0; s < n_states; ++s) {
            energy[s] = column_energy(s, c);
            e_max = std::max(e_max, energy[s]);
        }
        for (std::size_t s = 0; s < n_states; ++s)
            v[s] *= std::exp(energy[s] - e_max);
        double hi = 0.0;
        for (double val : v) hi = std::max(hi, val);
        for (double& val : v) val /= hi;
        log_offset += e_max + std::log(hi);
    };

    std::fill(v.begin(), v.end(), 1.0);
    apply_column(0);

    std::vector<double> buf(n_states);
    for (int c = 0; c + 1 < cols; ++c) {
        // The between-column operator factorizes over rows, so apply one
        // 2x2 coupling matrix per row instead of the full 2^rows square.
        for (int r = 0; r < rows; ++r) {
            const double b = beta_horiz(r, c);
            const double ep = std::exp(b);  // aligned spins
            const double em = std::exp(-b); // anti-aligned
            const std::size_t bit = std::size_t{1} << r;
            for (std::size_t s = 0; s < n_states; ++s) {
                if (s & bit) continue;
                const double lo = v[s];       // row r spin -1
                const double hi = v[s | bit]; // row r spin +1
                buf[s] = lo * ep + hi * em;
                buf[s | bit] = lo * em + hi * ep;
            }
            std::swap(v, buf);
        }
        apply_column(c + 1);
    }

    double total = 0.0;
    for (double val : v) total += val;
    return log_offset + std::log(total);
}

} // namespace invz::ising
