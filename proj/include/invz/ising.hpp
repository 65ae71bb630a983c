#ifndef INVZ_ISING_HPP
#define INVZ_ISING_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "invz/rng.hpp"

namespace invz::ising {

// Spins live in {-1,+1}; sites are indexed row-major, site = r*cols + c.
using SpinState = std::vector<std::int8_t>;

// Canonical 4-neighbor grid edge order (no periodic wrap): scan sites
// row-major; at each site emit the edge to the right, then the edge below.
std::vector<std::pair<int, int>> grid_edges(int rows, int cols);

// Heterogeneous lattice parameters: p*(x) = exp(sum_i alpha_i x_i +
// sum_(i,j) beta_ij x_i x_j) over the grid edge set above.
struct IsingParams {
    int rows = 0;
    int cols = 0;
    std::vector<double> alpha; // per site
    std::vector<double> beta;  // per edge, canonical order

    static IsingParams homogeneous(int rows, int cols, double alpha, double beta);
    int n_sites() const { return rows * cols; }
};

// Every alpha_i and beta_ij drawn i.i.d. Uniform[-tau, tau].
IsingParams sample_tau_params(int rows, int cols, double tau, RngStream& rng);

class IsingModel {
public:
    using State = SpinState;

    explicit IsingModel(IsingParams params);

    const IsingParams& params() const { return params_; }
    int n_sites() const { return params_.n_sites(); }

    // inv_temp * (sum_i alpha_i x_i + sum_(i,j) beta_ij x_i x_j)
    double log_unnorm(const SpinState& x, double inv_temp) const;

    // Systematic-scan single-site Gibbs sweep; leaves the level-inv_temp
    // distribution invariant.
    void kernel_sweep(SpinState& x, double inv_temp, RngStream& rng) const;

    SpinState sample_uniform(RngStream& rng) const;
    double log_z_base() const; // n_sites * ln 2 (uniform base at inv_temp 0)

    // Exact log Z by full state enumeration; requires n_sites <= 20.
    double log_z_bruteforce() const;

    // Exact log Z by column-to-column transfer with per-step max-shift
    // rescaling; requires rows <= 14.
    double log_z_transfer() const;

private:
    IsingParams params_;
    std::vector<std::pair<int, int>> edges_;
    // Flattened neighbor lists: for each site, (neighbor site, coupling).
    std::vector<int> nbr_offset_;
    std::vector<int> nbr_site_;
    std::vector<double> nbr_beta_;
};

} // namespace invz::ising

#endif
