#ifndef INVZ_PSEUDO_MARGINAL_HPP
#define INVZ_PSEUDO_MARGINAL_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "invz/rng.hpp"
#include "invz/signed_log.hpp"

namespace invz::pm {

using Theta = std::vector<double>;

// The pieces of f(theta) = p*(y|theta) pi(theta) / Z(theta). The estimator
// returns a fresh signed estimate of 1/Z(theta) on every call.
struct PmProblem {
    std::function<double(const Theta&)> log_unnorm_likelihood; // log p*(y|theta)
    std::function<double(const Theta&)> log_prior; // -inf outside support
    std::function<SignedLog(const Theta&, RngStream&)> inv_z_estimate;
};

struct PmProposal {
    std::function<Theta(const Theta&, RngStream&)> sample;
    // log t(to; from). Gaussian random walks are symmetric so the ratio
    // cancels; the general ratio is kept for non-symmetric kernels.
    std::function<double(const Theta& to, const Theta& from)> log_density;

    static PmProposal gaussian_random_walk(std::vector<double> stddevs);
};

struct PmState {
    Theta theta;
    SignedLog f_hat;       // sign in {-1,+1} for any state in the chain
    double log_lik = 0.0;  // cached log p*(y|theta)
    double log_prior = 0.0;
    SignedLog inv_z;       // cached 1/Z estimate
};

struct PmRecord {
    std::int64_t iteration = 0;
    Theta theta;
    int sigma = 0;          // sign of f_hat at this iteration
    double log_abs_f = 0.0;
    bool accepted = false;
};

struct PmTrace {
    std::vector<PmRecord> records;
    std::int64_t n_accepted = 0;
    std::int64_t n_zero_estimates = 0;   // estimator returned exact zero
    std::int64_t n_out_of_support = 0;   // rejected before estimating

    std::size_t size() const { return records.size(); }
};

// Builds the full candidate state for theta (likelihood, prior, fresh
// 1/Z estimate). The prior must be finite at theta.
PmState make_state(const PmProblem& problem, Theta theta, RngStream& rng);

// log of the Metropolis-Hastings ratio |f'|/|f| * t(theta;theta')/t(theta';theta).
double pm_log_accept_ratio(const PmState& current, const PmState& proposed,
                           const PmProposal& proposal);

struct PmStepResult {
    PmState state;
    bool accepted = false;
    bool out_of_support = false;
    bool zero_estimate = false;
};

// One sign-corrected pseudo-marginal step. Out-of-support proposals reject
// without spending an estimator call; zero-sign estimates reject and are
// counted by the caller.
PmStepResult pm_step(const PmState& current, const PmProblem& problem,
                     const PmProposal& proposal, RngStream& rng);

// Iterates pm_step from init_theta, recording every iteration. The initial
// estimate must be nonzero.
PmTrace run_pm_chain(Theta init_theta, std::int64_t n_iters,
                     const PmProblem& problem, const PmProposal& proposal,
                     RngStream& rng);

// Sum h(theta_i) sigma_i / sum sigma_i; errors when the signs cancel.
double sign_corrected_expectation(const PmTrace& trace,
                                  const std::function<double(const Theta&)>& h);

// Convenience for a single component: h(theta) = theta[component].
double sign_corrected_mean(const PmTrace& trace, std::size_t component);

// Fraction of iterations with sigma = +1; errors on an empty trace.
double positive_fraction(const PmTrace& trace);

// sigma_i * theta_i[component], the signed series behind the trace plots.
std::vector<double> signed_series(const PmTrace& trace, std::size_t component);

} // namespace invz::pm

#endif
