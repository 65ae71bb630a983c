#include "invz/pseudo_marginal.hpp"

#include <cmath>
#include <stdexcept>

namespace invz::pm {

PmProposal PmProposal::gaussian_random_walk(std::vector<double> stddevs) {
    auto sample = [stddevs](const Theta& from, RngStream& rng) {
        Theta to(from.size());
        if (from.size() != stddevs.size())
            throw std::invalid_argument("gaussian_random_walk: dimension mismatch");
        for (std::size_t d = 0; d < from.size(); ++d)
            to[d] = rng.normal(from[d], stddevs[d]);
        return to;
    };
    auto log_density = [stddevs](const Theta& to, const Theta& from) {
        double lp = 0.0;
        for (std::size_t d = 0; d < to.size(); ++d) {
            const double z = (to[d] - from[d]) / stddevs[d];
            lp += -0.5 * z * z - std::log(stddevs[d]) - 0.5 * std::log(2.0 * M_PI);
        }
        return lp;
    };
    return PmProposal{std::move(sample), std::move(log_density)};
}

PmState make_state(const PmProblem& problem, Theta theta, RngStream& rng) {
    PmState state;
    state.log_prior = problem.log_prior(theta);
    if (state.log_prior == kNegInf)
        throw std::invalid_argument("make_state: theta outside prior support");
    state.log_lik = problem.log_unnorm_likelihood(theta);
    state.inv_z = problem.inv_z_estimate(theta, rng);
    state.f_hat = state.inv_z.scaled(state.log_lik + state.log_prior);
    state.theta = std::move(theta);
    return state;
}

double pm_log_accept_ratio(const PmState& current, const PmState& proposed,
                           const PmProposal& proposal) {
    return (proposed.f_hat.log_mag - current.f_hat.log_mag) +
           proposal.log_density(current.theta, proposed.theta) -
           proposal.log_density(proposed.theta, current.theta);
}

PmStepResult pm_step(const PmState& current, const PmProblem& problem,
                     const PmProposal& proposal, RngStream& rng) {
    if (current.f_hat.sign == 0)
        throw std::invalid_argument("pm_step: current estimate has zero sign");

    PmStepResult result;
    Theta candidate = proposal.sample(current.theta, rng);
    if (problem.log_prior(candidate) == kNegInf) {
        result.state = current;
        result.out_of_support = true;
        return result;
    }
    PmState proposed = make_state(problem, std::move(candidate), rng);
    if (proposed.f_hat.sign == 0) {
        result.state = current;
        result.zero_estimate = true;
        return result;
    }
    const double log_ratio = pm_log_accept_ratio(current, proposed, proposal);
    if (std::log(rng.uniform_open()) < std::min(0.0, log_ratio)) {
        result.state = std::move(proposed);
        result.accepted = true;
    } else {
        result.state = current;
    }
    return result;
}

PmTrace run_pm_chain(Theta init_theta, std::int64_t n_iters,
                     const PmProblem& problem, const PmProposal& proposal,
                     RngStream& rng) {
    PmState state = make_state(problem, std::move(init_theta), rng);
    if (state.f_hat.sign == 0)
        throw std::runtime_error("run_pm_chain: initial estimate is exactly zero");

    PmTrace trace;
    trace.records.reserve(static_cast<std::size_t>(n_iters));
    for (std::int64_t it = 0; it < n_iters; ++it) {
        PmStepResult step = pm_step(state, problem, proposal, rng);
        state = std::move(step.state);
        if (step.accepted) ++trace.n_accepted;
        if (step.zero_estimate) ++trace.n_zero_estimates;
        if (step.out_of_support) ++trace.n_out_of_support;
        PmRecord rec;
        rec.iteration = it;
        rec.theta = state.theta;
        rec.sigma = state.f_hat.sign;
        rec.log_abs_f = state.f_hat.log_mag;
        rec.accepted = step.accepted;
        trace.records.push_back(std::move(rec));
    }
    return trace;
}

double sign_corrected_expectation(const PmTrace& trace,
                                  const std::function<double(const Theta&)>& h) {
    double num = 0.0;
    double den = 0.0;
    for (const PmRecord& rec : trace.records) {
        num += h(rec.theta) * rec.sigma;
        den += rec.sigma;
    }
    if (den == 0.0)
        throw std::runtime_error("sign_corrected_expectation: signs sum to zero");
    return num / den;
}

double sign_corrected_mean(const PmTrace& trace, std::size_t component) {
    return sign_corrected_expectation(
        trace, [component](const Theta& th) { return th[component]; });
}

double positive_fraction(const PmTrace& trace) {
    if (trace.records.empty())
        throw std::invalid_argument("positive_fraction: empty trace");
    std::int64_t pos = 0;
    for (const PmRecord& rec : trace.records)
        if (rec.sigma == +1) ++pos;
    return static_cast<double>(pos) / static_cast<double>(trace.records.size());
}

std::vector<double> signed_series(const PmTrace& trace, std::size_t component) {
    std::vector<double> out;
    out.reserve(trace.records.size());
    for (const PmRecord& rec : trace.records) {
        if (component >= rec.theta.size())
            throw std::invalid_argument("signed_series: component out of range");
        out.push_back(rec.sigma * rec.theta[component]);
    }
    return out;
}

} // namespace invz::pm
