#ifndef INVZ_ROULETTE_HPP
#define INVZ_ROULETTE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "invz/signed_log.hpp"

namespace invz::roulette {

// Heavy-tailed stopping time with survival Pr(N >= k) = k^(-tail_exponent).
// Normalized so that survival(1) = 1, hence N >= 1 almost surely and the
// inverse CDF has the closed form N = floor(u^(-1/tail_exponent)).
// E[N] is finite iff tail_exponent > 1 (zeta(1.1) ~= 10.58 at the default).
class StoppingRule {
public:
    explicit StoppingRule(double tail_exponent = 1.1);

    double survival(std::int64_t k) const;      // k^(-e), requires k >= 1
    double log_survival(std::int64_t k) const;  // -e * ln k
    std::int64_t sample(double u) const;        // u in (0,1) -> N >= 1
    double tail_exponent() const { return tail_exponent_; }

private:
    double tail_exponent_;
};

// A realized estimate of 1/Z plus per-run diagnostics.
struct RouletteEstimate {
    SignedLog value;                       // S
    std::int64_t n = 0;                    // realized stopping time N
    std::optional<std::int64_t> coupled_at; // FCE: first chain step with main == shadow
    std::int64_t work = 0;                 // RBBCE: inner-loop iterations executed
};

// S = y0 + sum_i diffs[i-1] / survival(i), accumulated in signed log domain.
// log_survival_at(i) must return ln Pr(N >= i) for i = 1..diffs.size().
template <class LogSurvivalFn>
SignedLog roulette_sum(SignedLog y0, std::span<const SignedLog> diffs,
                       LogSurvivalFn&& log_survival_at) {
    SignedLog s = y0;
    for (std::size_t i = 1; i <= diffs.size(); ++i)
        s = s + diffs[i - 1].scaled(-log_survival_at(static_cast<std::int64_t>(i)));
    return s;
}

SignedLog roulette_sum(SignedLog y0, std::span<const SignedLog> diffs,
                       const StoppingRule& rule);

// Running-average reciprocals y_i = (i+1) / sum_{j<=i} w_j, in log domain.
std::vector<double> iae_log_y(std::span<const double> log_weights);

// Increasing Averages Estimator over a stream of N+1 log-weights.
RouletteEstimate iae_estimate(std::span<const double> log_weights,
                              const StoppingRule& rule);

// One run of the forward-coupled pair of Metropolis chains over shared
// proposals and uniforms, with an optional burn-in shift of the roulette
// terms. Exposed so tests can inspect the final chain states.
struct FceRun {
    SignedLog s;
    std::optional<std::int64_t> coupled_at; // first step with identical held proposal
    double final_log_w = 0.0;               // main chain weight after the last step
    double final_log_w_shadow = 0.0;
};

FceRun fce_run(std::span<const double> log_weights,
               std::span<const double> uniforms, const StoppingRule& rule,
               std::int64_t burn_in = 0);

// Forward Coupled Estimator: log_weights has N+1 entries, uniforms has N.
RouletteEstimate fce_estimate(std::span<const double> log_weights,
                              std::span<const double> uniforms,
                              const StoppingRule& rule);

// As fce_estimate but the roulette terms start after T chain steps:
// y_i = 1/w(X_{i+T}). log_weights has N+T+1 entries, uniforms has N+T.
// Guarantees Pr[S >= 0] >= 1 - 2/(T+1).
RouletteEstimate fce_estimate_burnin(std::span<const double> log_weights,
                                     std::span<const double> uniforms,
                                     const StoppingRule& rule,
                                     std::int64_t burn_in);

// Rao-Blackwellized backward values: y[i] = log Y_rb^(i) for the chain
// started at proposal N-i, acceptance randomness integrated out.
// work counts executed inner-loop iterations.
struct RbbceValues {
    std::vector<double> log_y;
    std::int64_t work = 0;
};

RbbceValues rbbce_log_y(std::span<const double> log_weights);

// Rao-Blackwellized Backward Coupled Estimator over N+1 log-weights.
RouletteEstimate rbbce_estimate(std::span<const double> log_weights,
                                const StoppingRule& rule);

// Independent check of the Rao-Blackwell recursion: E[1/w(final state)]
// for the backward chain started at proposal N-i, computed by exact
// probability propagation over the reachable held-proposal set. O(i^2).
double rbbce_bruteforce_oracle(std::span<const double> log_weights,
                               std::int64_t i);

} // namespace invz::roulette

#endif
