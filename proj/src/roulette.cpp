#include "invz/roulette.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace invz::roulette {

StoppingRule::StoppingRule(double tail_exponent) : tail_exponent_(tail_exponent) {
    if (!(tail_exponent > 0.0))
        throw std::invalid_argument("StoppingRule: tail_exponent must be positive");
}

double StoppingRule::survival(std::int64_t k) const {
    if (k < 1) throw std::invalid_argument("StoppingRule::survival: k must be >= 1");
    return std::pow(static_cast<double>(k), -tail_exponent_);
}

double StoppingRule::log_survival(std::int64_t k) const {
    if (k < 1) throw std::invalid_argument("StoppingRule::log_survival: k must be >= 1");
    return -tail_exponent_ * std::log(static_cast<double>(k));
}

std::int64_t StoppingRule::sample(double u) const {
    if (!(u > 0.0 && u < 1.0))
        throw std::invalid_argument("StoppingRule::sample: u must lie in (0,1)");
    // N = max{k >= 1 : u <= k^(-e)} = floor(u^(-1/e))
    return static_cast<std::int64_t>(std::floor(std::pow(u, -1.0 / tail_exponent_)));
}

SignedLog roulette_sum(SignedLog y0, std::span<const SignedLog> diffs,
                       const StoppingRule& rule) {
    return roulette_sum(y0, diffs,
                        [&rule](std::int64_t i) { return rule.log_survival(i); });
}

std::vector<double> iae_log_y(std::span<const double> log_weights) {
    std::vector<double> y;
    y.reserve(log_weights.size());
    double log_sum = kNegInf;
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
        log_sum = log_add_exp(log_sum, log_weights[i]);
        y.push_back(std::log(static_cast<double>(i + 1)) - log_sum);
    }
    return y;
}

RouletteEstimate iae_estimate(std::span<const double> log_weights,
                              const StoppingRule& rule) {
    if (log_weights.empty())
        throw std::invalid_argument("iae_estimate: need at least one weight");
    const std::vector<double> y = iae_log_y(log_weights);
    std::vector<SignedLog> diffs;
    diffs.reserve(y.size() - 1);
    for (std::size_t i = 1; i < y.size(); ++i)
        diffs.push_back(SignedLog::from_log(y[i]) - SignedLog::from_log(y[i - 1]));
    RouletteEstimate est;
    est.value = roulette_sum(SignedLog::from_log(y[0]), diffs, rule);
    est.n = static_cast<std::int64_t>(log_weights.size()) - 1;
    return est;
}

FceRun fce_run(std::span<const double> log_weights,
               std::span<const double> uniforms, const StoppingRule& rule,
               std::int64_t burn_in) {
    if (burn_in < 0) throw std::invalid_argument("fce_run: burn_in must be >= 0");
    const std::int64_t total = static_cast<std::int64_t>(log_weights.size()) - 1;
    if (total < burn_in)
        throw std::invalid_argument("fce_run: need at least burn_in + 1 weights");
    if (static_cast<std::int64_t>(uniforms.size()) != total)
        throw std::invalid_argument("fce_run: need one uniform per chain step");

    // Both chains only ever hold proposal states, so tracking the held
    // proposal index is an exact state comparison. It agrees with bit-exact
    // comparison of the held log-weights except on weight ties between
    // distinct proposals, where the index is the correct notion.
    std::int64_t main_idx = 0;
    std::int64_t shadow_idx = 0;
    std::optional<std::int64_t> coupled_at;

    FceRun run;
    if (burn_in == 0) run.s = SignedLog::from_log(-log_weights[0]);

    for (std::int64_t step = 1; step <= total; ++step) {
        const double lw_prop = log_weights[step];
        const double log_a = std::min(0.0, lw_prop - log_weights[main_idx]);
        const double log_a_shadow = std::min(0.0, lw_prop - log_weights[shadow_idx]);
        const double u = uniforms[step - 1];
        const double log_u = u > 0.0 ? std::log(u) : kNegInf;
        if (log_u < log_a) main_idx = step;
        if (step > 1 && log_u < log_a_shadow) shadow_idx = step;
        if (!coupled_at && main_idx == shadow_idx) coupled_at = step;
        if (step == burn_in) run.s = SignedLog::from_log(-log_weights[main_idx]);
        if (step > burn_in) {
            const std::int64_t i = step - burn_in;
            const SignedLog diff = SignedLog::from_log(-log_weights[main_idx]) -
                                   SignedLog::from_log(-log_weights[shadow_idx]);
            run.s = run.s + diff.scaled(-rule.log_survival(i));
        }
    }
    run.coupled_at = coupled_at;
    run.final_log_w = log_weights[main_idx];
    run.final_log_w_shadow = log_weights[shadow_idx];
    return run;
}

RouletteEstimate fce_estimate(std::span<const double> log_weights,
                              std::span<const double> uniforms,
                              const StoppingRule& rule) {
    return fce_estimate_burnin(log_weights, uniforms, rule, 0);
}

RouletteEstimate fce_estimate_burnin(std::span<const double> log_weights,
                                     std::span<const double> uniforms,
                                     const StoppingRule& rule,
                                     std::int64_t burn_in) {
    const FceRun run = fce_run(log_weights, uniforms, rule, burn_in);
    RouletteEstimate est;
    est.value = run.s;
    est.n = static_cast<std::int64_t>(log_weights.size()) - 1 - burn_in;
    est.coupled_at = run.coupled_at;
    return est;
}

RbbceValues rbbce_log_y(std::span<const double> log_weights) {
    if (log_weights.empty())
        throw std::invalid_argument("rbbce_log_y: need at least one weight");
    const std::int64_t n = static_cast<std::int64_t>(log_weights.size()) - 1;
    const auto lw = [&](std::int64_t idx) { return log_weights[idx]; };

    RbbceValues out;
    out.log_y.reserve(log_weights.size());
    out.log_y.push_back(-lw(n)); // Y_rb^(0) = 1/w^(N)

    std::int64_t argmax = 0;       // argmax_{0<=j<i} w^(N-j)
    double max_lw = lw(n);

    for (std::int64_t i = 1; i <= n; ++i) {
        const double lw_start = lw(n - i);
        if (lw_start < max_lw) {
            // The chain is forced to accept at the running maximum, after
            // which it is the chain for Y_rb^(argmax).
            out.log_y.push_back(out.log_y[argmax]);
        } else {
            // Start weight dominates every later proposal, so acceptance
            // ratios need no clamp; gamma_j = Pr[first j proposals rejected].
            double log_gamma = 0.0;
            double acc = kNegInf;
            for (std::int64_t j = 0; j < i; ++j) {
                double log_ratio = lw(n - i + j + 1) - lw_start;
                assert(log_ratio <= 1e-12);
                log_ratio = std::min(log_ratio, 0.0);
                if (log_gamma != kNegInf)
                    acc = log_add_exp(acc, log_ratio + log_gamma + out.log_y[i - j - 1]);
                log_gamma += log1m_exp(log_ratio);
                ++out.work;
            }
            if (log_gamma != kNegInf)
                acc = log_add_exp(acc, log_gamma - lw_start);
            out.log_y.push_back(acc);
        }
        if (lw_start >= max_lw) {
            max_lw = lw_start;
            argmax = i;
        }
    }
    return out;
}

RouletteEstimate rbbce_estimate(std::span<const double> log_weights,
                                const StoppingRule& rule) {
    const RbbceValues vals = rbbce_log_y(log_weights);
    std::vector<SignedLog> diffs;
    diffs.reserve(vals.log_y.size() - 1);
    for (std::size_t i = 1; i < vals.log_y.size(); ++i)
        diffs.push_back(SignedLog::from_log(vals.log_y[i]) -
                        SignedLog::from_log(vals.log_y[i - 1]));
    RouletteEstimate est;
    est.value = roulette_sum(SignedLog::from_log(vals.log_y[0]), diffs, rule);
    est.n = static_cast<std::int64_t>(log_weights.size()) - 1;
    est.work = vals.work;
    return est;
}

double rbbce_bruteforce_oracle(std::span<const double> log_weights,
                               std::int64_t i) {
    const std::int64_t n = static_cast<std::int64_t>(log_weights.size()) - 1;
    if (i < 0 || i > n)
        throw std::invalid_argument("rbbce_bruteforce_oracle: index out of range");
    // Reachable states are exactly the proposals N-i..N; propagate the
    // distribution over held proposals forward, marginalizing each
    // accept/reject with its exact probability.
    std::vector<double> prob(static_cast<std::size_t>(i) + 1, 0.0);
    prob[0] = 1.0; // holding proposal N-i
    const auto lw = [&](std::int64_t idx) { return log_weights[idx]; };
    for (std::int64_t t = 1; t <= i; ++t) {
        std::vector<double> next(prob.size(), 0.0);
        for (std::int64_t s = 0; s < t; ++s) {
            if (prob[s] == 0.0) continue;
            const double a =
                std::min(1.0, std::exp(lw(n - i + t) - lw(n - i + s)));
            next[t] += prob[s] * a;
            next[s] += prob[s] * (1.0 - a);
        }
        prob = std::move(next);
    }
    double expect = 0.0;
    for (std::int64_t s = 0; s <= i; ++s)
        expect += prob[s] * std::exp(-lw(n - i + s));
    return expect;
}

} // namespace invz::roulette
