#include <cmath>
#include <cstdio>
#include <vector>

#include "invz/experiments.hpp"
#include "invz/ising.hpp"
#include "invz/roulette.hpp"
#include "invz/weights.hpp"

namespace invz::experiments {

namespace {

int g_failures = 0;

void check(bool ok, const char* name) {
    std::printf("selftest: %-46s %s\n", name, ok ? "ok" : "FAIL");
    if (!ok) ++g_failures;
}

bool signed_log_roundtrip() {
    RngStream rng(99, {1});
    for (int t = 0; t < 2000; ++t) {
        const double v = std::exp(rng.uniform_range(-300.0, 300.0)) *
                         (rng.bernoulli(0.5) ? 1.0 : -1.0);
        const SignedLog s = SignedLog::from_value(v);
        if (std::abs(s.value() - v) > 1e-12 * std::abs(v)) return false;
    }
    return true;
}

bool signed_log_associativity() {
    RngStream rng(99, {2});
    for (int t = 0; t < 2000; ++t) {
        SignedLog a = SignedLog::from_log(rng.uniform_range(-300.0, 300.0),
                                          rng.bernoulli(0.5) ? 1 : -1);
        SignedLog b = SignedLog::from_log(rng.uniform_range(-300.0, 300.0),
                                          rng.bernoulli(0.5) ? 1 : -1);
        SignedLog c = SignedLog::from_log(rng.uniform_range(-300.0, 300.0),
                                          rng.bernoulli(0.5) ? 1 : -1);
        const SignedLog left = (a + b) + c;
        const SignedLog right = a + (b + c);
        const double scale =
            std::max(a.log_mag, std::max(b.log_mag, c.log_mag));
        const SignedLog gap = left - right;
        if (gap.sign != 0 && gap.log_mag > scale + std::log(1e-10)) return false;
    }
    return true;
}

bool rbbce_matches_oracle() {
    RngStream rng(99, {3});
    for (int t = 0; t < 300; ++t) {
        const int n = 1 + static_cast<int>(rng.uniform_int(6));
        std::vector<double> lw(static_cast<std::size_t>(n) + 1);
        for (double& w : lw) w = rng.uniform_range(-3.0, 3.0);
        const auto vals = roulette::rbbce_log_y(lw);
        for (int i = 0; i <= n; ++i) {
            const double alg = std::exp(vals.log_y[static_cast<std::size_t>(i)]);
            const double ora = roulette::rbbce_bruteforce_oracle(lw, i);
            if (std::abs(alg - ora) > 1e-10) return false;
        }
    }
    return true;
}

bool rbbce_monotone() {
    RngStream rng(99, {4});
    for (int t = 0; t < 2000; ++t) {
        const int n = 1 + static_cast<int>(rng.uniform_int(30));
        std::vector<double> lw(static_cast<std::size_t>(n) + 1);
        for (double& w : lw) w = rng.uniform_range(-5.0, 5.0);
        const auto vals = roulette::rbbce_log_y(lw);
        for (std::size_t i = 1; i < vals.log_y.size(); ++i)
            if (vals.log_y[i] > vals.log_y[i - 1] + 1e-12) return false;
    }
    return true;
}

bool two_point_unbiased() {
    const weights::TwoPointSource source;
    const roulette::StoppingRule rule(1.1);
    for (const auto kind : {weights::EstimatorKind::iae, weights::EstimatorKind::fce,
                            weights::EstimatorKind::rbbce}) {
        RngStream rng(99, {5, static_cast<std::uint64_t>(kind)});
        const int n = 20000;
        double sum = 0.0, sum_sq = 0.0;
        for (int t = 0; t < n; ++t) {
            const double v =
                weights::draw_roulette_estimate(source, rule, kind, 0, rng).value.value();
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum_sq / n - mean * mean) / n);
        if (std::abs(mean - 1.0 / 3.0) > 5.0 * se) return false;
    }
    return true;
}

bool fce_coupling_bound() {
    const roulette::StoppingRule rule(1.1);
    RngStream rng(99, {6});
    const int trials = 20000;
    const int horizon = 12;
    std::vector<int> coupled_by(static_cast<std::size_t>(horizon) + 1, 0);
    for (int t = 0; t < trials; ++t) {
        std::vector<double> lw(static_cast<std::size_t>(horizon) + 1);
        for (double& w : lw) w = rng.uniform_range(-2.0, 2.0);
        std::vector<double> us(static_cast<std::size_t>(horizon));
        for (double& u : us) u = rng.uniform();
        const auto run = roulette::fce_run(lw, us, rule, 0);
        if (run.coupled_at)
            for (int i = static_cast<int>(*run.coupled_at); i <= horizon; ++i)
                ++coupled_by[static_cast<std::size_t>(i)];
    }
    for (int i = 2; i <= horizon; ++i) {
        const double p = static_cast<double>(coupled_by[static_cast<std::size_t>(i)]) / trials;
        const double bound = 1.0 - 2.0 / (i + 1);
        const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / trials);
        if (p < bound - 3.0 * se) return false;
    }
    return true;
}

bool transfer_matches_bruteforce() {
    for (int t = 0; t < 20; ++t) {
        RngStream rng(99, {7, static_cast<std::uint64_t>(t)});
        const int rows = 1 + static_cast<int>(rng.uniform_int(4));
        const int cols = 1 + static_cast<int>(rng.uniform_int(4));
        const auto params = ising::sample_tau_params(rows, cols, 1.0, rng);
        const ising::IsingModel model(params);
        if (std::abs(model.log_z_transfer() - model.log_z_bruteforce()) > 1e-9)
            return false;
    }
    return true;
}

} // namespace

int selftest() {
    g_failures = 0;
    check(signed_log_roundtrip(), "signed-log round trip");
    check(signed_log_associativity(), "signed-log associativity");
    check(rbbce_matches_oracle(), "rbbce recursion vs path enumeration");
    check(rbbce_monotone(), "rbbce Y-sequence monotone nonincreasing");
    check(two_point_unbiased(), "two-point unbiasedness (all estimators)");
    check(fce_coupling_bound(), "fce coupling probability bound");
    check(transfer_matches_bruteforce(), "transfer log Z vs brute force");
    std::printf("selftest: %d failure(s)\n", g_failures);
    return g_failures;
}

} // namespace invz::experiments
