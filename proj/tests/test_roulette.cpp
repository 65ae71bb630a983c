#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "invz/rng.hpp"
#include "invz/roulette.hpp"

using namespace invz;
using namespace invz::roulette;

namespace {

std::vector<double> log_weights_of(std::initializer_list<double> linear) {
    std::vector<double> out;
    for (double w : linear) out.push_back(std::log(w));
    return out;
}

std::vector<double> random_two_point_stream(std::size_t len, RngStream& rng) {
    std::vector<double> lw(len);
    for (double& w : lw) w = rng.bernoulli(0.5) ? std::log(4.0) : std::log(2.0);
    return lw;
}

} // namespace

TEST_CASE("survival function of the heavy-tailed rule") {
    const StoppingRule rule(1.1);
    CHECK(rule.survival(1) == 1.0);
    CHECK(rule.survival(3) == doctest::Approx(0.2986528199469207).epsilon(1e-12));
    CHECK(rule.survival(4) == doctest::Approx(0.217637640824031).epsilon(1e-12));
    CHECK_THROWS_AS(rule.survival(0), std::invalid_argument);
    CHECK_THROWS_AS((StoppingRule(-1.0)), std::invalid_argument);
}

TEST_CASE("stopping time inverse-CDF sampling") {
    const StoppingRule rule(1.1);
    CHECK(rule.sample(0.9) == 1);
    CHECK(rule.sample(0.5) == 1);
    CHECK(rule.sample(0.01) == 65);
    CHECK_THROWS_AS(rule.sample(0.0), std::invalid_argument);
    CHECK_THROWS_AS(rule.sample(1.0), std::invalid_argument);

    // The induced law matches the survival function: N >= k iff u <= k^-e.
    for (std::int64_t k = 2; k <= 50; ++k) {
        const double s = rule.survival(k);
        CHECK(rule.sample(s * (1 - 1e-12)) >= k);
        CHECK(rule.sample(s * (1 + 1e-12)) < k);
    }
}

TEST_CASE("roulette sum on hand-checked inputs") {
    const StoppingRule rule(1.1);

    SUBCASE("all-zero differences return y0") {
        const std::vector<SignedLog> diffs(5, SignedLog::zero());
        const SignedLog s = roulette_sum(SignedLog::from_log(0.0), diffs, rule);
        CHECK(s.sign == +1);
        CHECK(s.log_mag == 0.0);
    }
    SUBCASE("single positive difference at survival 1") {
        const std::vector<SignedLog> diffs{SignedLog::from_value(0.5)};
        const SignedLog s = roulette_sum(SignedLog::from_value(1.0), diffs,
                                         [](std::int64_t) { return 0.0; });
        CHECK(s.value() == doctest::Approx(1.5).epsilon(1e-14));
    }
    SUBCASE("negative difference divided by survival 0.5") {
        const std::vector<SignedLog> diffs{SignedLog::from_value(-0.2)};
        const SignedLog s = roulette_sum(SignedLog::from_value(1.0), diffs,
                                         [](std::int64_t) { return std::log(0.5); });
        CHECK(s.value() == doctest::Approx(0.6).epsilon(1e-13));
    }
}

TEST_CASE("iae on constant weights returns 1/c") {
    const StoppingRule rule(1.1);
    const std::vector<double> lw(7, std::log(5.0));
    const RouletteEstimate est = iae_estimate(lw, rule);
    CHECK(est.value.sign == +1);
    CHECK(est.value.value() == doctest::Approx(0.2).epsilon(1e-13));
    CHECK(est.n == 6);
}

TEST_CASE("iae hand trace on weights [2,4]") {
    const StoppingRule rule(1.1); // survival(1) = 1 regardless of exponent
    const RouletteEstimate est = iae_estimate(log_weights_of({2.0, 4.0}), rule);
    // y0 = 1/2, y1 = 2/6; S = 1/2 + (1/3 - 1/2) = 1/3
    CHECK(est.value.value() == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("fce on constant weights couples at step two") {
    const StoppingRule rule(1.1);
    const std::vector<double> lw(6, std::log(5.0));
    RngStream rng(3, {0});
    std::vector<double> us(5);
    for (double& u : us) u = rng.uniform();
    const RouletteEstimate est = fce_estimate(lw, us, rule);
    CHECK(est.value.value() == doctest::Approx(0.2).epsilon(1e-13));
    REQUIRE(est.coupled_at.has_value());
    CHECK(*est.coupled_at == 2);
}

TEST_CASE("fce hand trace on weights [2,4]") {
    const StoppingRule rule(1.1);
    for (double u : {0.001, 0.4, 0.999}) {
        const std::vector<double> us{u};
        const RouletteEstimate est =
            fce_estimate(log_weights_of({2.0, 4.0}), us, rule);
        // a = min(1, 4/2) = 1 forces the main chain to accept; the shadow
        // chain skips step 1, so S = 1/2 + (1/4 - 1/2) = 1/4.
        CHECK(est.value.value() == doctest::Approx(0.25).epsilon(1e-13));
        CHECK_FALSE(est.coupled_at.has_value());
    }
}

TEST_CASE("fce burn-in zero is identical to plain fce") {
    const StoppingRule rule(1.1);
    RngStream rng(3, {1});
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(12));
        std::vector<double> lw(n + 1);
        for (double& w : lw) w = rng.uniform_range(-4.0, 4.0);
        std::vector<double> us(n);
        for (double& u : us) u = rng.uniform();
        const RouletteEstimate a = fce_estimate(lw, us, rule);
        const RouletteEstimate b = fce_estimate_burnin(lw, us, rule, 0);
        CHECK(a.value == b.value);
        CHECK(a.coupled_at == b.coupled_at);
    }
}

TEST_CASE("fce with burn-in on constant weights still returns 1/c") {
    const StoppingRule rule(1.1);
    for (std::int64_t burn : {1, 4, 9}) {
        const std::size_t n = 5;
        const std::vector<double> lw(n + static_cast<std::size_t>(burn) + 1,
                                     std::log(8.0));
        RngStream rng(3, {2, static_cast<std::uint64_t>(burn)});
        std::vector<double> us(lw.size() - 1);
        for (double& u : us) u = rng.uniform();
        const RouletteEstimate est = fce_estimate_burnin(lw, us, rule, burn);
        CHECK(est.value.value() == doctest::Approx(0.125).epsilon(1e-13));
        CHECK(est.n == static_cast<std::int64_t>(n));
    }
}

TEST_CASE("rbbce hand traces") {
    const StoppingRule rule(1.1);

    SUBCASE("constant weights return 1/c") {
        const std::vector<double> lw(9, std::log(4.0));
        const RouletteEstimate est = rbbce_estimate(lw, rule);
        CHECK(est.value.value() == doctest::Approx(0.25).epsilon(1e-13));
    }
    SUBCASE("descending weights [4,2] take the mixture branch") {
        const RbbceValues vals = rbbce_log_y(log_weights_of({4.0, 2.0}));
        CHECK(std::exp(vals.log_y[0]) == doctest::Approx(0.5).epsilon(1e-13));
        CHECK(std::exp(vals.log_y[1]) == doctest::Approx(0.375).epsilon(1e-13));
        const RouletteEstimate est = rbbce_estimate(log_weights_of({4.0, 2.0}), rule);
        CHECK(est.value.value() == doctest::Approx(0.375).epsilon(1e-13));
        CHECK(est.work == 1);
    }
    SUBCASE("ascending weights [2,4] take the shortcut branch") {
        const RbbceValues vals = rbbce_log_y(log_weights_of({2.0, 4.0}));
        CHECK(std::exp(vals.log_y[0]) == doctest::Approx(0.25).epsilon(1e-13));
        CHECK(vals.log_y[1] == vals.log_y[0]);
        const RouletteEstimate est = rbbce_estimate(log_weights_of({2.0, 4.0}), rule);
        CHECK(est.value.value() == doctest::Approx(0.25).epsilon(1e-13));
        CHECK(est.work == 0);
    }
}

TEST_CASE("backward-propagation oracle on hand-checked inputs") {
    CHECK(rbbce_bruteforce_oracle(log_weights_of({7.0}), 0) ==
          doctest::Approx(1.0 / 7.0).epsilon(1e-13));
    CHECK(rbbce_bruteforce_oracle(log_weights_of({4.0, 2.0}), 1) ==
          doctest::Approx(0.375).epsilon(1e-13));
    CHECK(rbbce_bruteforce_oracle(log_weights_of({4.0, 2.0}), 0) ==
          doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("rbbce recursion equals the oracle on random streams") {
    RngStream rng(3, {3});
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(6));
        std::vector<double> lw(n + 1);
        for (double& w : lw) w = rng.uniform_range(-3.0, 3.0);
        const RbbceValues vals = rbbce_log_y(lw);
        for (std::size_t i = 0; i <= n; ++i) {
            const double oracle = rbbce_bruteforce_oracle(lw, static_cast<std::int64_t>(i));
            CHECK(std::abs(std::exp(vals.log_y[i]) - oracle) < 1e-10);
        }
    }
}

TEST_CASE("rbbce recursion equals the oracle on tied two-point streams") {
    RngStream rng(3, {4});
    for (int t = 0; t < 300; ++t) {
        const std::vector<double> lw =
            random_two_point_stream(2 + static_cast<std::size_t>(rng.uniform_int(5)), rng);
        const RbbceValues vals = rbbce_log_y(lw);
        for (std::size_t i = 0; i < lw.size(); ++i) {
            const double oracle = rbbce_bruteforce_oracle(lw, static_cast<std::int64_t>(i));
            CHECK(std::abs(std::exp(vals.log_y[i]) - oracle) < 1e-10);
        }
    }
}

TEST_CASE("rbbce Y-sequence is monotone nonincreasing") {
    RngStream rng(3, {5});
    for (int t = 0; t < 2000; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(40));
        std::vector<double> lw(n + 1);
        for (double& w : lw) w = rng.uniform_range(-6.0, 6.0);
        const RbbceValues vals = rbbce_log_y(lw);
        for (std::size_t i = 1; i < vals.log_y.size(); ++i)
            CHECK(vals.log_y[i] <= vals.log_y[i - 1] + 1e-12);
    }
}

TEST_CASE("rbbce work stays within the worst-case triangle bound") {
    RngStream rng(3, {6});
    const StoppingRule rule(1.1);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(50));
        std::vector<double> lw(n + 1);
        for (double& w : lw) w = rng.uniform_range(-2.0, 2.0);
        const RouletteEstimate est = rbbce_estimate(lw, rule);
        CHECK(est.work <= static_cast<std::int64_t>(n * (n + 1) / 2));
    }
}

TEST_CASE("fce chain matches exact path enumeration of the main chain") {
    // Exact E[1/w(X_N)] by propagating the held-proposal distribution,
    // versus the Monte Carlo mean of the chain's final reciprocal weight.
    RngStream rng(3, {7});
    const StoppingRule rule(1.1);
    for (int rep = 0; rep < 5; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform_int(4));
        std::vector<double> lw(n + 1);
        for (double& w : lw) w = rng.uniform_range(-2.0, 2.0);

        std::vector<double> prob(lw.size(), 0.0);
        prob[0] = 1.0;
        for (std::size_t t = 1; t <= n; ++t) {
            std::vector<double> next(prob.size(), 0.0);
            for (std::size_t s = 0; s < t; ++s) {
                const double a = std::min(1.0, std::exp(lw[t] - lw[s]));
                next[t] += prob[s] * a;
                next[s] += prob[s] * (1.0 - a);
            }
            prob = std::move(next);
        }
        double exact = 0.0;
        for (std::size_t s = 0; s <= n; ++s) exact += prob[s] * std::exp(-lw[s]);

        const int n_mc = 40000;
        double sum = 0.0, sum_sq = 0.0;
        std::vector<double> us(n);
        for (int t = 0; t < n_mc; ++t) {
            for (double& u : us) u = rng.uniform();
            const FceRun run = fce_run(lw, us, rule, 0);
            const double v = std::exp(-run.final_log_w);
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / n_mc;
        const double var = std::max(0.0, sum_sq / n_mc - mean * mean);
        const double se = std::sqrt(var / n_mc);
        CHECK(std::abs(mean - exact) <= 3.0 * se + 1e-10);
    }
}

TEST_CASE("coupling frequency respects the 1 - 2/(i+1) bound") {
    const StoppingRule rule(1.1);
    RngStream rng(3, {8});
    const int trials = 20000;
    const int horizon = 12;
    std::vector<int> coupled_by(horizon + 1, 0);
    std::vector<double> us(horizon);
    for (int t = 0; t < trials; ++t) {
        std::vector<double> lw(horizon + 1);
        for (double& w : lw) w = rng.uniform_range(-2.0, 2.0);
        for (double& u : us) u = rng.uniform();
        const FceRun run = fce_run(lw, us, rule, 0);
        if (run.coupled_at)
            for (std::int64_t i = *run.coupled_at; i <= horizon; ++i)
                ++coupled_by[static_cast<std::size_t>(i)];
    }
    for (int i = 2; i <= horizon; ++i) {
        const double p = static_cast<double>(coupled_by[static_cast<std::size_t>(i)]) / trials;
        const double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) / trials);
        CHECK(p >= 1.0 - 2.0 / (i + 1) - 3.0 * se);
    }
}

TEST_CASE("estimator invariants on realized estimates") {
    const StoppingRule rule(1.1);
    RngStream rng(3, {9});
    for (int t = 0; t < 500; ++t) {
        const std::int64_t n = rule.sample(rng.uniform_open());
        std::vector<double> lw(static_cast<std::size_t>(n) + 1);
        for (double& w : lw) w = rng.uniform_range(-3.0, 3.0);
        std::vector<double> us(static_cast<std::size_t>(n));
        for (double& u : us) u = rng.uniform();

        const RouletteEstimate fce = fce_estimate(lw, us, rule);
        if (fce.coupled_at) {
            CHECK(*fce.coupled_at >= 1);
            CHECK(*fce.coupled_at <= n);
        }
        const RouletteEstimate rb = rbbce_estimate(lw, rule);
        CHECK(rb.work <= n * (n + 1) / 2);
        // S <= Y_rb^(0) = 1/w^(N): every roulette increment is nonpositive.
        const SignedLog bound = SignedLog::from_log(-lw.back()) - rb.value;
        CHECK(bound.sign >= 0);
    }
}
