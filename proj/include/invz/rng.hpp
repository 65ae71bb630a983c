#ifndef INVZ_RNG_HPP
#define INVZ_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace invz {

// Purpose tags for rng substreams. Streams are keyed by
// (seed, key words..., purpose) so that results never depend on thread
// scheduling: every trial/chain owns its own stream.
enum class Purpose : std::uint64_t {
    model_params = 1,
    data_gen = 2,
    estimator_trial = 3,
    pm_chain = 4,
    generic = 5,
};

// A self-contained random substream. mt19937_64 seeded through seed_seq
// from the full key; uniform doubles are derived from the top 53 bits so
// the sequence is reproducible independent of library internals.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> key,
              Purpose purpose = Purpose::generic) {
        std::vector<std::uint32_t> words;
        words.reserve(2 * (key.size() + 2));
        auto push = [&words](std::uint64_t w) {
            words.push_back(static_cast<std::uint32_t>(w));
            words.push_back(static_cast<std::uint32_t>(w >> 32));
        };
        push(seed);
        for (std::uint64_t k : key) push(k);
        push(static_cast<std::uint64_t>(purpose));
        std::seed_seq seq(words.begin(), words.end());
        engine_.seed(seq);
    }

    explicit RngStream(std::uint64_t seed) : RngStream(seed, {}) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on the open interval (0, 1); rejects the measure-zero 0.
    double uniform_open() {
        double u;
        do { u = uniform(); } while (u == 0.0);
        return u;
    }

    // Uniform on [lo, hi].
    double uniform_range(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    std::int64_t uniform_int(std::int64_t n) { // 0..n-1
        return static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(n));
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Box-Muller; hand-rolled so traces do not depend on the standard
    // library's unspecified normal_distribution algorithm.
    double normal(double mean = 0.0, double stddev = 1.0) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + stddev * spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return mean + stddev * r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace invz

#endif
