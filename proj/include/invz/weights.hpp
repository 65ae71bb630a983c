#ifndef INVZ_WEIGHTS_HPP
#define INVZ_WEIGHTS_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "invz/rng.hpp"
#include "invz/roulette.hpp"
#include "invz/signed_log.hpp"

namespace invz::weights {

// Inverse temperatures 0 = beta_0 < beta_1 < ... < beta_n = 1. n_levels = n;
// the target level is included in the count, the base is not.
class AnnealingSchedule {
public:
    explicit AnnealingSchedule(std::vector<double> levels);
    static AnnealingSchedule linear(int n_levels);

    std::span<const double> levels() const { return levels_; }
    int n_levels() const { return static_cast<int>(levels_.size()) - 1; }

private:
    std::vector<double> levels_;
};

// Abstract generator of positive log-domain importance weights with
// E[exp(draw)] = Z of the associated target. Draws are independent given
// independent rng streams; sources hold immutable parameters only.
class WeightSource {
public:
    virtual ~WeightSource() = default;
    virtual double draw_log_weight(RngStream& rng) const = 0;
    virtual std::string description() const = 0;
    virtual int batch_size() const { return 1; }
};

// Plain importance sampling: draw X ~ Q, return log P*(X) - log Q(X).
// Target needs log_unnorm(x); Proposal needs sample(rng) and log_density(x).
template <class Target, class Proposal>
double simple_is_log_weight(const Target& target, const Proposal& proposal,
                            RngStream& rng) {
    const auto x = proposal.sample(rng);
    const double log_q = proposal.log_density(x);
    if (log_q == kNegInf)
        throw std::runtime_error("simple_is_log_weight: proposal has zero "
                                 "density at its own draw (support violation)");
    return target.log_unnorm(x) - log_q;
}

// Annealed importance sampling along the geometric path p_j ~ (p*)^(beta_j)
// from a uniform base. Model concept:
//   State sample_uniform(RngStream&) const;
//   double log_unnorm(const State&, double inv_temp) const;
//   void kernel_sweep(State&, double inv_temp, RngStream&) const;
//   double log_z_base() const;
// Returns a log-weight with E[exp(w)] = Z exactly. The kernel runs at levels
// 1..n-1; no transition follows the last accumulation term.
template <class Model>
double ais_log_weight(const Model& model, const AnnealingSchedule& schedule,
                      RngStream& rng) {
    auto state = model.sample_uniform(rng);
    const auto beta = schedule.levels();
    double acc = 0.0;
    const int n = schedule.n_levels();
    for (int j = 1; j <= n; ++j) {
        acc += (beta[j] - beta[j - 1]) * model.log_unnorm(state, 1.0);
        if (j < n) model.kernel_sweep(state, beta[j], rng);
    }
    return acc + model.log_z_base();
}

// Adapts any annealable model (see ais_log_weight) into a WeightSource.
// The model must outlive the source.
template <class Model>
class AisSource final : public WeightSource {
public:
    AisSource(const Model& model, AnnealingSchedule schedule, std::string name)
        : model_(model), schedule_(std::move(schedule)), name_(std::move(name)) {}

    double draw_log_weight(RngStream& rng) const override {
        return ais_log_weight(model_, schedule_, rng);
    }
    std::string description() const override { return name_; }

private:
    const Model& model_;
    AnnealingSchedule schedule_;
    std::string name_;
};

// log of the average of m independent raw weights (Eq-8-style batching);
// unbiasedness in Z is preserved by linearity.
double batched_log_weight(const WeightSource& raw, int m, RngStream& rng);

class BatchedSource final : public WeightSource {
public:
    BatchedSource(std::shared_ptr<const WeightSource> raw, int m);
    double draw_log_weight(RngStream& rng) const override;
    std::string description() const override;
    int batch_size() const override { return m_; }

private:
    std::shared_ptr<const WeightSource> raw_;
    int m_;
};

// The two-point counterexample model: X = {0,1}, Q uniform, P*(0) = 1,
// P*(1) = 2, so w in {2,4} with equal probability and Z = 3.
struct TwoPointModel {
    double log_unnorm(int x) const { return x == 0 ? 0.0 : M_LN2; }

    struct UniformProposal {
        int sample(RngStream& rng) const { return rng.bernoulli(0.5) ? 1 : 0; }
        double log_density(int) const { return -M_LN2; }
    };
    UniformProposal proposal;
};

class TwoPointSource final : public WeightSource {
public:
    double draw_log_weight(RngStream& rng) const override;
    std::string description() const override { return "two-point"; }
};

// Wraps an arbitrary draw function; handy for tests and synthetic sources.
class FunctionSource final : public WeightSource {
public:
    FunctionSource(std::function<double(RngStream&)> fn, std::string name)
        : fn_(std::move(fn)), name_(std::move(name)) {}
    double draw_log_weight(RngStream& rng) const override { return fn_(rng); }
    std::string description() const override { return name_; }

private:
    std::function<double(RngStream&)> fn_;
    std::string name_;
};

enum class EstimatorKind { iae, fce, rbbce };

const char* estimator_name(EstimatorKind kind);
EstimatorKind estimator_from_name(const std::string& name);

// One full roulette draw: sample N, fill the weight stream from the source,
// draw FCE uniforms if needed, run the requested estimator.
roulette::RouletteEstimate
draw_roulette_estimate(const WeightSource& source,
                       const roulette::StoppingRule& rule, EstimatorKind kind,
                       std::int64_t burn_in, RngStream& rng);

// Arithmetic mean of n_trials independent roulette estimates, averaged as
// signed values in the linear domain.
SignedLog averaged_inv_z_estimate(const WeightSource& source,
                                  const roulette::StoppingRule& rule,
                                  EstimatorKind kind, std::int64_t burn_in,
                                  int n_trials, RngStream& rng);

} // namespace invz::weights

#endif
