#include "invz/weights.hpp"

#include <algorithm>

namespace invz::weights {

AnnealingSchedule::AnnealingSchedule(std::vector<double> levels)
    : levels_(std::move(levels)) {
    if (levels_.size() < 2)
        throw std::invalid_argument("AnnealingSchedule: need at least two levels");
    if (levels_.front() != 0.0 || levels_.back() != 1.0)
        throw std::invalid_argument("AnnealingSchedule: endpoints must be 0 and 1");
    for (std::size_t j = 1; j < levels_.size(); ++j)
        if (!(levels_[j] > levels_[j - 1]))
            throw std::invalid_argument("AnnealingSchedule: levels must be strictly increasing");
}

AnnealingSchedule AnnealingSchedule::linear(int n_levels) {
    if (n_levels < 1)
        throw std::invalid_argument("AnnealingSchedule: n_levels must be >= 1");
    std::vector<double> levels(static_cast<std::size_t>(n_levels) + 1);
    for (int j = 0; j <= n_levels; ++j)
        levels[static_cast<std::size_t>(j)] = static_cast<double>(j) / n_levels;
    levels.back() = 1.0;
    return AnnealingSchedule(std::move(levels));
}

double batched_log_weight(const WeightSource& raw, int m, RngStream& rng) {
    if (m < 1) throw std::invalid_argument("batched_log_weight: m must be >= 1");
    std::vector<double> draws(static_cast<std::size_t>(m));
    for (double& d : draws) d = raw.draw_log_weight(rng);
    return log_mean_exp(draws);
}

BatchedSource::BatchedSource(std::shared_ptr<const WeightSource> raw, int m)
    : raw_(std::move(raw)), m_(m) {
    if (!raw_) throw std::invalid_argument("BatchedSource: null raw source");
    if (m_ < 1) throw std::invalid_argument("BatchedSource: m must be >= 1");
}

double BatchedSource::draw_log_weight(RngStream& rng) const {
    return batched_log_weight(*raw_, m_, rng);
}

std::string BatchedSource::description() const {
    return raw_->description() + " x" + std::to_string(m_);
}

double TwoPointSource::draw_log_weight(RngStream& rng) const {
    const TwoPointModel model;
    return simple_is_log_weight(model, model.proposal, rng);
}

const char* estimator_name(EstimatorKind kind) {
    switch (kind) {
    case EstimatorKind::iae: return "iae";
    case EstimatorKind::fce: return "fce";
    case EstimatorKind::rbbce: return "rbbce";
    }
    return "?";
}

EstimatorKind estimator_from_name(const std::string& name) {
    if (name == "iae") return EstimatorKind::iae;
    if (name == "fce") return EstimatorKind::fce;
    if (name == "rbbce") return EstimatorKind::rbbce;
    throw std::invalid_argument("unknown estimator: " + name);
}

roulette::RouletteEstimate
draw_roulette_estimate(const WeightSource& source,
                       const roulette::StoppingRule& rule, EstimatorKind kind,
                       std::int64_t burn_in, RngStream& rng) {
    const std::int64_t n = rule.sample(rng.uniform_open());
    const std::int64_t shift = kind == EstimatorKind::fce ? burn_in : 0;
    std::vector<double> log_weights(static_cast<std::size_t>(n + shift) + 1);
    for (double& w : log_weights) w = source.draw_log_weight(rng);
    switch (kind) {
    case EstimatorKind::iae:
        return roulette::iae_estimate(log_weights, rule);
    case EstimatorKind::fce: {
        std::vector<double> uniforms(log_weights.size() - 1);
        for (double& u : uniforms) u = rng.uniform();
        return roulette::fce_estimate_burnin(log_weights, uniforms, rule, shift);
    }
    case EstimatorKind::rbbce:
        return roulette::rbbce_estimate(log_weights, rule);
    }
    throw std::logic_error("draw_roulette_estimate: unreachable");
}

SignedLog averaged_inv_z_estimate(const WeightSource& source,
                                  const roulette::StoppingRule& rule,
                                  EstimatorKind kind, std::int64_t burn_in,
                                  int n_trials, RngStream& rng) {
    if (n_trials < 1)
        throw std::invalid_argument("averaged_inv_z_estimate: n_trials must be >= 1");
    SignedLog sum = SignedLog::zero();
    for (int t = 0; t < n_trials; ++t)
        sum = sum + draw_roulette_estimate(source, rule, kind, burn_in, rng).value;
    return sum.scaled(-std::log(static_cast<double>(n_trials)));
}

} // namespace invz::weights
