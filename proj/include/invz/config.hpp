#ifndef INVZ_CONFIG_HPP
#define INVZ_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace invz::config {

struct ModelSpec {
    std::string kind = "ising"; // ising | ergm | two_point
    int rows = 10;
    int cols = 30;
    std::optional<double> tau;                      // tau-sampled lattice
    std::vector<double> tau_grid;                   // estimate sweep; empty = default grid
    std::optional<std::vector<double>> alpha;       // explicit lattice params
    std::optional<std::vector<double>> beta;
    std::string edgelist;                           // ergm observed graph

    bool operator==(const ModelSpec&) const = default;
};

struct EstimatorSpec {
    std::vector<std::string> kinds{"iae", "fce", "rbbce"};
    double tail_exponent = 1.1;
    std::int64_t burn_in = 0;
    int n_estimator_trials = 1;

    bool operator==(const EstimatorSpec&) const = default;
};

struct AisSpec {
    int n_levels = 10;
    int batch_size = 10;

    bool operator==(const AisSpec&) const = default;
};

struct RunSpec {
    std::int64_t n_trials = 1000; // roulette trials per (tau, estimator)
    std::int64_t n_iters = 2000;  // pseudo-marginal iterations
    std::uint64_t seed = 1;
    int workers = 1;

    bool operator==(const RunSpec&) const = default;
};

struct PmSpec {
    std::vector<double> prior_low{-1.0, 0.0};
    std::vector<double> prior_high{1.0, 0.4};
    std::vector<double> proposal_stddev{0.025, 0.01};
    std::optional<std::vector<double>> init_theta; // default: prior mean
    double data_alpha = 0.1;
    double data_beta = 0.1;
    std::int64_t data_gibbs_sweeps = 10000;

    bool operator==(const PmSpec&) const = default;
};

struct ExperimentConfig {
    ModelSpec model;
    EstimatorSpec estimator;
    AisSpec ais;
    RunSpec run;
    PmSpec pm;

    bool operator==(const ExperimentConfig&) const = default;

    // Unknown keys are rejected at every level; validation errors carry the
    // offending field name.
    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    static ExperimentConfig load(const std::string& path);
    void validate() const;
};

// Paper-quoted defaults per experiment. full_scale selects the quoted run
// lengths (10,000 trials; 100,000 iterations); otherwise desk-scale sizes.
ExperimentConfig default_estimate_config(bool full_scale = false);
ExperimentConfig default_pm_ising_config(bool full_scale = false);
ExperimentConfig default_pm_ergm_config(bool full_scale = false);

} // namespace invz::config

#endif
