#ifndef INVZ_EXPERIMENTS_HPP
#define INVZ_EXPERIMENTS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "invz/config.hpp"
#include "invz/diagnostics.hpp"
#include "invz/pseudo_marginal.hpp"
#include "invz/roulette.hpp"

namespace invz::experiments {

using config::ExperimentConfig;

// ---- tau-sweep estimator benchmark (Figure-1 style) ----

struct EstimateCell {
    double tau = 0.0;
    std::string estimator;
    std::vector<roulette::RouletteEstimate> estimates;
    std::optional<double> true_log_inv_z; // -log Z from the exact oracle
    diagnostics::EstimatorSummary summary;
};

struct EstimateSweep {
    std::vector<EstimateCell> cells; // ordered by (tau, estimator)
};

EstimateSweep run_estimate_sweep(const ExperimentConfig& cfg);

// trials.csv + summary.csv + meta.json under out_dir.
void write_estimate_outputs(const EstimateSweep& sweep,
                            const ExperimentConfig& cfg,
                            const std::string& out_dir);

// ---- pseudo-marginal experiments ----

struct PmExperimentResult {
    std::string estimator;
    pm::PmTrace trace;
    double positive_fraction = 0.0;
    double acceptance_rate = 0.0;
    std::vector<double> sign_corrected_means;
};

struct PmExperiment {
    std::vector<PmExperimentResult> chains; // one per estimator kind
    std::vector<std::string> theta_names;
    nlohmann::json meta; // dataset provenance, config echo
};

PmExperiment run_pm_ising(const ExperimentConfig& cfg);
PmExperiment run_pm_ergm(const ExperimentConfig& cfg);

// trace_<kind>.csv per chain + summary.json + meta.json under out_dir.
void write_pm_outputs(const PmExperiment& experiment, const std::string& out_dir);

// ---- exact-normalizer oracle ----

nlohmann::json run_oracle(const ExperimentConfig& cfg);

// ---- command entry points (orchestrate run_* + writers) ----

int cmd_estimate(const ExperimentConfig& cfg, const std::string& out_dir);
int cmd_pm_ising(const ExperimentConfig& cfg, const std::string& out_dir);
int cmd_pm_ergm(const ExperimentConfig& cfg, const std::string& out_dir);
int cmd_oracle(const ExperimentConfig& cfg, const std::string& out_dir);

// Fast built-in property checks; prints one line per check, returns the
// number of failures.
int selftest();

// Deterministic double formatting shared by every CSV/JSON writer.
std::string format_double(double v);

} // namespace invz::experiments

#endif
