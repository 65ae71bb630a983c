#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "invz/config.hpp"
#include "invz/experiments.hpp"

namespace {

using invz::config::ExperimentConfig;

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> estimator;
    bool full_scale = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON experiment config")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--seed", flags.seed, "master seed (overrides config)");
    cmd->add_option("--workers", flags.workers, "worker threads (overrides config)");
    cmd->add_option("--estimator", flags.estimator,
                    "run a single estimator: iae, fce, rbbce, or exact");
    cmd->add_flag("--full-scale", flags.full_scale,
                  "paper-scale run lengths (hours of compute)");
}

ExperimentConfig resolve(const CommonFlags& flags,
                         ExperimentConfig (*defaults)(bool)) {
    ExperimentConfig cfg = flags.config_path.empty()
                               ? defaults(flags.full_scale)
                               : ExperimentConfig::load(flags.config_path);
    if (flags.full_scale && !flags.config_path.empty()) {
        const ExperimentConfig full = defaults(true);
        cfg.run.n_trials = full.run.n_trials;
        cfg.run.n_iters = full.run.n_iters;
    }
    if (flags.seed) cfg.run.seed = *flags.seed;
    if (flags.workers) cfg.run.workers = *flags.workers;
    if (flags.estimator) cfg.estimator.kinds = {*flags.estimator};
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unbiased 1/Z estimation by Russian-roulette truncation of "
                 "coupled Markov chains, with a sign-corrected pseudo-marginal "
                 "sampler for Ising and ERGM posteriors"};
    app.require_subcommand(1);

    CommonFlags est_flags, pmi_flags, pme_flags, orc_flags;

    CLI::App* est = app.add_subcommand(
        "estimate", "tau-sweep benchmark of the 1/Z estimators on a lattice");
    add_common(est, est_flags);

    CLI::App* pmi = app.add_subcommand(
        "pm-ising", "pseudo-marginal posterior sampling for an Ising lattice");
    add_common(pmi, pmi_flags);

    CLI::App* pme = app.add_subcommand(
        "pm-ergm", "pseudo-marginal posterior sampling for an ERGM");
    add_common(pme, pme_flags);

    CLI::App* orc = app.add_subcommand(
        "oracle", "exact log Z values (transfer matrix and brute force)");
    add_common(orc, orc_flags);

    app.add_subcommand("selftest", "run the built-in property checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (est->parsed())
            return invz::experiments::cmd_estimate(
                resolve(est_flags, invz::config::default_estimate_config),
                est_flags.out_dir);
        if (pmi->parsed())
            return invz::experiments::cmd_pm_ising(
                resolve(pmi_flags, invz::config::default_pm_ising_config),
                pmi_flags.out_dir);
        if (pme->parsed())
            return invz::experiments::cmd_pm_ergm(
                resolve(pme_flags, invz::config::default_pm_ergm_config),
                pme_flags.out_dir);
        if (orc->parsed())
            return invz::experiments::cmd_oracle(
                resolve(orc_flags, invz::config::default_estimate_config),
                orc_flags.out_dir);
        return invz::experiments::selftest() == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
