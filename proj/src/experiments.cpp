#include "invz/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

#include "invz/ergm.hpp"
#include "invz/ising.hpp"
#include "invz/parallel.hpp"
#include "invz/weights.hpp"

namespace invz::experiments {

namespace fs = std::filesystem;
using config::ExperimentConfig;
using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void ensure_dir(const std::string& dir) {
    fs::create_directories(dir);
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::ofstream out(fs::path(dir) / name);
    if (!out) throw std::runtime_error("cannot open output file " + name + " in " + dir);
    return out;
}

int canonical_kind_id(const std::string& kind) {
    if (kind == "iae") return 0;
    if (kind == "fce") return 1;
    if (kind == "rbbce") return 2;
    if (kind == "exact") return 3;
    throw std::invalid_argument("unknown estimator kind: " + kind);
}

std::vector<double> tau_points(const config::ModelSpec& model) {
    if (!model.tau_grid.empty()) return model.tau_grid;
    if (model.tau) return {*model.tau};
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
}

// ---- estimate sweep ----

struct CellTask {
    double tau = 0.0;
    std::shared_ptr<const ising::IsingModel> ising_model; // ising cells only
    std::optional<double> true_log_inv_z;
};

CellTask build_ising_cell(const ExperimentConfig& cfg, std::size_t tau_index,
                          double tau) {
    CellTask task;
    task.tau = tau;
    ising::IsingParams params;
    if (cfg.model.alpha && cfg.model.beta) {
        params.rows = cfg.model.rows;
        params.cols = cfg.model.cols;
        params.alpha = *cfg.model.alpha;
        params.beta = *cfg.model.beta;
    } else {
        RngStream rng(cfg.run.seed, {static_cast<std::uint64_t>(tau_index)},
                      Purpose::model_params);
        params = ising::sample_tau_params(cfg.model.rows, cfg.model.cols, tau, rng);
    }
    task.ising_model = std::make_shared<ising::IsingModel>(std::move(params));
    task.true_log_inv_z = -task.ising_model->log_z_transfer();
    return task;
}

} // namespace

EstimateSweep run_estimate_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    for (const std::string& kind : cfg.estimator.kinds)
        if (kind == "exact")
            throw std::invalid_argument("run_estimate_sweep: \"exact\" is only "
                                        "meaningful inside the pseudo-marginal chain");

    const roulette::StoppingRule rule(cfg.estimator.tail_exponent);
    const auto schedule = weights::AnnealingSchedule::linear(cfg.ais.n_levels);

    std::vector<CellTask> tasks;
    if (cfg.model.kind == "two_point") {
        CellTask task;
        task.tau = 0.0;
        task.true_log_inv_z = -std::log(3.0);
        tasks.push_back(std::move(task));
    } else if (cfg.model.kind == "ising") {
        const std::vector<double> taus = tau_points(cfg.model);
        for (std::size_t i = 0; i < taus.size(); ++i)
            tasks.push_back(build_ising_cell(cfg, i, taus[i]));
    } else {
        throw std::invalid_argument("run_estimate_sweep: model.kind must be "
                                    "ising or two_point");
    }

    EstimateSweep sweep;
    for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
        const CellTask& task = tasks[ti];

        std::shared_ptr<const weights::WeightSource> raw;
        if (cfg.model.kind == "two_point") {
            raw = std::make_shared<weights::TwoPointSource>();
        } else {
            raw = std::make_shared<weights::AisSource<ising::IsingModel>>(
                *task.ising_model, schedule, "ais-ising");
        }
        const weights::BatchedSource source(raw, cfg.ais.batch_size);

        for (const std::string& kind_name : cfg.estimator.kinds) {
            const auto kind = weights::estimator_from_name(kind_name);
            const std::uint64_t kind_id =
                static_cast<std::uint64_t>(canonical_kind_id(kind_name));

            EstimateCell cell;
            cell.tau = task.tau;
            cell.estimator = kind_name;
            cell.true_log_inv_z = task.true_log_inv_z;
            cell.estimates.resize(static_cast<std::size_t>(cfg.run.n_trials));
            parallel_for(cfg.run.n_trials, cfg.run.workers, [&](std::int64_t trial) {
                RngStream rng(cfg.run.seed,
                              {static_cast<std::uint64_t>(ti), kind_id,
                               static_cast<std::uint64_t>(trial)},
                              Purpose::estimator_trial);
                cell.estimates[static_cast<std::size_t>(trial)] =
                    weights::draw_roulette_estimate(source, rule, kind,
                                                    cfg.estimator.burn_in, rng);
            });

            std::vector<SignedLog> values;
            values.reserve(cell.estimates.size());
            for (const auto& e : cell.estimates) values.push_back(e.value);
            cell.summary = diagnostics::summarize(values, cell.true_log_inv_z);

            double coupled_sum = 0.0;
            std::int64_t coupled_n = 0;
            for (const auto& e : cell.estimates)
                if (e.coupled_at) {
                    coupled_sum += static_cast<double>(*e.coupled_at);
                    ++coupled_n;
                }
            if (coupled_n > 0)
                cell.summary.mean_coupled_at = coupled_sum / static_cast<double>(coupled_n);

            sweep.cells.push_back(std::move(cell));
        }
    }
    return sweep;
}

void write_estimate_outputs(const EstimateSweep& sweep, const ExperimentConfig& cfg,
                            const std::string& out_dir) {
    ensure_dir(out_dir);

    std::ofstream trials = open_out(out_dir, "trials.csv");
    trials << "estimator,tau,trial,sign,log_abs,n,coupled_at,work\n";
    for (const EstimateCell& cell : sweep.cells) {
        for (std::size_t t = 0; t < cell.estimates.size(); ++t) {
            const auto& e = cell.estimates[t];
            trials << cell.estimator << ',' << format_double(cell.tau) << ',' << t
                   << ',' << e.value.sign << ','
                   << (e.value.sign == 0 ? "" : format_double(e.value.log_mag)) << ','
                   << e.n << ','
                   << (e.coupled_at ? std::to_string(*e.coupled_at) : std::string())
                   << ',' << e.work << '\n';
        }
    }

    std::ofstream summary = open_out(out_dir, "summary.csv");
    summary << "estimator,tau,n_trials,rel_std,frac_positive,mean_coupled_at\n";
    for (const EstimateCell& cell : sweep.cells) {
        summary << cell.estimator << ',' << format_double(cell.tau) << ','
                << cell.summary.n_trials << ',' << format_double(cell.summary.rel_std)
                << ',' << format_double(cell.summary.frac_positive) << ','
                << (cell.summary.mean_coupled_at
                        ? format_double(*cell.summary.mean_coupled_at)
                        : std::string())
                << '\n';
    }

    json meta;
    meta["command"] = "estimate";
    meta["config"] = cfg.to_json();
    json oracles = json::array();
    for (const EstimateCell& cell : sweep.cells)
        if (cell.estimator == cfg.estimator.kinds.front())
            oracles.push_back({{"tau", cell.tau},
                               {"log_inv_z", cell.true_log_inv_z
                                                 ? json(*cell.true_log_inv_z)
                                                 : json()}});
    meta["oracle_log_inv_z_per_tau"] = oracles;
    open_out(out_dir, "meta.json") << meta.dump(2) << '\n';
}

// ---- pseudo-marginal experiments ----

namespace {

struct BoxPrior {
    std::vector<double> lo, hi;

    double log_density(const pm::Theta& th) const {
        double lp = 0.0;
        for (std::size_t d = 0; d < lo.size(); ++d) {
            if (th[d] < lo[d] || th[d] > hi[d]) return kNegInf;
            lp -= std::log(hi[d] - lo[d]);
        }
        return lp;
    }

    pm::Theta mean() const {
        pm::Theta th(lo.size());
        for (std::size_t d = 0; d < lo.size(); ++d) th[d] = 0.5 * (lo[d] + hi[d]);
        return th;
    }
};

pm::PmTrace run_one_chain(const ExperimentConfig& cfg, const std::string& kind_name,
                          const pm::PmProblem& problem) {
    const pm::Theta init = cfg.pm.init_theta
                               ? *cfg.pm.init_theta
                               : BoxPrior{cfg.pm.prior_low, cfg.pm.prior_high}.mean();
    auto proposal = pm::PmProposal::gaussian_random_walk(cfg.pm.proposal_stddev);
    RngStream rng(cfg.run.seed,
                  {static_cast<std::uint64_t>(canonical_kind_id(kind_name))},
                  Purpose::pm_chain);
    return pm::run_pm_chain(init, cfg.run.n_iters, problem, proposal, rng);
}

PmExperimentResult summarize_chain(std::string kind_name, pm::PmTrace trace) {
    PmExperimentResult result;
    result.estimator = std::move(kind_name);
    result.positive_fraction =
        trace.records.empty() ? 0.0 : pm::positive_fraction(trace);
    result.acceptance_rate =
        trace.records.empty()
            ? 0.0
            : static_cast<double>(trace.n_accepted) /
                  static_cast<double>(trace.records.size());
    if (!trace.records.empty()) {
        const std::size_t dim = trace.records.front().theta.size();
        for (std::size_t d = 0; d < dim; ++d)
            result.sign_corrected_means.push_back(pm::sign_corrected_mean(trace, d));
    }
    result.trace = std::move(trace);
    return result;
}

} // namespace

PmExperiment run_pm_ising(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.model.kind != "ising")
        throw std::invalid_argument("run_pm_ising: model.kind must be ising");
    if (cfg.pm.prior_low.size() != 2)
        throw std::invalid_argument("run_pm_ising: theta = (alpha, beta) is 2-d");

    const int rows = cfg.model.rows;
    const int cols = cfg.model.cols;

    // Synthetic dataset: long Gibbs run at the generating parameters from a
    // uniform start, seeded; effort and seed recorded in meta.json.
    const ising::IsingModel gen_model(ising::IsingParams::homogeneous(
        rows, cols, cfg.pm.data_alpha, cfg.pm.data_beta));
    RngStream data_rng(cfg.run.seed, {}, Purpose::data_gen);
    ising::SpinState data = gen_model.sample_uniform(data_rng);
    for (std::int64_t s = 0; s < cfg.pm.data_gibbs_sweeps; ++s)
        gen_model.kernel_sweep(data, 1.0, data_rng);

    // Sufficient statistics: log p*(y|alpha,beta) = alpha*s1 + beta*s2.
    double s1 = 0.0;
    for (auto v : data) s1 += v;
    double s2 = 0.0;
    for (const auto& [a, b] : ising::grid_edges(rows, cols))
        s2 += static_cast<double>(data[static_cast<std::size_t>(a)]) *
              static_cast<double>(data[static_cast<std::size_t>(b)]);

    const BoxPrior prior{cfg.pm.prior_low, cfg.pm.prior_high};
    const auto schedule = weights::AnnealingSchedule::linear(cfg.ais.n_levels);
    const roulette::StoppingRule rule(cfg.estimator.tail_exponent);

    PmExperiment experiment;
    experiment.theta_names = {"alpha", "beta"};
    experiment.chains.resize(cfg.estimator.kinds.size());

    parallel_for(static_cast<std::int64_t>(cfg.estimator.kinds.size()),
                 cfg.run.workers, [&](std::int64_t ki) {
        const std::string& kind_name = cfg.estimator.kinds[static_cast<std::size_t>(ki)];
        pm::PmProblem problem;
        problem.log_unnorm_likelihood = [s1, s2](const pm::Theta& th) {
            return th[0] * s1 + th[1] * s2;
        };
        problem.log_prior = [prior](const pm::Theta& th) {
            return prior.log_density(th);
        };
        if (kind_name == "exact") {
            problem.inv_z_estimate = [rows, cols](const pm::Theta& th, RngStream&) {
                const ising::IsingModel m(
                    ising::IsingParams::homogeneous(rows, cols, th[0], th[1]));
                return SignedLog::from_log(-m.log_z_transfer());
            };
        } else {
            const auto kind = weights::estimator_from_name(kind_name);
            problem.inv_z_estimate = [&cfg, &schedule, &rule, rows, cols,
                                      kind](const pm::Theta& th, RngStream& rng) {
                const ising::IsingModel m(
                    ising::IsingParams::homogeneous(rows, cols, th[0], th[1]));
                const auto raw = std::make_shared<weights::AisSource<ising::IsingModel>>(
                    m, schedule, "ais-ising");
                const weights::BatchedSource source(raw, cfg.ais.batch_size);
                return weights::averaged_inv_z_estimate(
                    source, rule, kind, cfg.estimator.burn_in,
                    cfg.estimator.n_estimator_trials, rng);
            };
        }
        experiment.chains[static_cast<std::size_t>(ki)] =
            summarize_chain(kind_name, run_one_chain(cfg, kind_name, problem));
    });

    experiment.meta = {{"command", "pm-ising"},
                       {"config", cfg.to_json()},
                       {"dataset",
                        {{"generator", "systematic-scan Gibbs from uniform start"},
                         {"sweeps", cfg.pm.data_gibbs_sweeps},
                         {"alpha", cfg.pm.data_alpha},
                         {"beta", cfg.pm.data_beta},
                         {"rng", "stream (seed, purpose=data_gen)"},
                         {"sum_spins", s1},
                         {"sum_edge_products", s2}}}};
    return experiment;
}

PmExperiment run_pm_ergm(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.model.kind != "ergm")
        throw std::invalid_argument("run_pm_ergm: model.kind must be ergm");
    if (cfg.model.edgelist.empty())
        throw std::invalid_argument("run_pm_ergm: model.edgelist is required");
    if (cfg.pm.prior_low.size() != 2)
        throw std::invalid_argument("run_pm_ergm: theta = (theta_e, theta_s) is 2-d");

    const ergm::GraphState observed = ergm::load_graph_edgelist(cfg.model.edgelist);
    const ergm::ErgmStats data_stats = ergm::graph_stats(observed);
    const int n_nodes = observed.n_nodes;

    const BoxPrior prior{cfg.pm.prior_low, cfg.pm.prior_high};
    const auto schedule = weights::AnnealingSchedule::linear(cfg.ais.n_levels);
    const roulette::StoppingRule rule(cfg.estimator.tail_exponent);

    PmExperiment experiment;
    experiment.theta_names = {"theta_e", "theta_s"};
    experiment.chains.resize(cfg.estimator.kinds.size());

    parallel_for(static_cast<std::int64_t>(cfg.estimator.kinds.size()),
                 cfg.run.workers, [&](std::int64_t ki) {
        const std::string& kind_name = cfg.estimator.kinds[static_cast<std::size_t>(ki)];
        pm::PmProblem problem;
        problem.log_unnorm_likelihood = [data_stats](const pm::Theta& th) {
            return th[0] * static_cast<double>(data_stats.edges) +
                   th[1] * data_stats.avg_two_stars;
        };
        problem.log_prior = [prior](const pm::Theta& th) {
            return prior.log_density(th);
        };
        if (kind_name == "exact") {
            problem.inv_z_estimate = [n_nodes](const pm::Theta& th, RngStream&) {
                const ergm::ErgmModel m(ergm::ErgmParams{th[0], th[1]}, n_nodes);
                return SignedLog::from_log(-m.log_z_bruteforce());
            };
        } else {
            const auto kind = weights::estimator_from_name(kind_name);
            problem.inv_z_estimate = [&cfg, &schedule, &rule, n_nodes,
                                      kind](const pm::Theta& th, RngStream& rng) {
                const ergm::ErgmModel m(ergm::ErgmParams{th[0], th[1]}, n_nodes);
                const auto raw = std::make_shared<weights::AisSource<ergm::ErgmModel>>(
                    m, schedule, "ais-ergm");
                const weights::BatchedSource source(raw, cfg.ais.batch_size);
                return weights::averaged_inv_z_estimate(
                    source, rule, kind, cfg.estimator.burn_in,
                    cfg.estimator.n_estimator_trials, rng);
            };
        }
        experiment.chains[static_cast<std::size_t>(ki)] =
            summarize_chain(kind_name, run_one_chain(cfg, kind_name, problem));
    });

    experiment.meta = {
        {"command", "pm-ergm"},
        {"config", cfg.to_json()},
        {"dataset",
         {{"edgelist", cfg.model.edgelist},
          {"n_nodes", n_nodes},
          {"edges", data_stats.edges},
          {"avg_two_stars", data_stats.avg_two_stars}}}};
    return experiment;
}

void write_pm_outputs(const PmExperiment& experiment, const std::string& out_dir) {
    ensure_dir(out_dir);

    for (const PmExperimentResult& chain : experiment.chains) {
        std::ofstream trace = open_out(out_dir, "trace_" + chain.estimator + ".csv");
        trace << "iteration";
        for (std::size_t d = 0; d < experiment.theta_names.size(); ++d)
            trace << ",theta_" << (d + 1);
        trace << ",sigma,log_abs_f,accepted\n";
        for (const pm::PmRecord& rec : chain.trace.records) {
            trace << rec.iteration;
            for (double v : rec.theta) trace << ',' << format_double(v);
            trace << ',' << rec.sigma << ',' << format_double(rec.log_abs_f) << ','
                  << (rec.accepted ? 1 : 0) << '\n';
        }
    }

    json summary = json::array();
    for (const PmExperimentResult& chain : experiment.chains) {
        json means = json::object();
        for (std::size_t d = 0; d < chain.sign_corrected_means.size(); ++d)
            means[experiment.theta_names[d]] = chain.sign_corrected_means[d];
        summary.push_back({{"estimator", chain.estimator},
                           {"n_iters", chain.trace.records.size()},
                           {"positive_fraction", chain.positive_fraction},
                           {"acceptance_rate", chain.acceptance_rate},
                           {"n_zero_estimates", chain.trace.n_zero_estimates},
                           {"n_out_of_support", chain.trace.n_out_of_support},
                           {"sign_corrected_means", means}});
    }
    open_out(out_dir, "summary.json") << summary.dump(2) << '\n';
    open_out(out_dir, "meta.json") << experiment.meta.dump(2) << '\n';
}

// ---- oracle ----

nlohmann::json run_oracle(const ExperimentConfig& cfg) {
    cfg.validate();
    json out;
    if (cfg.model.kind == "ising") {
        ising::IsingParams params;
        if (cfg.model.alpha && cfg.model.beta) {
            params.rows = cfg.model.rows;
            params.cols = cfg.model.cols;
            params.alpha = *cfg.model.alpha;
            params.beta = *cfg.model.beta;
        } else {
            RngStream rng(cfg.run.seed, {0}, Purpose::model_params);
            params = ising::sample_tau_params(cfg.model.rows, cfg.model.cols,
                                              cfg.model.tau.value_or(0.0), rng);
        }
        const ising::IsingModel model(std::move(params));
        out["model"] = "ising";
        out["rows"] = cfg.model.rows;
        out["cols"] = cfg.model.cols;
        out["n_sites"] = model.n_sites();
        out["log_z_transfer"] = model.log_z_transfer();
        if (model.n_sites() <= 20)
            out["log_z_bruteforce"] = model.log_z_bruteforce();
        else
            out["log_z_bruteforce"] = nullptr; // refused: too many sites
    } else if (cfg.model.kind == "ergm") {
        const ergm::GraphState observed = ergm::load_graph_edgelist(cfg.model.edgelist);
        if (observed.n_nodes > 5)
            throw std::invalid_argument("oracle: ergm brute force limited to 5 nodes");
        const ergm::ErgmModel model(
            ergm::ErgmParams{cfg.pm.data_alpha, cfg.pm.data_beta}, observed.n_nodes);
        out["model"] = "ergm";
        out["n_nodes"] = observed.n_nodes;
        out["log_z_bruteforce"] = model.log_z_bruteforce();
    } else {
        out["model"] = "two_point";
        out["log_z"] = std::log(3.0);
    }
    return out;
}

// ---- command wrappers ----

int cmd_estimate(const ExperimentConfig& cfg, const std::string& out_dir) {
    const EstimateSweep sweep = run_estimate_sweep(cfg);
    write_estimate_outputs(sweep, cfg, out_dir);
    return 0;
}

int cmd_pm_ising(const ExperimentConfig& cfg, const std::string& out_dir) {
    write_pm_outputs(run_pm_ising(cfg), out_dir);
    return 0;
}

int cmd_pm_ergm(const ExperimentConfig& cfg, const std::string& out_dir) {
    write_pm_outputs(run_pm_ergm(cfg), out_dir);
    return 0;
}

int cmd_oracle(const ExperimentConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    open_out(out_dir, "oracle.json") << run_oracle(cfg).dump(2) << '\n';
    return 0;
}

} // namespace invz::experiments
