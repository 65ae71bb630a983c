#include "invz/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace invz::config {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& where,
                    const std::set<std::string>& allowed) {
    if (!j.is_object())
        throw std::invalid_argument("config: " + where + " must be an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.contains(key))
            throw std::invalid_argument("config: unknown key \"" + key + "\" in " + where);
}

template <class T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

template <class T>
void get_optional(const json& j, const char* key, std::optional<T>& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

ModelSpec model_from_json(const json& j) {
    reject_unknown(j, "model",
                   {"kind", "rows", "cols", "tau", "tau_grid", "alpha", "beta", "edgelist"});
    ModelSpec m;
    get_if(j, "kind", m.kind);
    get_if(j, "rows", m.rows);
    get_if(j, "cols", m.cols);
    get_optional(j, "tau", m.tau);
    get_if(j, "tau_grid", m.tau_grid);
    get_optional(j, "alpha", m.alpha);
    get_optional(j, "beta", m.beta);
    get_if(j, "edgelist", m.edgelist);
    return m;
}

EstimatorSpec estimator_from_json(const json& j) {
    reject_unknown(j, "estimator",
                   {"kinds", "tail_exponent", "burn_in", "n_estimator_trials"});
    EstimatorSpec e;
    get_if(j, "kinds", e.kinds);
    get_if(j, "tail_exponent", e.tail_exponent);
    get_if(j, "burn_in", e.burn_in);
    get_if(j, "n_estimator_trials", e.n_estimator_trials);
    return e;
}

AisSpec ais_from_json(const json& j) {
    reject_unknown(j, "ais", {"n_levels", "batch_size"});
    AisSpec a;
    get_if(j, "n_levels", a.n_levels);
    get_if(j, "batch_size", a.batch_size);
    return a;
}

RunSpec run_from_json(const json& j) {
    reject_unknown(j, "run", {"n_trials", "n_iters", "seed", "workers"});
    RunSpec r;
    get_if(j, "n_trials", r.n_trials);
    get_if(j, "n_iters", r.n_iters);
    get_if(j, "seed", r.seed);
    get_if(j, "workers", r.workers);
    return r;
}

PmSpec pm_from_json(const json& j) {
    reject_unknown(j, "pm",
                   {"prior_low", "prior_high", "proposal_stddev", "init_theta",
                    "data_alpha", "data_beta", "data_gibbs_sweeps"});
    PmSpec p;
    get_if(j, "prior_low", p.prior_low);
    get_if(j, "prior_high", p.prior_high);
    get_if(j, "proposal_stddev", p.proposal_stddev);
    get_optional(j, "init_theta", p.init_theta);
    get_if(j, "data_alpha", p.data_alpha);
    get_if(j, "data_beta", p.data_beta);
    get_if(j, "data_gibbs_sweeps", p.data_gibbs_sweeps);
    return p;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    reject_unknown(j, "config", {"model", "estimator", "ais", "run", "pm"});
    ExperimentConfig c;
    if (j.contains("model")) c.model = model_from_json(j.at("model"));
    if (j.contains("estimator")) c.estimator = estimator_from_json(j.at("estimator"));
    if (j.contains("ais")) c.ais = ais_from_json(j.at("ais"));
    if (j.contains("run")) c.run = run_from_json(j.at("run"));
    if (j.contains("pm")) c.pm = pm_from_json(j.at("pm"));
    c.validate();
    return c;
}

nlohmann::json ExperimentConfig::to_json() const {
    json jm{{"kind", model.kind}, {"rows", model.rows}, {"cols", model.cols},
            {"tau_grid", model.tau_grid}, {"edgelist", model.edgelist}};
    if (model.tau) jm["tau"] = *model.tau;
    if (model.alpha) jm["alpha"] = *model.alpha;
    if (model.beta) jm["beta"] = *model.beta;

    json je{{"kinds", estimator.kinds},
            {"tail_exponent", estimator.tail_exponent},
            {"burn_in", estimator.burn_in},
            {"n_estimator_trials", estimator.n_estimator_trials}};
    json ja{{"n_levels", ais.n_levels}, {"batch_size", ais.batch_size}};
    json jr{{"n_trials", run.n_trials}, {"n_iters", run.n_iters},
            {"seed", run.seed}, {"workers", run.workers}};
    json jp{{"prior_low", pm.prior_low}, {"prior_high", pm.prior_high},
            {"proposal_stddev", pm.proposal_stddev},
            {"data_alpha", pm.data_alpha}, {"data_beta", pm.data_beta},
            {"data_gibbs_sweeps", pm.data_gibbs_sweeps}};
    if (pm.init_theta) jp["init_theta"] = *pm.init_theta;

    return json{{"model", jm}, {"estimator", je}, {"ais", ja}, {"run", jr}, {"pm", jp}};
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    json j;
    in >> j;
    return from_json(j);
}

void ExperimentConfig::validate() const {
    const auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("config: ") + what);
    };
    require(model.kind == "ising" || model.kind == "ergm" || model.kind == "two_point",
            "model.kind must be ising, ergm, or two_point");
    require(model.rows >= 1 && model.cols >= 1, "model.rows and model.cols must be >= 1");
    if (model.tau) require(*model.tau >= 0.0, "model.tau must be >= 0");
    for (double t : model.tau_grid) require(t >= 0.0, "model.tau_grid entries must be >= 0");
    require(!estimator.kinds.empty(), "estimator.kinds must be nonempty");
    for (const std::string& k : estimator.kinds)
        require(k == "iae" || k == "fce" || k == "rbbce" || k == "exact",
                "estimator.kinds entries must be iae, fce, rbbce, or exact");
    require(estimator.tail_exponent > 0.0, "estimator.tail_exponent must be positive");
    require(estimator.burn_in >= 0, "estimator.burn_in must be >= 0");
    require(estimator.n_estimator_trials >= 1, "estimator.n_estimator_trials must be >= 1");
    require(ais.n_levels >= 1, "ais.n_levels must be >= 1");
    require(ais.batch_size >= 1, "ais.batch_size must be >= 1");
    require(run.n_trials >= 1, "run.n_trials must be >= 1");
    require(run.n_iters >= 0, "run.n_iters must be >= 0");
    require(run.workers >= 1, "run.workers must be >= 1");
    require(pm.prior_low.size() == pm.prior_high.size() &&
                pm.prior_low.size() == pm.proposal_stddev.size(),
            "pm prior/proposal dimensions must agree");
    for (std::size_t d = 0; d < pm.prior_low.size(); ++d)
        require(pm.prior_low[d] < pm.prior_high[d], "pm prior box must be nonempty");
    if (pm.init_theta)
        require(pm.init_theta->size() == pm.prior_low.size(),
                "pm.init_theta dimension must match the prior");
    require(pm.data_gibbs_sweeps >= 1, "pm.data_gibbs_sweeps must be >= 1");
}

ExperimentConfig default_estimate_config(bool full_scale) {
    ExperimentConfig c;
    c.model.kind = "ising";
    c.model.rows = 10;
    c.model.cols = 30;
    c.model.tau_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    c.estimator.kinds = {"iae", "fce", "rbbce"};
    c.ais.n_levels = 10;
    c.ais.batch_size = 10;
    c.run.n_trials = full_scale ? 10000 : 1000;
    return c;
}

ExperimentConfig default_pm_ising_config(bool full_scale) {
    ExperimentConfig c;
    c.model.kind = "ising";
    c.model.rows = 10;
    c.model.cols = 30;
    c.estimator.kinds = {"rbbce", "fce", "iae"};
    c.estimator.n_estimator_trials = 2;
    c.ais.n_levels = 30;
    c.ais.batch_size = 10;
    c.run.n_iters = full_scale ? 100000 : 2000;
    c.pm.prior_low = {-1.0, 0.0};
    c.pm.prior_high = {1.0, 0.4};
    c.pm.proposal_stddev = {0.025, 0.01};
    c.pm.data_alpha = 0.1;
    c.pm.data_beta = 0.1;
    return c;
}

ExperimentConfig default_pm_ergm_config(bool full_scale) {
    ExperimentConfig c;
    c.model.kind = "ergm";
    c.model.edgelist = "data/florentine_business.edges";
    c.estimator.kinds = {"rbbce", "fce", "iae"};
    c.estimator.n_estimator_trials = 10;
    c.ais.n_levels = 10;
    c.ais.batch_size = 10;
    c.run.n_iters = full_scale ? 100000 : 2000;
    c.pm.prior_low = {-2.5, -1.0};
    c.pm.prior_high = {2.5, 1.0};
    c.pm.proposal_stddev = {1.0, 0.1};
    return c;
}

} // namespace invz::config
