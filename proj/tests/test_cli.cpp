#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "invz/config.hpp"
#include "invz/experiments.hpp"

using namespace invz;
using namespace invz::config;
using namespace invz::experiments;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ExperimentConfig tiny_two_point_config() {
    ExperimentConfig cfg;
    cfg.model.kind = "two_point";
    cfg.estimator.kinds = {"iae", "fce", "rbbce"};
    cfg.ais.batch_size = 1;
    cfg.run.n_trials = 60;
    cfg.run.seed = 5;
    return cfg;
}

} // namespace

TEST_CASE("config round-trips through JSON") {
    for (bool full : {false, true}) {
        for (const ExperimentConfig& cfg :
             {default_estimate_config(full), default_pm_ising_config(full),
              default_pm_ergm_config(full)}) {
            const ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
            CHECK(back == cfg);
        }
    }
    ExperimentConfig custom = default_pm_ising_config(false);
    custom.pm.init_theta = std::vector<double>{0.25, 0.1};
    custom.model.tau = 0.7;
    custom.model.alpha = std::vector<double>{1.0};
    custom.model.beta = std::vector<double>{};
    CHECK(ExperimentConfig::from_json(custom.to_json()) == custom);
}

TEST_CASE("unknown config keys are rejected by name") {
    nlohmann::json j{{"model", {{"kind", "ising"}, {"bogus", 1}}}};
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j),
                         doctest::Contains("bogus"), std::invalid_argument);
    nlohmann::json top{{"mdoel", nlohmann::json::object()}};
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(top),
                         doctest::Contains("mdoel"), std::invalid_argument);
}

TEST_CASE("config validation errors carry field names") {
    ExperimentConfig cfg = default_estimate_config(false);
    cfg.ais.n_levels = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("n_levels"),
                         std::invalid_argument);
    cfg = default_estimate_config(false);
    cfg.estimator.kinds = {"bogus"};
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("kinds"),
                         std::invalid_argument);
    cfg = default_pm_ising_config(false);
    cfg.pm.prior_low = {0.0};
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("dimensions"),
                         std::invalid_argument);
}

TEST_CASE("seeded estimate runs are bit-identical across runs and worker counts") {
    ExperimentConfig cfg = tiny_two_point_config();

    const fs::path d1 = fresh_dir("invz_det_1");
    const fs::path d2 = fresh_dir("invz_det_2");
    const fs::path d3 = fresh_dir("invz_det_3");
    cfg.run.workers = 1;
    cmd_estimate(cfg, d1.string());
    cmd_estimate(cfg, d2.string());
    cfg.run.workers = 2;
    cmd_estimate(cfg, d3.string());

    CHECK(slurp(d1 / "trials.csv") == slurp(d2 / "trials.csv"));
    CHECK(slurp(d1 / "trials.csv") == slurp(d3 / "trials.csv"));
    CHECK(slurp(d1 / "summary.csv") == slurp(d2 / "summary.csv"));
    CHECK(slurp(d1 / "summary.csv") == slurp(d3 / "summary.csv"));
}

TEST_CASE("estimate CSV schema is stable") {
    ExperimentConfig cfg = tiny_two_point_config();
    cfg.run.n_trials = 5;
    const fs::path dir = fresh_dir("invz_schema");
    cmd_estimate(cfg, dir.string());

    std::ifstream trials(dir / "trials.csv");
    std::string header;
    std::getline(trials, header);
    CHECK(header == "estimator,tau,trial,sign,log_abs,n,coupled_at,work");

    std::ifstream summary(dir / "summary.csv");
    std::getline(summary, header);
    CHECK(header == "estimator,tau,n_trials,rel_std,frac_positive,mean_coupled_at");
    int rows = 0;
    std::string line;
    while (std::getline(summary, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 3); // one per estimator
}

TEST_CASE("estimate on two_point reproduces the enumerated normalizer") {
    ExperimentConfig cfg = tiny_two_point_config();
    cfg.run.n_trials = 4000;
    cfg.run.workers = 2;
    const EstimateSweep sweep = run_estimate_sweep(cfg);
    REQUIRE(sweep.cells.size() == 3);
    for (const EstimateCell& cell : sweep.cells) {
        REQUIRE(cell.true_log_inv_z.has_value());
        CHECK(*cell.true_log_inv_z == doctest::Approx(-std::log(3.0)));
        // Sample mean within 5 sigma of 1/3 (per-estimator spread differs).
        double sum = 0.0, sum_sq = 0.0;
        for (const auto& e : cell.estimates) {
            const double v = e.value.value();
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / static_cast<double>(cell.estimates.size());
        const double se = std::sqrt(
            std::max(0.0, sum_sq / static_cast<double>(cell.estimates.size()) -
                              mean * mean) /
            static_cast<double>(cell.estimates.size()));
        CHECK(std::abs(mean - 1.0 / 3.0) <= 5.0 * se);
    }
}

TEST_CASE("estimate at tau = 0 recovers the uniform normalizer exactly") {
    // With every parameter zero the AIS weight is identically log Z0, all
    // roulette differences cancel, and each estimate is exactly 1/2^300.
    ExperimentConfig cfg = default_estimate_config(false);
    cfg.model.tau_grid = {0.0};
    cfg.run.n_trials = 6;
    cfg.run.seed = 42;
    const EstimateSweep sweep = run_estimate_sweep(cfg);
    const double expected_log = -(300.0 * M_LN2);
    for (const EstimateCell& cell : sweep.cells) {
        for (const auto& e : cell.estimates) {
            CHECK(e.value.sign == +1);
            CHECK(e.value.log_mag == expected_log);
        }
        CHECK(cell.summary.rel_std < 1e-9);
    }
}

TEST_CASE("pm-ising smoke run emits a valid trace") {
    ExperimentConfig cfg = default_pm_ising_config(false);
    cfg.model.rows = 4;
    cfg.model.cols = 4;
    cfg.ais.n_levels = 3;
    cfg.ais.batch_size = 2;
    cfg.estimator.kinds = {"rbbce"};
    cfg.estimator.n_estimator_trials = 1;
    cfg.run.n_iters = 10;
    cfg.pm.data_gibbs_sweeps = 50;
    const fs::path dir = fresh_dir("invz_pm_smoke");
    cmd_pm_ising(cfg, dir.string());

    std::ifstream trace(dir / "trace_rbbce.csv");
    std::string header;
    std::getline(trace, header);
    CHECK(header == "iteration,theta_1,theta_2,sigma,log_abs_f,accepted");
    int rows = 0;
    std::string line;
    while (std::getline(trace, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 10);

    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    REQUIRE(summary.is_array());
    CHECK(summary.size() == 1);
    CHECK(summary[0]["estimator"] == "rbbce");
    CHECK(summary[0]["positive_fraction"].get<double>() >= 0.0);
    const auto meta = nlohmann::json::parse(slurp(dir / "meta.json"));
    CHECK(meta["dataset"]["sweeps"] == 50);
}

TEST_CASE("pm-ergm smoke run on a toy edge list") {
    const fs::path edges = fs::temp_directory_path() / "invz_toy3.edges";
    std::ofstream(edges) << "3\n0 1\n1 2\n";

    ExperimentConfig cfg = default_pm_ergm_config(false);
    cfg.model.edgelist = edges.string();
    cfg.estimator.kinds = {"fce"};
    cfg.estimator.n_estimator_trials = 1;
    cfg.ais.n_levels = 3;
    cfg.ais.batch_size = 2;
    cfg.run.n_iters = 10;
    const fs::path dir = fresh_dir("invz_pm_ergm_smoke");
    cmd_pm_ergm(cfg, dir.string());

    std::ifstream trace(dir / "trace_fce.csv");
    std::string header;
    std::getline(trace, header);
    CHECK(header == "iteration,theta_1,theta_2,sigma,log_abs_f,accepted");
    int rows = 0;
    std::string line;
    while (std::getline(trace, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 10);
}

TEST_CASE("pm determinism across worker counts") {
    ExperimentConfig cfg = default_pm_ising_config(false);
    cfg.model.rows = 3;
    cfg.model.cols = 3;
    cfg.ais.n_levels = 2;
    cfg.ais.batch_size = 2;
    cfg.estimator.kinds = {"rbbce", "iae"};
    cfg.estimator.n_estimator_trials = 1;
    cfg.run.n_iters = 30;
    cfg.pm.data_gibbs_sweeps = 20;

    const fs::path d1 = fresh_dir("invz_pm_det_1");
    const fs::path d2 = fresh_dir("invz_pm_det_2");
    cfg.run.workers = 1;
    cmd_pm_ising(cfg, d1.string());
    cfg.run.workers = 2;
    cmd_pm_ising(cfg, d2.string());
    CHECK(slurp(d1 / "trace_rbbce.csv") == slurp(d2 / "trace_rbbce.csv"));
    CHECK(slurp(d1 / "trace_iae.csv") == slurp(d2 / "trace_iae.csv"));
}

TEST_CASE("oracle command") {
    SUBCASE("single-site lattice gives log 2") {
        ExperimentConfig cfg = default_estimate_config(false);
        cfg.model.rows = 1;
        cfg.model.cols = 1;
        cfg.model.tau = 0.0;
        cfg.model.tau_grid = {};
        const nlohmann::json out = run_oracle(cfg);
        CHECK(out["log_z_transfer"].get<double>() == doctest::Approx(M_LN2));
        CHECK(out["log_z_bruteforce"].get<double>() == doctest::Approx(M_LN2));
    }
    SUBCASE("seeded 3x3 lattice: transfer equals brute force") {
        ExperimentConfig cfg = default_estimate_config(false);
        cfg.model.rows = 3;
        cfg.model.cols = 3;
        cfg.model.tau = 0.9;
        cfg.model.tau_grid = {};
        cfg.run.seed = 11;
        const nlohmann::json out = run_oracle(cfg);
        CHECK(out["log_z_transfer"].get<double>() ==
              doctest::Approx(out["log_z_bruteforce"].get<double>()).epsilon(1e-12));
    }
    SUBCASE("10x30 lattice: transfer only, brute force refused") {
        ExperimentConfig cfg = default_estimate_config(false);
        cfg.model.tau = 0.5;
        cfg.model.tau_grid = {};
        const nlohmann::json out = run_oracle(cfg);
        CHECK(std::isfinite(out["log_z_transfer"].get<double>()));
        CHECK(out["log_z_bruteforce"].is_null());
    }
}

TEST_CASE("estimate rejects the exact plug-in kind") {
    ExperimentConfig cfg = tiny_two_point_config();
    cfg.estimator.kinds = {"exact"};
    CHECK_THROWS_AS(run_estimate_sweep(cfg), std::invalid_argument);
}
