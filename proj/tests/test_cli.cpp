#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lcrl/experiments.hpp"

using namespace lcrl;
using nlohmann::json;

namespace {

json base_model() {
    return json{{"A", {{0.0}}},
                {"B", {{1.0}}},
                {"x0", {0.0}},
                {"T", 1.0},
                {"n_steps", 100},
                {"cost",
                 {{"variant", "smooth_quadratic"},
                  {"Q", {{0.0}}},
                  {"R", {{1.0}}},
                  {"Gterm", {{1.0}}}}}};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("config parsing fills defaults and hashes deterministically") {
    json doc{{"experiment", "pege-run"}, {"model", base_model()}};
    ExperimentConfig cfg = parse_experiment_config(doc);
    CHECK(cfg.theta.d() == 1);
    CHECK(cfg.theta0_hat.isZero(0.0));
    CHECK(cfg.V0.isApprox(MatrixXd::Identity(2, 2)));
    CHECK(cfg.delta == doctest::Approx(0.05));
    CHECK(cfg.seeds.size() == 1);
    CHECK(cfg.hash == parse_experiment_config(doc).hash);
    CHECK(cfg.hash.size() == 16);
}

TEST_CASE("unknown keys are rejected") {
    json doc{{"experiment", "pege-run"}, {"model", base_model()}, {"typo_key", 1}};
    CHECK_THROWS_AS(parse_experiment_config(doc), std::invalid_argument);

    json nested{{"experiment", "pege-run"}, {"model", base_model()}};
    nested["model"]["unexpected"] = 3;
    CHECK_THROWS_AS(parse_experiment_config(nested), std::invalid_argument);

    json cost_typo{{"experiment", "pege-run"}, {"model", base_model()}};
    cost_typo["model"]["cost"]["S"] = json::array();
    CHECK_THROWS_AS(parse_experiment_config(cost_typo), std::invalid_argument);
}

TEST_CASE("seed lists and base/count forms") {
    json doc{{"experiment", "pege-run"}, {"model", base_model()}, {"seeds", {4, 9, 16}}};
    CHECK(parse_experiment_config(doc).seeds == std::vector<std::uint64_t>{4, 9, 16});

    json counted{{"experiment", "pege-run"},
                 {"model", base_model()},
                 {"seeds", {{"base", 10}, {"count", 3}}}};
    CHECK(parse_experiment_config(counted).seeds == std::vector<std::uint64_t>{10, 11, 12});
}

TEST_CASE("gap scan with common random numbers is exactly zero at radius zero") {
    json doc{{"experiment", "gap-scan"},
             {"model", base_model()},
             {"gap", {{"radii", {0.0, 0.2}}, {"n_directions", 2}, {"n_mc", 40}}}};
    ExperimentConfig cfg = parse_experiment_config(doc);
    GapScanResult res = run_gap_scan(cfg, 1);
    REQUIRE(res.rows.size() == 2);
    CHECK(res.rows[0].mean_gap == 0.0);
    CHECK(res.rows[0].se == 0.0);
    CHECK_FALSE(res.rows[0].used_in_fit);
}

TEST_CASE("experiment outputs reproduce bit-identically") {
    json doc{{"experiment", "riccati-check"}, {"model", base_model()}};
    doc["model"]["n_steps"] = 1000;
    ExperimentConfig cfg = parse_experiment_config(doc);

    const std::string dir_a = "test_out_a", dir_b = "test_out_b";
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    write_experiment_outputs(cfg, dir_a, 1);
    write_experiment_outputs(cfg, dir_b, 1);
    CHECK(slurp(dir_a + "/summary.json") == slurp(dir_b + "/summary.json"));
    CHECK(slurp(dir_a + "/config_echo.json") == slurp(dir_b + "/config_echo.json"));
    CHECK_FALSE(slurp(dir_a + "/summary.json").empty());
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST_CASE("csv tables carry the seed count and config hash") {
    json doc{{"experiment", "gap-scan"},
             {"model", base_model()},
             {"gap", {{"radii", {0.1, 0.2}}, {"n_directions", 1}, {"n_mc", 30}}}};
    ExperimentConfig cfg = parse_experiment_config(doc);
    const std::string dir = "test_out_gap";
    std::filesystem::remove_all(dir);
    write_experiment_outputs(cfg, dir, 1);
    const std::string csv = slurp(dir + "/gap_scan.csv");
    CHECK(csv.find("n_seeds,config_hash") != std::string::npos);
    CHECK(csv.find(cfg.hash) != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_SUITE_END();
