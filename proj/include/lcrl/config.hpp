#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lcrl/pege.hpp"

namespace lcrl {

struct GapScanSettings {
    std::vector<double> radii;
    int n_directions = 4;
    int n_mc = 10000;
    std::uint64_t direction_seed = 7;
    double expected_r = 1.0;  // reporting knob: gap exponent should be 2r
};

struct RegretScanSettings {
    std::vector<int> n_grid;
};

struct ConcentrationSettings {
    std::vector<int> m_grid;
    int info_n_mc = 2000;
};

struct OrliczSettings {
    int n_samples = 100000;
    std::uint64_t seed = 1;
};

// One JSON document per experiment; schema-validated with unknown keys
// rejected before any computation runs.
struct ExperimentConfig {
    std::string experiment;

    ParamTheta theta;
    ParamBox theta_box;
    VectorXd x0;
    TimeGrid grid;
    CostSpec cost;

    MatrixXd theta0_hat;
    MatrixXd V0;
    TruncationSpec truncation;
    std::optional<ExplorationSpec> exploration;
    PegeSchedule schedule;
    int n_episodes = 1;
    bool optional_update = false;
    bool greedy_only = false;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds;  // resolved seed list for scans
    double delta = 0.05;
    HjbDomain hjb_domain;
    int eval_n_mc = 2000;
    bool decompose = true;
    bool dump_trajectories = false;

    GapScanSettings gap;
    RegretScanSettings regret;
    ConcentrationSettings concentration;
    OrliczSettings orlicz;

    nlohmann::json resolved;  // config with defaults filled in
    std::string hash;         // FNV-1a of the resolved document

    PegeConfig to_pege_config() const;
};

ExperimentConfig parse_experiment_config(const nlohmann::json& doc);
ExperimentConfig load_experiment_config(const std::string& path);

std::string config_hash_hex(const nlohmann::json& doc);

}  // namespace lcrl
