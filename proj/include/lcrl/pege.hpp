#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "lcrl/estimator.hpp"
#include "lcrl/hjb.hpp"
#include "lcrl/model.hpp"
#include "lcrl/policies.hpp"
#include "lcrl/riccati.hpp"
#include "lcrl/sde.hpp"

namespace lcrl {

// Exploration/exploitation cycle schedule: m(k) exploitation episodes in
// cycle k, either floor(k^r) or 2^k.
struct PegeSchedule {
    enum class Kind { PowerFloor, Doubling };
    Kind kind = Kind::PowerFloor;
    double r = 1.0;  // only for PowerFloor, r in (0, 1]

    static PegeSchedule power_floor(double r);
    static PegeSchedule doubling();
};

// m(k)
std::int64_t schedule_m(const PegeSchedule& sched, int k);
// C(K) = K + sum_{k<=K} m(k)
std::int64_t episodes_after_cycle(const PegeSchedule& sched, int K);
// kappa(m) = min{k : C(k) >= m}
int cycle_of(const PegeSchedule& sched, std::int64_t m);

enum class Phase { Explore, Exploit };

struct EpisodeRecord {
    int m = 0;
    int cycle = 0;
    Phase phase = Phase::Explore;
    double cost = 0.0;
    MatrixXd theta_tilde;       // estimate in force when the episode ran
    double lambda_min = 0.0;    // of G_m after the episode's update
    VectorXd g_diag;            // diagonal of G_m after the update
    std::shared_ptr<const Policy> policy;
    double j_value = 0.0;       // J(Psi_m; theta), filled by evaluate_policy_values
    bool j_evaluated = false;
};

struct PegeConfig {
    ParamTheta theta;            // true parameter
    ParamBox theta_box;          // declared range, must contain theta
    CostSpec cost;
    TimeGrid grid;
    VectorXd x0;
    MatrixXd theta0_hat;         // prior mean, default zero
    MatrixXd V0;                 // prior column covariance, default identity
    TruncationSpec truncation;
    ExplorationSpec exploration;
    PegeSchedule schedule;
    int n_episodes = 1;
    bool optional_update = false;  // refresh the greedy estimate inside exploitation blocks
    bool greedy_only = false;      // ablation: skip exploration episodes entirely
    std::uint64_t base_seed = 1;
    HjbDomain hjb_domain;          // greedy synthesis domain for the entropy family
    int eval_n_mc = 2000;          // Monte Carlo budget for J evaluations
    std::optional<double> v_star_override;  // precomputed optimal value, if available
    // Optional per-episode trajectory sink (e.g. CSV dumps).
    std::function<void(int episode_index, const Trajectory&)> trajectory_sink;

    void validate() const;
};

struct RegretLedger {
    std::vector<EpisodeRecord> episodes;
    double v_star = 0.0;
    double v_star_se = 0.0;
    SufficientStats final_stats;
    PegeConfig config;

    std::vector<double> cumulative_regret() const;  // R(N) path against v_star
    double total_regret() const;
};

struct RegretDecomposition {
    double noise_term = 0.0;        // sum (l_m - J(Psi_m; theta))
    double exploration_term = 0.0;  // sum over exploration episodes of J(psi_e) - J(psi_theta)
    double exploitation_term = 0.0; // sum over exploitation episodes of J(psi_tilde) - J(psi_theta)
    double v_star_mean = 0.0;       // J(psi_theta; theta) under the evaluation seeds
    double v_star_se = 0.0;
    double regret_total = 0.0;      // sum (l_m - v_star_mean)

    double parts_total() const { return noise_term + exploration_term + exploitation_term; }
};

struct OptimalValue {
    PolicyValue mc;
    std::optional<double> analytic;  // Riccati value x0'P_0 x0 + q_0 for the LQ family
};

// Greedy policy for a parameter estimate: Riccati for the quadratic family,
// HJB for the entropy family.
Policy synthesize_greedy_policy(const ParamTheta& theta, const CostSpec& cost, const TimeGrid& grid,
                                const HjbDomain& domain);

// Algorithm driver. Episode m consumes the noise stream (base_seed, m), so a
// (config, seed) pair reproduces the ledger bit-identically.
RegretLedger run_pege(const PegeConfig& config);

// Fills per-episode J(Psi_m; theta) with common random numbers drawn from the
// run's evaluation namespace (one mc_policy_value per distinct policy).
void evaluate_policy_values(RegretLedger& ledger);

// Three-way split of the realized regret; requires evaluate_policy_values.
RegretDecomposition regret_decompose(const RegretLedger& ledger);

OptimalValue estimate_optimal_value(const ParamTheta& theta, const CostSpec& cost,
                                    const TimeGrid& grid, const VectorXd& x0,
                                    const HjbDomain& domain, int n_mc, std::uint64_t seed);

// CSV export: m,cycle,phase,cost,regret_cum,theta_tilde_flat...,lambda_min
void dump_ledger_csv(const RegretLedger& ledger, std::ostream& out);

}  // namespace lcrl
