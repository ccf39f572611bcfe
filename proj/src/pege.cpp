#include "lcrl/pege.hpp"

#include <cmath>
#include <map>
#include <ostream>

namespace lcrl {

namespace {

constexpr std::uint64_t kEvalNamespaceTag = 0x65762d6e616d6573ULL;

// Greedy policies are cached per quantized estimate; a re-solve only happens
// when the estimate actually moves.
class GreedyCache {
public:
    using Key = std::vector<std::int64_t>;

    std::shared_ptr<const Policy> get(const MatrixXd& theta_flat, const CostSpec& cost,
                                      const TimeGrid& grid, const HjbDomain& domain, int d, int p) {
        Key key = quantize(theta_flat);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        ParamTheta theta = ParamTheta::from_flat(theta_flat, d, p);
        auto policy = std::make_shared<Policy>(synthesize_greedy_policy(theta, cost, grid, domain));
        cache_.emplace(std::move(key), policy);
        return policy;
    }

private:
    static Key quantize(const MatrixXd& m) {
        Key key;
        key.reserve(static_cast<size_t>(m.size()));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                key.push_back(static_cast<std::int64_t>(std::llround(m(r, c) * 1e12)));
        return key;
    }

    std::map<Key, std::shared_ptr<const Policy>> cache_;
};

}  // namespace

PegeSchedule PegeSchedule::power_floor(double r) {
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("power schedule requires r in (0, 1]");
    return PegeSchedule{Kind::PowerFloor, r};
}

PegeSchedule PegeSchedule::doubling() { return PegeSchedule{Kind::Doubling, 1.0}; }

std::int64_t schedule_m(const PegeSchedule& sched, int k) {
    if (k < 1) throw std::invalid_argument("schedule_m requires cycle k >= 1");
    if (sched.kind == PegeSchedule::Kind::Doubling) {
        if (k > 62) throw std::invalid_argument("doubling schedule overflows past k = 62");
        return std::int64_t{1} << k;
    }
    return static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(k), sched.r)));
}

std::int64_t episodes_after_cycle(const PegeSchedule& sched, int K) {
    if (K < 0) throw std::invalid_argument("episodes_after_cycle requires K >= 0");
    std::int64_t total = K;
    for (int k = 1; k <= K; ++k) total += schedule_m(sched, k);
    return total;
}

int cycle_of(const PegeSchedule& sched, std::int64_t m) {
    if (m < 1) throw std::invalid_argument("cycle_of requires m >= 1");
    std::int64_t c = 0;
    for (int k = 1;; ++k) {
        c += 1 + schedule_m(sched, k);
        if (c >= m) return k;
    }
}

void PegeConfig::validate() const {
    if (!theta_box.contains(theta.flat()))
        throw std::invalid_argument("true theta must lie inside the declared parameter box");
    if (!truncation.in_K(theta_box.lower) || !truncation.in_K(theta_box.upper))
        throw std::invalid_argument("truncation set K must contain the parameter box");
    if (x0.size() != theta.d()) throw std::invalid_argument("x0 dimension mismatch");
    if (n_episodes < 1) throw std::invalid_argument("n_episodes must be >= 1");
    if (!greedy_only) {
        if (static_cast<int>(exploration.actions.size()) != theta.p())
            throw std::invalid_argument("exploration spec must provide p actions");
        if (std::abs(exploration.partition.back() - grid.T) > 1e-12)
            throw std::invalid_argument("exploration partition must end at T");
        exploration.validate_for_cost(cost);
    }
}

Policy synthesize_greedy_policy(const ParamTheta& theta, const CostSpec& cost, const TimeGrid& grid,
                                const HjbDomain& domain) {
    if (const auto* q = std::get_if<SmoothQuadraticCost>(&cost)) {
        RiccatiSolution sol = solve_riccati(*q, theta, grid);
        return lq_policy(sol, theta, *q);
    }
    const auto& e = std::get<EntropyRegularizedCost>(cost);
    HjbSolution sol = solve_hjb_entropy(e, theta, grid, domain);
    return entropy_policy(sol, theta, e);
}

std::vector<double> RegretLedger::cumulative_regret() const {
    std::vector<double> path;
    path.reserve(episodes.size());
    double acc = 0.0;
    for (const auto& rec : episodes) {
        acc += rec.cost - v_star;
        path.push_back(acc);
    }
    return path;
}

double RegretLedger::total_regret() const {
    double acc = 0.0;
    for (const auto& rec : episodes) acc += rec.cost - v_star;
    return acc;
}

RegretLedger run_pege(const PegeConfig& config) {
    config.validate();
    const int d = config.theta.d();
    const int p = config.theta.p();

    RegretLedger ledger;
    ledger.config = config;
    ledger.episodes.reserve(static_cast<size_t>(config.n_episodes));

    SufficientStats stats = init_stats(config.theta0_hat, config.V0);
    MatrixXd theta_bar = truncate(config.truncation, config.theta0_hat);
    GreedyCache cache;

    std::shared_ptr<const Policy> explore_policy;
    if (!config.greedy_only)
        explore_policy = std::make_shared<Policy>(make_exploration_policy(config.exploration));

    int m = 0;
    auto run_episode = [&](const std::shared_ptr<const Policy>& policy, Phase phase, int cycle) {
        ++m;
        EpisodeRecord rec;
        rec.m = m;
        rec.cycle = cycle;
        rec.phase = phase;
        rec.theta_tilde = theta_bar;
        rec.policy = policy;

        RngStream stream = RngStream::substream(config.base_seed, static_cast<std::uint64_t>(m));
        Trajectory traj = simulate_episode(config.theta, *policy, config.grid, config.x0, stream, true);
        if (config.trajectory_sink) config.trajectory_sink(m, traj);
        EpisodeCost cost = episode_cost(traj, config.cost);
        if (!cost.valid)
            throw std::runtime_error("episode " + std::to_string(m) +
                                     " produced an infinite cost; the policy left the cost domain");
        rec.cost = cost.value;

        stats = update_stats(stats, traj);
        rec.lambda_min = min_eigen(stats);
        rec.g_diag = stats.G.diagonal();
        ledger.episodes.push_back(std::move(rec));
    };

    for (int k = 1; m < config.n_episodes; ++k) {
        if (!config.greedy_only) {
            run_episode(explore_policy, Phase::Explore, k);
            theta_bar = truncate(config.truncation, map_estimate(stats));
            if (m >= config.n_episodes) break;
        }
        const std::int64_t block = schedule_m(config.schedule, k);
        for (std::int64_t l = 0; l < block && m < config.n_episodes; ++l) {
            auto policy = cache.get(theta_bar, config.cost, config.grid, config.hjb_domain, d, p);
            run_episode(policy, Phase::Exploit, k);
            if (config.optional_update)
                theta_bar = truncate(config.truncation, map_estimate(stats));
        }
    }

    ledger.final_stats = stats;

    if (config.v_star_override) {
        ledger.v_star = *config.v_star_override;
        ledger.v_star_se = 0.0;
    } else {
        OptimalValue vs = estimate_optimal_value(config.theta, config.cost, config.grid, config.x0,
                                                 config.hjb_domain, config.eval_n_mc,
                                                 RngStream::derive_namespace(config.base_seed,
                                                                             kEvalNamespaceTag));
        if (vs.analytic) {
            ledger.v_star = *vs.analytic;
            ledger.v_star_se = 0.0;
        } else {
            ledger.v_star = vs.mc.mean;
            ledger.v_star_se = vs.mc.se;
        }
    }
    return ledger;
}

void evaluate_policy_values(RegretLedger& ledger) {
    const PegeConfig& cfg = ledger.config;
    const std::uint64_t eval_seed = RngStream::derive_namespace(cfg.base_seed, kEvalNamespaceTag);

    std::map<const Policy*, double> value_of;
    auto j_of = [&](const std::shared_ptr<const Policy>& policy) {
        auto it = value_of.find(policy.get());
        if (it != value_of.end()) return it->second;
        PolicyValue v =
            mc_policy_value(cfg.theta, *policy, cfg.cost, cfg.grid, cfg.x0, cfg.eval_n_mc, eval_seed);
        if (!v.valid())
            throw std::runtime_error("policy evaluation hit " + std::to_string(v.n_invalid) +
                                     " invalid episodes");
        value_of.emplace(policy.get(), v.mean);
        return v.mean;
    };

    for (auto& rec : ledger.episodes) {
        rec.j_value = j_of(rec.policy);
        rec.j_evaluated = true;
    }
}

RegretDecomposition regret_decompose(const RegretLedger& ledger) {
    for (const auto& rec : ledger.episodes)
        if (!rec.j_evaluated)
            throw std::runtime_error(
                "regret_decompose needs per-episode J estimates; run evaluate_policy_values first");

    const PegeConfig& cfg = ledger.config;
    const std::uint64_t eval_seed = RngStream::derive_namespace(cfg.base_seed, kEvalNamespaceTag);
    Policy greedy_true =
        synthesize_greedy_policy(cfg.theta, cfg.cost, cfg.grid, cfg.hjb_domain);
    PolicyValue v_star =
        mc_policy_value(cfg.theta, greedy_true, cfg.cost, cfg.grid, cfg.x0, cfg.eval_n_mc, eval_seed);

    RegretDecomposition out;
    out.v_star_mean = v_star.mean;
    out.v_star_se = v_star.se;
    for (const auto& rec : ledger.episodes) {
        out.noise_term += rec.cost - rec.j_value;
        if (rec.phase == Phase::Explore)
            out.exploration_term += rec.j_value - v_star.mean;
        else
            out.exploitation_term += rec.j_value - v_star.mean;
        out.regret_total += rec.cost - v_star.mean;
    }
    return out;
}

OptimalValue estimate_optimal_value(const ParamTheta& theta, const CostSpec& cost,
                                    const TimeGrid& grid, const VectorXd& x0,
                                    const HjbDomain& domain, int n_mc, std::uint64_t seed) {
    OptimalValue out;
    Policy greedy = synthesize_greedy_policy(theta, cost, grid, domain);
    out.mc = mc_policy_value(theta, greedy, cost, grid, x0, n_mc, seed);
    if (const auto* q = std::get_if<SmoothQuadraticCost>(&cost)) {
        RiccatiSolution sol = solve_riccati(*q, theta, grid);
        out.analytic = sol.value(0.0, x0);
    }
    return out;
}

void dump_ledger_csv(const RegretLedger& ledger, std::ostream& out) {
    const Eigen::Index n_theta = ledger.episodes.empty() ? 0 : ledger.episodes.front().theta_tilde.size();
    out << "m,cycle,phase,cost,regret_cum";
    for (Eigen::Index i = 0; i < n_theta; ++i) out << ",theta_tilde_" << i + 1;
    out << ",lambda_min\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
    };
    double acc = 0.0;
    for (const auto& rec : ledger.episodes) {
        acc += rec.cost - ledger.v_star;
        out << rec.m << "," << rec.cycle << ","
            << (rec.phase == Phase::Explore ? "explore" : "exploit") << ",";
        put(rec.cost);
        out << ",";
        put(acc);
        for (Eigen::Index r = 0; r < rec.theta_tilde.rows(); ++r)
            for (Eigen::Index c = 0; c < rec.theta_tilde.cols(); ++c) {
                out << ",";
                put(rec.theta_tilde(r, c));
            }
        out << ",";
        put(rec.lambda_min);
        out << "\n";
    }
}

}  // namespace lcrl
