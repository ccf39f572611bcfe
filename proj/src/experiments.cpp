#include "lcrl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace lcrl {

namespace {

using nlohmann::json;

constexpr std::uint64_t kGapEvalTag = 0x6761702d6576616cULL;
constexpr std::uint64_t kInfoTag = 0x696e666f2d746167ULL;
constexpr std::uint64_t kVstarTag = 0x76737461722d7461ULL;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double optimal_value_for(const PegeConfig& base, std::uint64_t seed) {
    if (std::holds_alternative<SmoothQuadraticCost>(base.cost)) {
        RiccatiSolution sol =
            solve_riccati(std::get<SmoothQuadraticCost>(base.cost), base.theta, base.grid);
        return sol.value(0.0, base.x0);
    }
    OptimalValue v = estimate_optimal_value(base.theta, base.cost, base.grid, base.x0,
                                            base.hjb_domain, base.eval_n_mc,
                                            RngStream::derive_namespace(seed, kVstarTag));
    return v.mc.mean;
}

void append_progress(const std::string& out_dir, const std::string& line) {
    std::ofstream log(out_dir + "/progress.log", std::ios::app);
    log << line << "\n";
}

}  // namespace

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile of empty sample");
    std::sort(values.begin(), values.end());
    double pos = q * (values.size() - 1);
    size_t i = static_cast<size_t>(pos);
    if (i + 1 >= values.size()) return values.back();
    double w = pos - i;
    return (1.0 - w) * values[i] + w * values[i + 1];
}

double linear_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("slope fit needs at least two points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("loglog slope needs positive samples");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return linear_slope(lx, ly);
}

void parallel_for(int n, int n_threads, const std::function<void(int)>& fn) {
    n_threads = std::max(1, std::min(n_threads, n));
    if (n_threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
        workers.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& w : workers) w.join();
}

// ---- gap scan --------------------------------------------------------------

GapScanResult run_gap_scan(const ExperimentConfig& cfg, int n_threads) {
    const GapScanSettings& gs = cfg.gap;
    if (gs.radii.empty()) throw std::invalid_argument("gap scan needs a radii list");
    const int d = cfg.theta.d();
    const int p = cfg.theta.p();
    const MatrixXd theta0 = cfg.theta.flat();

    RngStream dir_rng(gs.direction_seed);
    std::vector<MatrixXd> dirs;
    for (int i = 0; i < gs.n_directions; ++i) {
        MatrixXd D(d, d + p);
        for (Eigen::Index r = 0; r < D.rows(); ++r)
            for (Eigen::Index c = 0; c < D.cols(); ++c) D(r, c) = dir_rng.gaussian();
        D /= D.norm();
        dirs.push_back(D);
    }
    for (double r : gs.radii)
        for (const auto& D : dirs)
            if (r > 0.0 && !cfg.truncation.in_K(theta0 + r * D))
                throw std::invalid_argument("gap scan: perturbed parameter leaves K");

    // Policies: index 0 is the unperturbed greedy, then (radius, direction) pairs.
    std::vector<Policy> policies;
    policies.push_back(synthesize_greedy_policy(cfg.theta, cfg.cost, cfg.grid, cfg.hjb_domain));
    for (double r : gs.radii)
        for (const auto& D : dirs)
            policies.push_back(synthesize_greedy_policy(ParamTheta::from_flat(theta0 + r * D, d, p),
                                                        cfg.cost, cfg.grid, cfg.hjb_domain));

    // Common random numbers: every policy sees the same episode streams.
    const std::uint64_t eval_seed = RngStream::derive_namespace(cfg.seed, kGapEvalTag);
    std::vector<std::vector<double>> costs(policies.size(), std::vector<double>(gs.n_mc));
    parallel_for(static_cast<int>(policies.size()), n_threads, [&](int pi) {
        for (int i = 0; i < gs.n_mc; ++i) {
            RngStream stream = RngStream::substream(eval_seed, static_cast<std::uint64_t>(i));
            Trajectory traj =
                simulate_episode(cfg.theta, policies[static_cast<size_t>(pi)], cfg.grid, cfg.x0, stream, true);
            EpisodeCost c = episode_cost(traj, cfg.cost);
            if (!c.valid) throw std::runtime_error("gap scan: infinite episode cost");
            costs[static_cast<size_t>(pi)][static_cast<size_t>(i)] = c.value;
        }
    });

    GapScanResult out;
    const size_t n_dirs = dirs.size();
    for (size_t ri = 0; ri < gs.radii.size(); ++ri) {
        GapRow row;
        row.radius = gs.radii[ri];
        double sum = 0.0, sum_sq = 0.0;
        for (int i = 0; i < gs.n_mc; ++i) {
            double g = 0.0;
            for (size_t di = 0; di < n_dirs; ++di) {
                size_t pi = 1 + ri * n_dirs + di;
                g += costs[pi][static_cast<size_t>(i)] - costs[0][static_cast<size_t>(i)];
            }
            g /= static_cast<double>(n_dirs);
            sum += g;
            sum_sq += g * g;
        }
        row.mean_gap = sum / gs.n_mc;
        double var = (sum_sq - gs.n_mc * row.mean_gap * row.mean_gap) / (gs.n_mc - 1);
        row.se = std::sqrt(std::max(var, 0.0) / gs.n_mc);
        out.rows.push_back(row);
    }

    std::vector<double> fit_r, fit_g;
    for (auto& row : out.rows) {
        row.used_in_fit = row.radius > 0.0 && row.mean_gap > 5.0 * row.se;
        if (row.used_in_fit) {
            fit_r.push_back(row.radius);
            fit_g.push_back(row.mean_gap);
        }
    }
    if (fit_r.size() >= 2) {
        out.slope = loglog_slope(fit_r, fit_g);
        out.conclusive = true;
    }
    return out;
}

// ---- regret scan -----------------------------------------------------------

std::vector<std::vector<double>> regret_paths(const PegeConfig& base,
                                              const std::vector<std::uint64_t>& seeds, int n_max,
                                              double v_star, int n_threads) {
    std::vector<std::vector<double>> paths(seeds.size());
    parallel_for(static_cast<int>(seeds.size()), n_threads, [&](int i) {
        PegeConfig c = base;
        c.base_seed = seeds[static_cast<size_t>(i)];
        c.n_episodes = n_max;
        c.v_star_override = v_star;
        RegretLedger ledger = run_pege(c);
        paths[static_cast<size_t>(i)] = ledger.cumulative_regret();
    });
    return paths;
}

namespace {

std::vector<RegretRow> tabulate_regret(const std::vector<std::vector<double>>& paths,
                                       const std::vector<int>& n_grid, double delta) {
    std::vector<RegretRow> rows;
    for (int N : n_grid) {
        std::vector<double> samples;
        samples.reserve(paths.size());
        for (const auto& path : paths) samples.push_back(path.at(static_cast<size_t>(N) - 1));
        RegretRow row;
        row.N = N;
        double sum = 0.0;
        for (double s : samples) sum += s;
        row.mean_regret = sum / static_cast<double>(samples.size());
        row.median_regret = quantile(samples, 0.5);
        row.q_lo = quantile(samples, delta / 2.0);
        row.q_hi = quantile(samples, 1.0 - delta / 2.0);
        const double ln_n = std::log(static_cast<double>(N));
        row.median_over_log_sq = row.median_regret / (ln_n * ln_n);
        rows.push_back(row);
    }
    return rows;
}

double regret_rows_slope(const std::vector<RegretRow>& rows) {
    std::vector<double> ns, means;
    for (const auto& row : rows) {
        if (row.mean_regret > 0.0) {
            ns.push_back(static_cast<double>(row.N));
            means.push_back(row.mean_regret);
        }
    }
    if (ns.size() < 2) throw std::runtime_error("regret scan: too few positive means for a slope fit");
    return loglog_slope(ns, means);
}

}  // namespace

RegretScanResult run_regret_scan(const ExperimentConfig& cfg, int n_threads) {
    if (cfg.regret.n_grid.empty()) throw std::invalid_argument("regret scan needs regret.n_grid");
    if (cfg.seeds.size() < 30)
        throw std::invalid_argument("regret scan needs at least 30 seeds per grid point");
    const int n_max = *std::max_element(cfg.regret.n_grid.begin(), cfg.regret.n_grid.end());
    PegeConfig base = cfg.to_pege_config();
    const double v_star = optimal_value_for(base, cfg.seed);
    auto paths = regret_paths(base, cfg.seeds, n_max, v_star, n_threads);

    RegretScanResult out;
    out.rows = tabulate_regret(paths, cfg.regret.n_grid, cfg.delta);
    out.slope = regret_rows_slope(out.rows);
    return out;
}

// ---- concentration ---------------------------------------------------------

ConcentrationResult run_concentration(const ExperimentConfig& cfg, int n_threads) {
    if (!cfg.exploration) throw std::invalid_argument("concentration scan needs an exploration block");
    if (cfg.concentration.m_grid.empty())
        throw std::invalid_argument("concentration scan needs concentration.m_grid");
    std::vector<int> m_grid = cfg.concentration.m_grid;
    std::sort(m_grid.begin(), m_grid.end());
    if (m_grid.front() < 2) throw std::invalid_argument("concentration m grid must start at m >= 2");
    const int m_max = m_grid.back();

    cfg.exploration->validate_for_cost(cfg.cost);
    Policy psi_e = make_exploration_policy(*cfg.exploration);
    const MatrixXd theta_flat = cfg.theta.flat();

    const size_t n_seeds = cfg.seeds.size();
    std::vector<std::vector<double>> ratios(m_grid.size(), std::vector<double>(n_seeds));
    std::vector<std::vector<double>> lambdas(m_grid.size(), std::vector<double>(n_seeds));

    parallel_for(static_cast<int>(n_seeds), n_threads, [&](int si) {
        SufficientStats stats = init_stats(cfg.theta0_hat, cfg.V0);
        size_t gi = 0;
        for (int m = 1; m <= m_max; ++m) {
            RngStream stream =
                RngStream::substream(cfg.seeds[static_cast<size_t>(si)], static_cast<std::uint64_t>(m));
            Trajectory traj = simulate_episode(cfg.theta, psi_e, cfg.grid, cfg.x0, stream, true);
            stats = update_stats(stats, traj);
            if (gi < m_grid.size() && m == m_grid[gi]) {
                const double lam = min_eigen(stats);
                const double err2 = (map_estimate(stats) - theta_flat).squaredNorm();
                lambdas[gi][static_cast<size_t>(si)] = lam;
                ratios[gi][static_cast<size_t>(si)] = lam * err2 / std::log(static_cast<double>(m));
                ++gi;
            }
        }
    });

    ConcentrationResult out;
    std::vector<double> ms, lam_medians;
    for (size_t gi = 0; gi < m_grid.size(); ++gi) {
        ConcentrationRow row;
        row.m = m_grid[gi];
        row.ln_m = std::log(static_cast<double>(row.m));
        row.median_ratio = quantile(ratios[gi], 0.5);
        row.p90_ratio = quantile(ratios[gi], 0.9);
        row.median_lambda_min = quantile(lambdas[gi], 0.5);
        out.rows.push_back(row);
        ms.push_back(static_cast<double>(row.m));
        lam_medians.push_back(row.median_lambda_min);
    }
    double p90_max = 0.0, p90_min = std::numeric_limits<double>::infinity();
    for (const auto& row : out.rows) {
        p90_max = std::max(p90_max, row.p90_ratio);
        p90_min = std::min(p90_min, row.p90_ratio);
    }
    out.ratio_drift = p90_max / p90_min;
    out.fitted_c = p90_max;
    out.lambda_slope = linear_slope(ms, lam_medians);
    out.info_value =
        compute_information_value(psi_e, cfg.theta, cfg.grid, cfg.x0, cfg.concentration.info_n_mc,
                                  RngStream::derive_namespace(cfg.seed, kInfoTag));
    return out;
}

// ---- incomplete-learning demo ----------------------------------------------

IncompleteDemoResult run_incomplete_demo(const ExperimentConfig& cfg, int n_threads) {
    const int d = cfg.theta.d();
    const int p = cfg.theta.p();
    if (p < 2) throw std::invalid_argument("incomplete demo needs at least two action coordinates");
    if (!std::holds_alternative<SmoothQuadraticCost>(cfg.cost))
        throw std::invalid_argument("incomplete demo runs on the quadratic family");
    if (cfg.theta0_hat(0, d) == 0.0 || cfg.theta0_hat(0, d + 1) != 0.0)
        throw std::invalid_argument("incomplete demo needs prior B = (b, 0) with b != 0");
    if (cfg.regret.n_grid.empty()) throw std::invalid_argument("incomplete demo needs regret.n_grid");

    const int n_max = *std::max_element(cfg.regret.n_grid.begin(), cfg.regret.n_grid.end());
    PegeConfig base = cfg.to_pege_config();
    const double v_star = optimal_value_for(base, cfg.seed);
    const double true_b2 = cfg.theta.B(0, 1);
    const int alpha2_index = d + 1;

    IncompleteDemoResult out;

    // Ablation arm: greedy only, estimate refreshed after every episode.
    PegeConfig ablation = base;
    ablation.greedy_only = true;
    ablation.optional_update = true;
    std::vector<std::vector<double>> abl_paths(cfg.seeds.size());
    std::atomic<bool> exact{true};
    const double prior_entry = init_stats(cfg.theta0_hat, cfg.V0).G(alpha2_index, alpha2_index);
    parallel_for(static_cast<int>(cfg.seeds.size()), n_threads, [&](int i) {
        PegeConfig c = ablation;
        c.base_seed = cfg.seeds[static_cast<size_t>(i)];
        c.n_episodes = n_max;
        c.v_star_override = v_star;
        RegretLedger ledger = run_pege(c);
        for (const auto& rec : ledger.episodes)
            if (rec.g_diag[alpha2_index] != prior_entry) exact = false;
        abl_paths[static_cast<size_t>(i)] = ledger.cumulative_regret();
    });
    out.prior_entry_exact = exact.load();
    out.ablation_rows = tabulate_regret(abl_paths, cfg.regret.n_grid, cfg.delta);
    out.ablation_slope = regret_rows_slope(out.ablation_rows);

    // Full PEGE arm on the same model and prior.
    PegeConfig pege = base;
    pege.greedy_only = false;
    std::vector<std::vector<double>> pege_paths(cfg.seeds.size());
    std::vector<std::vector<double>> b2_errors(cfg.regret.n_grid.size(),
                                               std::vector<double>(cfg.seeds.size()));
    parallel_for(static_cast<int>(cfg.seeds.size()), n_threads, [&](int i) {
        PegeConfig c = pege;
        c.base_seed = cfg.seeds[static_cast<size_t>(i)];
        c.n_episodes = n_max;
        c.v_star_override = v_star;
        RegretLedger ledger = run_pege(c);
        pege_paths[static_cast<size_t>(i)] = ledger.cumulative_regret();
        for (size_t gi = 0; gi < cfg.regret.n_grid.size(); ++gi) {
            const auto& rec = ledger.episodes.at(static_cast<size_t>(cfg.regret.n_grid[gi]) - 1);
            b2_errors[gi][static_cast<size_t>(i)] = std::abs(rec.theta_tilde(0, d + 1) - true_b2);
        }
    });
    out.pege_rows = tabulate_regret(pege_paths, cfg.regret.n_grid, cfg.delta);
    out.pege_slope = regret_rows_slope(out.pege_rows);
    for (size_t gi = 0; gi < cfg.regret.n_grid.size(); ++gi)
        out.b2_error_medians.emplace_back(cfg.regret.n_grid[gi], quantile(b2_errors[gi], 0.5));
    out.b2_error_decreasing = out.b2_error_medians.back().second < out.b2_error_medians.front().second;
    return out;
}

// ---- solver oracles --------------------------------------------------------

RiccatiCheckResult run_riccati_check(const ExperimentConfig& cfg) {
    const auto* q = std::get_if<SmoothQuadraticCost>(&cfg.cost);
    if (!q) throw std::invalid_argument("riccati check needs the quadratic family");
    if (cfg.theta.d() != 1 || cfg.theta.A(0, 0) != 0.0 || q->Q(0, 0) != 0.0)
        throw std::invalid_argument("riccati check closed form needs d = 1, A = 0, Q = 0");

    const double b_sq = cfg.theta.B.squaredNorm();
    const double gterm = q->Gterm(0, 0);
    auto closed_form_p0 = [&](double T) { return gterm / (1.0 + gterm * b_sq * T); };

    RiccatiCheckResult out;
    RiccatiSolution sol = solve_riccati(*q, cfg.theta, cfg.grid);
    out.p0 = sol.p_grid.front()(0, 0);
    out.p0_error = std::abs(out.p0 - closed_form_p0(cfg.grid.T));

    // Observed order on deliberately coarse grids so truncation error
    // dominates rounding.
    auto err_at = [&](int n) {
        RiccatiSolution s = solve_riccati(*q, cfg.theta, TimeGrid(cfg.grid.T, n));
        return std::abs(s.p_grid.front()(0, 0) - closed_form_p0(cfg.grid.T));
    };
    const double e1 = err_at(16);
    const double e2 = err_at(32);
    out.rk4_order = std::log2(e1 / e2);

    RngStream rng(20240u);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double bb = 0.5 + 2.5 * rng.uniform01();
        const double gg = 0.5 + 1.5 * rng.uniform01();
        ParamTheta theta(MatrixXd::Zero(1, 1), MatrixXd::Constant(1, 1, std::sqrt(bb)));
        SmoothQuadraticCost cost(MatrixXd::Zero(1, 1), MatrixXd::Identity(1, 1),
                                 MatrixXd::Constant(1, 1, gg));
        RiccatiSolution s = solve_riccati(cost, theta, TimeGrid(1.0, 1000));
        worst = std::max(worst, std::abs(s.p_grid.front()(0, 0) - gg / (1.0 + gg * bb)));
    }
    out.random_suite_max_error = worst;
    return out;
}

HjbCheckResult run_hjb_check(const ExperimentConfig& cfg) {
    HjbCheckResult out;

    // Decoupled case: B = 0, fbar0 = 0, g = 0 with two actions, so
    // V(t, x) = -(T - t) ln 2.
    {
        ParamTheta theta(MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 2));
        EntropyRegularizedCost cost;
        cost.fbar0.c = VectorXd::Zero(2);
        cost.fbar0.W = MatrixXd::Zero(2, 1);
        HjbSolution sol = solve_hjb_entropy(cost, theta, cfg.grid, cfg.hjb_domain);
        const double expected = -cfg.grid.T * std::log(2.0);
        double worst = 0.0;
        for (int i = 1; i < cfg.hjb_domain.n_x - 1; ++i)
            worst = std::max(worst, std::abs(sol.V(0, i) - expected));
        out.decoupled_error = worst;
    }

    // Heat case: p = 1, B = 0, A = 0, fbar0 = 0 (h* term vanishes), g = x^2,
    // so V(t, x) = x^2 + (T - t).
    {
        ParamTheta theta(MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1));
        EntropyRegularizedCost cost;
        cost.fbar0.c = VectorXd::Zero(1);
        cost.fbar0.W = MatrixXd::Zero(1, 1);
        cost.g.kind = TerminalCost::Kind::Quadratic;
        cost.g.coeff = 1.0;
        HjbSolution sol = solve_hjb_entropy(cost, theta, cfg.grid, cfg.hjb_domain);
        double worst = 0.0;
        for (int k = 0; k <= cfg.grid.n_steps; ++k) {
            const double expected_offset = cfg.grid.T - cfg.grid.time(k);
            for (int i = 0; i < cfg.hjb_domain.n_x; ++i) {
                const double x = sol.x_grid[i];
                worst = std::max(worst, std::abs(sol.V(k, i) - (x * x + expected_offset)));
            }
        }
        out.heat_error = worst;
    }

    // Residual refinement on a genuinely nonlinear instance (A = 0 so the
    // first-order upwind term is absent and the nominal order shows).
    {
        ParamTheta theta(MatrixXd::Zero(1, 1), (MatrixXd(1, 2) << 1.0, 0.5).finished());
        EntropyRegularizedCost cost;
        cost.fbar0.c = VectorXd::Zero(2);
        cost.fbar0.W = (MatrixXd(2, 1) << 1.0, -1.0).finished();
        cost.g.kind = TerminalCost::Kind::Quadratic;
        cost.g.coeff = 0.5;

        HjbDomain coarse{4.0, 101};
        HjbSolution sol_c = solve_hjb_entropy(cost, theta, TimeGrid(1.0, 400), coarse);
        out.residual_coarse = hjb_residual_max(sol_c, cost, theta);

        HjbDomain fine{4.0, 201};
        HjbSolution sol_f = solve_hjb_entropy(cost, theta, TimeGrid(1.0, 1600), fine);
        out.residual_fine = hjb_residual_max(sol_f, cost, theta);
        out.refinement_factor = out.residual_coarse / out.residual_fine;
    }
    return out;
}

OrliczCheckResult run_orlicz_check(const ExperimentConfig& cfg) {
    OrliczCheckResult out;
    RngStream rng(cfg.orlicz.seed);

    std::vector<double> gaussians(static_cast<size_t>(cfg.orlicz.n_samples));
    for (auto& g : gaussians) g = rng.gaussian();
    out.gaussian_q2 = estimate_orlicz_norm(gaussians, 2);

    std::vector<double> constants(200, 1.0);
    out.constant_q1 = estimate_orlicz_norm(constants, 1);

    std::vector<double> scaled = gaussians;
    for (auto& s : scaled) s *= 3.0;
    out.scaling_ratio = estimate_orlicz_norm(scaled, 2).K_hat / out.gaussian_q2.K_hat;

    // Conditional norm surrogate: episode 1 runs on a frozen noise stream, so
    // the greedy policy it induces is a fixed function; the second-episode
    // cost is then sampled across fresh streams within that stratum.
    {
        ParamTheta theta(MatrixXd::Zero(1, 1), MatrixXd::Identity(1, 1));
        SmoothQuadraticCost cost(MatrixXd::Zero(1, 1), MatrixXd::Identity(1, 1),
                                 MatrixXd::Identity(1, 1));
        TimeGrid grid(1.0, 500);
        VectorXd x0 = VectorXd::Zero(1);

        RngStream frozen = RngStream::substream(cfg.orlicz.seed ^ 0x70726566697830ULL, 1);
        Trajectory first = simulate_episode(theta, Policy::constant(VectorXd::Constant(1, 1.0)),
                                            grid, x0, frozen, true);
        SufficientStats stats = init_stats(MatrixXd::Zero(1, 2), MatrixXd::Identity(2, 2));
        stats = update_stats(stats, first);
        ParamTheta theta_hat = ParamTheta::from_flat(map_estimate(stats), 1, 1);
        RiccatiSolution sol = solve_riccati(cost, theta_hat, grid);
        Policy greedy = lq_policy(sol, theta_hat, cost);

        const std::uint64_t stratum_seed = RngStream::derive_namespace(cfg.orlicz.seed, 0x73747261ULL);
        std::vector<double> second_costs(1000);
        for (size_t i = 0; i < second_costs.size(); ++i) {
            RngStream stream = RngStream::substream(stratum_seed, i);
            Trajectory traj = simulate_episode(theta, greedy, grid, x0, stream, true);
            second_costs[i] = episode_cost(traj, CostSpec{cost}).value;
        }
        double mean = 0.0;
        for (double c : second_costs) mean += c;
        mean /= static_cast<double>(second_costs.size());
        for (double& c : second_costs) c -= mean;
        out.conditional_surrogate_q1 = estimate_orlicz_norm(second_costs, 1);
    }

    const int n_seeds = 1000, N = 100;
    MatrixXd diffs(n_seeds, N);
    for (int s = 0; s < n_seeds; ++s)
        for (int n = 0; n < N; ++n) diffs(s, n) = rng.gaussian();
    out.gaussian_tail = bernstein_tail_check(diffs, {0.25, 0.5, 1.0});
    return out;
}

// ---- file outputs ----------------------------------------------------------

namespace {

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << contents;
}

void write_table(const ExperimentConfig& cfg, const std::string& path,
                 const std::string& header, const std::vector<std::string>& rows) {
    std::string body = header + ",n_seeds,config_hash\n";
    for (const auto& row : rows)
        body += row + "," + std::to_string(cfg.seeds.size()) + "," + cfg.hash + "\n";
    write_file(path, body);
}

json decomposition_json(const RegretDecomposition& dec) {
    return json{{"noise_term", dec.noise_term},
                {"exploration_term", dec.exploration_term},
                {"exploitation_term", dec.exploitation_term},
                {"v_star_mean", dec.v_star_mean},
                {"v_star_se", dec.v_star_se},
                {"regret_total", dec.regret_total}};
}

}  // namespace

json write_experiment_outputs(const ExperimentConfig& cfg, const std::string& out_dir,
                              int n_threads) {
    std::filesystem::create_directories(out_dir);
    append_progress(out_dir, "start " + cfg.experiment + " hash=" + cfg.hash);

    json echo = cfg.resolved;
    echo["hash"] = cfg.hash;
    write_file(out_dir + "/config_echo.json", echo.dump(2) + "\n");

    json summary;
    summary["experiment"] = cfg.experiment;
    summary["config_hash"] = cfg.hash;
    summary["n_seeds"] = cfg.seeds.size();

    if (cfg.experiment == "pege-run") {
        json per_seed = json::array();
        for (std::uint64_t seed : cfg.seeds) {
            PegeConfig pc = cfg.to_pege_config();
            pc.base_seed = seed;
            if (cfg.dump_trajectories) {
                const std::string traj_dir = out_dir + "/trajectories";
                std::filesystem::create_directories(traj_dir);
                pc.trajectory_sink = [traj_dir, seed](int m, const Trajectory& traj) {
                    std::ofstream f(traj_dir + "/seed" + std::to_string(seed) + "_ep" +
                                    std::to_string(m) + ".csv");
                    dump_trajectory_csv(traj, f);
                };
            }
            RegretLedger ledger = run_pege(pc);
            std::ostringstream csv;
            dump_ledger_csv(ledger, csv);
            write_file(out_dir + "/ledger_seed" + std::to_string(seed) + ".csv", csv.str());

            json entry;
            entry["seed"] = seed;
            entry["v_star"] = ledger.v_star;
            entry["v_star_se"] = ledger.v_star_se;
            entry["regret_total"] = ledger.total_regret();
            entry["lambda_min_final"] = min_eigen(ledger.final_stats);
            entry["stats_snapshot"] = json::parse(stats_snapshot_json(ledger.final_stats));
            if (cfg.decompose) {
                evaluate_policy_values(ledger);
                entry["decomposition"] = decomposition_json(regret_decompose(ledger));
            }
            per_seed.push_back(entry);
        }
        summary["runs"] = per_seed;
    } else if (cfg.experiment == "regret-scan") {
        RegretScanResult res = run_regret_scan(cfg, n_threads);
        std::vector<std::string> rows;
        for (const auto& r : res.rows)
            rows.push_back(std::to_string(r.N) + "," + fmt(r.mean_regret) + "," +
                           fmt(r.median_regret) + "," + fmt(r.q_lo) + "," + fmt(r.q_hi) + "," +
                           fmt(r.median_over_log_sq));
        write_table(cfg, out_dir + "/regret_scan.csv",
                    "N,mean_regret,median_regret,q_lo,q_hi,median_over_log_sq", rows);
        summary["slope"] = res.slope;
    } else if (cfg.experiment == "gap-scan") {
        GapScanResult res = run_gap_scan(cfg, n_threads);
        std::vector<std::string> rows;
        for (const auto& r : res.rows)
            rows.push_back(fmt(r.radius) + "," + fmt(r.mean_gap) + "," + fmt(r.se) + "," +
                           (r.used_in_fit ? "1" : "0"));
        write_table(cfg, out_dir + "/gap_scan.csv", "radius,mean_gap,se,used_in_fit", rows);
        summary["slope"] = res.slope;
        summary["conclusive"] = res.conclusive;
        summary["expected_exponent"] = 2.0 * cfg.gap.expected_r;
    } else if (cfg.experiment == "concentration") {
        ConcentrationResult res = run_concentration(cfg, n_threads);
        std::vector<std::string> rows;
        for (const auto& r : res.rows)
            rows.push_back(std::to_string(r.m) + "," + fmt(r.median_ratio) + "," +
                           fmt(r.p90_ratio) + "," + fmt(r.median_lambda_min) + "," + fmt(r.ln_m));
        write_table(cfg, out_dir + "/concentration.csv",
                    "m,median_ratio,p90_ratio,median_lambda_min,ln_m", rows);
        summary["ratio_drift"] = res.ratio_drift;
        summary["fitted_c"] = res.fitted_c;
        summary["lambda_slope"] = res.lambda_slope;
        summary["info_value"] = res.info_value;
    } else if (cfg.experiment == "incomplete-demo") {
        IncompleteDemoResult res = run_incomplete_demo(cfg, n_threads);
        std::vector<std::string> arm_rows;
        for (const auto& r : res.ablation_rows)
            arm_rows.push_back("ablation," + std::to_string(r.N) + "," + fmt(r.mean_regret) + "," +
                               fmt(r.median_regret));
        for (const auto& r : res.pege_rows)
            arm_rows.push_back("pege," + std::to_string(r.N) + "," + fmt(r.mean_regret) + "," +
                               fmt(r.median_regret));
        write_table(cfg, out_dir + "/demo_regret.csv", "arm,N,mean_regret,median_regret", arm_rows);
        std::vector<std::string> b2_rows;
        for (const auto& [m, err] : res.b2_error_medians)
            b2_rows.push_back(std::to_string(m) + "," + fmt(err));
        write_table(cfg, out_dir + "/b2_error.csv", "m,median_abs_error", b2_rows);
        summary["prior_entry_exact"] = res.prior_entry_exact;
        summary["ablation_slope"] = res.ablation_slope;
        summary["pege_slope"] = res.pege_slope;
        summary["b2_error_decreasing"] = res.b2_error_decreasing;
    } else if (cfg.experiment == "orlicz") {
        OrliczCheckResult res = run_orlicz_check(cfg);
        std::vector<std::string> rows;
        for (const auto& r : res.gaussian_tail.rows)
            rows.push_back(fmt(r.eps) + "," + fmt(r.empirical_tail) + "," + fmt(r.bound_shape) +
                           "," + fmt(res.gaussian_tail.cprime_fit));
        write_table(cfg, out_dir + "/bernstein.csv", "eps,emp_tail,bound_shape,cprime_fit", rows);
        auto estimate_json = [](const OrliczEstimate& e) {
            return json{{"q", e.q},          {"K_hat", e.K_hat},
                        {"n_samples", e.n_samples}, {"K_lo", e.K_lo},
                        {"K_hi", e.K_hi},    {"degenerate", e.degenerate}};
        };
        summary["estimates"] = json{{"gaussian_q2", estimate_json(res.gaussian_q2)},
                                    {"constant_q1", estimate_json(res.constant_q1)},
                                    {"conditional_surrogate_q1",
                                     estimate_json(res.conditional_surrogate_q1)}};
        summary["gaussian_q2"] = res.gaussian_q2.K_hat;
        summary["gaussian_q2_expected"] = std::sqrt(8.0 / 3.0);
        summary["constant_q1"] = res.constant_q1.K_hat;
        summary["constant_q1_expected"] = 1.0 / std::log(2.0);
        summary["scaling_ratio"] = res.scaling_ratio;
        summary["conditioning_note"] =
            "conditional Orlicz norms are approximated by the unconditional norm across seeds "
            "sharing a frozen first-episode noise stream (stratified surrogate)";
    } else if (cfg.experiment == "riccati-check") {
        RiccatiCheckResult res = run_riccati_check(cfg);
        {
            RiccatiSolution sol =
                solve_riccati(std::get<SmoothQuadraticCost>(cfg.cost), cfg.theta, cfg.grid);
            std::ofstream f(out_dir + "/riccati_solution.csv");
            dump_riccati_csv(sol, f);
        }
        summary["p0"] = res.p0;
        summary["p0_error"] = res.p0_error;
        summary["rk4_order"] = res.rk4_order;
        summary["random_suite_max_error"] = res.random_suite_max_error;
    } else if (cfg.experiment == "hjb-check") {
        HjbCheckResult res = run_hjb_check(cfg);
        {
            ParamTheta theta(MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 2));
            EntropyRegularizedCost cost;
            cost.fbar0.c = VectorXd::Zero(2);
            cost.fbar0.W = MatrixXd::Zero(2, 1);
            HjbSolution sol = solve_hjb_entropy(cost, theta, cfg.grid, cfg.hjb_domain);
            std::ofstream f(out_dir + "/hjb_solution.csv");
            dump_hjb_csv(sol, f);
        }
        summary["decoupled_error"] = res.decoupled_error;
        summary["heat_error"] = res.heat_error;
        summary["residual_coarse"] = res.residual_coarse;
        summary["residual_fine"] = res.residual_fine;
        summary["refinement_factor"] = res.refinement_factor;
    } else {
        throw std::invalid_argument("unknown experiment: " + cfg.experiment);
    }

    write_file(out_dir + "/summary.json", summary.dump(2) + "\n");
    append_progress(out_dir, "done " + cfg.experiment + " hash=" + cfg.hash);
    return summary;
}

}  // namespace lcrl
