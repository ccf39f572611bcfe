#include "lcrl/sde.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace lcrl {

TimeGrid::TimeGrid(double T_, int n_steps_) : T(T_), n_steps(n_steps_) {
    if (!(T > 0.0) || n_steps < 1) throw std::invalid_argument("time grid requires T > 0 and n_steps >= 1");
}

SimulationBlowup::SimulationBlowup(int step_, double magnitude)
    : std::runtime_error("state blow-up (|X| = " + std::to_string(magnitude) + ") at step " +
                         std::to_string(step_)),
      step(step_) {}

Trajectory simulate_episode(const ParamTheta& theta, const Policy& policy, const TimeGrid& grid,
                            const VectorXd& x0, RngStream& rng, bool noise_on) {
    const int d = theta.d();
    const int p = theta.p();
    if (policy.action_dim() != p) throw std::invalid_argument("policy action dimension mismatch");
    if (x0.size() != d) throw std::invalid_argument("x0 dimension mismatch");

    const int n = grid.n_steps;
    const double dt = grid.dt();
    const double sq_dt = std::sqrt(dt);
    constexpr double kBlowupGuard = 1e8;

    Trajectory traj;
    traj.times.resize(n + 1);
    traj.x_path.resize(n + 1, d);
    traj.z_path.resize(n + 1, d + p);

    VectorXd x = x0;
    for (int k = 0; k < n; ++k) {
        const double t = grid.time(k);
        traj.times[k] = t;
        traj.x_path.row(k) = x.transpose();
        VectorXd a = policy(t, x);
        traj.z_path.row(k).head(d) = x.transpose();
        traj.z_path.row(k).tail(p) = a.transpose();

        x += drift(theta, x, a) * dt;
        if (noise_on) {
            for (int i = 0; i < d; ++i) x[i] += sq_dt * rng.gaussian();
        }
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kBlowupGuard)
            throw SimulationBlowup(k + 1, x.allFinite() ? x.cwiseAbs().maxCoeff() : kInfiniteCost);
    }
    traj.times[n] = grid.T;
    traj.x_path.row(n) = x.transpose();
    traj.z_path.row(n).head(d) = x.transpose();
    traj.z_path.row(n).tail(p) = policy(grid.T, x).transpose();
    return traj;
}

EpisodeCost episode_cost(const Trajectory& traj, const CostSpec& spec) {
    const int n = traj.n_steps();
    const int d = traj.d();
    const int p = static_cast<int>(traj.z_path.cols()) - d;
    const double dt = traj.dt();

    double running = 0.0;
    for (int k = 0; k < n; ++k) {
        VectorXd x = traj.x_path.row(k).transpose();
        VectorXd a = traj.z_path.row(k).tail(p).transpose();
        double f = eval_running_cost(spec, traj.times[k], x, a);
        if (is_infinite_cost(f)) return EpisodeCost{kInfiniteCost, false};
        running += f * dt;
    }
    double terminal = eval_terminal_cost(spec, traj.x_path.row(n).transpose());
    return EpisodeCost{running + terminal, true};
}

PolicyValue mc_policy_value(const ParamTheta& theta, const Policy& policy, const CostSpec& spec,
                            const TimeGrid& grid, const VectorXd& x0, int n_mc, std::uint64_t seed) {
    if (n_mc < 2) throw std::invalid_argument("mc_policy_value requires n_mc >= 2");
    double sum = 0.0;
    double sum_sq = 0.0;
    int n_invalid = 0;
    for (int i = 0; i < n_mc; ++i) {
        RngStream stream = RngStream::substream(seed, static_cast<std::uint64_t>(i));
        Trajectory traj = simulate_episode(theta, policy, grid, x0, stream, true);
        EpisodeCost c = episode_cost(traj, spec);
        if (!c.valid) {
            ++n_invalid;
            continue;
        }
        sum += c.value;
        sum_sq += c.value * c.value;
    }
    PolicyValue out;
    out.n_invalid = n_invalid;
    const int n_ok = n_mc - n_invalid;
    if (n_ok >= 2) {
        out.mean = sum / n_ok;
        double var = (sum_sq - n_ok * out.mean * out.mean) / (n_ok - 1);
        out.se = std::sqrt(std::max(var, 0.0) / n_ok);
    }
    return out;
}

void dump_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    const int d = traj.d();
    const int dp = static_cast<int>(traj.z_path.cols());
    out << "t";
    for (int i = 1; i <= d; ++i) out << ",x_" << i;
    for (int i = 1; i <= dp; ++i) out << ",z_" << i;
    out << "\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
    };
    for (int k = 0; k <= traj.n_steps(); ++k) {
        put(traj.times[k]);
        for (int i = 0; i < d; ++i) {
            out << ",";
            put(traj.x_path(k, i));
        }
        for (int i = 0; i < dp; ++i) {
            out << ",";
            put(traj.z_path(k, i));
        }
        out << "\n";
    }
}

}  // namespace lcrl
