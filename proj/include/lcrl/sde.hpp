#pragma once

#include <cstdint>
#include <iosfwd>

#include "lcrl/model.hpp"
#include "lcrl/policies.hpp"
#include "lcrl/rng.hpp"

namespace lcrl {

// Uniform discretization of [0, T].
struct TimeGrid {
    double T = 1.0;
    int n_steps = 1000;

    TimeGrid() = default;
    TimeGrid(double T_, int n_steps_);

    double dt() const { return T / n_steps; }
    double time(int k) const { return (k == n_steps) ? T : k * dt(); }
};

// Observed state path and the derived regressor path Z_t = (X_t; psi(t, X_t)).
// The driving noise increments are deliberately not recorded here.
struct Trajectory {
    VectorXd times;    // n_steps + 1
    MatrixXd x_path;   // (n_steps + 1) x d
    MatrixXd z_path;   // (n_steps + 1) x (d + p)

    int n_steps() const { return static_cast<int>(times.size()) - 1; }
    int d() const { return static_cast<int>(x_path.cols()); }
    double dt() const { return times[1] - times[0]; }
};

struct EpisodeCost {
    double value = 0.0;
    bool valid = true;
};

// Monte Carlo estimate of J(psi; theta).
struct PolicyValue {
    double mean = 0.0;
    double se = 0.0;
    int n_invalid = 0;

    bool valid() const { return n_invalid == 0; }
};

class SimulationBlowup : public std::runtime_error {
public:
    SimulationBlowup(int step, double magnitude);
    int step;
};

// Euler-Maruyama episode under a feedback policy:
//   X_{k+1} = X_k + (A X_k + B psi(t_k, X_k)) dt + sqrt(dt) xi_k.
// Z is recorded at left endpoints and at T.
Trajectory simulate_episode(const ParamTheta& theta, const Policy& policy, const TimeGrid& grid,
                            const VectorXd& x0, RngStream& rng, bool noise_on = true);

// Left-endpoint quadrature of the running cost plus terminal cost; any +inf
// running cost marks the episode invalid instead of being summed.
EpisodeCost episode_cost(const Trajectory& traj, const CostSpec& spec);

// Mean and standard error of episode_cost over n_mc seeded episodes.
PolicyValue mc_policy_value(const ParamTheta& theta, const Policy& policy, const CostSpec& spec,
                            const TimeGrid& grid, const VectorXd& x0, int n_mc, std::uint64_t seed);

// CSV dump with header t,x_1..x_d,z_1..z_{d+p}.
void dump_trajectory_csv(const Trajectory& traj, std::ostream& out);

}  // namespace lcrl
