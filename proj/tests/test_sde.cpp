#include <cmath>
#include <sstream>

#include "doctest.h"
#include "lcrl/sde.hpp"

using namespace lcrl;

namespace {

MatrixXd scalar(double x) { return MatrixXd::Constant(1, 1, x); }

VectorXd vec1(double x) { return VectorXd::Constant(1, x); }

// Closed-form optimal feedback of the two-input scalar example:
// psi(t, x) = -p_t B' x with p_t = 1 / (1 + |B|^2 (T - t)).
Policy example_closed_form_policy(const ParamTheta& theta, double T) {
    const double b_sq = theta.B.squaredNorm();
    VectorXd Bt = theta.B.row(0).transpose();
    return Policy(PolicyKind::LQGreedy, theta.p(), 1.0, [Bt, b_sq, T](double t, const VectorXd& x) {
        const double p_t = 1.0 / (1.0 + b_sq * (T - t));
        return (-p_t * x[0] * Bt).eval();
    });
}

}  // namespace

TEST_SUITE_BEGIN("sde");

TEST_CASE("zero dynamics hold the state fixed") {
    ParamTheta theta(scalar(0.0), scalar(0.0));
    RngStream rng(1);
    Trajectory traj = simulate_episode(theta, Policy::zero(1), TimeGrid(1.0, 100), vec1(1.5), rng, false);
    CHECK((traj.x_path.array() == 1.5).all());
}

TEST_CASE("constant drift integrates to x0 + T") {
    ParamTheta theta(scalar(0.0), scalar(1.0));
    RngStream rng(1);
    TimeGrid grid(1.0, 200);
    Trajectory traj =
        simulate_episode(theta, Policy::constant(vec1(1.0)), grid, vec1(0.25), rng, false);
    CHECK(std::abs(traj.x_path(grid.n_steps, 0) - 1.25) < grid.dt());
}

TEST_CASE("terminal noise matches Brownian moments") {
    ParamTheta theta(scalar(0.0), scalar(0.0));
    TimeGrid grid(1.0, 50);
    const int n = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        RngStream rng = RngStream::substream(99, static_cast<std::uint64_t>(i));
        Trajectory traj = simulate_episode(theta, Policy::zero(1), grid, vec1(0.0), rng, true);
        const double xT = traj.x_path(grid.n_steps, 0);
        sum += xT;
        sum_sq += xT * xT;
    }
    const double mean = sum / n;
    const double var = (sum_sq - n * mean * mean) / (n - 1);
    CHECK(std::abs(mean) < 4.0 * std::sqrt(1.0 / n));
    CHECK(std::abs(var - 1.0) < 0.1);
}

TEST_CASE("identical seeds give bit-identical trajectories") {
    ParamTheta theta(scalar(0.3), scalar(0.7));
    TimeGrid grid(1.0, 64);
    RngStream a = RngStream::substream(7, 3);
    RngStream b = RngStream::substream(7, 3);
    Trajectory ta = simulate_episode(theta, Policy::constant(vec1(0.5)), grid, vec1(0.1), a, true);
    Trajectory tb = simulate_episode(theta, Policy::constant(vec1(0.5)), grid, vec1(0.1), b, true);
    CHECK(ta.x_path == tb.x_path);
    CHECK(ta.z_path == tb.z_path);
}

TEST_CASE("regressor rows are recomputable from the policy") {
    ParamTheta theta(scalar(-0.5), scalar(1.0));
    TimeGrid grid(1.0, 32);
    Policy policy = Policy::constant(vec1(0.8));
    RngStream rng = RngStream::substream(21, 1);
    Trajectory traj = simulate_episode(theta, policy, grid, vec1(0.0), rng, true);
    for (int k = 0; k <= grid.n_steps; ++k) {
        VectorXd x = traj.x_path.row(k).transpose();
        CHECK(std::abs(traj.z_path(k, 0) - x[0]) < 1e-14);
        CHECK(std::abs(traj.z_path(k, 1) - policy(traj.times[k], x)[0]) < 1e-14);
    }
}

TEST_CASE("unstable dynamics fail loudly") {
    ParamTheta theta(scalar(30.0), scalar(0.0));
    RngStream rng(1);
    CHECK_THROWS_AS(
        simulate_episode(theta, Policy::zero(1), TimeGrid(10.0, 100), vec1(1.0), rng, false),
        SimulationBlowup);
}

TEST_CASE("noise-off integrator is first order") {
    ParamTheta theta(scalar(1.0), scalar(0.0));
    auto terminal_error = [&](int n_steps) {
        RngStream rng(1);
        Trajectory traj =
            simulate_episode(theta, Policy::zero(1), TimeGrid(1.0, n_steps), vec1(1.0), rng, false);
        return std::abs(traj.x_path(n_steps, 0) - std::exp(1.0));
    };
    const double ratio = terminal_error(100) / terminal_error(200);
    CHECK(ratio > 1.8);
    CHECK(ratio < 2.2);
}

TEST_CASE("episode cost: terminal-only quadratic") {
    SmoothQuadraticCost lq(scalar(0.0), MatrixXd::Identity(1, 1) * 1e-12, scalar(1.0));
    // R must be PD; make its contribution exactly zero with a zero action.
    ParamTheta theta(scalar(0.0), scalar(0.0));
    RngStream rng(1);
    Trajectory traj = simulate_episode(theta, Policy::zero(1), TimeGrid(1.0, 10), vec1(2.0), rng, false);
    EpisodeCost c = episode_cost(traj, CostSpec{lq});
    CHECK(c.valid);
    CHECK(c.value == doctest::Approx(4.0));
}

TEST_CASE("episode cost: constant entropy integrand") {
    EntropyRegularizedCost ent;
    ent.fbar0.c = VectorXd::Zero(2);
    ent.fbar0.W = MatrixXd::Zero(2, 1);
    ParamTheta theta(scalar(0.0), MatrixXd::Zero(1, 2));
    VectorXd uniform = VectorXd::Constant(2, 0.5);
    TimeGrid grid(1.0, 100);
    RngStream rng(5);
    Trajectory traj = simulate_episode(theta, Policy::constant(uniform), grid, vec1(0.0), rng, true);
    EpisodeCost c = episode_cost(traj, CostSpec{ent});
    CHECK(c.valid);
    CHECK(c.value == doctest::Approx(-std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("episode cost: off-simplex action flags the episode invalid") {
    EntropyRegularizedCost ent;
    ent.fbar0.c = VectorXd::Zero(2);
    ent.fbar0.W = MatrixXd::Zero(2, 1);
    ParamTheta theta(scalar(0.0), MatrixXd::Zero(1, 2));
    RngStream rng(5);
    Trajectory traj = simulate_episode(theta, Policy::constant((VectorXd(2) << 0.7, 0.4).finished()),
                                       TimeGrid(1.0, 10), vec1(0.0), rng, false);
    EpisodeCost c = episode_cost(traj, CostSpec{ent});
    CHECK_FALSE(c.valid);
    CHECK(is_infinite_cost(c.value));
}

TEST_CASE("zero-noise optimal run reproduces the deterministic value") {
    ParamTheta theta(scalar(0.0), (MatrixXd(1, 2) << 1.0, 1.0).finished());
    SmoothQuadraticCost lq(scalar(0.0), MatrixXd::Identity(2, 2), scalar(1.0));
    TimeGrid grid(1.0, 1000);
    Policy psi = example_closed_form_policy(theta, grid.T);
    RngStream rng(1);
    Trajectory traj = simulate_episode(theta, psi, grid, vec1(1.0), rng, false);
    EpisodeCost c = episode_cost(traj, CostSpec{lq});
    CHECK(c.valid);
    CHECK(std::abs(c.value - 1.0 / 3.0) < 10.0 * grid.dt());
}

TEST_CASE("mc value of the closed-form policy matches the analytic cost") {
    // V(0, x0) = p_0 x0^2 + int_0^T p_t dt; at x0 = 0, |B|^2 = 2, T = 1 this is (ln 3) / 2.
    ParamTheta theta(scalar(0.0), (MatrixXd(1, 2) << 1.0, 1.0).finished());
    SmoothQuadraticCost lq(scalar(0.0), MatrixXd::Identity(2, 2), scalar(1.0));
    TimeGrid grid(1.0, 500);
    Policy psi = example_closed_form_policy(theta, grid.T);
    PolicyValue v = mc_policy_value(theta, psi, CostSpec{lq}, grid, vec1(0.0), 2000, 31);
    CHECK(v.valid());
    CHECK(std::abs(v.mean - 0.5 * std::log(3.0)) < 3.0 * v.se + 5.0 * grid.dt());
}

TEST_CASE("mc value of the decoupled entropy model is -T ln 2") {
    EntropyRegularizedCost ent;
    ent.fbar0.c = VectorXd::Zero(2);
    ent.fbar0.W = MatrixXd::Zero(2, 1);
    ParamTheta theta(scalar(0.0), MatrixXd::Zero(1, 2));
    PolicyValue v = mc_policy_value(theta, Policy::constant(VectorXd::Constant(2, 0.5)),
                                    CostSpec{ent}, TimeGrid(1.0, 100), vec1(0.0), 50, 4);
    CHECK(v.valid());
    CHECK(std::abs(v.mean + std::log(2.0)) < 1e-12);
    CHECK(v.se < 1e-12);
}

TEST_CASE("mc value of an identically zero cost is (0, 0)") {
    SmoothQuadraticCost lq(scalar(0.0), MatrixXd::Identity(1, 1), scalar(0.0));
    ParamTheta theta(scalar(0.0), scalar(0.0));
    PolicyValue v =
        mc_policy_value(theta, Policy::zero(1), CostSpec{lq}, TimeGrid(1.0, 10), vec1(0.0), 2, 9);
    CHECK(v.mean == doctest::Approx(0.0));
    CHECK(v.se == doctest::Approx(0.0));
    CHECK_THROWS_AS(
        mc_policy_value(theta, Policy::zero(1), CostSpec{lq}, TimeGrid(1.0, 10), vec1(0.0), 1, 9),
        std::invalid_argument);
}

TEST_CASE("trajectory csv header") {
    ParamTheta theta(scalar(0.0), scalar(0.0));
    RngStream rng(1);
    Trajectory traj = simulate_episode(theta, Policy::zero(1), TimeGrid(1.0, 2), vec1(0.0), rng, false);
    std::ostringstream out;
    dump_trajectory_csv(traj, out);
    CHECK(out.str().rfind("t,x_1,z_1,z_2\n", 0) == 0);
}

TEST_SUITE_END();
