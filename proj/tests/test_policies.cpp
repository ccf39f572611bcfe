#include <cmath>

#include "doctest.h"
#include "lcrl/hjb.hpp"
#include "lcrl/information.hpp"
#include "lcrl/riccati.hpp"

using namespace lcrl;

namespace {

MatrixXd scalar(double x) { return MatrixXd::Constant(1, 1, x); }

VectorXd vec2(double a, double b) { return (VectorXd(2) << a, b).finished(); }

ParamTheta example_theta() {
    return ParamTheta(scalar(0.0), (MatrixXd(1, 2) << 1.0, 1.0).finished());
}

SmoothQuadraticCost example_cost() {
    return SmoothQuadraticCost(scalar(0.0), MatrixXd::Identity(2, 2), scalar(1.0));
}

EntropyRegularizedCost entropy_cost(const VectorXd& c) {
    EntropyRegularizedCost cost;
    cost.fbar0.c = c;
    cost.fbar0.W = MatrixXd::Zero(c.size(), 1);
    return cost;
}

}  // namespace

TEST_SUITE_BEGIN("policies");

TEST_CASE("piecewise-constant exploration policy") {
    ExplorationSpec spec({vec2(1.0, 0.0), vec2(0.0, 1.0)}, {0.0, 0.5, 1.0});
    Policy psi = make_exploration_policy(spec);
    CHECK(psi(0.3, VectorXd::Constant(1, 42.0)).isApprox(vec2(1.0, 0.0)));
    CHECK(psi(0.7, VectorXd::Constant(1, -3.0)).isApprox(vec2(0.0, 1.0)));
    CHECK(psi.lipschitz_budget() == doctest::Approx(1.0));

    ExplorationSpec single({VectorXd::Constant(1, 1.0)}, {0.0, 1.0});
    Policy one = make_exploration_policy(single);
    CHECK(one(0.99, VectorXd::Zero(1))[0] == doctest::Approx(1.0));

    CHECK_THROWS_AS(ExplorationSpec({vec2(1.0, 0.0), vec2(2.0, 0.0)}, {0.0, 0.5, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("exploration actions must sit inside the simplex for entropy costs") {
    ExplorationSpec spec({vec2(0.75, 0.25), vec2(0.25, 0.75)}, {0.0, 0.5, 1.0});
    CHECK_NOTHROW(spec.validate_for_cost(CostSpec{entropy_cost(VectorXd::Zero(2))}));

    ExplorationSpec vertex({vec2(1.0, 0.0), vec2(0.0, 1.0)}, {0.0, 0.5, 1.0});
    CHECK_THROWS_AS(vertex.validate_for_cost(CostSpec{entropy_cost(VectorXd::Zero(2))}),
                    std::invalid_argument);
    CHECK_NOTHROW(vertex.validate_for_cost(CostSpec{example_cost()}));
}

TEST_CASE("riccati solve reproduces the separable closed form") {
    RiccatiSolution sol = solve_riccati(example_cost(), example_theta(), TimeGrid(1.0, 1000));
    CHECK(std::abs(sol.p_grid.front()(0, 0) - 1.0 / 3.0) < 1e-8);
    CHECK(sol.p_grid.back()(0, 0) == doctest::Approx(1.0));
    // Value offset q_0 = int_0^T p_t dt = (ln 3) / 2.
    CHECK(sol.q_grid.front() == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-8));
}

TEST_CASE("riccati with zero data is constant") {
    ParamTheta theta(scalar(0.0), scalar(0.0));
    SmoothQuadraticCost cost(scalar(0.0), MatrixXd::Identity(1, 1), scalar(0.7));
    RiccatiSolution sol = solve_riccati(cost, theta, TimeGrid(1.0, 50));
    for (const auto& P : sol.p_grid) CHECK(P(0, 0) == doctest::Approx(0.7));
}

TEST_CASE("riccati integrator is fourth order") {
    auto p0_error = [&](int n) {
        RiccatiSolution sol = solve_riccati(example_cost(), example_theta(), TimeGrid(1.0, n));
        return std::abs(sol.p_grid.front()(0, 0) - 1.0 / 3.0);
    };
    const double ratio = p0_error(8) / p0_error(16);
    CHECK(ratio > std::pow(2.0, 3.8));
    CHECK(ratio < std::pow(2.0, 4.4));
}

TEST_CASE("riccati closed form on random scalar instances") {
    RngStream rng(123);
    for (int i = 0; i < 20; ++i) {
        const double b_sq = 0.5 + 2.5 * rng.uniform01();
        const double gterm = 0.5 + 1.5 * rng.uniform01();
        ParamTheta theta(scalar(0.0), scalar(std::sqrt(b_sq)));
        SmoothQuadraticCost cost(scalar(0.0), MatrixXd::Identity(1, 1), scalar(gterm));
        RiccatiSolution sol = solve_riccati(cost, theta, TimeGrid(1.0, 1000));
        const double expected = gterm / (1.0 + gterm * b_sq);
        CHECK(std::abs(sol.p_grid.front()(0, 0) - expected) < 1e-7);
    }
}

TEST_CASE("lq feedback policy") {
    ParamTheta theta = example_theta();
    RiccatiSolution sol = solve_riccati(example_cost(), theta, TimeGrid(1.0, 1000));
    Policy psi = lq_policy(sol, theta, example_cost());

    VectorXd a = psi(0.0, VectorXd::Constant(1, 1.0));
    CHECK(a[0] == doctest::Approx(-1.0 / 3.0).epsilon(1e-6));
    CHECK(a[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-6));
    CHECK(psi(0.4, VectorXd::Zero(1)).isZero(0.0));

    ParamTheta partial(scalar(0.0), (MatrixXd(1, 2) << 1.0, 0.0).finished());
    RiccatiSolution sol2 = solve_riccati(example_cost(), partial, TimeGrid(1.0, 200));
    Policy psi2 = lq_policy(sol2, partial, example_cost());
    RngStream rng(3);
    for (int i = 0; i < 50; ++i)
        CHECK(psi2(rng.uniform01(), VectorXd::Constant(1, 3.0 * rng.gaussian()))[1] == 0.0);
}

TEST_CASE("lq policy respects its declared lipschitz budget") {
    ParamTheta theta = example_theta();
    RiccatiSolution sol = solve_riccati(example_cost(), theta, TimeGrid(1.0, 200));
    Policy psi = lq_policy(sol, theta, example_cost());
    RngStream rng(17);
    for (int i = 0; i < 1000; ++i) {
        const double t = rng.uniform01();
        VectorXd x = VectorXd::Constant(1, 5.0 * rng.gaussian());
        VectorXd y = VectorXd::Constant(1, 5.0 * rng.gaussian());
        const double quotient = (psi(t, x) - psi(t, y)).norm() / std::max((x - y).norm(), 1e-12);
        CHECK(quotient <= psi.lipschitz_budget() * 1.05);
        CHECK(psi(t, VectorXd::Zero(1)).norm() <= psi.lipschitz_budget() * 1.05);
    }
}

TEST_CASE("hjb decoupled case equals -T ln 2") {
    ParamTheta theta(scalar(0.0), MatrixXd::Zero(1, 2));
    HjbDomain domain{4.0, 201};
    HjbSolution sol = solve_hjb_entropy(entropy_cost(VectorXd::Zero(2)), theta, TimeGrid(1.0, 2000),
                                        domain);
    for (int i = 1; i < domain.n_x - 1; ++i)
        CHECK(std::abs(sol.V(0, i) + std::log(2.0)) < 1e-4);
    // Terminal row is the raw terminal data.
    for (int i = 0; i < domain.n_x; ++i) CHECK(sol.V(2000, i) == 0.0);
}

TEST_CASE("hjb heat equation with quadratic data") {
    ParamTheta theta(scalar(0.0), MatrixXd::Zero(1, 1));
    EntropyRegularizedCost cost = entropy_cost(VectorXd::Zero(1));
    cost.g.kind = TerminalCost::Kind::Quadratic;
    cost.g.coeff = 1.0;
    TimeGrid grid(1.0, 2000);
    HjbDomain domain{4.0, 201};
    HjbSolution sol = solve_hjb_entropy(cost, theta, grid, domain);
    for (int k = 0; k <= grid.n_steps; k += 200) {
        const double offset = grid.T - grid.time(k);
        for (int i = 0; i < domain.n_x; ++i) {
            const double x = sol.x_grid[i];
            CHECK(std::abs(sol.V(k, i) - (x * x + offset)) < 1e-3);
        }
    }
}

TEST_CASE("hjb guards") {
    ParamTheta theta(scalar(0.0), MatrixXd::Zero(1, 2));
    CHECK_THROWS_AS(solve_hjb_entropy(entropy_cost(VectorXd::Zero(2)), theta, TimeGrid(1.0, 100),
                                      HjbDomain{4.0, 201}),
                    CflViolation);
    CHECK_THROWS_AS(solve_hjb_entropy(entropy_cost(VectorXd::Zero(2)), theta, TimeGrid(1.0, 2000),
                                      HjbDomain{4.0, 200}),
                    std::invalid_argument);
    ParamTheta planar(MatrixXd::Zero(2, 2), MatrixXd::Zero(2, 2));
    CHECK_THROWS_AS(solve_hjb_entropy(entropy_cost(VectorXd::Zero(2)), planar, TimeGrid(1.0, 2000),
                                      HjbDomain{4.0, 201}),
                    std::invalid_argument);
}

TEST_CASE("entropy policy closed forms") {
    ParamTheta theta(scalar(0.0), MatrixXd::Zero(1, 2));
    TimeGrid grid(1.0, 500);
    HjbDomain domain{4.0, 101};

    HjbSolution flat = solve_hjb_entropy(entropy_cost(VectorXd::Zero(2)), theta, grid, domain);
    Policy uniform = entropy_policy(flat, theta, entropy_cost(VectorXd::Zero(2)));
    VectorXd u = uniform(0.3, VectorXd::Constant(1, 0.7));
    CHECK(u[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(u[1] == doctest::Approx(0.5).epsilon(1e-9));

    VectorXd c = vec2(1.0, -0.5);
    HjbSolution tilted = solve_hjb_entropy(entropy_cost(c), theta, grid, domain);
    Policy soft = entropy_policy(tilted, theta, entropy_cost(c));
    VectorXd expected = grad_h_star((-c).eval()).a;
    RngStream rng(9);
    for (int i = 0; i < 20; ++i) {
        VectorXd a = soft(rng.uniform01(), VectorXd::Constant(1, 6.0 * rng.gaussian()));
        CHECK(SimplexAction::is_valid(a));
        CHECK(std::abs(a.sum() - 1.0) < 1e-12);
        CHECK((a - expected).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("entropy policy lipschitz spot-check") {
    ParamTheta theta(scalar(-0.3), (MatrixXd(1, 2) << 1.0, 0.5).finished());
    EntropyRegularizedCost cost = entropy_cost(VectorXd::Zero(2));
    cost.fbar0.W = (MatrixXd(2, 1) << 0.8, -0.4).finished();
    cost.g.kind = TerminalCost::Kind::Quadratic;
    cost.g.coeff = 0.5;
    TimeGrid grid(1.0, 1000);
    HjbSolution sol = solve_hjb_entropy(cost, theta, grid, HjbDomain{4.0, 101});
    Policy psi = entropy_policy(sol, theta, cost);

    RngStream rng(31);
    for (int i = 0; i < 1000; ++i) {
        const double t = rng.uniform01();
        VectorXd x = VectorXd::Constant(1, 6.0 * rng.gaussian());
        VectorXd y = VectorXd::Constant(1, 6.0 * rng.gaussian());
        const double dist = (x - y).norm();
        if (dist < 1e-9) continue;
        const double quotient = (psi(t, x) - psi(t, y)).norm() / dist;
        CHECK(quotient <= psi.lipschitz_budget() * 1.05);
    }
}

TEST_CASE("information value detects rank deficiency") {
    ParamTheta theta = example_theta();
    TimeGrid grid(1.0, 100);

    CHECK(compute_information_value(Policy::zero(2), theta, grid, VectorXd::Zero(1), 50, 5) <
          1e-10);

    ExplorationSpec spec({vec2(1.0, 0.0), vec2(0.0, 1.0)}, {0.0, 0.5, 1.0});
    const double lam =
        compute_information_value(make_exploration_policy(spec), theta, grid, VectorXd::Zero(1),
                                  1000, 5);
    CHECK(lam > 0.005);

    ParamTheta partial(scalar(0.0), (MatrixXd(1, 2) << 1.0, 0.0).finished());
    RiccatiSolution sol = solve_riccati(example_cost(), partial, grid);
    Policy greedy = lq_policy(sol, partial, example_cost());
    CHECK(compute_information_value(greedy, partial, grid, VectorXd::Zero(1), 200, 5) < 1e-10);
}

TEST_CASE("information value is stable under permuting the action cells") {
    ParamTheta theta = example_theta();
    TimeGrid grid(1.0, 100);
    ExplorationSpec fwd({vec2(1.0, 0.0), vec2(0.0, 1.0)}, {0.0, 0.5, 1.0});
    ExplorationSpec rev({vec2(0.0, 1.0), vec2(1.0, 0.0)}, {0.0, 0.5, 1.0});
    const double a =
        compute_information_value(make_exploration_policy(fwd), theta, grid, VectorXd::Zero(1), 2000, 5);
    const double b =
        compute_information_value(make_exploration_policy(rev), theta, grid, VectorXd::Zero(1), 2000, 6);
    CHECK(std::abs(a - b) < 0.15 * std::max(a, b));
}

TEST_SUITE_END();
