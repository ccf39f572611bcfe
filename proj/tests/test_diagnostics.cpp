#include <cmath>

#include "doctest.h"
#include "lcrl/diagnostics.hpp"
#include "lcrl/rng.hpp"

using namespace lcrl;

TEST_SUITE_BEGIN("diagnostics");

TEST_CASE("gaussian sub-gaussian norm is sqrt(8/3)") {
    RngStream rng(2024);
    std::vector<double> samples(100000);
    for (auto& s : samples) s = rng.gaussian();
    OrliczEstimate est = estimate_orlicz_norm(samples, 2);
    CHECK(std::abs(est.K_hat - std::sqrt(8.0 / 3.0)) < 0.03);
    CHECK(est.n_samples == 100000);

    // The bisection pins the defining equation.
    double mean = 0.0;
    for (double s : samples) mean += std::exp((s * s) / (est.K_hat * est.K_hat));
    mean /= static_cast<double>(samples.size());
    CHECK(std::abs(mean - 2.0) < 0.02);
}

TEST_CASE("constant samples hit |c| / ln 2 exactly") {
    for (double c : {1.0, -2.5, 0.125}) {
        std::vector<double> samples(200, c);
        OrliczEstimate est = estimate_orlicz_norm(samples, 1);
        CHECK(std::abs(est.K_hat - std::abs(c) / std::log(2.0)) < 1e-6);
    }
}

TEST_CASE("homogeneity: scaling samples scales the norm") {
    RngStream rng(7);
    std::vector<double> samples(5000);
    for (auto& s : samples) s = rng.gaussian();
    std::vector<double> scaled = samples;
    for (auto& s : scaled) s *= 3.0;
    const double k1 = estimate_orlicz_norm(samples, 2).K_hat;
    const double k3 = estimate_orlicz_norm(scaled, 2).K_hat;
    CHECK(k3 / k1 == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("degenerate and invalid inputs") {
    std::vector<double> zeros(150, 0.0);
    OrliczEstimate est = estimate_orlicz_norm(zeros, 1);
    CHECK(est.degenerate);
    CHECK(est.K_hat == 0.0);

    std::vector<double> bad(150, 1.0);
    bad[3] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(estimate_orlicz_norm(bad, 2), std::invalid_argument);
    CHECK_THROWS_AS(estimate_orlicz_norm(std::vector<double>(10, 1.0), 2), std::invalid_argument);
    CHECK_THROWS_AS(estimate_orlicz_norm(zeros, 3), std::invalid_argument);
}

TEST_CASE("monotone under adding a new maximal point") {
    RngStream rng(9);
    std::vector<double> samples(1000);
    for (auto& s : samples) s = rng.gaussian();
    const double before = estimate_orlicz_norm(samples, 2).K_hat;
    double max_abs = 0.0;
    for (double s : samples) max_abs = std::max(max_abs, std::abs(s));
    samples.push_back(2.0 * max_abs);
    const double after = estimate_orlicz_norm(samples, 2).K_hat;
    CHECK(after >= before - 1e-9);
}

TEST_CASE("empirical triangle inequality") {
    RngStream rng(13);
    std::vector<double> x(20000), y(20000), sum(20000);
    for (size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.gaussian();
        y[i] = 0.5 * rng.gaussian() + 0.2;
        sum[i] = x[i] + y[i];
    }
    for (int q : {1, 2}) {
        const double kx = estimate_orlicz_norm(x, q).K_hat;
        const double ky = estimate_orlicz_norm(y, q).K_hat;
        const double ks = estimate_orlicz_norm(sum, q).K_hat;
        CHECK(ks <= (kx + ky) * 1.05);
    }
}

TEST_CASE("bernstein tail table") {
    RngStream rng(5);
    const int n_seeds = 1000, N = 100;
    MatrixXd diffs(n_seeds, N);
    for (int s = 0; s < n_seeds; ++s)
        for (int n = 0; n < N; ++n) diffs(s, n) = rng.gaussian();
    BernsteinTable table = bernstein_tail_check(diffs, {0.05, 0.1, 0.5, 1.0});
    CHECK_FALSE(table.low_seed_warning);
    CHECK(table.rows.back().eps == doctest::Approx(1.0));
    CHECK(table.rows.back().empirical_tail == doctest::Approx(0.0));
    CHECK(table.rows.back().bound_shape == doctest::Approx(100.0));
    // Small eps rows keep some mass, so the fit has data.
    CHECK(table.rows.front().empirical_tail > 0.0);
    CHECK(table.cprime_fit > 0.0);
}

TEST_CASE("bernstein degenerate rows") {
    MatrixXd zeros = MatrixXd::Zero(50, 20);
    BernsteinTable table = bernstein_tail_check(zeros, {0.1, 1.0});
    for (const auto& row : table.rows) CHECK(row.empirical_tail == doctest::Approx(0.0));

    MatrixXd few = MatrixXd::Zero(10, 20);
    CHECK(bernstein_tail_check(few, {0.5}).low_seed_warning);
}

TEST_SUITE_END();
