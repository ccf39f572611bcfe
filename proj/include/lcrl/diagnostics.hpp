#pragma once

#include <vector>

#include "lcrl/model.hpp"

namespace lcrl {

// Empirical Orlicz-norm estimate: K_hat solves mean(exp(|X_i|^q / K^q)) = 2.
struct OrliczEstimate {
    int q = 2;            // 2 sub-Gaussian, 1 sub-exponential
    double K_hat = 0.0;
    int n_samples = 0;
    double K_lo = 0.0;    // final bisection bracket
    double K_hi = 0.0;
    bool degenerate = false;  // all samples zero
};

OrliczEstimate estimate_orlicz_norm(const std::vector<double>& samples, int q);

struct BernsteinRow {
    double eps = 0.0;
    double empirical_tail = 0.0;  // frequency of |sum D_n| >= N eps across rows
    double bound_shape = 0.0;     // N min(eps^2, eps)
};

struct BernsteinTable {
    std::vector<BernsteinRow> rows;
    double cprime_fit = 0.0;  // least-squares fit of -ln(freq) / bound_shape
    bool low_seed_warning = false;  // fewer than 30 rows
};

// Each row of difference_samples is one realization of a centered difference
// sequence D_1..D_N; tails are tabulated against the bound 2 exp(-C' N min(eps^2, eps)).
BernsteinTable bernstein_tail_check(const MatrixXd& difference_samples,
                                    const std::vector<double>& eps_grid);

}  // namespace lcrl
