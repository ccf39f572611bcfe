#include "lcrl/diagnostics.hpp"

#include <cmath>

namespace lcrl {

OrliczEstimate estimate_orlicz_norm(const std::vector<double>& samples, int q) {
    if (q != 1 && q != 2) throw std::invalid_argument("orlicz estimate supports q in {1, 2}");
    if (samples.size() < 100) throw std::invalid_argument("orlicz estimate needs n >= 100 samples");

    double max_abs = 0.0;
    for (double x : samples) {
        if (!std::isfinite(x)) throw std::invalid_argument("orlicz estimate needs finite samples");
        max_abs = std::max(max_abs, std::abs(x));
    }

    OrliczEstimate out;
    out.q = q;
    out.n_samples = static_cast<int>(samples.size());
    if (max_abs == 0.0) {
        out.degenerate = true;
        return out;
    }

    // mean(exp(|X|^q / K^q)) is strictly decreasing in K, from +inf to 1.
    auto mean_exp = [&](double K) {
        double s = 0.0;
        for (double x : samples) s += std::exp(std::pow(std::abs(x) / K, q));
        return s / static_cast<double>(samples.size());
    };

    double lo = 1e-6 * max_abs;
    double hi = 10.0 * max_abs;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mean_exp(mid) > 2.0)
            lo = mid;
        else
            hi = mid;
    }
    out.K_lo = lo;
    out.K_hi = hi;
    out.K_hat = 0.5 * (lo + hi);
    return out;
}

BernsteinTable bernstein_tail_check(const MatrixXd& difference_samples,
                                    const std::vector<double>& eps_grid) {
    const int n_seeds = static_cast<int>(difference_samples.rows());
    const int N = static_cast<int>(difference_samples.cols());
    if (n_seeds < 1 || N < 1) throw std::invalid_argument("bernstein check needs a nonempty sample matrix");

    BernsteinTable table;
    table.low_seed_warning = n_seeds < 30;

    VectorXd abs_sums = difference_samples.rowwise().sum().cwiseAbs();

    double num = 0.0;
    double den = 0.0;
    for (double eps : eps_grid) {
        BernsteinRow row;
        row.eps = eps;
        row.bound_shape = N * std::min(eps * eps, eps);
        int exceed = 0;
        for (int s = 0; s < n_seeds; ++s)
            if (abs_sums[s] >= N * eps) ++exceed;
        row.empirical_tail = static_cast<double>(exceed) / n_seeds;
        table.rows.push_back(row);

        // C' fit on nondegenerate rows: -ln(freq/2) = C' * N min(eps^2, eps).
        if (row.empirical_tail > 0.0 && row.empirical_tail < 1.0 && row.bound_shape > 0.0) {
            double y = -std::log(row.empirical_tail / 2.0);
            num += y * row.bound_shape;
            den += row.bound_shape * row.bound_shape;
        }
    }
    table.cprime_fit = den > 0.0 ? num / den : 0.0;
    return table;
}

}  // namespace lcrl
