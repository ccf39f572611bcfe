#include "lcrl/hjb.hpp"

#include <cmath>
#include <memory>
#include <ostream>

namespace lcrl {

namespace {

// Row of centered x-gradients with linear extrapolation at the ends.
VectorXd gradient_row(const VectorXd& v, double dx) {
    const int n = static_cast<int>(v.size());
    VectorXd g(n);
    for (int i = 1; i < n - 1; ++i) g[i] = (v[i + 1] - v[i - 1]) / (2.0 * dx);
    g[0] = 2.0 * g[1] - g[2];
    g[n - 1] = 2.0 * g[n - 2] - g[n - 3];
    return g;
}

}  // namespace

double HjbSolution::gradient_at(double t, double x) const {
    const double dt = grid.dt();
    const double dx = 2.0 * domain.L / (domain.n_x - 1);
    double tc = std::min(std::max(t, 0.0), grid.T);
    double xc = std::min(std::max(x, -domain.L), domain.L);

    double ft = tc / dt;
    int k = std::min(static_cast<int>(ft), grid.n_steps - 1);
    double wt = ft - k;
    double fx = (xc + domain.L) / dx;
    int i = std::min(static_cast<int>(fx), domain.n_x - 2);
    double wx = fx - i;

    double g0 = (1.0 - wx) * dVdx(k, i) + wx * dVdx(k, i + 1);
    double g1 = (1.0 - wx) * dVdx(k + 1, i) + wx * dVdx(k + 1, i + 1);
    return (1.0 - wt) * g0 + wt * g1;
}

HjbSolution solve_hjb_entropy(const EntropyRegularizedCost& cost, const ParamTheta& theta,
                              const TimeGrid& grid, const HjbDomain& domain) {
    if (theta.d() != 1) throw std::invalid_argument("hjb solver is restricted to scalar state");
    if (!(domain.L > 0.0)) throw std::invalid_argument("hjb domain requires L > 0");
    if (domain.n_x < 51 || domain.n_x % 2 == 0)
        throw std::invalid_argument("hjb domain requires odd n_x >= 51");

    const int n_x = domain.n_x;
    const int n_t = grid.n_steps;
    const double dt = grid.dt();
    const double dx = 2.0 * domain.L / (n_x - 1);
    if (dt > 0.4 * dx * dx + 1e-15)
        throw CflViolation("hjb: dt = " + std::to_string(dt) + " exceeds 0.4 dx^2 = " +
                           std::to_string(0.4 * dx * dx) +
                           "; use a finer time grid or a coarser space grid");

    const double A = theta.A(0, 0);
    const VectorXd Bt = theta.B.row(0).transpose();  // p-vector

    HjbSolution sol;
    sol.grid = grid;
    sol.domain = domain;
    sol.x_grid = VectorXd::LinSpaced(n_x, -domain.L, domain.L);
    sol.V.resize(n_t + 1, n_x);
    sol.dVdx.resize(n_t + 1, n_x);

    for (int i = 0; i < n_x; ++i) sol.V(n_t, i) = cost.g(sol.x_grid.segment(i, 1));

    VectorXd v = sol.V.row(n_t).transpose();
    for (int k = n_t - 1; k >= 0; --k) {
        const double t_src = grid.time(k + 1);
        VectorXd grad_c = gradient_row(v, dx);
        VectorXd vnew(n_x);
        for (int i = 0; i < n_x; ++i) {
            const double x = sol.x_grid[i];
            double vxx;
            if (i == 0)
                vxx = (v[0] - 2.0 * v[1] + v[2]) / (dx * dx);
            else if (i == n_x - 1)
                vxx = (v[n_x - 1] - 2.0 * v[n_x - 2] + v[n_x - 3]) / (dx * dx);
            else
                vxx = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (dx * dx);

            const double c = A * x;
            double transport;
            if (i == 0 || i == n_x - 1)
                transport = c * grad_c[i];
            else if (c > 0.0)
                transport = c * (v[i + 1] - v[i]) / dx;
            else
                transport = c * (v[i] - v[i - 1]) / dx;

            VectorXd z = -grad_c[i] * Bt - cost.fbar0(t_src, sol.x_grid.segment(i, 1));
            vnew[i] = v[i] + dt * (0.5 * vxx + transport - h_star(z));
        }
        if (!vnew.allFinite()) throw std::runtime_error("hjb: value table blew up at t = " +
                                                        std::to_string(grid.time(k)));
        v = vnew;
        sol.V.row(k) = v.transpose();
    }

    for (int k = 0; k <= n_t; ++k)
        sol.dVdx.row(k) = gradient_row(sol.V.row(k).transpose(), dx).transpose();
    return sol;
}

Policy entropy_policy(const HjbSolution& hjb, const ParamTheta& theta,
                      const EntropyRegularizedCost& cost) {
    auto sol = std::make_shared<HjbSolution>(hjb);
    const VectorXd Bt = theta.B.row(0).transpose();
    const LinearStateCost fbar0 = cost.fbar0;
    const int p = theta.p();

    auto eval = [sol, Bt, fbar0](double t, const VectorXd& x) -> VectorXd {
        double xc = std::min(std::max(x[0], -sol->domain.L), sol->domain.L);
        VectorXd xv(1);
        xv[0] = xc;
        VectorXd z = -sol->gradient_at(t, xc) * Bt - fbar0(t, xv);
        return grad_h_star(z).a;
    };

    // Budget from the realized table: max spatial quotient on the grid, and
    // simplex outputs give |psi(t,0)| <= 1.
    double lip = 0.0;
    const double dx = 2.0 * hjb.domain.L / (hjb.domain.n_x - 1);
    for (int k = 0; k <= hjb.grid.n_steps; ++k) {
        const double t = hjb.grid.time(k);
        VectorXd prev = eval(t, VectorXd::Constant(1, hjb.x_grid[0]));
        for (int i = 1; i < hjb.domain.n_x; ++i) {
            VectorXd cur = eval(t, VectorXd::Constant(1, hjb.x_grid[i]));
            lip = std::max(lip, (cur - prev).norm() / dx);
            prev = cur;
        }
    }
    lip = std::max(lip, 1.0);

    return Policy(PolicyKind::EntropyGreedy, p, lip, eval);
}

double hjb_residual_max(const HjbSolution& sol, const EntropyRegularizedCost& cost,
                        const ParamTheta& theta) {
    const int n_t = sol.grid.n_steps;
    const int n_x = sol.domain.n_x;
    const double dt = sol.grid.dt();
    const double dx = 2.0 * sol.domain.L / (n_x - 1);
    const double A = theta.A(0, 0);
    const VectorXd Bt = theta.B.row(0).transpose();

    double worst = 0.0;
    for (int k = 1; k < n_t; ++k) {
        const double t = sol.grid.time(k);
        for (int i = 1; i < n_x - 1; ++i) {
            double vt = (sol.V(k + 1, i) - sol.V(k - 1, i)) / (2.0 * dt);
            double vxx = (sol.V(k, i + 1) - 2.0 * sol.V(k, i) + sol.V(k, i - 1)) / (dx * dx);
            double vx = (sol.V(k, i + 1) - sol.V(k, i - 1)) / (2.0 * dx);
            VectorXd z = -vx * Bt - cost.fbar0(t, sol.x_grid.segment(i, 1));
            double r = vt + 0.5 * vxx + A * sol.x_grid[i] * vx - h_star(z);
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

void dump_hjb_csv(const HjbSolution& sol, std::ostream& out) {
    out << "t";
    for (int i = 0; i < sol.domain.n_x; ++i) out << ",v_" << i + 1;
    out << "\n";
    char buf[32];
    auto put = [&](double x) {
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        out << buf;
    };
    for (int k = 0; k <= sol.grid.n_steps; ++k) {
        put(sol.grid.time(k));
        for (int i = 0; i < sol.domain.n_x; ++i) {
            out << ",";
            put(sol.V(k, i));
        }
        out << "\n";
    }
}

}  // namespace lcrl
