#include "lcrl/riccati.hpp"

#include <cmath>
#include <memory>
#include <ostream>

namespace lcrl {

namespace {

struct RiccatiState {
    MatrixXd P;
    double q;
};

}  // namespace

const MatrixXd& RiccatiSolution::at(double t) const {
    const double dt = grid.dt();
    int k = static_cast<int>(std::lround(t / dt));
    k = std::max(0, std::min(k, grid.n_steps));
    return p_grid[static_cast<size_t>(k)];
}

double RiccatiSolution::value(double t, const VectorXd& x) const {
    const double dt = grid.dt();
    int k = static_cast<int>(std::lround(t / dt));
    k = std::max(0, std::min(k, grid.n_steps));
    return x.dot(p_grid[static_cast<size_t>(k)] * x) + q_grid[static_cast<size_t>(k)];
}

RiccatiSolution solve_riccati(const SmoothQuadraticCost& cost, const ParamTheta& theta,
                              const TimeGrid& grid) {
    const int d = theta.d();
    if (cost.Q.rows() != d || cost.Gterm.rows() != d || cost.R.rows() != theta.p())
        throw std::invalid_argument("riccati: cost/theta dimension mismatch");

    const MatrixXd BRinvBt = theta.B * cost.R.llt().solve(theta.B.transpose());
    const MatrixXd& A = theta.A;
    const MatrixXd& Q = cost.Q;

    // dP/dt and dq/dt; integrated backward so the RK4 step below uses -dt.
    auto deriv = [&](const RiccatiState& s) {
        RiccatiState ds;
        ds.P = s.P * BRinvBt * s.P - A.transpose() * s.P - s.P * A - Q;
        ds.q = -s.P.trace();
        return ds;
    };

    const int n = grid.n_steps;
    const double h = -grid.dt();

    RiccatiSolution sol;
    sol.grid = grid;
    sol.p_grid.resize(static_cast<size_t>(n) + 1);
    sol.q_grid.resize(static_cast<size_t>(n) + 1);
    RiccatiState s{cost.Gterm, 0.0};
    sol.p_grid[static_cast<size_t>(n)] = s.P;
    sol.q_grid[static_cast<size_t>(n)] = 0.0;

    for (int k = n - 1; k >= 0; --k) {
        RiccatiState k1 = deriv(s);
        RiccatiState k2 = deriv({s.P + 0.5 * h * k1.P, s.q + 0.5 * h * k1.q});
        RiccatiState k3 = deriv({s.P + 0.5 * h * k2.P, s.q + 0.5 * h * k2.q});
        RiccatiState k4 = deriv({s.P + h * k3.P, s.q + h * k3.q});
        s.P += (h / 6.0) * (k1.P + 2.0 * k2.P + 2.0 * k3.P + k4.P);
        s.q += (h / 6.0) * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
        s.P = 0.5 * (s.P + s.P.transpose().eval());

        Eigen::SelfAdjointEigenSolver<MatrixXd> es(s.P, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-8)
            throw std::runtime_error("riccati: P lost positive semidefiniteness at t = " +
                                     std::to_string(grid.time(k)) + " (unstable horizon)");
        sol.p_grid[static_cast<size_t>(k)] = s.P;
        sol.q_grid[static_cast<size_t>(k)] = s.q;
    }
    return sol;
}

Policy lq_policy(const RiccatiSolution& riccati, const ParamTheta& theta,
                 const SmoothQuadraticCost& cost) {
    auto sol = std::make_shared<RiccatiSolution>(riccati);
    const MatrixXd RinvBt = cost.R.llt().solve(theta.B.transpose());

    double lip = 0.0;
    for (const auto& P : sol->p_grid) {
        MatrixXd K = RinvBt * P;
        lip = std::max(lip, K.jacobiSvd().singularValues().maxCoeff());
    }

    auto fn = [sol, RinvBt](double t, const VectorXd& x) -> VectorXd {
        return -(RinvBt * (sol->at(t) * x));
    };
    return Policy(PolicyKind::LQGreedy, theta.p(), lip, fn);
}

void dump_riccati_csv(const RiccatiSolution& sol, std::ostream& out) {
    const int d = static_cast<int>(sol.p_grid.front().rows());
    out << "t";
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) out << ",p_" << r + 1 << c + 1;
    out << ",q\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
    };
    for (int k = 0; k <= sol.grid.n_steps; ++k) {
        put(sol.grid.time(k));
        const MatrixXd& P = sol.p_grid[static_cast<size_t>(k)];
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                out << ",";
                put(P(r, c));
            }
        out << ",";
        put(sol.q_grid[static_cast<size_t>(k)]);
        out << "\n";
    }
}

}  // namespace lcrl
