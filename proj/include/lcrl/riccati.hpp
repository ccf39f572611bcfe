#pragma once

#include <iosfwd>
#include <vector>

#include "lcrl/model.hpp"
#include "lcrl/policies.hpp"
#include "lcrl/sde.hpp"

namespace lcrl {

// Backward Riccati solution P_t (d x d symmetric PSD) on the time grid plus
// the value offset q_t = int_t^T tr(P_s) ds, so V(t,x) = x'P_t x + q_t.
struct RiccatiSolution {
    std::vector<MatrixXd> p_grid;  // n_steps + 1 entries, p_grid.back() = Gterm
    std::vector<double> q_grid;    // same length, q_grid.back() = 0
    TimeGrid grid;

    const MatrixXd& at(double t) const;  // nearest-node lookup
    double value(double t, const VectorXd& x) const;
};

// Integrates P' = P B R^{-1} B' P - A'P - PA - Q backward from P_T = Gterm
// with classical RK4, symmetrizing each step.
RiccatiSolution solve_riccati(const SmoothQuadraticCost& cost, const ParamTheta& theta,
                              const TimeGrid& grid);

// psi(t, x) = -R^{-1} B' P_t x
Policy lq_policy(const RiccatiSolution& riccati, const ParamTheta& theta,
                 const SmoothQuadraticCost& cost);

// CSV table: t, then P entries row-major, then q.
void dump_riccati_csv(const RiccatiSolution& sol, std::ostream& out);

}  // namespace lcrl
