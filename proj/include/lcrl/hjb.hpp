#pragma once

#include <iosfwd>

#include "lcrl/model.hpp"
#include "lcrl/policies.hpp"
#include "lcrl/sde.hpp"

namespace lcrl {

// Spatial domain [-L, L] with n_x uniform nodes (scalar state only).
struct HjbDomain {
    double L = 4.0;
    int n_x = 201;
};

// Value table of the entropy-regularized HJB equation on the (t, x) grid,
// with centered-difference x-gradients alongside.
struct HjbSolution {
    VectorXd x_grid;   // n_x
    MatrixXd V;        // (n_steps + 1) x n_x, row n_steps equals g on the grid
    MatrixXd dVdx;     // same shape
    TimeGrid grid;
    HjbDomain domain;

    // Bilinear interpolation, (t, x) clamped to the grid box.
    double gradient_at(double t, double x) const;
};

class CflViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Explicit backward scheme for
//   dV/dt + 1/2 V_xx + A x V_x - h*(-B' V_x - fbar0(t,x)) = 0,  V(T,.) = g,
// with centered second differences, transport upwinded by sign(A x), a
// centered gradient inside the h* source, and linear gradient extrapolation
// at the boundary nodes. Requires dt <= 0.4 dx^2.
HjbSolution solve_hjb_entropy(const EntropyRegularizedCost& cost, const ParamTheta& theta,
                              const TimeGrid& grid, const HjbDomain& domain);

// psi(t, x) = grad h*(-B' dVdx(t, x) - fbar0(t, x)); always a simplex vector.
Policy entropy_policy(const HjbSolution& hjb, const ParamTheta& theta,
                      const EntropyRegularizedCost& cost);

// Max interior residual of the PDE evaluated on the computed table with
// centered time and space differences (diagnostic; independent of the
// marching stencil).
double hjb_residual_max(const HjbSolution& sol, const EntropyRegularizedCost& cost,
                        const ParamTheta& theta);

// CSV table: t, then V row-major across the x grid.
void dump_hjb_csv(const HjbSolution& sol, std::ostream& out);

}  // namespace lcrl
