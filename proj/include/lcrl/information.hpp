#pragma once

#include "lcrl/sde.hpp"

namespace lcrl {

// Information value Lambda_min(psi, theta): smallest eigenvalue of the Monte
// Carlo mean of int_0^T Z_t Z_t' dt under the policy.
double compute_information_value(const Policy& policy, const ParamTheta& theta,
                                 const TimeGrid& grid, const VectorXd& x0, int n_mc,
                                 std::uint64_t seed);

}  // namespace lcrl
