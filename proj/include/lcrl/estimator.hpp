#pragma once

#include <string>

#include "lcrl/model.hpp"
#include "lcrl/sde.hpp"

namespace lcrl {

// Matrix-normal posterior sufficient statistics. G is the precision
// V_m^{-1} = V_0^{-1} + sum_n int Z Z' ds and S accumulates
// (theta0_hat V_0^{-1})' + sum_n int Z dX'.
struct SufficientStats {
    MatrixXd G;        // (d+p) x (d+p), symmetric positive definite
    MatrixXd S;        // (d+p) x d
    int episode_count = 0;
};

class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double condition_estimate);
    double condition_estimate;
};

// Truncation rho onto a compact box K strictly containing the parameter range.
struct TruncationSpec {
    enum class Mode { Clamp, Fallback };

    MatrixXd K_lower;  // d x (d+p)
    MatrixXd K_upper;  // d x (d+p)
    Mode mode = Mode::Clamp;
    MatrixXd fallback_theta0;  // used in Fallback mode; must lie in K

    TruncationSpec() = default;
    // K = [box.lower - margin, box.upper + margin], margin > 0 entrywise.
    static TruncationSpec clamp_around(const ParamBox& box, double margin);
    static TruncationSpec fallback_around(const ParamBox& box, double margin, MatrixXd theta0);

    bool in_K(const MatrixXd& theta_flat) const;
};

SufficientStats init_stats(const MatrixXd& theta0_hat, const MatrixXd& V0);

// Left-endpoint quadrature of int Z Z' dt and int Z dX' over one episode.
SufficientStats update_stats(const SufficientStats& stats, const Trajectory& traj);

// MAP estimate (G^{-1} S)', via SPD solve (jittered retry on failure).
MatrixXd map_estimate(const SufficientStats& stats);

MatrixXd truncate(const TruncationSpec& spec, const MatrixXd& theta_hat);

// Smallest eigenvalue of the symmetrized precision.
double min_eigen(const SufficientStats& stats);

// JSON snapshot {m, G (row-major), S (row-major), theta_hat, lambda_min}.
std::string stats_snapshot_json(const SufficientStats& stats);

}  // namespace lcrl
