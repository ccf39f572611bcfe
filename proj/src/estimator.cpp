#include "lcrl/estimator.hpp"

#include <iostream>

#include "json.hpp"

namespace lcrl {

NumericalError::NumericalError(const std::string& what, double cond)
    : std::runtime_error(what), condition_estimate(cond) {}

TruncationSpec TruncationSpec::clamp_around(const ParamBox& box, double margin) {
    if (!(margin > 0.0)) throw std::invalid_argument("truncation margin must be > 0");
    TruncationSpec spec;
    spec.K_lower = box.lower.array() - margin;
    spec.K_upper = box.upper.array() + margin;
    spec.mode = Mode::Clamp;
    return spec;
}

TruncationSpec TruncationSpec::fallback_around(const ParamBox& box, double margin, MatrixXd theta0) {
    TruncationSpec spec = clamp_around(box, margin);
    spec.mode = Mode::Fallback;
    if (!spec.in_K(theta0)) throw std::invalid_argument("fallback theta0 must lie in K");
    spec.fallback_theta0 = std::move(theta0);
    return spec;
}

bool TruncationSpec::in_K(const MatrixXd& theta_flat) const {
    return (theta_flat.array() >= K_lower.array()).all() &&
           (theta_flat.array() <= K_upper.array()).all();
}

SufficientStats init_stats(const MatrixXd& theta0_hat, const MatrixXd& V0) {
    const int dp = static_cast<int>(V0.rows());
    if (V0.cols() != dp) throw std::invalid_argument("V0 must be square");
    if (theta0_hat.cols() != dp) throw std::invalid_argument("theta0_hat must be d x (d+p)");
    if ((V0 - V0.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + V0.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("V0 must be symmetric");
    Eigen::LLT<MatrixXd> llt(V0);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("V0 must be positive definite");

    SufficientStats stats;
    stats.G = llt.solve(MatrixXd::Identity(dp, dp));
    stats.G = 0.5 * (stats.G + stats.G.transpose().eval());
    stats.S = stats.G * theta0_hat.transpose();  // (theta0_hat V0^{-1})'
    stats.episode_count = 0;
    return stats;
}

SufficientStats update_stats(const SufficientStats& stats, const Trajectory& traj) {
    const int dp = static_cast<int>(stats.G.rows());
    const int d = static_cast<int>(stats.S.cols());
    if (traj.z_path.cols() != dp || traj.x_path.cols() != d)
        throw std::invalid_argument("trajectory dimensions do not match statistics");

    const int n = traj.n_steps();
    const double dt = traj.dt();
    SufficientStats out = stats;
    for (int k = 0; k < n; ++k) {
        VectorXd z = traj.z_path.row(k).transpose();
        out.G.noalias() += (z * z.transpose()) * dt;
        out.S.noalias() += z * (traj.x_path.row(k + 1) - traj.x_path.row(k));
    }
    out.G = 0.5 * (out.G + out.G.transpose().eval());
    out.episode_count = stats.episode_count + 1;
    return out;
}

MatrixXd map_estimate(const SufficientStats& stats) {
    const int dp = static_cast<int>(stats.G.rows());
    Eigen::LLT<MatrixXd> llt(stats.G);
    if (llt.info() != Eigen::Success) {
        const double jitter = 1e-12 * stats.G.trace() / dp;
        std::clog << "map_estimate: precision factorization needed jitter " << jitter << "\n";
        MatrixXd Gj = stats.G + jitter * MatrixXd::Identity(dp, dp);
        llt.compute(Gj);
        if (llt.info() != Eigen::Success) {
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(stats.G, Eigen::EigenvaluesOnly);
            double cond = es.eigenvalues().maxCoeff() / std::max(es.eigenvalues().minCoeff(), 0.0);
            throw NumericalError("map_estimate: precision matrix is not positive definite", cond);
        }
    }
    return llt.solve(stats.S).transpose();
}

MatrixXd truncate(const TruncationSpec& spec, const MatrixXd& theta_hat) {
    if (theta_hat.rows() != spec.K_lower.rows() || theta_hat.cols() != spec.K_lower.cols())
        throw std::invalid_argument("truncate: shape mismatch");
    if (spec.mode == TruncationSpec::Mode::Clamp)
        return theta_hat.cwiseMax(spec.K_lower).cwiseMin(spec.K_upper);
    return spec.in_K(theta_hat) ? theta_hat : spec.fallback_theta0;
}

double min_eigen(const SufficientStats& stats) {
    MatrixXd sym = 0.5 * (stats.G + stats.G.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

std::string stats_snapshot_json(const SufficientStats& stats) {
    nlohmann::json j;
    j["m"] = stats.episode_count;
    auto row_major = [](const MatrixXd& m) {
        std::vector<double> v;
        v.reserve(static_cast<size_t>(m.size()));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) v.push_back(m(r, c));
        return v;
    };
    j["G"] = row_major(stats.G);
    j["S"] = row_major(stats.S);
    j["theta_hat"] = row_major(map_estimate(stats));
    j["lambda_min"] = min_eigen(stats);
    return j.dump();
}

}  // namespace lcrl
