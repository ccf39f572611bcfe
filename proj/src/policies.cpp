#include "lcrl/policies.hpp"

#include <algorithm>
#include <cmath>

#include "lcrl/information.hpp"

namespace lcrl {

Policy Policy::zero(int p) {
    return Policy(PolicyKind::Zero, p, 0.0,
                  [p](double, const VectorXd&) { return VectorXd::Zero(p).eval(); });
}

Policy Policy::constant(const VectorXd& a) {
    VectorXd copy = a;
    return Policy(PolicyKind::Constant, static_cast<int>(a.size()), a.norm(),
                  [copy](double, const VectorXd&) { return copy; });
}

ExplorationSpec::ExplorationSpec(std::vector<VectorXd> actions_, std::vector<double> partition_)
    : actions(std::move(actions_)), partition(std::move(partition_)) {
    const size_t p = actions.size();
    if (p == 0) throw std::invalid_argument("exploration spec needs at least one action");
    for (const auto& a : actions)
        if (a.size() != static_cast<Eigen::Index>(p))
            throw std::invalid_argument("exploration actions must be p vectors in R^p");
    if (partition.size() != p + 1 || partition.front() != 0.0)
        throw std::invalid_argument("exploration partition must be 0 = t_0 < ... < t_p = T");
    for (size_t k = 0; k + 1 < partition.size(); ++k)
        if (!(partition[k] < partition[k + 1]))
            throw std::invalid_argument("exploration partition must be strictly increasing");

    MatrixXd stacked(p, p);
    for (size_t k = 0; k < p; ++k) stacked.row(static_cast<Eigen::Index>(k)) = actions[k].transpose();
    double sigma_min = stacked.jacobiSvd().singularValues().minCoeff();
    if (sigma_min <= 1e-10)
        throw std::invalid_argument(
            "exploration actions are linearly dependent (smallest singular value " +
            std::to_string(sigma_min) + "); independent actions are required so that only zero "
            "vectors annihilate the regressor");
}

void ExplorationSpec::validate_for_cost(const CostSpec& spec) const {
    if (!is_entropy(spec)) return;
    for (const auto& a : actions) {
        if (!SimplexAction::is_valid(a) || (a.array() <= 0.0).any())
            throw std::invalid_argument(
                "entropy costs need exploration actions in the simplex interior");
    }
}

Policy make_exploration_policy(const ExplorationSpec& spec) {
    const int p = static_cast<int>(spec.actions.size());
    double lip = 0.0;
    for (const auto& a : spec.actions) lip = std::max(lip, a.norm());

    std::vector<VectorXd> actions = spec.actions;
    std::vector<double> partition = spec.partition;
    auto fn = [actions, partition](double t, const VectorXd&) -> VectorXd {
        auto it = std::upper_bound(partition.begin(), partition.end(), t);
        size_t cell = (it == partition.begin()) ? 0 : static_cast<size_t>(it - partition.begin()) - 1;
        cell = std::min(cell, actions.size() - 1);
        return actions[cell];
    };
    return Policy(PolicyKind::Exploration, p, lip, fn);
}

double compute_information_value(const Policy& policy, const ParamTheta& theta,
                                 const TimeGrid& grid, const VectorXd& x0, int n_mc,
                                 std::uint64_t seed) {
    if (n_mc < 2) throw std::invalid_argument("compute_information_value requires n_mc >= 2");
    const int dp = theta.d() + theta.p();
    MatrixXd gram = MatrixXd::Zero(dp, dp);
    const double dt = grid.dt();
    for (int i = 0; i < n_mc; ++i) {
        RngStream stream = RngStream::substream(seed, static_cast<std::uint64_t>(i));
        Trajectory traj = simulate_episode(theta, policy, grid, x0, stream, true);
        for (int k = 0; k < traj.n_steps(); ++k) {
            VectorXd z = traj.z_path.row(k).transpose();
            gram.noalias() += (z * z.transpose()) * dt;
        }
    }
    gram /= n_mc;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (gram + gram.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace lcrl
