#pragma once

#include <functional>
#include <vector>

#include "lcrl/model.hpp"

namespace lcrl {

enum class PolicyKind { Zero, Constant, Exploration, LQGreedy, EntropyGreedy };

// Immutable Lipschitz feedback law (t, x) -> a with a declared budget C such
// that |psi(t,0)| <= C and |psi(t,x)-psi(t,y)| <= C|x-y|.
class Policy {
public:
    Policy() = default;
    Policy(PolicyKind kind, int action_dim, double lipschitz_budget,
           std::function<VectorXd(double, const VectorXd&)> fn)
        : kind_(kind), p_(action_dim), lip_(lipschitz_budget), fn_(std::move(fn)) {}

    VectorXd operator()(double t, const VectorXd& x) const { return fn_(t, x); }

    PolicyKind kind() const { return kind_; }
    int action_dim() const { return p_; }
    double lipschitz_budget() const { return lip_; }

    static Policy zero(int p);
    static Policy constant(const VectorXd& a);

private:
    PolicyKind kind_ = PolicyKind::Zero;
    int p_ = 0;
    double lip_ = 0.0;
    std::function<VectorXd(double, const VectorXd&)> fn_;
};

// Piecewise-constant exploration schedule: action a_k on [t_{k-1}, t_k).
struct ExplorationSpec {
    std::vector<VectorXd> actions;   // p vectors in R^p, linearly independent
    std::vector<double> partition;   // 0 = t_0 < t_1 < ... < t_p = T

    ExplorationSpec() = default;
    ExplorationSpec(std::vector<VectorXd> actions_, std::vector<double> partition_);

    // Entropy costs additionally need every action in the simplex interior.
    void validate_for_cost(const CostSpec& spec) const;
};

Policy make_exploration_policy(const ExplorationSpec& spec);

}  // namespace lcrl
