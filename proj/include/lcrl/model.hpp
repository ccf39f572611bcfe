#pragma once

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>

namespace lcrl {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

inline bool is_infinite_cost(double c) { return std::isinf(c) && c > 0.0; }

// Unknown drift pair theta = (A, B): dX = (A x + B a) dt + dW.
struct ParamTheta {
    MatrixXd A;  // d x d
    MatrixXd B;  // d x p

    ParamTheta() = default;
    ParamTheta(MatrixXd A_, MatrixXd B_);

    int d() const { return static_cast<int>(A.rows()); }
    int p() const { return static_cast<int>(B.cols()); }

    // Flat d x (d+p) view [A | B].
    MatrixXd flat() const;
    static ParamTheta from_flat(const MatrixXd& m, int d, int p);
};

// Coordinatewise-bounded parameter range.
struct ParamBox {
    MatrixXd lower;  // d x (d+p)
    MatrixXd upper;  // d x (d+p)

    ParamBox() = default;
    ParamBox(MatrixXd lower_, MatrixXd upper_);

    bool contains(const MatrixXd& theta_flat) const;
};

// Probability vector on the p-simplex (coordinates in [0,1], sum 1 to 1e-12).
struct SimplexAction {
    VectorXd a;

    explicit SimplexAction(VectorXd a_);
    static bool is_valid(const VectorXd& a, double tol = 1e-12);
};

// Running cost x'Qx + a'Ra, terminal x'Gx. R must be strictly positive
// definite; lambda is lambda_min(R).
struct SmoothQuadraticCost {
    MatrixXd Q;      // d x d PSD
    MatrixXd R;      // p x p, R >= lambda I, lambda > 0
    MatrixXd Gterm;  // d x d PSD
    double lambda = 0.0;

    SmoothQuadraticCost() = default;
    SmoothQuadraticCost(MatrixXd Q_, MatrixXd R_, MatrixXd Gterm_);
};

// Named built-in for the entropy family's fbar0(t, x): constant c or c + W x.
struct LinearStateCost {
    VectorXd c;  // length p
    MatrixXd W;  // p x d, zero for the constant built-in

    VectorXd operator()(double /*t*/, const VectorXd& x) const { return c + W * x; }
    double lipschitz_bound() const { return W.size() == 0 ? 0.0 : W.norm(); }
};

// Named built-in terminal costs for the entropy family.
struct TerminalCost {
    enum class Kind { Zero, Quadratic } kind = Kind::Zero;
    double coeff = 0.0;  // g(x) = coeff * |x|^2

    double operator()(const VectorXd& x) const {
        return kind == Kind::Zero ? 0.0 : coeff * x.squaredNorm();
    }
    VectorXd gradient(const VectorXd& x) const {
        return kind == Kind::Zero ? VectorXd::Zero(x.size()).eval() : (2.0 * coeff * x).eval();
    }
};

// Running cost fbar0(t,x)'a + h_en(a) on the simplex, +inf elsewhere.
struct EntropyRegularizedCost {
    LinearStateCost fbar0;
    TerminalCost g;
};

using CostSpec = std::variant<SmoothQuadraticCost, EntropyRegularizedCost>;

inline bool is_entropy(const CostSpec& s) {
    return std::holds_alternative<EntropyRegularizedCost>(s);
}

// A x + B a
VectorXd drift(const ParamTheta& theta, const VectorXd& x, const VectorXd& a);

// Shannon entropy sum a_i ln a_i on the simplex (0 ln 0 = 0), +inf elsewhere.
double h_en(const VectorXd& a);

// Convex conjugate of h_en: log-sum-exp with max shift.
double h_star(const VectorXd& z);

// Gradient of h_star: softmax, always a valid SimplexAction.
SimplexAction grad_h_star(const VectorXd& z);

// f(t, x, a); +inf is the distinguished invalid-cost sentinel.
double eval_running_cost(const CostSpec& spec, double t, const VectorXd& x, const VectorXd& a);

// g(x)
double eval_terminal_cost(const CostSpec& spec, const VectorXd& x);

}  // namespace lcrl
