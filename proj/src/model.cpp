#include "lcrl/model.hpp"

#include <cmath>

namespace lcrl {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

MatrixXd symmetrized(const MatrixXd& m, const char* name) {
    require(m.rows() == m.cols(), std::string(name) + " must be square");
    require(((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + m.cwiseAbs().maxCoeff())),
            std::string(name) + " must be symmetric");
    return 0.5 * (m + m.transpose());
}

double min_eigenvalue(const MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

ParamTheta::ParamTheta(MatrixXd A_, MatrixXd B_) : A(std::move(A_)), B(std::move(B_)) {
    require(A.rows() == A.cols(), "theta.A must be d x d");
    require(B.rows() == A.rows(), "theta.B must have d rows");
    require(A.allFinite() && B.allFinite(), "theta entries must be finite");
}

MatrixXd ParamTheta::flat() const {
    MatrixXd m(d(), d() + p());
    m << A, B;
    return m;
}

ParamTheta ParamTheta::from_flat(const MatrixXd& m, int d, int p) {
    require(m.rows() == d && m.cols() == d + p, "flat theta has wrong shape");
    return ParamTheta(m.leftCols(d), m.rightCols(p));
}

ParamBox::ParamBox(MatrixXd lower_, MatrixXd upper_) : lower(std::move(lower_)), upper(std::move(upper_)) {
    require(lower.rows() == upper.rows() && lower.cols() == upper.cols(),
            "parameter box bounds must have equal shape");
    require(lower.allFinite() && upper.allFinite(), "parameter box bounds must be finite");
    require((lower.array() < upper.array()).all(), "parameter box requires lower < upper entrywise");
}

bool ParamBox::contains(const MatrixXd& theta_flat) const {
    return (theta_flat.array() >= lower.array()).all() && (theta_flat.array() <= upper.array()).all();
}

bool SimplexAction::is_valid(const VectorXd& a, double tol) {
    if (a.size() == 0 || !a.allFinite()) return false;
    if ((a.array() < 0.0).any() || (a.array() > 1.0).any()) return false;
    return std::abs(a.sum() - 1.0) <= tol;
}

SimplexAction::SimplexAction(VectorXd a_) : a(std::move(a_)) {
    require(is_valid(a), "action is not on the simplex");
}

SmoothQuadraticCost::SmoothQuadraticCost(MatrixXd Q_, MatrixXd R_, MatrixXd Gterm_)
    : Q(symmetrized(Q_, "Q")), R(symmetrized(R_, "R")), Gterm(symmetrized(Gterm_, "Gterm")) {
    require(min_eigenvalue(Q) >= -1e-12, "Q must be PSD");
    require(min_eigenvalue(Gterm) >= -1e-12, "Gterm must be PSD");
    lambda = min_eigenvalue(R);
    require(lambda > 0.0, "R must be strictly positive definite");
}

VectorXd drift(const ParamTheta& theta, const VectorXd& x, const VectorXd& a) {
    if (x.size() != theta.d() || a.size() != theta.p())
        throw std::invalid_argument("drift: state/action dimension mismatch");
    return theta.A * x + theta.B * a;
}

double h_en(const VectorXd& a) {
    if (!SimplexAction::is_valid(a)) return kInfiniteCost;
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] > 0.0) s += a[i] * std::log(a[i]);  // 0 ln 0 = 0
    }
    return s;
}

double h_star(const VectorXd& z) {
    if (!z.allFinite()) throw std::invalid_argument("h_star requires finite input");
    double zmax = z.maxCoeff();
    double s = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) s += std::exp(z[i] - zmax);
    return zmax + std::log(s);
}

SimplexAction grad_h_star(const VectorXd& z) {
    if (!z.allFinite()) throw std::invalid_argument("grad_h_star requires finite input");
    double zmax = z.maxCoeff();
    VectorXd e = (z.array() - zmax).exp();
    return SimplexAction(e / e.sum());
}

double eval_running_cost(const CostSpec& spec, double t, const VectorXd& x, const VectorXd& a) {
    if (const auto* q = std::get_if<SmoothQuadraticCost>(&spec)) {
        if (x.size() != q->Q.rows() || a.size() != q->R.rows())
            throw std::invalid_argument("running cost: dimension mismatch");
        return x.dot(q->Q * x) + a.dot(q->R * a);
    }
    const auto& e = std::get<EntropyRegularizedCost>(spec);
    double h = h_en(a);
    if (is_infinite_cost(h)) return kInfiniteCost;
    return e.fbar0(t, x).dot(a) + h;
}

double eval_terminal_cost(const CostSpec& spec, const VectorXd& x) {
    if (const auto* q = std::get_if<SmoothQuadraticCost>(&spec)) return x.dot(q->Gterm * x);
    return std::get<EntropyRegularizedCost>(spec).g(x);
}

}  // namespace lcrl
