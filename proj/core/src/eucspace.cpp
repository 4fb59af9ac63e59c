#include "ics/eucspace.hpp"

#include <cmath>
#include <sstream>

namespace ics {

namespace {

void require_square(const Eigen::MatrixXd& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw InvalidArgument(std::string(who) + ": matrix must be square and non-empty");
}

void require_symmetric(const Eigen::MatrixXd& m, const char* who, double rel_tol) {
    const double scale = m.cwiseAbs().maxCoeff();
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > rel_tol * std::max(scale, 1e-300))
        throw InvalidArgument(std::string(who) + ": matrix is not symmetric (max asymmetry " +
                              std::to_string(asym) + ")");
}

// Eigendecomposition with the PD gate applied; returns eigenvalues ascending.
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> spd_eigs(const Eigen::MatrixXd& m,
                                                        const SpdOptions& opt, const char* who) {
    require_square(m, who);
    require_symmetric(m, who, 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.info() != Eigen::Success)
        throw ConditioningError(std::string(who) + ": eigendecomposition failed", 0.0, 0.0);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || lo <= opt.pd_threshold * hi) {
        std::ostringstream msg;
        msg << who << ": matrix is not positive definite enough (smallest eigenvalue " << lo
            << ", largest " << hi << ")";
        throw ConditioningError(msg.str(), lo, hi);
    }
    return eig;
}

} // namespace

GramBasis::GramBasis(Eigen::MatrixXd g, std::vector<std::string> names)
    : gram(std::move(g)), labels(std::move(names)) {
    require_square(gram, "GramBasis");
    require_symmetric(gram, "GramBasis", 1e-12);
    if (!labels.empty() && static_cast<int>(labels.size()) != gram.rows())
        throw InvalidArgument("GramBasis: label count does not match dimension");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    if (!(lo > 0.0))
        throw ConditioningError("GramBasis: Gram matrix is not positive definite", lo,
                                eig.eigenvalues().maxCoeff());
}

GramBasis GramBasis::identity(int p) {
    if (p <= 0) throw InvalidArgument("GramBasis::identity: dimension must be positive");
    return GramBasis(Eigen::MatrixXd::Identity(p, p));
}

bool GramBasis::same_space(const GramBasis& other, double tol) const {
    if (dim() != other.dim()) return false;
    const double scale = std::max(gram.cwiseAbs().maxCoeff(), 1.0);
    return (gram - other.gram).cwiseAbs().maxCoeff() <= tol * scale;
}

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m, const SpdOptions& opt) {
    const auto eig = spd_eigs(m, opt, "spd_sqrt");
    return eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
           eig.eigenvectors().transpose();
}

Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& m, const SpdOptions& opt) {
    const auto eig = spd_eigs(m, opt, "spd_inv_sqrt");
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    const double cond = hi / lo;
    if (cond >= opt.condition_bound) {
        std::ostringstream msg;
        msg << "spd_inv_sqrt: condition number " << cond << " exceeds bound "
            << opt.condition_bound;
        throw ConditioningError(msg.str(), lo, hi);
    }
    return eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
           eig.eigenvectors().transpose();
}

} // namespace ics
