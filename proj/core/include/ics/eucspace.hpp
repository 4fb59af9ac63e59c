#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ics/errors.hpp"

namespace ics {

// A finite-dimensional Euclidean space, described by the Gram matrix
// G_B = (<b_j, b_j'>) of a chosen basis B. All coordinate-free inner
// products reduce to x' G y on coordinate vectors.
struct GramBasis {
    Eigen::MatrixXd gram;             // p x p, symmetric positive definite
    std::vector<std::string> labels;  // empty or one name per basis element

    explicit GramBasis(Eigen::MatrixXd g, std::vector<std::string> names = {});

    static GramBasis identity(int p);

    int dim() const { return static_cast<int>(gram.rows()); }

    // Same dimension and entrywise-close Gram matrix.
    bool same_space(const GramBasis& other, double tol = 1e-10) const;
};

struct SpdOptions {
    // Relative positive-definiteness gate: smallest eigenvalue must exceed
    // pd_threshold times the largest, otherwise the operation fails loudly
    // instead of regularizing.
    double pd_threshold = 1e-10;
    // Additional condition-number bound for inverse square roots.
    double condition_bound = 1e12;
};

// Symmetric positive-definite square root via eigendecomposition, so the
// result is itself symmetric: R R = M.
Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m, const SpdOptions& opt = {});

// Symmetric inverse square root: R M R = I. Fails with a ConditioningError
// carrying the eigenvalue evidence when M is ill-conditioned.
Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& m, const SpdOptions& opt = {});

} // namespace ics
