#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ics/scatter.hpp"

namespace ics {

// Solution of the two-scatter simultaneous diagonalization problem
//   <S1 h_j, h_j'> = delta_jj'      <S2 h_j, h_j'> = delta_jj' lambda_j
// expressed in the declared basis. Column j of eigenbasis_coords is [h_j]_B,
// spectrum holds the generalized kurtoses in non-increasing order, and
// scores row i collects the invariant coordinates z_ji = <x_i - xbar, h_j>.
struct ICSSolution {
    GramBasis basis;
    Eigen::VectorXd mean_coords;        // [xbar]_B
    Eigen::MatrixXd eigenbasis_coords;  // p x p, column j = [h_j]_B
    Eigen::MatrixXd dual_coords;        // p x p, column j = [h*_j]_B
    Eigen::VectorXd spectrum;           // non-increasing, strictly positive
    Eigen::MatrixXd scores;             // n x p
    std::string w1_name;
    std::string w2_name;
};

// Solve the coordinate-free problem by the Gram reduction: transform
// coordinates to Y_i = G_B [x_i]_B, whiten with S1(Y)^{-1/2}, diagonalize
// the second scatter of the whitened data, and back-transform. Eigenvector
// columns of the reduced multivariate problem are the [h_j]_B directly.
//
// Sign convention: each column is oriented so its invariant coordinate has
// positive sample skewness; at numerically zero skewness the entry of
// largest magnitude is made positive.
ICSSolution solve_ics(const CoordinateSample& sample,
                      const WeightFunction& w1 = WeightFunction::identity(),
                      const WeightFunction& w2 = WeightFunction::cov4(),
                      const SpdOptions& opt = {});

// Invariant coordinates of (possibly new) observations under an existing
// solution: z_ji = ([x_i]_B - [xbar]_B)' G_B [h_j]_B.
Eigen::MatrixXd invariant_coordinates(const CoordinateSample& sample, const ICSSolution& solution);

// Dual basis coordinates ([H]_B' G_B)^{-1}; column j pairs to delta with
// the eigenbasis: [h_j]' G [h*_k] = delta_jk.
Eigen::MatrixXd dual_basis(const Eigen::MatrixXd& eigenbasis_coords, const GramBasis& basis);

// Reconstruction from selected components: [xbar]_B + sum_{j in keep} z_j [h*_j]_B.
// Indices are 0-based; keep = all of 0..p-1 reproduces the observation.
Eigen::VectorXd reconstruct(const ICSSolution& solution, const Eigen::VectorXd& scores_row,
                            const std::vector<int>& keep);

// JSON document (schema "ics-solution/1").
std::string to_json(const ICSSolution& solution);
ICSSolution ics_solution_from_json(const std::string& text);

} // namespace ics
