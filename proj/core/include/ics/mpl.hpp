#pragma once

#include <Eigen/Dense>

#include "ics/bayes_spline.hpp"

namespace ics {

// Configuration of the penalized-likelihood density fit. The objective over
// log-density splines g in the full B-spline space of `spec` is
//   (1/N) sum_i g(X_i) - log int_a^b e^g - lambda int_a^b (g^(m))^2,
// concave in the coefficients; m defaults to 3 so the infinite-lambda limit
// is the quadratic-log (Gaussian-type) family.
struct MPLConfig {
    SplineSpaceSpec spec;
    double lambda = 1.0;
    int penalty_order = 3;  // m; must satisfy m <= degree
    int max_iter = 100;
    double grad_tol = 1e-8;
    int quad_nodes = 0;  // per knot interval; 0 means 2*degree + 2
};

struct MPLReport {
    int iterations = 0;
    double final_gradient_norm = 0.0;
    double log_likelihood = 0.0;  // (1/N) sum g(X_i) - log int e^g at the fit
    double penalty_value = 0.0;   // int (g^(m))^2 at the fit
};

// Damped-Newton maximization from g = 0 (uniform density), backtracking
// line search (factor 1/2, Armijo 1e-4), a tiny ridge on the constant
// direction to keep the Hessian nonsingular (the objective itself is flat
// along constants), and a Newton-decrement floor so penalty-stiff problems
// terminate once steps are numerically zero. The optimum is gauge-fixed by
// the zero-integral projection and returned in ZB coordinates.
DensitySpline mpl_fit(const Eigen::VectorXd& sample, const MPLConfig& config,
                      MPLReport* report = nullptr);

// Objective pieces at full-basis coefficients, exposed for derivative
// checking: value and analytic gradient of the penalized likelihood.
double mpl_objective(const Eigen::VectorXd& coef, const Eigen::VectorXd& sample,
                     const MPLConfig& config);
Eigen::VectorXd mpl_gradient(const Eigen::VectorXd& coef, const Eigen::VectorXd& sample,
                             const MPLConfig& config);

// Elementwise max(f, epsilon), then renormalization to unit integral.
Eigen::VectorXd density_floor(const Eigen::VectorXd& f, const Eigen::VectorXd& t,
                              double epsilon = 1e-8);

// Penalized least squares of clr values observed on a grid: minimize
// ||design c - y||^2 + lambda_s c' P c in the full B-spline basis, project
// the solution to zero integral (exact: constants are in the span), and
// return it as a density. Constant shifts of y therefore change nothing.
DensitySpline smooth_clr_spline(const Eigen::VectorXd& t, const Eigen::VectorXd& clr_values,
                                const SplineSpaceSpec& spec, double lambda_s = 0.0,
                                int penalty_order = 2);

} // namespace ics
