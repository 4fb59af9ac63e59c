#include "ics/mpl.hpp"

#include <cmath>

#include "ics/errors.hpp"

namespace ics {

namespace {

// Precomputed pieces of the penalized likelihood: the sample mean of the
// design rows, a quadrature rule dense enough for the e^g integral, and the
// roughness penalty. Everything is in full B-spline coefficients; the gauge
// (constant direction) is fixed only after optimization.
struct MplProblem {
    Eigen::VectorXd mean_design;   // (1/N) sum_i phi(X_i)
    Eigen::MatrixXd quad_design;   // basis values at quadrature points
    Eigen::VectorXd quad_weights;
    Eigen::MatrixXd penalty;
    double lambda = 0.0;

    MplProblem(const Eigen::VectorXd& sample, const MPLConfig& config) {
        config.spec.validate();
        if (config.penalty_order < 1 || config.penalty_order > config.spec.degree)
            throw InvalidArgument("mpl: penalty order must lie in [1, degree]");
        if (!(config.lambda >= 0.0)) throw InvalidArgument("mpl: lambda must be nonnegative");
        const int p = config.spec.zb_dim();
        const auto n = static_cast<int>(sample.size());
        if (n <= p)
            throw DimensionError(
                "mpl: sample size " + std::to_string(n) +
                " must exceed the spline space dimension " + std::to_string(p) +
                "; a stable fit needs around 10 times the dimension");
        const int nodes =
            config.quad_nodes > 0 ? config.quad_nodes : 2 * config.spec.degree + 2;
        const Quadrature rule = knot_interval_quadrature(config.spec, nodes);
        mean_design = bspline_design(config.spec, sample).colwise().mean();
        quad_design = bspline_design(config.spec, rule.points);
        quad_weights = rule.weights;
        penalty = penalty_matrix(config.spec, config.penalty_order);
        lambda = config.lambda;
    }

    struct Eval {
        double value;
        double log_z;
        Eigen::VectorXd gradient;
        Eigen::MatrixXd hessian;
    };

    Eval evaluate(const Eigen::VectorXd& coef, bool with_hessian) const {
        const Eigen::VectorXd g = quad_design * coef;
        const double shift = g.maxCoeff();
        const Eigen::VectorXd eg = (g.array() - shift).exp();
        const double z = quad_weights.dot(eg);
        const double log_z = std::log(z) + shift;
        const Eigen::VectorXd mu = quad_weights.cwiseProduct(eg) / z;  // sums to 1

        Eval out;
        out.log_z = log_z;
        out.value = mean_design.dot(coef) - log_z - lambda * coef.dot(penalty * coef);
        const Eigen::VectorXd expected = quad_design.transpose() * mu;
        out.gradient = mean_design - expected - 2.0 * lambda * (penalty * coef);
        if (with_hessian) {
            out.hessian = -(quad_design.transpose() * mu.asDiagonal() * quad_design -
                            expected * expected.transpose()) -
                          2.0 * lambda * penalty;
        }
        return out;
    }
};

Eigen::VectorXd project_zero_integral(const Eigen::VectorXd& coef, const SplineSpaceSpec& spec) {
    const Eigen::VectorXd ints = bspline_integrals(spec);
    const double mean = ints.dot(coef) / (spec.b - spec.a);
    return coef.array() - mean;
}

} // namespace

double mpl_objective(const Eigen::VectorXd& coef, const Eigen::VectorXd& sample,
                     const MPLConfig& config) {
    return MplProblem(sample, config).evaluate(coef, false).value;
}

Eigen::VectorXd mpl_gradient(const Eigen::VectorXd& coef, const Eigen::VectorXd& sample,
                             const MPLConfig& config) {
    return MplProblem(sample, config).evaluate(coef, false).gradient;
}

DensitySpline mpl_fit(const Eigen::VectorXd& sample, const MPLConfig& config,
                      MPLReport* report) {
    const MplProblem problem(sample, config);
    const int q = config.spec.bspline_dim();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(q);

    Eigen::VectorXd coef = Eigen::VectorXd::Zero(q);
    MplProblem::Eval cur = problem.evaluate(coef, true);

    int iterations = 0;
    bool converged = false;
    double grad_norm = cur.gradient.norm();
    for (int it = 0; it < config.max_iter; ++it) {
        grad_norm = cur.gradient.norm();
        if (grad_norm <= config.grad_tol) {
            converged = true;
            break;
        }
        // The objective is flat along constants, so the Hessian has an exact
        // null direction; the tiny ridge makes the Newton system solvable
        // without biasing any zero-integral component.
        Eigen::MatrixXd neg_h = -cur.hessian;
        neg_h += (1e-10 / q) * ones * ones.transpose();
        const Eigen::VectorXd step = neg_h.ldlt().solve(cur.gradient);
        if (!step.allFinite())
            throw ConvergenceError("mpl_fit: Newton system produced a non-finite step",
                                   grad_norm);
        const double decrement2 = cur.gradient.dot(step);
        if (decrement2 <= 1e-15 * (1.0 + std::abs(cur.value))) {
            // Steps are numerically zero (stiff-penalty regime): accept.
            converged = true;
            break;
        }
        double t = 1.0;
        bool accepted = false;
        for (int half = 0; half < 60; ++half) {
            const Eigen::VectorXd cand = coef + t * step;
            MplProblem::Eval next = problem.evaluate(cand, true);
            if (next.value >= cur.value + 1e-4 * t * decrement2) {
                coef = cand;
                cur = std::move(next);
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        ++iterations;
        if (!accepted)
            throw ConvergenceError("mpl_fit: line search failed to improve the objective",
                                   grad_norm);
        if (t * decrement2 <= 1e-15 * (1.0 + std::abs(cur.value))) {
            // The damped step's guaranteed improvement is below double rounding,
            // so the objective cannot move any further; the gradient norm at this
            // point is the numerical floor for this problem instance.
            converged = true;
            break;
        }
    }
    grad_norm = cur.gradient.norm();
    if (!converged && grad_norm > config.grad_tol)
        throw ConvergenceError("mpl_fit: no convergence within " +
                                   std::to_string(config.max_iter) + " iterations",
                               grad_norm);

    const Eigen::VectorXd fixed = project_zero_integral(coef, config.spec);
    if (report) {
        report->iterations = iterations;
        report->final_gradient_norm = grad_norm;
        report->log_likelihood = problem.mean_design.dot(coef) - cur.log_z;
        report->penalty_value = coef.dot(problem.penalty * coef);
    }
    // A zero-integral spline is determined by its first q-1 coefficients;
    // those are exactly its ZB coordinates.
    return DensitySpline{config.spec, fixed.head(q - 1)};
}

Eigen::VectorXd density_floor(const Eigen::VectorXd& f, const Eigen::VectorXd& t,
                              double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("density_floor: epsilon must be positive");
    Eigen::VectorXd out = f.cwiseMax(epsilon);
    return out / trapezoid(out, t);
}

DensitySpline smooth_clr_spline(const Eigen::VectorXd& t, const Eigen::VectorXd& clr_values,
                                const SplineSpaceSpec& spec, double lambda_s,
                                int penalty_order) {
    spec.validate();
    if (t.size() != clr_values.size())
        throw DimensionError("smooth_clr_spline: grid and values differ in length");
    if (!(lambda_s >= 0.0))
        throw InvalidArgument("smooth_clr_spline: lambda_s must be nonnegative");
    const int q = spec.bspline_dim();
    if (t.size() < q)
        throw DimensionError("smooth_clr_spline: need at least " + std::to_string(q) +
                             " grid points for " + std::to_string(q) + " basis splines");
    const Eigen::MatrixXd design = bspline_design(spec, t);
    Eigen::MatrixXd normal = design.transpose() * design;
    if (lambda_s > 0.0) normal += lambda_s * penalty_matrix(spec, penalty_order);
    normal = ((normal + normal.transpose()) * 0.5).eval();
    // The inverse square root carries the conditioning gates, so a basis the
    // grid cannot resolve fails loudly instead of producing garbage.
    const Eigen::MatrixXd root = spd_inv_sqrt(normal);
    const Eigen::VectorXd coef = root * (root * (design.transpose() * clr_values));
    const Eigen::VectorXd fixed = project_zero_integral(coef, spec);
    return DensitySpline{spec, fixed.head(q - 1)};
}

} // namespace ics
