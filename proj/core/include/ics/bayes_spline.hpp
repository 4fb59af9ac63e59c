#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ics/ics_core.hpp"

namespace ics {

enum class KnotPlacement { equally_spaced, quantile };

// A spline space on (a,b): degree d (order d+1) with k interior knots
// strictly inside the interval. The zero-integral subspace it induces has
// dimension p = k + d; the full B-spline space has dimension k + d + 1.
struct SplineSpaceSpec {
    double a = 0.0;
    double b = 1.0;
    int degree = 4;
    Eigen::VectorXd interior_knots;  // strictly increasing, a < g_1 < ... < g_k < b

    static SplineSpaceSpec equally_spaced(double a, double b, int degree, int k);
    // Interior knots at the empirical quantiles of `pooled` at probability
    // levels 1/(k+1), ..., k/(k+1).
    static SplineSpaceSpec from_quantiles(double a, double b, int degree, int k,
                                          const Eigen::VectorXd& pooled);

    int k() const { return static_cast<int>(interior_knots.size()); }
    int zb_dim() const { return k() + degree; }
    int bspline_dim() const { return k() + degree + 1; }

    // Clamped knot vector: endpoints repeated degree+1 times.
    Eigen::VectorXd knot_vector() const;

    void validate() const;
    bool same_space(const SplineSpaceSpec& other, double tol = 1e-12) const;
};

// Rows of B-spline basis values at the given points (Cox-de Boor recursion
// on the clamped knot vector). Each row sums to 1. Points must lie in [a,b].
Eigen::MatrixXd bspline_design(const SplineSpaceSpec& spec, const Eigen::VectorXd& points);

// Same layout for the order-th derivative of each basis spline.
Eigen::MatrixXd bspline_derivative_design(const SplineSpaceSpec& spec,
                                          const Eigen::VectorXd& points, int order);

// Closed-form integrals over (a,b): int B_j = (t_{j+d+1} - t_j) / (d+1).
Eigen::VectorXd bspline_integrals(const SplineSpaceSpec& spec);

struct Quadrature {
    Eigen::VectorXd points;
    Eigen::VectorXd weights;
};

// Gauss-Legendre rule with `nodes` points on (lo, hi); exact through
// polynomial degree 2*nodes - 1. Nodes come from the symmetric eigenproblem
// of the Jacobi matrix.
Quadrature gauss_legendre(int nodes, double lo, double hi);

// The rule applied per knot interval and concatenated.
Quadrature knot_interval_quadrature(const SplineSpaceSpec& spec, int nodes_per_interval);

// Map from zero-integral (ZB) coordinates to full B-spline coordinates:
// Z_j = B_j - (int B_j / int B_q) B_q for j = 1..q-1, where q = k+d+1.
// Columns are linearly independent and every image has zero integral.
Eigen::MatrixXd zb_basis(const SplineSpaceSpec& spec);

// Gram matrix of the ZB basis under the L2(a,b) inner product, by exact
// Gauss-Legendre quadrature per knot interval.
Eigen::MatrixXd gram_zb(const SplineSpaceSpec& spec);

// Roughness penalty on the full B-spline basis: P_jk = int B_j^(m) B_k^(m).
Eigen::MatrixXd penalty_matrix(const SplineSpaceSpec& spec, int order);

// Trapezoid rule on an arbitrary (sorted) grid.
double trapezoid(const Eigen::VectorXd& y, const Eigen::VectorXd& t);

// Centred log-ratio of positive grid values: log f minus its average over
// (a,b), the average taken by trapezoid. Fails on nonpositive values (see
// density_floor for the preprocessing that prevents that).
Eigen::VectorXd clr_fn(const Eigen::VectorXd& f, const Eigen::VectorXd& t);

// Inverse map exp(u)/int exp(u), overflow-guarded; integrates to 1.
Eigen::VectorXd clr_inv(const Eigen::VectorXd& u, const Eigen::VectorXd& t);

// Inner product of two densities given on a shared grid, computed as
// <clr f, clr g> in L2. The _double variant evaluates the equivalent
// double-integral form
//   (1/(2(b-a))) int int (log f(t)-log f(s))(log g(t)-log g(s)) dt ds
// literally (O(m^2)), as an independent cross-check.
double bayes_inner_grid(const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                        const Eigen::VectorXd& t);
double bayes_inner_grid_double(const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                               const Eigen::VectorXd& t);

// A density represented by the coordinates of its clr transform in the ZB
// basis (equivalently, its own coordinates in the compositional basis).
struct DensitySpline {
    SplineSpaceSpec spec;
    Eigen::VectorXd zb_coords;  // length k + d

    // clr spline g(t); has zero integral over (a,b).
    Eigen::VectorXd clr_values(const Eigen::VectorXd& t) const;
    // exp(g)/int exp(g), the normalizing integral taken by dense
    // Gauss-Legendre quadrature per knot interval.
    Eigen::VectorXd density_values(const Eigen::VectorXd& t) const;
};

// <f, g> for two spline densities on the same space: coordinate inner
// product through the ZB Gram matrix (exact).
double bayes_inner(const DensitySpline& f, const DensitySpline& g);

// ICS over a sample of spline densities sharing one space: ZB coordinates
// with the gram_zb metric, then the generic solver.
struct DensityICSSolution {
    ICSSolution ics;
    SplineSpaceSpec spec;

    // Dual eigendensities clr^{-1}(h*_j) evaluated on a grid; column j is
    // the j-th eigendensity.
    Eigen::MatrixXd eigendensities(const Eigen::VectorXd& t) const;
};

DensityICSSolution ics_density(const std::vector<DensitySpline>& sample,
                               const WeightFunction& w1 = WeightFunction::identity(),
                               const WeightFunction& w2 = WeightFunction::cov4(),
                               const SpdOptions& opt = {});

// JSON document (schema "density-spline/1").
std::string to_json(const DensitySpline& d);
DensitySpline density_spline_from_json(const std::string& text);

// CSV export (t, density, clr) on an equally spaced grid of `grid_size`
// points for plotting.
void write_density_grid_csv(const std::string& path, const DensitySpline& d, int grid_size);

} // namespace ics
