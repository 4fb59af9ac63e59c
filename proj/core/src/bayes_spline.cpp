#include "ics/bayes_spline.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Eigenvalues>

#include "ics/csv.hpp"
#include "ics/errors.hpp"

namespace ics {

namespace {

// Dense enough for any integrand met here: products of degree-4 splines are
// exact well below this, and exp(spline) integrands converge to machine
// precision long before 24 nodes per knot interval.
constexpr int kDenseNodes = 24;

// Index of the knot span containing x: t_span <= x < t_span+1, with the
// final span closed on the right so x == b is valid.
int find_span(const Eigen::VectorXd& t, int degree, int n_basis, double x) {
    if (x >= t(n_basis)) return n_basis - 1;
    int lo = degree, hi = n_basis;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (x < t(mid))
            hi = mid;
        else
            lo = mid;
    }
    return lo;
}

// Values and derivatives of the degree+1 basis splines that are nonzero on
// the span of x. Returns (n_ders+1) x (degree+1); row r holds the r-th
// derivative. Triangular-table recursion with the derivative expansion
// running over the stored inverse knot differences.
Eigen::MatrixXd ders_basis_funs(const Eigen::VectorXd& t, int span, double x, int degree,
                                int n_ders) {
    const int d = degree;
    const int n = std::min(n_ders, d);  // derivatives beyond the degree vanish
    Eigen::MatrixXd ndu = Eigen::MatrixXd::Zero(d + 1, d + 1);
    Eigen::VectorXd left(d + 1), right(d + 1);
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= d; ++j) {
        left(j) = x - t(span + 1 - j);
        right(j) = t(span + j) - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu(j, r) = right(r + 1) + left(j - r);
            const double temp = ndu(r, j - 1) / ndu(j, r);
            ndu(r, j) = saved + right(r + 1) * temp;
            saved = left(j - r) * temp;
        }
        ndu(j, j) = saved;
    }

    Eigen::MatrixXd ders = Eigen::MatrixXd::Zero(n_ders + 1, d + 1);
    for (int j = 0; j <= d; ++j) ders(0, j) = ndu(j, d);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, d + 1);
    for (int r = 0; r <= d; ++r) {
        int s1 = 0, s2 = 1;
        a(0, 0) = 1.0;
        for (int k = 1; k <= n; ++k) {
            double acc = 0.0;
            const int rk = r - k;
            const int pk = d - k;
            if (r >= k) {
                a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
                acc = a(s2, 0) * ndu(rk, pk);
            }
            const int j1 = (rk >= -1) ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : d - r;
            for (int j = j1; j <= j2; ++j) {
                a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
                acc += a(s2, j) * ndu(rk + j, pk);
            }
            if (r <= pk) {
                a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
                acc += a(s2, k) * ndu(r, pk);
            }
            ders(k, r) = acc;
            std::swap(s1, s2);
        }
    }
    double factor = d;
    for (int k = 1; k <= n; ++k) {
        for (int j = 0; j <= d; ++j) ders(k, j) *= factor;
        factor *= static_cast<double>(d - k);
    }
    return ders;
}

Eigen::MatrixXd design_impl(const SplineSpaceSpec& spec, const Eigen::VectorXd& points,
                            int order) {
    spec.validate();
    const Eigen::VectorXd t = spec.knot_vector();
    const int q = spec.bspline_dim();
    const double tol = 1e-9 * (spec.b - spec.a);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(points.size(), q);
    for (Eigen::Index i = 0; i < points.size(); ++i) {
        double x = points(i);
        if (!(x >= spec.a - tol) || !(x <= spec.b + tol))
            throw InvalidArgument("bspline evaluation point " + std::to_string(x) +
                                  " lies outside [" + std::to_string(spec.a) + ", " +
                                  std::to_string(spec.b) + "]");
        x = std::clamp(x, spec.a, spec.b);
        const int span = find_span(t, spec.degree, q, x);
        const Eigen::MatrixXd ders = ders_basis_funs(t, span, x, spec.degree, order);
        for (int j = 0; j <= spec.degree; ++j)
            out(i, span - spec.degree + j) = ders(order, j);
    }
    return out;
}

double quantile_type7(const Eigen::VectorXd& sorted, double level) {
    const Eigen::Index n = sorted.size();
    if (n == 1) return sorted(0);
    const double h = level * static_cast<double>(n - 1);
    const auto lo = static_cast<Eigen::Index>(std::floor(h));
    const auto hi = std::min(lo + 1, n - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted(lo) + frac * (sorted(hi) - sorted(lo));
}

Eigen::VectorXd log_checked(const Eigen::VectorXd& f, const char* who) {
    for (Eigen::Index i = 0; i < f.size(); ++i)
        if (!(f(i) > 0.0))
            throw InvalidArgument(std::string(who) + ": value at index " + std::to_string(i) +
                                  " is not strictly positive; apply density_floor first");
    return f.array().log();
}

} // namespace

SplineSpaceSpec SplineSpaceSpec::equally_spaced(double a, double b, int degree, int k) {
    SplineSpaceSpec spec;
    spec.a = a;
    spec.b = b;
    spec.degree = degree;
    spec.interior_knots.resize(k);
    for (int i = 1; i <= k; ++i)
        spec.interior_knots(i - 1) = a + (b - a) * static_cast<double>(i) / (k + 1);
    spec.validate();
    return spec;
}

SplineSpaceSpec SplineSpaceSpec::from_quantiles(double a, double b, int degree, int k,
                                                const Eigen::VectorXd& pooled) {
    if (pooled.size() < 1)
        throw InvalidArgument("SplineSpaceSpec::from_quantiles: empty pooled sample");
    Eigen::VectorXd sorted = pooled;
    std::sort(sorted.data(), sorted.data() + sorted.size());
    SplineSpaceSpec spec;
    spec.a = a;
    spec.b = b;
    spec.degree = degree;
    spec.interior_knots.resize(k);
    for (int i = 1; i <= k; ++i)
        spec.interior_knots(i - 1) = quantile_type7(sorted, static_cast<double>(i) / (k + 1));
    spec.validate();
    return spec;
}

Eigen::VectorXd SplineSpaceSpec::knot_vector() const {
    const int d = degree;
    Eigen::VectorXd t(k() + 2 * (d + 1));
    t.head(d + 1).setConstant(a);
    t.segment(d + 1, k()) = interior_knots;
    t.tail(d + 1).setConstant(b);
    return t;
}

void SplineSpaceSpec::validate() const {
    if (!(b > a)) throw InvalidArgument("spline space: interval must satisfy a < b");
    if (degree < 0) throw InvalidArgument("spline space: degree must be nonnegative");
    double prev = a;
    for (int i = 0; i < k(); ++i) {
        const double g = interior_knots(i);
        if (!std::isfinite(g) || !(g > prev))
            throw InvalidArgument(
                "spline space: interior knots must be strictly increasing inside (a, b)");
        prev = g;
    }
    if (k() > 0 && !(interior_knots(k() - 1) < b))
        throw InvalidArgument(
            "spline space: interior knots must be strictly increasing inside (a, b)");
}

bool SplineSpaceSpec::same_space(const SplineSpaceSpec& other, double tol) const {
    if (degree != other.degree || k() != other.k()) return false;
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    if (std::abs(a - other.a) > tol * scale || std::abs(b - other.b) > tol * scale) return false;
    for (int i = 0; i < k(); ++i)
        if (std::abs(interior_knots(i) - other.interior_knots(i)) > tol * scale) return false;
    return true;
}

Eigen::MatrixXd bspline_design(const SplineSpaceSpec& spec, const Eigen::VectorXd& points) {
    return design_impl(spec, points, 0);
}

Eigen::MatrixXd bspline_derivative_design(const SplineSpaceSpec& spec,
                                          const Eigen::VectorXd& points, int order) {
    if (order < 0) throw InvalidArgument("bspline_derivative_design: order must be nonnegative");
    return design_impl(spec, points, order);
}

Eigen::VectorXd bspline_integrals(const SplineSpaceSpec& spec) {
    spec.validate();
    const Eigen::VectorXd t = spec.knot_vector();
    const int q = spec.bspline_dim();
    Eigen::VectorXd out(q);
    for (int j = 0; j < q; ++j)
        out(j) = (t(j + spec.degree + 1) - t(j)) / static_cast<double>(spec.degree + 1);
    return out;
}

Quadrature gauss_legendre(int nodes, double lo, double hi) {
    if (nodes < 1) throw InvalidArgument("gauss_legendre: need at least one node");
    if (!(hi > lo)) throw InvalidArgument("gauss_legendre: need lo < hi");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(nodes, nodes);
    for (int j = 1; j < nodes; ++j) {
        const double beta = j / std::sqrt(4.0 * j * j - 1.0);
        jacobi(j, j - 1) = beta;
        jacobi(j - 1, j) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    Quadrature rule;
    rule.points = mid + half * eig.eigenvalues().array();
    rule.weights = 2.0 * half * eig.eigenvectors().row(0).transpose().array().square();
    return rule;
}

Quadrature knot_interval_quadrature(const SplineSpaceSpec& spec, int nodes_per_interval) {
    spec.validate();
    if (nodes_per_interval < 1)
        throw InvalidArgument("knot_interval_quadrature: need at least one node per interval");
    const int cells = spec.k() + 1;
    Quadrature all;
    all.points.resize(static_cast<Eigen::Index>(cells) * nodes_per_interval);
    all.weights.resize(all.points.size());
    double lo = spec.a;
    for (int c = 0; c < cells; ++c) {
        const double hi = (c < spec.k()) ? spec.interior_knots(c) : spec.b;
        const Quadrature cell = gauss_legendre(nodes_per_interval, lo, hi);
        all.points.segment(static_cast<Eigen::Index>(c) * nodes_per_interval,
                           nodes_per_interval) = cell.points;
        all.weights.segment(static_cast<Eigen::Index>(c) * nodes_per_interval,
                            nodes_per_interval) = cell.weights;
        lo = hi;
    }
    return all;
}

Eigen::MatrixXd zb_basis(const SplineSpaceSpec& spec) {
    const Eigen::VectorXd ints = bspline_integrals(spec);
    const int q = spec.bspline_dim();
    Eigen::MatrixXd map = Eigen::MatrixXd::Zero(q, q - 1);
    map.topLeftCorner(q - 1, q - 1).setIdentity();
    map.row(q - 1) = -(ints.head(q - 1) / ints(q - 1)).transpose();
    return map;
}

Eigen::MatrixXd gram_zb(const SplineSpaceSpec& spec) {
    const Quadrature rule = knot_interval_quadrature(spec, spec.degree + 1);
    const Eigen::MatrixXd values = bspline_design(spec, rule.points) * zb_basis(spec);
    Eigen::MatrixXd gram = values.transpose() * rule.weights.asDiagonal() * values;
    return ((gram + gram.transpose()) * 0.5).eval();
}

Eigen::MatrixXd penalty_matrix(const SplineSpaceSpec& spec, int order) {
    if (order < 1) throw InvalidArgument("penalty_matrix: derivative order must be positive");
    const Quadrature rule = knot_interval_quadrature(spec, spec.degree + 1);
    const Eigen::MatrixXd ders = bspline_derivative_design(spec, rule.points, order);
    Eigen::MatrixXd pen = ders.transpose() * rule.weights.asDiagonal() * ders;
    return ((pen + pen.transpose()) * 0.5).eval();
}

double trapezoid(const Eigen::VectorXd& y, const Eigen::VectorXd& t) {
    if (y.size() != t.size()) throw DimensionError("trapezoid: grid and values differ in length");
    if (t.size() < 2) throw DimensionError("trapezoid: need at least two grid points");
    double acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < t.size(); ++i) {
        const double dt = t(i + 1) - t(i);
        if (!(dt > 0.0)) throw InvalidArgument("trapezoid: grid must be strictly increasing");
        acc += 0.5 * dt * (y(i) + y(i + 1));
    }
    return acc;
}

Eigen::VectorXd clr_fn(const Eigen::VectorXd& f, const Eigen::VectorXd& t) {
    const Eigen::VectorXd logs = log_checked(f, "clr_fn");
    const double mean = trapezoid(logs, t) / (t(t.size() - 1) - t(0));
    return logs.array() - mean;
}

Eigen::VectorXd clr_inv(const Eigen::VectorXd& u, const Eigen::VectorXd& t) {
    const double shift = u.maxCoeff();
    const Eigen::VectorXd e = (u.array() - shift).exp();
    return e / trapezoid(e, t);
}

double bayes_inner_grid(const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                        const Eigen::VectorXd& t) {
    const Eigen::VectorXd cf = clr_fn(f, t);
    const Eigen::VectorXd cg = clr_fn(g, t);
    return trapezoid(cf.cwiseProduct(cg), t);
}

double bayes_inner_grid_double(const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                               const Eigen::VectorXd& t) {
    const Eigen::VectorXd lf = log_checked(f, "bayes_inner_grid_double");
    const Eigen::VectorXd lg = log_checked(g, "bayes_inner_grid_double");
    const Eigen::Index m = t.size();
    Eigen::VectorXd inner(m);
    Eigen::VectorXd row(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j)
            row(j) = (lf(i) - lf(j)) * (lg(i) - lg(j));
        inner(i) = trapezoid(row, t);
    }
    const double span = t(m - 1) - t(0);
    return trapezoid(inner, t) / (2.0 * span);
}

Eigen::VectorXd DensitySpline::clr_values(const Eigen::VectorXd& t) const {
    if (zb_coords.size() != spec.zb_dim())
        throw DimensionError("DensitySpline: coordinate length does not match the space");
    const Eigen::VectorXd full = zb_basis(spec) * zb_coords;
    return bspline_design(spec, t) * full;
}

Eigen::VectorXd DensitySpline::density_values(const Eigen::VectorXd& t) const {
    const Quadrature rule = knot_interval_quadrature(spec, kDenseNodes);
    const Eigen::VectorXd g_quad = clr_values(rule.points);
    const double shift = g_quad.maxCoeff();
    const double mass = rule.weights.dot((g_quad.array() - shift).exp().matrix());
    const Eigen::VectorXd g = clr_values(t);
    return (g.array() - shift).exp() / mass;
}

double bayes_inner(const DensitySpline& f, const DensitySpline& g) {
    if (!f.spec.same_space(g.spec))
        throw InvalidArgument("bayes_inner: densities live on different spline spaces");
    return f.zb_coords.dot(gram_zb(f.spec) * g.zb_coords);
}

DensityICSSolution ics_density(const std::vector<DensitySpline>& sample,
                               const WeightFunction& w1, const WeightFunction& w2,
                               const SpdOptions& opt) {
    if (sample.empty()) throw DimensionError("ics_density: empty sample");
    const SplineSpaceSpec& spec = sample.front().spec;
    const int p = spec.zb_dim();
    Eigen::MatrixXd coords(static_cast<Eigen::Index>(sample.size()), p);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (!sample[i].spec.same_space(spec))
            throw InvalidArgument("ics_density: density " + std::to_string(i) +
                                  " lives on a different spline space");
        if (sample[i].zb_coords.size() != p)
            throw DimensionError("ics_density: density " + std::to_string(i) +
                                 " has a coordinate length mismatch");
        coords.row(static_cast<Eigen::Index>(i)) = sample[i].zb_coords.transpose();
    }
    CoordinateSample cs(std::move(coords), GramBasis(gram_zb(spec)));
    return DensityICSSolution{solve_ics(cs, w1, w2, opt), spec};
}

Eigen::MatrixXd DensityICSSolution::eigendensities(const Eigen::VectorXd& t) const {
    const int p = spec.zb_dim();
    Eigen::MatrixXd out(t.size(), p);
    for (int j = 0; j < p; ++j) {
        DensitySpline d{spec, ics.dual_coords.col(j)};
        out.col(j) = d.density_values(t);
    }
    return out;
}

void write_density_grid_csv(const std::string& path, const DensitySpline& d, int grid_size) {
    if (grid_size < 2) throw InvalidArgument("write_density_grid_csv: need at least two points");
    Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(grid_size, d.spec.a, d.spec.b);
    const Eigen::VectorXd f = d.density_values(t);
    const Eigen::VectorXd g = d.clr_values(t);
    csv::Table table;
    table.header = {"t", "f", "clr_f"};
    table.rows.reserve(grid_size);
    for (int i = 0; i < grid_size; ++i)
        table.rows.push_back({csv::format_double(t(i)), csv::format_double(f(i)),
                              csv::format_double(g(i))});
    csv::write_csv(path, table);
}

} // namespace ics
