// Acceptance harness: verifies the headline guarantees end to end and prints
// one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "ics/bayes_spline.hpp"
#include "ics/ics_core.hpp"
#include "ics/mpl.hpp"
#include "ics/outlier.hpp"
#include "ics/pipeline.hpp"
#include "ics/rng.hpp"
#include "ics/simgen.hpp"
#include "ics/simplex.hpp"
#include "support.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

int g_failures = 0;

std::string strf(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

void report(int id, bool pass, const char* what, const std::string& measured) {
    std::printf("criterion %2d: %s - %s (%s)\n", id, pass ? "PASS" : "FAIL", what,
                measured.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int hw_threads() {
    return std::max(1u, std::thread::hardware_concurrency());
}

// Structured sample in a random Gram metric: anisotropic Gaussian bulk plus
// a few shifted rows so second-scatter spectra are nontrivial.
struct Instance {
    MatrixXd coords;
    MatrixXd gram;
};

Instance make_instance(std::uint64_t seed, int n, int p) {
    auto gen = ics::substream(seed, 0);
    Instance inst;
    inst.gram = testsup::random_spd(gen, p);
    MatrixXd x = ics::normal_matrix(gen, n, p);
    const MatrixXd a = testsup::random_nonsingular(gen, p);
    x *= a.transpose();
    for (int r = 0; r < n / 25; ++r) x((r * 37) % n, 0) += 4.0;
    inst.coords = std::move(x);
    return inst;
}

void criterion_1() {
    const auto start = Clock::now();
    double worst = 0.0;
    bool monotone = true;
    for (int i = 0; i < 100; ++i) {
        const int p = 3 + i % 6;
        const Instance inst = make_instance(1101 + i, 200, p);
        const ics::CoordinateSample sample(inst.coords, ics::GramBasis(inst.gram));
        const ics::ICSSolution sol = ics::solve_ics(sample);
        const auto res = testsup::relation_residuals(inst.coords, inst.gram, sol,
                                                     ics::WeightFunction::identity(),
                                                     ics::WeightFunction::cov4());
        worst = std::max({worst, res.s1, res.s2});
        for (int j = 1; j < p; ++j)
            if (sol.spectrum(j) > sol.spectrum(j - 1) + 1e-12) monotone = false;
    }
    const double elapsed = seconds_since(start);
    report(1, worst <= 1e-8 && monotone && elapsed < 30.0,
           "defining relations <S1 h_j, h_k> = I, <S2 h_j, h_k> = diag "
           "on 100 seeded datasets, non-increasing spectra",
           strf("max residual %.2e <= 1e-8, %.1f s < 30 s", worst, elapsed));
}

void criterion_2() {
    double worst = 0.0;

    {  // Affine maps of multivariate data.
        auto gen = ics::substream(1201, 0);
        MatrixXd x = ics::normal_matrix(gen, 300, 4);
        for (int r = 0; r < 10; ++r) x(r * 29, 0) += 5.0;
        const MatrixXd base =
            ics::solve_ics({x, ics::GramBasis::identity(4)}).scores;
        for (int k = 0; k < 20; ++k) {
            const MatrixXd a = testsup::random_nonsingular(gen, 4);
            const VectorXd b = ics::normal_vector(gen, 4);
            const MatrixXd y = (x * a.transpose()).rowwise() + b.transpose();
            const MatrixXd scores =
                ics::solve_ics({y, ics::GramBasis::identity(4)}).scores;
            worst = std::max(worst, testsup::max_column_diff_up_to_sign_perm(base, scores));
        }
    }

    {  // Componentwise (Aitchison) perturbations of compositions.
        auto gen = ics::substream(1202, 0);
        std::vector<ics::Composition> comps;
        for (int i = 0; i < 250; ++i) {
            VectorXd parts = (0.5 * ics::normal_vector(gen, 5)).array().exp();
            if (i % 31 == 0) parts(0) *= std::exp(2.0);
            comps.push_back(ics::Composition(parts));
        }
        const MatrixXd base = ics::ics_coda(comps, 4).scores;
        for (int k = 0; k < 20; ++k) {
            const VectorXd w = (0.7 * ics::normal_vector(gen, 5)).array().exp();
            std::vector<ics::Composition> moved;
            for (const auto& c : comps)
                moved.push_back(ics::Composition(c.parts.cwiseProduct(w)));
            const MatrixXd scores = ics::ics_coda(moved, 4).scores;
            worst = std::max(worst, testsup::max_column_diff_up_to_sign_perm(base, scores));
        }
    }

    {  // Density perturbations: adding a fixed element in the log geometry.
        const auto spec = ics::SplineSpaceSpec::equally_spaced(0.0, 1.0, 4, 6);
        const int p = spec.zb_dim();
        auto gen = ics::substream(1203, 0);
        std::vector<ics::DensitySpline> units;
        for (int i = 0; i < 150; ++i) {
            VectorXd coords = 0.5 * ics::normal_vector(gen, p);
            if (i % 37 == 0) coords(1) += 3.0;
            units.push_back({spec, coords});
        }
        const MatrixXd base = ics::ics_density(units).ics.scores;
        for (int k = 0; k < 20; ++k) {
            const VectorXd delta = 0.8 * ics::normal_vector(gen, p);
            std::vector<ics::DensitySpline> moved;
            for (const auto& u : units) moved.push_back({spec, u.zb_coords + delta});
            const MatrixXd scores = ics::ics_density(moved).ics.scores;
            worst = std::max(worst, testsup::max_column_diff_up_to_sign_perm(base, scores));
        }
    }

    report(2, worst <= 1e-6,
           "scores unchanged up to sign/permutation under 20 affine maps, "
           "compositional perturbations, and density perturbations",
           strf("max score deviation %.2e <= 1e-6", worst));
}

void criterion_3() {
    double worst_spec = 0.0;
    double worst_span = 0.0;
    for (int i = 0; i < 20; ++i) {
        const int p = 3 + i % 5;
        const Instance inst = make_instance(1301 + i, 250, p);
        const ics::ICSSolution lib =
            ics::solve_ics({inst.coords, ics::GramBasis(inst.gram)});

        const MatrixXd half = ics::spd_sqrt(inst.gram);
        const ics::ICSSolution via_half =
            ics::solve_ics({inst.coords * half, ics::GramBasis::identity(p)});
        const ics::ICSSolution via_gram =
            ics::solve_ics({inst.coords * inst.gram, ics::GramBasis::identity(p)});
        const ics::ICSSolution via_raw =
            ics::solve_ics({inst.coords, ics::GramBasis::identity(p)});

        for (const auto* other : {&via_half, &via_gram, &via_raw})
            worst_spec = std::max(worst_spec,
                                  (lib.spectrum - other->spectrum).cwiseAbs().maxCoeff());

        // Back-map each route's eigenvectors into the declared basis and
        // compare spans per eigenvalue block (ties are only determined up to
        // rotation within the block).
        const MatrixXd from_half =
            half.ldlt().solve(via_half.eigenbasis_coords);
        const MatrixXd from_gram = via_gram.eigenbasis_coords;
        const MatrixXd from_raw =
            inst.gram.ldlt().solve(via_raw.eigenbasis_coords);
        for (const MatrixXd* mapped : {&from_half, &from_gram, &from_raw}) {
            int j = 0;
            while (j < p) {
                int k = j + 1;
                while (k < p &&
                       lib.spectrum(j) - lib.spectrum(k) <= 1e-6 * lib.spectrum(j))
                    ++k;
                worst_span = std::max(
                    worst_span,
                    testsup::span_distance(lib.eigenbasis_coords.middleCols(j, k - j),
                                           mapped->middleCols(j, k - j)));
                j = k;
            }
        }
    }
    report(3, worst_spec <= 1e-10 && worst_span <= 1e-6,
           "whitened, Gram-multiplied, and raw coordinate routes agree with "
           "the metric solver on 20 instances",
           strf("max spectrum gap %.2e <= 1e-10, max eigenspace gap %.2e <= 1e-6",
                worst_spec, worst_span));
}

void criterion_4() {
    const Instance inst = make_instance(1401, 400, 6);
    const ics::ICSSolution sol =
        ics::solve_ics({inst.coords, ics::GramBasis(inst.gram)});
    const VectorXd all = ics::ics_distance(sol.scores, 6);
    const VectorXd maha = testsup::mahalanobis_from_scratch(inst.coords);
    const double diff = (all - maha.cwiseProduct(maha)).cwiseAbs().maxCoeff();
    report(4, diff <= 1e-8,
           "keeping every component reproduces the squared Mahalanobis distance",
           strf("max difference %.2e <= 1e-8", diff));
}

void criterion_5() {
    int in_band = 0;
    for (int r = 0; r < 100; ++r) {
        auto gen = ics::substream(1501, r);
        const ics::ICSSolution sol =
            ics::solve_ics({ics::normal_matrix(gen, 1000, 5), ics::GramBasis::identity(5)});
        if (sol.spectrum.minCoeff() >= 0.85 && sol.spectrum.maxCoeff() <= 1.15) ++in_band;
    }
    report(5, in_band >= 95,
           "Gaussian null spectra concentrate near one (n=1000, p=5)",
           strf("%d/100 replicates fully inside [0.85, 1.15], need >= 95", in_band));
}

void criterion_6() {
    const Instance inst = make_instance(1601, 400, 5);
    const ics::ICSSolution sol =
        ics::solve_ics({inst.coords, ics::GramBasis(inst.gram)});
    const double top = sol.spectrum(0);
    const auto ratio = [&](const VectorXd& h) {
        return testsup::weighted_quadratic_form(inst.coords, inst.gram, h,
                                                ics::WeightFunction::cov4()) /
               testsup::weighted_quadratic_form(inst.coords, inst.gram, h,
                                                ics::WeightFunction::identity());
    };
    auto gen = ics::substream(1601, 1);
    double worst_excess = 0.0;
    for (int k = 0; k < 1000; ++k)
        worst_excess = std::max(worst_excess, ratio(ics::normal_vector(gen, 5)) - top);
    const double at_max = std::abs(ratio(sol.eigenbasis_coords.col(0)) - top);
    report(6, worst_excess <= 1e-8 && at_max <= 1e-8,
           "generalized kurtosis ratio is maximized by the leading eigenobject "
           "over 1000 random directions",
           strf("max excess %.2e <= 1e-8, gap at maximizer %.2e <= 1e-8", worst_excess,
                at_max));
}

void criterion_7() {
    bool dims_ok = true;
    double worst_integral = 0.0;
    for (int d = 1; d <= 4; ++d) {
        for (int k = 0; k <= 25; ++k) {
            const auto spec = ics::SplineSpaceSpec::equally_spaced(0.0, 1.0, d, k);
            const MatrixXd zb = ics::zb_basis(spec);
            if (zb.cols() != k + d || spec.zb_dim() != k + d) dims_ok = false;
            const VectorXd integrals = ics::bspline_integrals(spec).transpose() * zb;
            worst_integral = std::max(worst_integral, integrals.cwiseAbs().maxCoeff());
        }
    }

    // clr round-trip on a grid-normalized truncated normal.
    const VectorXd t = VectorXd::LinSpaced(2001, -3.0, 3.0);
    VectorXd f(t.size());
    for (int i = 0; i < t.size(); ++i) f(i) = testsup::truncnorm_pdf(t(i), -3.0, 3.0);
    f /= ics::trapezoid(f, t);
    const double roundtrip =
        (ics::clr_inv(ics::clr_fn(f, t), t) - f).cwiseAbs().maxCoeff();

    // Inner product: single-integral clr form vs the double-integral ratio
    // form evaluated from raw (unnormalized) log-densities.
    const auto spec = ics::SplineSpaceSpec::equally_spaced(0.0, 1.0, 4, 6);
    auto gen = ics::substream(1701, 0);
    const ics::DensitySpline fd{spec, VectorXd(0.5 * ics::normal_vector(gen, spec.zb_dim()))};
    const ics::DensitySpline gd{spec, VectorXd(0.5 * ics::normal_vector(gen, spec.zb_dim()))};
    const VectorXd tt = VectorXd::LinSpaced(801, 0.0, 1.0);
    const VectorXd lf = (3.0 * fd.density_values(tt)).array().log();  // arbitrary scaling
    const VectorXd lg = gd.density_values(tt).array().log();
    const VectorXd cf = ics::clr_fn(fd.density_values(tt), tt);
    const VectorXd cg = ics::clr_fn(gd.density_values(tt), tt);
    const double single = ics::trapezoid(cf.cwiseProduct(cg), tt);
    VectorXd wts = VectorXd::Zero(tt.size());
    for (int i = 0; i + 1 < tt.size(); ++i) {
        const double h = tt(i + 1) - tt(i);
        wts(i) += 0.5 * h;
        wts(i + 1) += 0.5 * h;
    }
    double dbl = 0.0;
    for (int i = 0; i < tt.size(); ++i) {
        double inner = 0.0;
        for (int j = 0; j < tt.size(); ++j)
            inner += wts(j) * (lf(i) - lf(j)) * (lg(i) - lg(j));
        dbl += wts(i) * inner;
    }
    dbl /= 2.0 * (1.0 - 0.0);
    const double inner_gap = std::abs(single - dbl);

    report(7,
           dims_ok && worst_integral <= 1e-12 && roundtrip <= 1e-8 && inner_gap <= 1e-6,
           "zero-integral spline geometry: dimensions k+d, zero integrals, clr "
           "round-trip, single- vs double-integral inner product",
           strf("max basis integral %.2e <= 1e-12, round-trip %.2e <= 1e-8, "
                "inner-product gap %.2e <= 1e-6",
                worst_integral, roundtrip, inner_gap));
}

void criterion_8() {
    const auto spec = ics::SplineSpaceSpec::equally_spaced(-3.0, 3.0, 4, 10);

    auto gen = ics::substream(1801, 0);
    const VectorXd big_sample = testsup::truncnorm_sample(gen, 2000, -3.0, 3.0);
    const ics::DensitySpline fit = ics::mpl_fit(big_sample, ics::MPLConfig{spec, 1.0});
    const VectorXd t = VectorXd::LinSpaced(4001, -3.0, 3.0);
    const VectorXd fitted = fit.density_values(t);
    VectorXd diff(t.size());
    for (int i = 0; i < t.size(); ++i)
        diff(i) = std::abs(fitted(i) - testsup::truncnorm_pdf(t(i), -3.0, 3.0));
    const double l1 = ics::trapezoid(diff, t);

    const VectorXd stiff_sample = testsup::truncnorm_sample(gen, 1500, -3.0, 3.0);
    const ics::DensitySpline stiff = ics::mpl_fit(stiff_sample, ics::MPLConfig{spec, 1e6});
    const VectorXd tg = VectorXd::LinSpaced(41, -3.0, 3.0);
    const VectorXd g = stiff.clr_values(tg);
    double third = 0.0;
    for (int i = 0; i + 3 < tg.size(); ++i)
        third = std::max(third,
                         std::abs(g(i + 3) - 3.0 * g(i + 2) + 3.0 * g(i + 1) - g(i)));
    const double range = g.maxCoeff() - g.minCoeff();

    const ics::MPLConfig config{ics::SplineSpaceSpec::equally_spaced(-3.0, 3.0, 4, 6),
                                0.01};
    const int q = config.spec.bspline_dim();
    const VectorXd small_sample = big_sample.head(300);
    const VectorXd at = 0.3 * ics::normal_vector(gen, q);
    const VectorXd grad = ics::mpl_gradient(at, small_sample, config);
    VectorXd fd(q);
    const double h = 1e-5;
    for (int j = 0; j < q; ++j) {
        VectorXd up = at, down = at;
        up(j) += h;
        down(j) -= h;
        fd(j) = (ics::mpl_objective(up, small_sample, config) -
                 ics::mpl_objective(down, small_sample, config)) /
                (2.0 * h);
    }
    const double grad_gap = (grad - fd).norm() / std::max(1.0, grad.norm());

    report(8, l1 <= 0.05 && third < 1e-3 * range && grad_gap <= 1e-5,
           "penalized likelihood: truncated-normal recovery, quadratic-log "
           "limit at huge penalties, analytic gradient",
           strf("L1 error %.3f <= 0.05, third differences %.2e < 1e-3*range, "
                "gradient gap %.2e <= 1e-5",
                l1, third, grad_gap));
}

void criterion_9() {
    const auto start = Clock::now();
    ics::CutoffOptions opt;
    opt.level = 0.975;
    opt.reps = 10000;
    opt.seed = 1901;
    opt.threads = hw_threads();
    const double cutoff = ics::monte_carlo_cutoff(200, 6, ics::SelectionMode::fixed(2), opt);

    long flagged = 0;
    const long total = 100L * 200L;
    for (int r = 0; r < 100; ++r) {
        auto gen = ics::substream(1902, r);
        const ics::ICSSolution sol = ics::solve_ics(
            {ics::normal_matrix(gen, 200, 6), ics::GramBasis::identity(6)});
        const VectorXd d = ics::ics_distance(sol.scores, 2);
        for (int i = 0; i < d.size(); ++i)
            if (d(i) > cutoff) ++flagged;
    }
    const double rate = double(flagged) / double(total);
    const double elapsed = seconds_since(start);
    report(9, rate >= 0.015 && rate <= 0.035 && elapsed < 600.0,
           "simulated 97.5% cutoff calibrates the null flag rate over 100 "
           "datasets (n=200, p=6, kappa=2)",
           strf("flag rate %.4f in [0.015, 0.035], cutoff %.3f, %.1f s < 600 s", rate,
                cutoff, elapsed));
}

void criterion_10() {
    const auto start = Clock::now();
    std::vector<ics::SchemeConfig> schemes = {
        ics::SchemeConfig::make(ics::SchemeConfig::Scheme::gp_clr, 2001),
        ics::SchemeConfig::make(ics::SchemeConfig::Scheme::gp_margin, 2002),
        ics::SchemeConfig::make(ics::SchemeConfig::Scheme::gumbel, 2003)};
    ics::BenchmarkOptions opt;
    opt.n_reps = 50;
    opt.threads = hw_threads();
    opt.max_failure_rate = 0.1;  // empty-label replicates are skipped, not fatal
    const auto results = ics::run_benchmark(schemes, opt);
    double sum = 0.0;
    for (const auto& r : results) sum += r.auc_mean;
    const double avg = sum / double(results.size());
    const double elapsed = seconds_since(start);
    report(10, avg >= 0.85 && elapsed < 900.0,
           "density pipeline separates planted outliers across the three "
           "simulation schemes (n=200, 2% outliers, 50 replicates)",
           strf("average AUC %.3f >= 0.85 (gp_clr %.3f, gp_margin %.3f, gumbel %.3f), "
                "%.0f s < 900 s",
                avg, results[0].auc_mean, results[1].auc_mean, results[2].auc_mean,
                elapsed));
}

void criterion_11() {
    auto gen = ics::substream(2101, 0);
    std::normal_distribution<double> jitter(0.0, 0.01);
    std::vector<VectorXd> units;
    const std::vector<int> planted = {14, 31, 49};
    for (int u = 0; u < 60; ++u) {
        const bool out = std::find(planted.begin(), planted.end(), u) != planted.end();
        std::normal_distribution<double> d((out ? 0.62 : 0.5) + jitter(gen), 0.08);
        VectorXd v(1000);
        for (int i = 0; i < 1000; ++i) v(i) = d(gen);
        units.push_back(v);
    }

    ics::SweepConfig config;
    config.placements = {ics::KnotPlacement::equally_spaced, ics::KnotPlacement::quantile};
    config.knot_counts = {4, 6, 25};
    config.lambdas = {1e-4, 1e-2, 1e8};
    config.selection = ics::SelectionMode::fixed(4);
    config.cutoff.reps = 2000;
    config.cutoff.seed = 2101;
    config.threads = hw_threads();
    const ics::SweepResult sweep = ics::param_grid_sweep(units, config);

    int missing = 0;
    bool extremes_missing = true;
    bool conditioning_recorded = true;
    for (const auto& cell : sweep.cells) {
        if (!cell.ok) {
            ++missing;
            if (cell.error.empty()) conditioning_recorded = false;
        }
        const bool extreme = cell.lambda == 1e8 || cell.knots == 25;
        if (extreme) {
            if (cell.ok) extremes_missing = false;
            else if (cell.error.find("positive definite") == std::string::npos)
                conditioning_recorded = false;
        }
    }

    double min_planted = 1.0, max_inlier = 0.0;
    for (int u = 0; u < 60; ++u) {
        const bool out = std::find(planted.begin(), planted.end(), u) != planted.end();
        if (out)
            min_planted = std::min(min_planted, sweep.frequency(u));
        else
            max_inlier = std::max(max_inlier, sweep.frequency(u));
    }

    report(11,
           sweep.cells_run >= 1 && missing >= 1 && extremes_missing &&
               conditioning_recorded && min_planted > max_inlier,
           "sweep records conditioning failures of extreme cells as missing "
           "and ranks planted outliers strictly highest",
           strf("%d/18 cells missing (all extreme cells, conditioning), planted "
                "frequency >= %.3f > inlier max %.3f",
                missing, min_planted, max_inlier));
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    if (g_failures == 0)
        std::printf("all 11 criteria passed\n");
    else
        std::printf("%d criteria failed\n", g_failures);
    return g_failures;
}
