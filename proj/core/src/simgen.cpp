#include "ics/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>

#include "ics/csv.hpp"
#include "ics/parallel.hpp"
#include "ics/pipeline.hpp"
#include "ics/rng.hpp"

namespace ics {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate_common(const SchemeConfig& config) {
    if (config.n < 2) throw InvalidArgument("scheme: need at least 2 units");
    if (config.grid_size < 10) throw InvalidArgument("scheme: grid size must be at least 10");
    if (!(config.outlier_rate >= 0.0 && config.outlier_rate < 1.0))
        throw InvalidArgument("scheme: outlier rate must lie in [0, 1)");
    if (!(config.gp_range > 0.0) || !(config.gp_variance > 0.0))
        throw InvalidArgument("scheme: GP range and variance must be positive");
}

std::vector<bool> draw_labels(std::mt19937_64& gen, int n, double rate) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<bool> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = unif(gen) < rate;
    return labels;
}

// Zero-mean paths with covariance variance * exp(-|s-t|/range) on the grid,
// one path per row, drawn through the Cholesky factor of the (jittered)
// kernel matrix.
Eigen::MatrixXd gp_paths(std::mt19937_64& gen, int n, const Eigen::VectorXd& t,
                         const SchemeConfig& config) {
    const Eigen::Index m = t.size();
    Eigen::MatrixXd kernel(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            kernel(i, j) = config.gp_variance * std::exp(-std::abs(t(i) - t(j)) /
                                                         config.gp_range);
    kernel.diagonal().array() += 1e-10;
    Eigen::LLT<Eigen::MatrixXd> llt(kernel);
    if (llt.info() != Eigen::Success)
        throw ConditioningError("gp_paths: kernel matrix is not positive definite", 0.0, 0.0);
    return normal_matrix(gen, n, static_cast<int>(m)) * llt.matrixL().transpose();
}

Eigen::VectorXd bump_shape(const SchemeConfig& config, const Eigen::VectorXd& t) {
    const Eigen::ArrayXd s = t.array() - config.bump_center;
    return config.bump_amplitude *
           (-0.5 * (s / config.bump_width).square()).exp() *
           (2.0 * kPi * config.bump_frequency * s).cos();
}

// Rows of positive values -> rows of densities integrating to 1 on t.
Eigen::MatrixXd normalize_rows(Eigen::MatrixXd values, const Eigen::VectorXd& t) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        Eigen::VectorXd row = values.row(i).transpose();
        values.row(i) = (row / trapezoid(row, t)).transpose();
    }
    return values;
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

// Squared ICS distances over the leading components chosen by the selection
// rule, floored at one component so every replicate scores.
Eigen::VectorXd density_pipeline_scores(const std::vector<DensitySpline>& densities,
                                        const SelectionMode& selection,
                                        const SpdOptions& spd) {
    const DensityICSSolution sol =
        ics_density(densities, WeightFunction::identity(), WeightFunction::cov4(), spd);
    int kappa;
    if (selection.kind == SelectionMode::Kind::fixed) {
        kappa = selection.fixed_kappa;
    } else {
        kappa = std::max(select_components(sol.ics.scores, selection).kappa, 1);
    }
    return ics_distance(sol.ics.scores, kappa);
}

struct Replicate {
    RocResult roc;
    bool ok = false;
    std::string error;
};

Replicate run_replicate(const SchemeConfig& config, const BenchmarkOptions& opt) {
    Replicate out;
    try {
        std::vector<bool> labels;
        Eigen::VectorXd scores;
        if (config.scheme == SchemeConfig::Scheme::gp_margin) {
            const RawSample raw = gen_gp_margin(config);
            labels = raw.labels;
            MplRouteOptions route;
            route.degree = config.spline_degree;
            route.knots = config.effective_knots();
            route.lambda = config.mpl_lambda;
            const MplRouteResult fits = smooth_raw_units(raw.values, route);
            if (!fits.all_ok()) {
                for (const auto& e : fits.unit_errors)
                    if (!e.empty()) throw Error("unit fit failed: " + e);
            }
            scores = density_pipeline_scores(fits.densities, opt.selection, opt.spd);
        } else {
            const GridSample grid = config.scheme == SchemeConfig::Scheme::gp_clr
                                        ? gen_gp_clr(config)
                                        : gen_gumbel(config);
            labels = grid.labels;
            const SplineSpaceSpec spec = SplineSpaceSpec::equally_spaced(
                grid.t(0), grid.t(grid.t.size() - 1), config.spline_degree,
                config.effective_knots());
            const std::vector<DensitySpline> densities =
                smooth_grid_sample(grid.t, grid.densities, spec, config.grid_lambda_s);
            scores = density_pipeline_scores(densities, opt.selection, opt.spd);
        }
        out.roc = roc_auc(scores, labels);
        out.ok = true;
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

} // namespace

SchemeConfig SchemeConfig::make(Scheme s, std::uint64_t seed) {
    SchemeConfig config;
    config.scheme = s;
    config.seed = seed;
    return config;
}

int SchemeConfig::effective_knots() const {
    if (spline_knots > 0) return spline_knots;
    return scheme == Scheme::gp_clr ? 12 : 6;
}

std::string SchemeConfig::scheme_name() const {
    switch (scheme) {
        case Scheme::gp_clr: return "gp_clr";
        case Scheme::gp_margin: return "gp_margin";
        case Scheme::gumbel: return "gumbel";
    }
    return "unknown";
}

GridSample gen_gp_clr(const SchemeConfig& config) {
    validate_common(config);
    auto gen = substream(config.seed, 0);
    GridSample out;
    out.t = Eigen::VectorXd::LinSpaced(config.grid_size, 0.0, 1.0);
    out.labels = draw_labels(gen, config.n, config.outlier_rate);
    Eigen::MatrixXd paths = gp_paths(gen, config.n, out.t, config);
    const Eigen::VectorXd bump = bump_shape(config, out.t);
    for (int i = 0; i < config.n; ++i)
        if (out.labels[static_cast<std::size_t>(i)]) paths.row(i) += bump.transpose();
    // Per-path centering is cosmetic (clr^{-1} kills constants) but keeps the
    // exponent small before the overflow-guarded normalization.
    const Eigen::VectorXd row_means = paths.rowwise().mean();
    paths.colwise() -= row_means;
    Eigen::MatrixXd densities(config.n, config.grid_size);
    for (int i = 0; i < config.n; ++i) {
        const Eigen::VectorXd row = paths.row(i).transpose();
        densities.row(i) = clr_inv(row, out.t).transpose();
    }
    out.densities = std::move(densities);
    return out;
}

RawSample gen_gp_margin(const SchemeConfig& config) {
    validate_common(config);
    if (!(config.margin_variance_factor > 0.0))
        throw InvalidArgument("gen_gp_margin: variance factor must be positive");
    auto gen = substream(config.seed, 0);
    RawSample out;
    const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(config.grid_size, 0.0, 1.0);
    out.labels = draw_labels(gen, config.n, config.outlier_rate);
    Eigen::MatrixXd paths = gp_paths(gen, config.n, t, config);
    const double scale = std::sqrt(config.margin_variance_factor);
    out.values.reserve(static_cast<std::size_t>(config.n));
    for (int i = 0; i < config.n; ++i) {
        Eigen::VectorXd row = paths.row(i).transpose();
        if (out.labels[static_cast<std::size_t>(i)]) row *= scale;
        out.values.push_back(std::move(row));
    }
    return out;
}

GridSample gen_gumbel(const SchemeConfig& config) {
    validate_common(config);
    auto gen = substream(config.seed, 0);
    GridSample out;
    out.t = Eigen::VectorXd::LinSpaced(config.grid_size, 0.0, 1.0);
    out.labels = draw_labels(gen, config.n, config.outlier_rate);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double noise_sd = std::sqrt(config.gumbel_param_variance);
    Eigen::MatrixXd densities(config.n, config.grid_size);
    for (int i = 0; i < config.n; ++i) {
        const Eigen::Vector2d mean = out.labels[static_cast<std::size_t>(i)]
                                         ? config.gumbel_outlier_mean
                                         : config.gumbel_inlier_mean;
        const double mu = mean(0) + noise_sd * normal(gen);
        const double beta = std::max(mean(1) + noise_sd * normal(gen),
                                     config.gumbel_beta_floor);
        const Eigen::ArrayXd z = (out.t.array() - mu) / beta;
        densities.row(i) =
            ((-(z + (-z).exp())).exp() / beta).max(1e-8).matrix().transpose();
    }
    out.densities = normalize_rows(std::move(densities), out.t);
    return out;
}

RocResult roc_auc(const Eigen::VectorXd& scores, const std::vector<bool>& labels) {
    const auto n = static_cast<int>(scores.size());
    if (static_cast<int>(labels.size()) != n)
        throw DimensionError("roc_auc: scores and labels differ in length");
    int positives = 0;
    for (bool l : labels) positives += l ? 1 : 0;
    const int negatives = n - positives;
    if (positives == 0 || negatives == 0)
        throw InvalidArgument("roc_auc: labels are degenerate (single class)");

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores(a) > scores(b); });

    RocResult out;
    out.tpr = Eigen::VectorXd::Zero(n + 1);
    out.fpr = Eigen::VectorXd::Zero(n + 1);
    int tp = 0, fp = 0;
    for (int i = 0; i < n; ++i) {
        if (labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])])
            ++tp;
        else
            ++fp;
        out.tpr(i + 1) = static_cast<double>(tp) / positives;
        out.fpr(i + 1) = static_cast<double>(fp) / negatives;
    }
    double auc = 0.0;
    for (int i = 0; i < n; ++i)
        auc += 0.5 * (out.fpr(i + 1) - out.fpr(i)) * (out.tpr(i + 1) + out.tpr(i));
    out.auc = auc;
    return out;
}

std::vector<SchemeBenchmark> run_benchmark(const std::vector<SchemeConfig>& schemes,
                                           const BenchmarkOptions& opt) {
    if (schemes.empty()) throw InvalidArgument("run_benchmark: no schemes");
    if (opt.n_reps < 1) throw InvalidArgument("run_benchmark: need at least one replicate");

    std::vector<SchemeBenchmark> results;
    results.reserve(schemes.size());
    for (const SchemeConfig& scheme : schemes) {
        std::vector<Replicate> reps(static_cast<std::size_t>(opt.n_reps));
        parallel_for(opt.n_reps, opt.threads, [&](int r) {
            SchemeConfig rep_config = scheme;
            auto stream = substream(scheme.seed, static_cast<std::uint64_t>(r));
            rep_config.seed = stream();
            reps[static_cast<std::size_t>(r)] = run_replicate(rep_config, opt);
        });

        SchemeBenchmark bench;
        bench.scheme = scheme.scheme_name();
        bench.n_reps = opt.n_reps;
        std::string first_error;
        std::vector<const RocResult*> ok;
        for (const Replicate& rep : reps) {
            if (rep.ok) {
                ok.push_back(&rep.roc);
            } else {
                if (first_error.empty()) first_error = rep.error;
                ++bench.failures;
            }
        }
        if (ok.empty() ||
            static_cast<double>(bench.failures) >
                opt.max_failure_rate * static_cast<double>(opt.n_reps))
            throw Error("run_benchmark: scheme " + bench.scheme + " failed " +
                        std::to_string(bench.failures) + " of " + std::to_string(opt.n_reps) +
                        " replicates (first: " + first_error + ")");

        const auto n_ok = static_cast<int>(ok.size());
        const Eigen::Index len = ok.front()->tpr.size();
        bench.tpr_mean = Eigen::VectorXd::Zero(len);
        bench.fpr_mean = Eigen::VectorXd::Zero(len);
        for (const RocResult* roc : ok) {
            bench.tpr_mean += roc->tpr;
            bench.fpr_mean += roc->fpr;
        }
        bench.tpr_mean /= n_ok;
        bench.fpr_mean /= n_ok;
        Eigen::VectorXd var = Eigen::VectorXd::Zero(len);
        if (n_ok > 1) {
            for (const RocResult* roc : ok)
                var += (roc->tpr - bench.tpr_mean).cwiseAbs2();
            var /= (n_ok - 1);
        }
        bench.tpr_halfwidth =
            1.96 * (var / static_cast<double>(n_ok)).cwiseSqrt();
        std::vector<double> aucs;
        aucs.reserve(ok.size());
        for (const RocResult* roc : ok) aucs.push_back(roc->auc);
        bench.auc_mean = mean_of(aucs);
        bench.auc_sd = sd_of(aucs);
        results.push_back(std::move(bench));
    }
    return results;
}

void write_roc_csv(const std::string& path, const std::vector<SchemeBenchmark>& results) {
    csv::Table table;
    table.header = {"scheme", "pp", "tpr_mean", "fpr_mean", "tpr_halfwidth"};
    for (const SchemeBenchmark& bench : results) {
        for (Eigen::Index i = 0; i < bench.tpr_mean.size(); ++i)
            table.rows.push_back({bench.scheme, std::to_string(i),
                                  csv::format_double(bench.tpr_mean(i)),
                                  csv::format_double(bench.fpr_mean(i)),
                                  csv::format_double(bench.tpr_halfwidth(i))});
    }
    csv::write_csv(path, table);
}

void write_auc_csv(const std::string& path, const std::vector<SchemeBenchmark>& results) {
    csv::Table table;
    table.header = {"scheme", "auc_mean", "auc_sd"};
    for (const SchemeBenchmark& bench : results)
        table.rows.push_back({bench.scheme, csv::format_double(bench.auc_mean),
                              csv::format_double(bench.auc_sd)});
    csv::write_csv(path, table);
}

} // namespace ics
