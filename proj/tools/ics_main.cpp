// Command-line front end: ingestion, preprocessing, ICS, outlier detection,
// parameter sweeps, cutoff tables, and the simulation benchmark. Every
// command echoes its effective settings to run_config.txt in the output
// directory so results are self-describing, and is deterministic given
// (input files, config, seed).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ics/config.hpp"
#include "ics/csv.hpp"
#include "ics/outlier.hpp"
#include "ics/pipeline.hpp"
#include "ics/simgen.hpp"
#include "ics/simplex.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

// Reads configuration values while recording everything (including applied
// defaults) so the echoed run_config.txt is complete.
struct Settings {
    const ics::Config& cfg;
    mutable ics::Config echo;

    std::string get(const std::string& key, const std::string& fallback) const {
        const std::string v = cfg.get(key, fallback);
        echo.set(key, v);
        return v;
    }
    double get_double(const std::string& key, double fallback) const {
        const double v = cfg.get_double(key, fallback);
        echo.set(key, ics::csv::format_double(v));
        return v;
    }
    int get_int(const std::string& key, int fallback) const {
        const int v = cfg.get_int(key, fallback);
        echo.set_int(key, v);
        return v;
    }
    std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const {
        const std::uint64_t v = cfg.get_uint64(key, fallback);
        echo.set(key, std::to_string(v));
        return v;
    }
    std::string get_required(const std::string& key) const {
        if (!cfg.has(key))
            throw ics::InvalidArgument("missing required config key \"" + key + "\"");
        return get(key, "");
    }
};

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ics::IoError("cannot write " + path.string());
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

void finish_run_config(const Settings& settings, const CommonArgs& args,
                       const std::string& command) {
    settings.echo.set("run.command", command);
    settings.echo.set("run.out_dir", args.out_dir);
    write_file(fs::path(args.out_dir) / "run_config.txt", settings.echo.serialize());
}

std::string sanitize_id(const std::string& id) {
    std::string out = id;
    for (char& c : out) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!ok) c = '_';
    }
    return out.empty() ? "unit" : out;
}

// ---------------------------------------------------------------------------
// Input readers. Four data kinds:
//   multivariate  - numeric CSV, one row per observation
//   compositional - numeric CSV, one row per composition (positive parts)
//   sample        - long CSV (unit_id, value), one raw sample per unit
//   density_grid  - CSV with a "t" column and one density column per unit
// ---------------------------------------------------------------------------

Eigen::MatrixXd read_numeric_matrix(const std::string& path) {
    const ics::csv::Table table = ics::csv::read_csv(path);
    if (table.nrows() == 0) throw ics::IoError(path + ": no data rows");
    Eigen::MatrixXd m(table.nrows(), table.ncols());
    for (int r = 0; r < table.nrows(); ++r)
        for (int c = 0; c < table.ncols(); ++c)
            m(r, c) = ics::csv::to_double(table.rows[static_cast<std::size_t>(r)]
                                                    [static_cast<std::size_t>(c)]);
    return m;
}

struct UnitData {
    std::vector<std::string> ids;
    std::vector<Eigen::VectorXd> values;
};

UnitData read_units_long(const std::string& path) {
    const ics::csv::Table table = ics::csv::read_csv(path);
    const int id_col = table.column("unit_id");
    const int value_col = table.column("value");
    if (id_col < 0 || value_col < 0)
        throw ics::IoError(path + ": expected columns unit_id and value");
    UnitData out;
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<double>> buffers;
    for (const auto& row : table.rows) {
        const std::string& id = row[static_cast<std::size_t>(id_col)];
        auto it = index.find(id);
        if (it == index.end()) {
            it = index.emplace(id, buffers.size()).first;
            out.ids.push_back(id);
            buffers.emplace_back();
        }
        buffers[it->second].push_back(
            ics::csv::to_double(row[static_cast<std::size_t>(value_col)]));
    }
    out.values.reserve(buffers.size());
    for (const auto& buf : buffers)
        out.values.push_back(Eigen::Map<const Eigen::VectorXd>(
            buf.data(), static_cast<Eigen::Index>(buf.size())));
    return out;
}

struct GridData {
    Eigen::VectorXd t;
    Eigen::MatrixXd densities;  // units x grid
    std::vector<std::string> ids;
};

GridData read_density_grid(const std::string& path) {
    const ics::csv::Table table = ics::csv::read_csv(path);
    const int t_col = table.column("t");
    if (t_col < 0) throw ics::IoError(path + ": expected a t column");
    if (table.ncols() < 2) throw ics::IoError(path + ": no density columns");
    if (table.nrows() < 2) throw ics::IoError(path + ": need at least 2 grid rows");
    GridData out;
    out.t.resize(table.nrows());
    for (int r = 0; r < table.nrows(); ++r)
        out.t(r) = ics::csv::to_double(
            table.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(t_col)]);
    out.densities.resize(table.ncols() - 1, table.nrows());
    int unit = 0;
    for (int c = 0; c < table.ncols(); ++c) {
        if (c == t_col) continue;
        out.ids.push_back(table.header[static_cast<std::size_t>(c)]);
        for (int r = 0; r < table.nrows(); ++r)
            out.densities(unit, r) = ics::csv::to_double(
                table.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
        ++unit;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Config -> typed options
// ---------------------------------------------------------------------------

ics::SelectionMode selection_from(const Settings& settings) {
    const std::string mode = settings.get("selection.mode", "dagostino");
    if (mode == "dagostino")
        return ics::SelectionMode::dagostino(settings.get_double("selection.level", 0.05));
    if (mode == "fixed" || mode == "scree_data") {
        // Scree mode defers the choice to the user: the spectrum is always
        // emitted, and the kappa used downstream must be given explicitly.
        const int kappa = settings.get_int("selection.kappa", 0);
        if (kappa < 1)
            throw ics::InvalidArgument("selection.mode = " + mode +
                                       " needs selection.kappa >= 1");
        return ics::SelectionMode::fixed(kappa);
    }
    throw ics::InvalidArgument("unknown selection.mode \"" + mode +
                               "\" (dagostino | fixed | scree_data)");
}

ics::CutoffOptions cutoff_from(const Settings& settings, const CommonArgs& args) {
    ics::CutoffOptions opt;
    opt.level = settings.get_double("cutoff.level", 0.975);
    opt.reps = settings.get_int("cutoff.reps", 10000);
    opt.seed = args.seed ? *args.seed : settings.get_uint64("cutoff.seed", 0);
    opt.threads = args.threads ? *args.threads : settings.get_int("cutoff.threads", 1);
    settings.echo.set("cutoff.seed", std::to_string(opt.seed));
    settings.echo.set_int("cutoff.threads", opt.threads);
    return opt;
}

ics::KnotPlacement placement_from(const std::string& name) {
    if (name == "equally_spaced") return ics::KnotPlacement::equally_spaced;
    if (name == "quantile") return ics::KnotPlacement::quantile;
    throw ics::InvalidArgument("unknown placement \"" + name +
                               "\" (equally_spaced | quantile)");
}

ics::SplineSpaceSpec grid_spec_from(const Settings& settings, const Eigen::VectorXd& t) {
    const double a = settings.get_double("spline.a", t(0));
    const double b = settings.get_double("spline.b", t(t.size() - 1));
    const int degree = settings.get_int("spline.degree", 4);
    const int knots = settings.get_int("spline.knots", 6);
    const std::string placement = settings.get("spline.placement", "equally_spaced");
    if (placement_from(placement) == ics::KnotPlacement::quantile)
        throw ics::InvalidArgument(
            "density_grid smoothing uses equally spaced knots; quantile placement needs "
            "raw samples");
    return ics::SplineSpaceSpec::equally_spaced(a, b, degree, knots);
}

ics::MplRouteOptions mpl_route_from(const Settings& settings, const CommonArgs& args) {
    ics::MplRouteOptions opt;
    opt.degree = settings.get_int("spline.degree", 4);
    opt.knots = settings.get_int("spline.knots", 6);
    opt.placement = placement_from(settings.get("spline.placement", "quantile"));
    opt.lambda = settings.get_double("mpl.lambda", 1e-4);
    opt.penalty_order = settings.get_int("mpl.penalty_order", 3);
    opt.max_iter = settings.get_int("mpl.max_iter", 100);
    opt.pad_fraction = settings.get_double("spline.pad", 0.01);
    if (settings.cfg.has("spline.a") && settings.cfg.has("spline.b"))
        opt.interval = std::make_pair(settings.get_double("spline.a", 0.0),
                                      settings.get_double("spline.b", 1.0));
    opt.threads = args.threads ? *args.threads : settings.get_int("mpl.threads", 1);
    settings.echo.set_int("mpl.threads", opt.threads);
    return opt;
}

// ---------------------------------------------------------------------------
// Loaded data in the shape the solvers want, regardless of input kind.
// ---------------------------------------------------------------------------

struct LoadedData {
    std::string kind;
    std::vector<std::string> unit_ids;
    std::optional<ics::CoordinateSample> coords;        // multivariate / compositional
    std::vector<ics::DensitySpline> densities;          // sample / density_grid
    std::optional<ics::SplineSpaceSpec> spec;
};

LoadedData load_data(const Settings& settings, const CommonArgs& args) {
    LoadedData data;
    data.kind = settings.get_required("input.kind");
    const std::string path = settings.get_required("input.path");

    if (data.kind == "multivariate") {
        Eigen::MatrixXd m = read_numeric_matrix(path);
        for (Eigen::Index i = 0; i < m.rows(); ++i) data.unit_ids.push_back(std::to_string(i));
        const int p = static_cast<int>(m.cols());
        data.coords.emplace(std::move(m), ics::GramBasis::identity(p));
        return data;
    }
    if (data.kind == "compositional") {
        const std::vector<ics::Composition> comps = ics::read_compositions_csv(path);
        if (comps.empty()) throw ics::IoError(path + ": no compositions");
        const int parts = comps.front().n_parts();
        const int ref = settings.get_int("input.alr_ref", parts - 1);
        Eigen::MatrixXd coords(static_cast<Eigen::Index>(comps.size()), parts - 1);
        for (std::size_t i = 0; i < comps.size(); ++i) {
            data.unit_ids.push_back(std::to_string(i));
            coords.row(static_cast<Eigen::Index>(i)) =
                ics::alr_coords(comps[i], ref).transpose();
        }
        data.coords.emplace(std::move(coords), ics::GramBasis(ics::gram_alr(parts - 1)));
        return data;
    }
    if (data.kind == "density_grid") {
        const GridData grid = read_density_grid(path);
        data.unit_ids = grid.ids;
        data.spec = grid_spec_from(settings, grid.t);
        data.densities = ics::smooth_grid_sample(grid.t, grid.densities, *data.spec,
                                                 settings.get_double("spline.lambda_s", 0.0));
        return data;
    }
    if (data.kind == "sample") {
        const UnitData units = read_units_long(path);
        data.unit_ids = units.ids;
        const ics::MplRouteResult fits =
            smooth_raw_units(units.values, mpl_route_from(settings, args));
        if (!fits.all_ok()) {
            std::string msg = "density fits failed for:";
            for (std::size_t i = 0; i < fits.unit_errors.size(); ++i)
                if (!fits.unit_errors[i].empty())
                    msg += "\n  " + units.ids[i] + ": " + fits.unit_errors[i];
            throw ics::Error(msg);
        }
        data.spec = fits.spec;
        data.densities = fits.densities;
        return data;
    }
    throw ics::InvalidArgument(
        "unknown input.kind \"" + data.kind +
        "\" (multivariate | compositional | sample | density_grid)");
}

// ---------------------------------------------------------------------------
// Shared CSV emitters
// ---------------------------------------------------------------------------

void write_scree_csv(const fs::path& path, const Eigen::VectorXd& spectrum) {
    ics::csv::Table t;
    t.header = {"component", "eigenvalue"};
    for (Eigen::Index j = 0; j < spectrum.size(); ++j)
        t.rows.push_back({std::to_string(j + 1), ics::csv::format_double(spectrum(j))});
    ics::csv::write_csv(path.string(), t);
}

void write_scores_csv(const fs::path& path, const std::vector<std::string>& ids,
                      const Eigen::MatrixXd& scores, int max_cols) {
    const int cols = std::min<int>(max_cols, static_cast<int>(scores.cols()));
    ics::csv::Table t;
    t.header = {"unit_id"};
    for (int j = 0; j < cols; ++j) t.header.push_back("z" + std::to_string(j + 1));
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        std::vector<std::string> row{ids[static_cast<std::size_t>(i)]};
        for (int j = 0; j < cols; ++j) row.push_back(ics::csv::format_double(scores(i, j)));
        t.rows.push_back(std::move(row));
    }
    ics::csv::write_csv(path.string(), t);
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_smooth(const Settings& settings, const CommonArgs& args) {
    const std::string kind = settings.get_required("input.kind");
    if (kind != "sample")
        throw ics::InvalidArgument("smooth needs input.kind = sample (got " + kind + ")");
    const UnitData units = read_units_long(settings.get_required("input.path"));
    const ics::MplRouteResult fits =
        smooth_raw_units(units.values, mpl_route_from(settings, args));

    ics::csv::Table report;
    report.header = {"unit_id", "iterations", "final_gradient_norm", "log_likelihood",
                     "penalty", "error"};
    std::size_t next_density = 0;
    int failures = 0;
    for (std::size_t i = 0; i < units.ids.size(); ++i) {
        if (fits.unit_errors[i].empty()) {
            const ics::MPLReport& r = fits.reports[i];
            report.rows.push_back({units.ids[i], std::to_string(r.iterations),
                                   ics::csv::format_double(r.final_gradient_norm),
                                   ics::csv::format_double(r.log_likelihood),
                                   ics::csv::format_double(r.penalty_value), ""});
            write_file(fs::path(args.out_dir) /
                           ("density_" + sanitize_id(units.ids[i]) + ".json"),
                       ics::to_json(fits.densities[next_density]));
            ++next_density;
        } else {
            ++failures;
            report.rows.push_back({units.ids[i], "", "", "", "", fits.unit_errors[i]});
            std::cerr << "unit " << units.ids[i] << ": " << fits.unit_errors[i] << "\n";
        }
    }
    ics::csv::write_csv((fs::path(args.out_dir) / "fit_report.csv").string(), report);
    finish_run_config(settings, args, "smooth");
    return failures == 0 ? 0 : 1;
}

int cmd_ics(const Settings& settings, const CommonArgs& args) {
    const LoadedData data = load_data(settings, args);

    ics::WeightFunction w1 = ics::WeightFunction::identity();
    ics::WeightFunction w2 = ics::WeightFunction::cov4();
    const std::string w1_name = settings.get("ics.w1", "identity");
    const std::string w2_name = settings.get("ics.w2", "cov4");
    if (w1_name == "cov4") w1 = ics::WeightFunction::cov4();
    else if (w1_name != "identity")
        throw ics::InvalidArgument("ics.w1 must be identity or cov4");
    if (w2_name == "identity") w2 = ics::WeightFunction::identity();
    else if (w2_name != "cov4")
        throw ics::InvalidArgument("ics.w2 must be identity or cov4");

    ics::ICSSolution solution =
        data.coords ? ics::solve_ics(*data.coords, w1, w2)
                    : ics::ics_density(data.densities, w1, w2).ics;

    write_file(fs::path(args.out_dir) / "solution.json", ics::to_json(solution));
    write_scree_csv(fs::path(args.out_dir) / "scree.csv", solution.spectrum);
    write_scores_csv(fs::path(args.out_dir) / "scores.csv", data.unit_ids, solution.scores,
                     static_cast<int>(solution.scores.cols()));
    finish_run_config(settings, args, "ics");
    return 0;
}

int cmd_outlier(const Settings& settings, const CommonArgs& args) {
    const LoadedData data = load_data(settings, args);
    ics::DetectOptions opt;
    opt.selection = selection_from(settings);
    opt.cutoff = cutoff_from(settings, args);

    const ics::OutlierReport report =
        data.coords ? ics::detect(*data.coords, opt) : ics::detect(data.densities, opt);

    write_file(fs::path(args.out_dir) / "report.json", ics::to_json(report));
    write_scree_csv(fs::path(args.out_dir) / "scree.csv", report.solution.spectrum);
    write_scores_csv(fs::path(args.out_dir) / "scores.csv", data.unit_ids,
                     report.solution.scores, 2);

    ics::csv::Table distances;
    distances.header = {"unit_id", "distance", "cutoff", "flag"};
    for (Eigen::Index i = 0; i < report.distances.size(); ++i)
        distances.rows.push_back({data.unit_ids[static_cast<std::size_t>(i)],
                                  ics::csv::format_double(report.distances(i)),
                                  ics::csv::format_double(report.cutoff),
                                  report.flags[static_cast<std::size_t>(i)] ? "1" : "0"});
    ics::csv::write_csv((fs::path(args.out_dir) / "distances.csv").string(), distances);

    if (data.spec) {
        // Dual eigendensities on a fine grid, one column per component.
        const Eigen::VectorXd t =
            Eigen::VectorXd::LinSpaced(512, data.spec->a, data.spec->b);
        const ics::DensityICSSolution density_solution{report.solution, *data.spec};
        const Eigen::MatrixXd values = density_solution.eigendensities(t);
        ics::csv::Table table;
        table.header = {"t"};
        for (Eigen::Index j = 0; j < values.cols(); ++j)
            table.header.push_back("eigendensity_" + std::to_string(j + 1));
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            std::vector<std::string> row{ics::csv::format_double(t(i))};
            for (Eigen::Index j = 0; j < values.cols(); ++j)
                row.push_back(ics::csv::format_double(values(i, j)));
            table.rows.push_back(std::move(row));
        }
        ics::csv::write_csv((fs::path(args.out_dir) / "eigendensities.csv").string(), table);
    }

    for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
    finish_run_config(settings, args, "outlier");
    return 0;
}

int cmd_sweep(const Settings& settings, const CommonArgs& args) {
    const std::string kind = settings.get_required("input.kind");
    if (kind != "sample")
        throw ics::InvalidArgument("sweep needs input.kind = sample (got " + kind + ")");
    const UnitData units = read_units_long(settings.get_required("input.path"));

    ics::SweepConfig config;
    config.placements.clear();
    for (const std::string& name :
         settings.cfg.get_strings("sweep.placements").empty()
             ? std::vector<std::string>{"equally_spaced"}
             : settings.cfg.get_strings("sweep.placements"))
        config.placements.push_back(placement_from(name));
    settings.echo.set("sweep.placements", settings.cfg.get("sweep.placements",
                                                           "equally_spaced"));
    config.knot_counts = settings.cfg.get_ints("sweep.knots");
    if (config.knot_counts.empty()) config.knot_counts = {6};
    settings.echo.set("sweep.knots", settings.cfg.get("sweep.knots", "6"));
    config.lambdas = settings.cfg.get_doubles("sweep.lambdas");
    if (config.lambdas.empty()) config.lambdas = {1e-4};
    settings.echo.set("sweep.lambdas", settings.cfg.get("sweep.lambdas", "1e-4"));
    config.degree = settings.get_int("sweep.degree", 4);
    config.interval_pad = settings.get_double("sweep.pad", 0.01);
    config.mpl_max_iter = settings.get_int("sweep.mpl_max_iter", 100);
    config.threads = args.threads ? *args.threads : settings.get_int("sweep.threads", 1);
    settings.echo.set_int("sweep.threads", config.threads);
    if (settings.get("selection.mode", "fixed") == "fixed")
        config.selection = ics::SelectionMode::fixed(settings.get_int("selection.kappa", 4));
    else
        config.selection = selection_from(settings);
    config.cutoff = cutoff_from(settings, args);
    config.cutoff.threads = 1;  // cells already run in parallel

    const ics::SweepResult result = ics::param_grid_sweep(units.values, config);

    ics::csv::Table cells;
    cells.header = {"placement", "knots", "lambda", "status", "error"};
    for (const std::string& id : units.ids) cells.header.push_back("flag_" + id);
    for (const ics::SweepCell& cell : result.cells) {
        std::vector<std::string> row{
            cell.placement == ics::KnotPlacement::equally_spaced ? "equally_spaced"
                                                                 : "quantile",
            std::to_string(cell.knots), ics::csv::format_double(cell.lambda),
            cell.ok ? "ok" : "missing", cell.error};
        for (std::size_t i = 0; i < units.ids.size(); ++i) {
            if (cell.ok)
                row.push_back(cell.flags[i] ? "1" : "0");
            else
                row.push_back("");  // missing, not zero
        }
        cells.rows.push_back(std::move(row));
    }
    ics::csv::write_csv((fs::path(args.out_dir) / "cell_flags.csv").string(), cells);

    ics::csv::Table freq;
    freq.header = {"unit_id", "cells_run", "cells_flagged", "frequency"};
    for (std::size_t i = 0; i < units.ids.size(); ++i)
        freq.rows.push_back({units.ids[i], std::to_string(result.cells_run),
                             std::to_string(result.cells_flagged(static_cast<int>(i))),
                             ics::csv::format_double(result.frequency(static_cast<int>(i)))});
    ics::csv::write_csv((fs::path(args.out_dir) / "frequency.csv").string(), freq);

    if (result.cells_run == 0)
        std::cerr << "warning: every sweep cell failed; frequencies are undefined\n";
    finish_run_config(settings, args, "sweep");
    return 0;
}

int cmd_benchmark(const Settings& settings, const CommonArgs& args) {
    std::vector<std::string> names = settings.cfg.get_strings("benchmark.schemes");
    if (names.empty()) names = {"gp_clr", "gp_margin", "gumbel"};
    settings.echo.set("benchmark.schemes",
                      settings.cfg.get("benchmark.schemes", "gp_clr,gp_margin,gumbel"));

    const std::uint64_t seed =
        args.seed ? *args.seed : settings.get_uint64("benchmark.seed", 0);
    settings.echo.set("benchmark.seed", std::to_string(seed));

    std::vector<ics::SchemeConfig> schemes;
    for (const std::string& name : names) {
        ics::SchemeConfig::Scheme scheme;
        if (name == "gp_clr") scheme = ics::SchemeConfig::Scheme::gp_clr;
        else if (name == "gp_margin") scheme = ics::SchemeConfig::Scheme::gp_margin;
        else if (name == "gumbel") scheme = ics::SchemeConfig::Scheme::gumbel;
        else
            throw ics::InvalidArgument("unknown scheme \"" + name +
                                       "\" (gp_clr | gp_margin | gumbel)");
        ics::SchemeConfig config = ics::SchemeConfig::make(scheme, seed);
        config.n = settings.get_int("benchmark.n", 200);
        config.grid_size = settings.get_int("benchmark.grid_size", 100);
        config.outlier_rate = settings.get_double("benchmark.outlier_rate", 0.02);
        config.spline_knots = settings.get_int("benchmark.spline_knots", 0);
        config.mpl_lambda = settings.get_double("benchmark.mpl_lambda", 1e-4);
        schemes.push_back(config);
    }

    ics::BenchmarkOptions opt;
    opt.n_reps = settings.get_int("benchmark.n_reps", 200);
    opt.threads = args.threads ? *args.threads : settings.get_int("benchmark.threads", 1);
    settings.echo.set_int("benchmark.threads", opt.threads);
    opt.selection = ics::SelectionMode::dagostino(settings.get_double("selection.level", 0.05));

    const std::vector<ics::SchemeBenchmark> results = ics::run_benchmark(schemes, opt);
    ics::write_roc_csv((fs::path(args.out_dir) / "roc_curves.csv").string(), results);
    ics::write_auc_csv((fs::path(args.out_dir) / "auc_table.csv").string(), results);
    finish_run_config(settings, args, "benchmark");
    return 0;
}

int cmd_cutoff(const Settings& settings, const CommonArgs& args) {
    const int n = settings.get_int("cutoff.n", 0);
    const int p = settings.get_int("cutoff.p", 0);
    if (n <= 0 || p <= 0)
        throw ics::InvalidArgument("cutoff needs cutoff.n and cutoff.p");
    const ics::SelectionMode rule = selection_from(settings);
    ics::CutoffOptions opt = cutoff_from(settings, args);
    std::vector<double> levels = settings.cfg.get_doubles("cutoff.levels");
    if (levels.empty()) levels = {opt.level};
    settings.echo.set("cutoff.levels",
                      settings.cfg.get("cutoff.levels", ics::csv::format_double(opt.level)));

    ics::csv::Table table;
    table.header = {"n", "p", "selection", "level", "reps", "seed", "cutoff"};
    for (double level : levels) {
        opt.level = level;
        const double cutoff = ics::monte_carlo_cutoff(n, p, rule, opt);
        table.rows.push_back({std::to_string(n), std::to_string(p), rule.name(),
                              ics::csv::format_double(level), std::to_string(opt.reps),
                              std::to_string(opt.seed), ics::csv::format_double(cutoff)});
    }
    ics::csv::write_csv((fs::path(args.out_dir) / "cutoffs.csv").string(), table);
    finish_run_config(settings, args, "cutoff");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coordinate-free invariant coordinate selection for multivariate, "
                 "compositional, and density data"};
    app.require_subcommand(1);

    CommonArgs args;
    app.add_option("--config", args.config_path, "key=value configuration file");
    app.add_option("--out-dir", args.out_dir, "output directory (default .)");
    app.add_option("--seed", args.seed, "RNG seed override");
    app.add_option("--threads", args.threads, "worker thread override");

    CLI::App* smooth = app.add_subcommand(
        "smooth", "fit one spline density per unit from raw samples");
    CLI::App* ics_cmd = app.add_subcommand(
        "ics", "solve the two-scatter problem and export the solution");
    CLI::App* outlier = app.add_subcommand(
        "outlier", "three-step detection: ICS, component selection, simulated cutoff");
    CLI::App* sweep = app.add_subcommand(
        "sweep", "detection frequencies over a preprocessing parameter grid");
    CLI::App* benchmark =
        app.add_subcommand("benchmark", "ROC/AUC study on the simulation schemes");
    CLI::App* cutoff =
        app.add_subcommand("cutoff", "simulated null cutoff table for given n, p");
    for (CLI::App* sub : {smooth, ics_cmd, outlier, sweep, benchmark, cutoff})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        fs::create_directories(args.out_dir);
        const ics::Config cfg = args.config_path.empty()
                                    ? ics::Config()
                                    : ics::Config::parse_file(args.config_path);
        const Settings settings{cfg, {}};
        if (smooth->parsed()) return cmd_smooth(settings, args);
        if (ics_cmd->parsed()) return cmd_ics(settings, args);
        if (outlier->parsed()) return cmd_outlier(settings, args);
        if (sweep->parsed()) return cmd_sweep(settings, args);
        if (benchmark->parsed()) return cmd_benchmark(settings, args);
        if (cutoff->parsed()) return cmd_cutoff(settings, args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
