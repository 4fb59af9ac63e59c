#include <cmath>
#include <string>

#include <json.hpp>

#include "ics/bayes_spline.hpp"
#include "ics/errors.hpp"
#include "ics/ics_core.hpp"
#include "ics/outlier.hpp"

// All JSON documents are versioned through a "schema" field so readers can
// reject files from a different layout instead of misreading them.

namespace ics {

namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

Eigen::VectorXd vector_from_json(const json& j, const char* field) {
    if (!j.is_array()) throw IoError(std::string(field) + ": expected an array");
    Eigen::VectorXd out(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) out(static_cast<Eigen::Index>(i)) = j[i];
    return out;
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* field) {
    if (!j.is_array()) throw IoError(std::string(field) + ": expected an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return Eigen::MatrixXd(0, 0);
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw IoError(std::string(field) + ": ragged rows");
        for (Eigen::Index c = 0; c < cols; ++c) out(i, c) = row[static_cast<std::size_t>(c)];
    }
    return out;
}

json parse_checked(const std::string& text, const char* expected_schema) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.contains("schema") || doc["schema"] != expected_schema)
        throw IoError(std::string("expected schema \"") + expected_schema + "\"");
    return doc;
}

json selection_mode_to_json(const SelectionMode& mode) {
    json out;
    out["kind"] = mode.name();
    if (mode.kind == SelectionMode::Kind::fixed) out["kappa"] = mode.fixed_kappa;
    if (mode.kind == SelectionMode::Kind::dagostino) out["level"] = mode.level;
    return out;
}

json solution_body(const ICSSolution& solution) {
    json doc;
    doc["schema"] = "ics-solution/1";
    doc["basis"] = {{"gram", matrix_to_json(solution.basis.gram)},
                    {"labels", solution.basis.labels}};
    doc["mean_coords"] = vector_to_json(solution.mean_coords);
    doc["eigenbasis_coords"] = matrix_to_json(solution.eigenbasis_coords);
    doc["dual_coords"] = matrix_to_json(solution.dual_coords);
    doc["spectrum"] = vector_to_json(solution.spectrum);
    doc["scores"] = matrix_to_json(solution.scores);
    doc["w1_name"] = solution.w1_name;
    doc["w2_name"] = solution.w2_name;
    return doc;
}

} // namespace

std::string to_json(const ICSSolution& solution) {
    return solution_body(solution).dump(2);
}

ICSSolution ics_solution_from_json(const std::string& text) {
    const json doc = parse_checked(text, "ics-solution/1");
    try {
        GramBasis basis(matrix_from_json(doc.at("basis").at("gram"), "basis.gram"),
                        doc.at("basis").at("labels").get<std::vector<std::string>>());
        return ICSSolution{std::move(basis),
                           vector_from_json(doc.at("mean_coords"), "mean_coords"),
                           matrix_from_json(doc.at("eigenbasis_coords"), "eigenbasis_coords"),
                           matrix_from_json(doc.at("dual_coords"), "dual_coords"),
                           vector_from_json(doc.at("spectrum"), "spectrum"),
                           matrix_from_json(doc.at("scores"), "scores"),
                           doc.at("w1_name").get<std::string>(),
                           doc.at("w2_name").get<std::string>()};
    } catch (const json::exception& e) {
        throw IoError(std::string("ics-solution/1: ") + e.what());
    }
}

std::string to_json(const DensitySpline& d) {
    json doc;
    doc["schema"] = "density-spline/1";
    doc["interval"] = {d.spec.a, d.spec.b};
    doc["degree"] = d.spec.degree;
    doc["knots"] = vector_to_json(d.spec.interior_knots);
    doc["zb_coords"] = vector_to_json(d.zb_coords);
    return doc.dump(2);
}

DensitySpline density_spline_from_json(const std::string& text) {
    const json doc = parse_checked(text, "density-spline/1");
    try {
        SplineSpaceSpec spec;
        spec.a = doc.at("interval").at(0);
        spec.b = doc.at("interval").at(1);
        spec.degree = doc.at("degree");
        spec.interior_knots = vector_from_json(doc.at("knots"), "knots");
        spec.validate();
        DensitySpline d{std::move(spec), vector_from_json(doc.at("zb_coords"), "zb_coords")};
        if (d.zb_coords.size() != d.spec.zb_dim())
            throw IoError("density-spline/1: zb_coords length does not match the space");
        return d;
    } catch (const json::exception& e) {
        throw IoError(std::string("density-spline/1: ") + e.what());
    }
}

std::string to_json(const OutlierReport& report) {
    json doc;
    doc["schema"] = "ics-outlier/1";
    doc["kappa"] = report.kappa;
    doc["no_structure"] = report.no_structure;
    doc["distances"] = vector_to_json(report.distances);
    if (std::isinf(report.cutoff))
        doc["cutoff"] = nullptr;
    else
        doc["cutoff"] = report.cutoff;
    doc["flags"] = report.flags;
    doc["selection_mode"] = selection_mode_to_json(report.selection_mode);
    doc["mc_meta"] = {{"reps", report.mc_meta.reps},
                      {"level", report.mc_meta.level},
                      {"seed", report.mc_meta.seed}};
    doc["selection_pvalues"] = report.selection_pvalues;
    doc["warnings"] = report.warnings;
    doc["solution"] = solution_body(report.solution);
    return doc.dump(2);
}

} // namespace ics
