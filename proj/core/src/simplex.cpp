#include "ics/simplex.hpp"

#include <cmath>

#include "ics/csv.hpp"
#include "ics/errors.hpp"

namespace ics {

Composition::Composition(Eigen::VectorXd v) : parts(std::move(v)) {
    if (parts.size() < 2)
        throw DimensionError("Composition: need at least 2 parts");
    for (Eigen::Index i = 0; i < parts.size(); ++i) {
        if (!(parts(i) > 0.0) || !std::isfinite(parts(i)))
            throw InvalidArgument("Composition: part " + std::to_string(i) +
                                  " is not strictly positive and finite");
    }
}

Eigen::VectorXd clr_comp(const Composition& x) {
    Eigen::VectorXd logs = x.parts.array().log();
    return logs.array() - logs.mean();
}

Eigen::VectorXd alr_coords(const Composition& x, int j) {
    const int m = x.n_parts();
    if (j < 0 || j >= m)
        throw InvalidArgument("alr_coords: reference part " + std::to_string(j) +
                              " out of range for " + std::to_string(m) + " parts");
    const double ref = std::log(x.parts(j));
    Eigen::VectorXd out(m - 1);
    int k = 0;
    for (int i = 0; i < m; ++i) {
        if (i == j) continue;
        out(k++) = std::log(x.parts(i)) - ref;
    }
    return out;
}

Eigen::MatrixXd gram_alr(int p) {
    if (p < 1) throw DimensionError("gram_alr: p must be at least 1");
    return Eigen::MatrixXd::Identity(p, p) -
           Eigen::MatrixXd::Constant(p, p, 1.0 / static_cast<double>(p + 1));
}

ICSSolution ics_coda(const std::vector<Composition>& sample, int j, const WeightFunction& w1,
                     const WeightFunction& w2, const SpdOptions& opt) {
    if (sample.empty()) throw DimensionError("ics_coda: empty sample");
    const int m = sample.front().n_parts();
    const int p = m - 1;
    Eigen::MatrixXd coords(static_cast<Eigen::Index>(sample.size()), p);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (sample[i].n_parts() != m)
            throw DimensionError("ics_coda: observation " + std::to_string(i) + " has " +
                                 std::to_string(sample[i].n_parts()) + " parts, expected " +
                                 std::to_string(m));
        coords.row(static_cast<Eigen::Index>(i)) = alr_coords(sample[i], j).transpose();
    }
    CoordinateSample cs(std::move(coords), GramBasis(gram_alr(p)));
    return solve_ics(cs, w1, w2, opt);
}

std::vector<Composition> read_compositions_csv(const std::string& path) {
    const csv::Table table = csv::read_csv(path);
    if (table.ncols() < 2)
        throw IoError(path + ": compositions need at least 2 part columns");
    std::vector<Composition> out;
    out.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        Eigen::VectorXd parts(table.ncols());
        for (std::size_t c = 0; c < table.rows[r].size(); ++c)
            parts(static_cast<Eigen::Index>(c)) = csv::to_double(table.rows[r][c]);
        try {
            out.emplace_back(std::move(parts));
        } catch (const InvalidArgument& e) {
            throw IoError(path + ": row " + std::to_string(r + 1) + ": " + e.what());
        }
    }
    return out;
}

} // namespace ics
