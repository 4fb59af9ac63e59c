#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ics/ics_core.hpp"

namespace ics {

// A point of the simplex: p+1 strictly positive parts. Parts are stored
// unnormalized; every map below is invariant to a positive rescaling, so no
// closure step (and none of its rounding) is ever applied.
struct Composition {
    Eigen::VectorXd parts;

    explicit Composition(Eigen::VectorXd v);

    int n_parts() const { return static_cast<int>(parts.size()); }
};

// Centred log-ratio coordinates: log(x) minus its arithmetic mean. The
// result sums to zero.
Eigen::VectorXd clr_comp(const Composition& x);

// Additive log-ratio coordinates with reference part j (0-based): log of the
// remaining parts, each minus log(x_j), order preserved.
Eigen::VectorXd alr_coords(const Composition& x, int j);

// Gram matrix of the alr_j basis: I_p - (1/(p+1)) 11'. Independent of j.
Eigen::MatrixXd gram_alr(int p);

// Compositional ICS: alr_j coordinates with the gram_alr metric, then the
// generic solver. The spectrum does not depend on the choice of j.
ICSSolution ics_coda(const std::vector<Composition>& sample, int j,
                     const WeightFunction& w1 = WeightFunction::identity(),
                     const WeightFunction& w2 = WeightFunction::cov4(),
                     const SpdOptions& opt = {});

// One row per observation, p+1 positive numeric columns, header required.
std::vector<Composition> read_compositions_csv(const std::string& path);

} // namespace ics
