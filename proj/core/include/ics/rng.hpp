#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace ics {

// Deterministic generator for the substream `stream` of a master `seed`.
// Distinct (seed, stream) pairs give statistically independent streams, and
// results never depend on which thread consumed which stream.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream);

// Standard-normal draws. A fresh distribution object is used per call so a
// given engine state always maps to the same output sequence.
Eigen::MatrixXd normal_matrix(std::mt19937_64& gen, int rows, int cols);
Eigen::VectorXd normal_vector(std::mt19937_64& gen, int n);

} // namespace ics
