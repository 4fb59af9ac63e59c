#include "ics/rng.hpp"

namespace ics {

namespace {

// splitmix64 step; good avalanche for seeding material.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
    // Derive eight 32-bit words from (seed, stream) so nearby pairs land in
    // unrelated engine states.
    std::uint64_t s0 = mix64(seed);
    std::uint64_t s1 = mix64(s0 ^ stream);
    std::uint64_t s2 = mix64(s1 + 0x632be59bd9b4e019ULL);
    std::uint64_t s3 = mix64(s2 ^ (stream << 1 | 1));
    std::seed_seq seq{
        static_cast<std::uint32_t>(s0), static_cast<std::uint32_t>(s0 >> 32),
        static_cast<std::uint32_t>(s1), static_cast<std::uint32_t>(s1 >> 32),
        static_cast<std::uint32_t>(s2), static_cast<std::uint32_t>(s2 >> 32),
        static_cast<std::uint32_t>(s3), static_cast<std::uint32_t>(s3 >> 32)};
    return std::mt19937_64(seq);
}

Eigen::MatrixXd normal_matrix(std::mt19937_64& gen, int rows, int cols) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd m(rows, cols);
    // Row-major fill order: the draw sequence is part of the determinism
    // contract for seeded datasets.
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = normal(gen);
    return m;
}

Eigen::VectorXd normal_vector(std::mt19937_64& gen, int n) {
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = normal(gen);
    return v;
}

} // namespace ics
