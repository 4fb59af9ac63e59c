#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "ics/simplex.hpp"
#include "support.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ics::Composition random_composition(std::mt19937_64& gen, int parts) {
    std::uniform_real_distribution<double> u(0.2, 5.0);
    VectorXd v(parts);
    for (int i = 0; i < parts; ++i) v(i) = u(gen);
    return ics::Composition(v);
}

std::vector<ics::Composition> random_sample(std::uint64_t seed, int n, int parts) {
    auto gen = ics::substream(seed, 0);
    std::vector<ics::Composition> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(random_composition(gen, parts));
    return out;
}

} // namespace

TEST_SUITE("simplex") {

TEST_CASE("clr of equal parts is zero") {
    const ics::Composition x(VectorXd::Constant(4, 0.25));
    CHECK(ics::clr_comp(x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("clr of (e, 1, 1)") {
    const ics::Composition x((VectorXd(3) << std::exp(1.0), 1.0, 1.0).finished());
    const VectorXd want = (VectorXd(3) << 2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0).finished();
    CHECK((ics::clr_comp(x) - want).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("clr is scale invariant") {
    // log(7x) and log(x) differ by a constant that centering removes; the
    // agreement is to rounding of the log, not bitwise.
    auto gen = ics::substream(401, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const ics::Composition x = random_composition(gen, 5);
        const ics::Composition scaled(7.0 * x.parts);
        CHECK((ics::clr_comp(x) - ics::clr_comp(scaled)).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("clr sums to zero") {
    auto gen = ics::substream(402, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const ics::Composition x = random_composition(gen, 6);
        CHECK(std::abs(ics::clr_comp(x).sum()) < 1e-12);
    }
}

TEST_CASE("composition validation") {
    CHECK_THROWS_AS(ics::Composition((VectorXd(1) << 1.0).finished()), ics::Error);
    CHECK_THROWS_AS(ics::Composition((VectorXd(3) << 1.0, 0.0, 2.0).finished()),
                    ics::InvalidArgument);
    CHECK_THROWS_AS(ics::Composition((VectorXd(3) << 1.0, -0.5, 2.0).finished()),
                    ics::InvalidArgument);
}

TEST_CASE("alr of equal parts is zero and of (e, 1, 1) with reference 3 is (1, 0)") {
    const ics::Composition equal(VectorXd::Constant(3, 1.0 / 3.0));
    for (int j = 0; j < 3; ++j) CHECK(ics::alr_coords(equal, j).cwiseAbs().maxCoeff() == 0.0);

    const ics::Composition x((VectorXd(3) << std::exp(1.0), 1.0, 1.0).finished());
    const VectorXd a = ics::alr_coords(x, 2);
    CHECK(a(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(a(1) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK_THROWS_AS(ics::alr_coords(x, 3), ics::InvalidArgument);
    CHECK_THROWS_AS(ics::alr_coords(x, -1), ics::InvalidArgument);
}

TEST_CASE("Gram of the alr basis maps alr to clr with the reference removed") {
    auto gen = ics::substream(403, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const ics::Composition x = random_composition(gen, 5);
        const VectorXd clr = ics::clr_comp(x);
        for (int j = 0; j < 5; ++j) {
            const VectorXd mapped = ics::gram_alr(4) * ics::alr_coords(x, j);
            VectorXd want(4);
            int at = 0;
            for (int i = 0; i < 5; ++i)
                if (i != j) want(at++) = clr(i);
            CHECK((mapped - want).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("alr Gram matrices and their spectra") {
    CHECK(ics::gram_alr(1)(0, 0) == doctest::Approx(0.5).epsilon(1e-15));

    MatrixXd want2(2, 2);
    want2 << 2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0;
    CHECK((ics::gram_alr(2) - want2).cwiseAbs().maxCoeff() < 1e-15);

    for (int p : {2, 4, 9}) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(ics::gram_alr(p));
        CHECK(eig.eigenvalues()(0) == doctest::Approx(1.0 / (p + 1)).epsilon(1e-12));
        for (int j = 1; j < p; ++j)
            CHECK(eig.eigenvalues()(j) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("compositional ICS does not depend on the reference part") {
    const auto sample = random_sample(404, 150, 5);
    const ics::ICSSolution base = ics::ics_coda(sample, 0);
    for (int j = 1; j < 5; ++j) {
        const ics::ICSSolution other = ics::ics_coda(sample, j);
        CHECK((base.spectrum - other.spectrum).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(testsup::max_column_diff_up_to_sign(base.scores, other.scores) < 1e-10);
    }
}

TEST_CASE("a sample concentrated on the neutral composition has zero scatter") {
    std::vector<ics::Composition> sample(12, ics::Composition(VectorXd::Constant(3, 1.0 / 3.0)));
    CHECK_THROWS_AS(ics::ics_coda(sample, 0), ics::ConditioningError);
}

TEST_CASE("a 2% multiplicative shift is caught by the first component") {
    auto gen = ics::substream(405, 0);
    std::vector<ics::Composition> sample;
    std::vector<bool> labels;
    const VectorXd shift = (VectorXd(5) << 4.0, 1.0, 1.0, 1.0, 0.25).finished();
    for (int i = 0; i < 250; ++i) {
        ics::Composition x = random_composition(gen, 5);
        const bool planted = i < 5;
        if (planted) x = ics::Composition(x.parts.cwiseProduct(shift));
        sample.push_back(x);
        labels.push_back(planted);
    }
    const ics::ICSSolution sol = ics::ics_coda(sample, 2);
    CHECK(sol.spectrum(0) > 1.5 * sol.spectrum(1));
    // The planted units carry the most extreme first-coordinate values.
    std::vector<double> z1_abs;
    for (int i = 0; i < 250; ++i)
        z1_abs.push_back(std::abs(sol.scores(i, 0)));
    std::vector<std::size_t> order(z1_abs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return z1_abs[a] > z1_abs[b]; });
    for (std::size_t r = 0; r < 5; ++r) CHECK(labels[order[r]]);
}

TEST_CASE("translating every composition by a fixed one leaves scores unchanged") {
    auto gen = ics::substream(406, 0);
    const auto sample = random_sample(406, 180, 4);
    const ics::Composition c = random_composition(gen, 4);
    std::vector<ics::Composition> moved;
    for (const auto& x : sample)
        moved.emplace_back(x.parts.cwiseProduct(c.parts));
    const ics::ICSSolution a = ics::ics_coda(sample, 1);
    const ics::ICSSolution b = ics::ics_coda(moved, 1);
    CHECK((a.spectrum - b.spectrum).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(testsup::max_column_diff_up_to_sign_perm(a.scores, b.scores) < 1e-6);
}

TEST_CASE("composition CSV ingestion") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ics_simplex_csv";
    fs::create_directories(dir);
    const fs::path good = dir / "good.csv";
    {
        std::ofstream out(good);
        out << "a,b,c\n1.0,2.0,3.0\n0.5,0.5,1.5\n";
    }
    const auto sample = ics::read_compositions_csv(good.string());
    REQUIRE(sample.size() == 2);
    CHECK(sample[0].parts(1) == 2.0);
    CHECK(sample[1].parts(2) == 1.5);

    const fs::path bad = dir / "bad.csv";
    {
        std::ofstream out(bad);
        out << "a,b,c\n1.0,2.0,3.0\n1.0,-2.0,3.0\n";
    }
    CHECK_THROWS_WITH_AS(ics::read_compositions_csv(bad.string()),
                         doctest::Contains("row 2"), ics::IoError);

    const fs::path narrow = dir / "narrow.csv";
    {
        std::ofstream out(narrow);
        out << "a\n1.0\n";
    }
    CHECK_THROWS_AS(ics::read_compositions_csv(narrow.string()), ics::IoError);
    CHECK_THROWS_AS(ics::read_compositions_csv((dir / "absent.csv").string()), ics::IoError);
    fs::remove_all(dir);
}

} // TEST_SUITE
