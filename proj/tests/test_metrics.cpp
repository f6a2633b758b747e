#include <cmath>

#include "doctest.h"
#include "textae/errors.hpp"
#include "textae/metrics.hpp"
#include "textae/rng.hpp"

using namespace textae;

namespace {

// Independent double-loop oracle for SPI/SAI, kept deliberately free of the
// Matrix kernels used by the implementation.
double cosine_oracle(const std::vector<double>& u, const std::vector<double>& v) {
    double uu = 0, vv = 0, uv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        uu += u[i] * u[i];
        vv += v[i] * v[i];
        uv += u[i] * v[i];
    }
    if (uu == 0 || vv == 0) return 0;
    return uv / (std::sqrt(uu) * std::sqrt(vv));
}

double spi_oracle(const std::vector<std::vector<double>>& X,
                  const std::vector<std::vector<double>>& Y) {
    const std::size_t p = X.size();
    double sum = 0;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            const double d = i == j ? 1.0 : cosine_oracle(X[i], X[j]);
            const double dh = i == j ? 1.0 : cosine_oracle(Y[i], Y[j]);
            sum += (d - dh) * (d - dh);
        }
    return sum / static_cast<double>(p * p);
}

double sai_oracle(const std::vector<std::vector<double>>& X,
                  const std::vector<std::vector<double>>& Y) {
    double sum = 0;
    std::size_t kept = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double norm = 0;
        for (double v : X[i]) norm += v * v;
        if (norm == 0) continue;
        sum += cosine_oracle(X[i], Y[i]);
        ++kept;
    }
    return sum / static_cast<double>(kept);
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    return m;
}

std::vector<std::vector<double>> random_rows(std::size_t p, std::size_t n, Rng& rng) {
    std::vector<std::vector<double>> rows(p, std::vector<double>(n));
    for (auto& row : rows)
        for (double& v : row) v = rng.bernoulli(0.6) ? rng.uniform() * 3.0 : 0.0;
    return rows;
}

}  // namespace

TEST_CASE("cosine fixtures") {
    CHECK(cosine({3, 4}, {3, 4}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine({1, 0}, {0, 1}) == 0.0);
    CHECK(cosine({1, 1}, {1, 0}) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(cosine({0, 0}, {1, 2}) == 0.0);
    CHECK_THROWS_AS(cosine({1}, {1, 2}), DimensionMismatch);

    // scale invariance
    CHECK(cosine({2, 6}, {1, 5}) == doctest::Approx(cosine({1, 3}, {1, 5})).epsilon(1e-12));
}

TEST_CASE("similarity matrix fixtures and oracle comparison") {
    Matrix one(1, 3);
    one(0, 1) = 2.0;
    const Matrix d1 = similarity_matrix(one);
    CHECK(d1.rows == 1);
    CHECK(d1(0, 0) == 1.0);

    Matrix twins(2, 2);
    twins(0, 0) = twins(1, 0) = 1.0;
    twins(0, 1) = twins(1, 1) = 2.0;
    const Matrix d2 = similarity_matrix(twins);
    for (double v : d2.data) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    Rng rng(17);
    const auto rows = random_rows(3, 6, rng);
    const Matrix d3 = similarity_matrix(to_matrix(rows));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const double expected = i == j ? 1.0 : cosine_oracle(rows[i], rows[j]);
            CHECK(d3(i, j) == doctest::Approx(expected).epsilon(1e-12));
        }
}

TEST_CASE("spi fixtures") {
    Matrix X(2, 2), Y(2, 2);
    X(0, 0) = 1.0;
    X(1, 1) = 1.0;  // orthogonal rows
    Y(0, 0) = 1.0;
    Y(1, 0) = 1.0;  // identical rows
    CHECK(spi(X, Y) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(spi(X, X) == 0.0);
    CHECK(spi(X, Y) == spi(Y, X));  // symmetric in its arguments
}

TEST_CASE("spi and sai match the brute-force oracle on random data") {
    Rng rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rows = random_rows(5, 8, rng);
        const auto recon = random_rows(5, 8, rng);
        const Matrix X = to_matrix(rows), Y = to_matrix(recon);
        CHECK(spi(X, Y) == doctest::Approx(spi_oracle(rows, recon)).epsilon(1e-12));
        CHECK(sai(X, Y) == doctest::Approx(sai_oracle(rows, recon)).epsilon(1e-12));
    }
}

TEST_CASE("sai fixtures, zero-row skipping and bounds") {
    Matrix X(2, 2), Y(2, 2);
    X(0, 0) = 1.0;
    X(1, 1) = 2.0;
    CHECK(sai(X, X) == 1.0);

    Matrix ortho(1, 2), ortho_hat(1, 2);
    ortho(0, 0) = 1.0;
    ortho_hat(0, 1) = 1.0;
    CHECK(sai(ortho, ortho_hat) == 0.0);

    Matrix with_zero(2, 2), hat(2, 2);
    with_zero(0, 0) = 1.0;  // row 1 stays zero
    hat(0, 0) = 0.5;
    hat(1, 1) = 0.5;
    std::size_t skipped = 0;
    CHECK(sai(with_zero, hat, &skipped) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(skipped == 1);

    Matrix zeros(2, 2), any(2, 2);
    CHECK_THROWS_AS(sai(zeros, any), EmptyEvaluationSet);
}

TEST_CASE("spi and sai stay in [0,1] and respect identical permutations") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const auto rows = random_rows(4, 6, rng);
        const auto recon = random_rows(4, 6, rng);
        const Matrix X = to_matrix(rows), Y = to_matrix(recon);
        const double s = spi(X, Y);
        const double a = sai(X, Y);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);

        // permute both sets identically
        std::vector<std::size_t> perm{2, 0, 3, 1};
        std::vector<std::vector<double>> pr, pc;
        for (std::size_t i : perm) {
            pr.push_back(rows[i]);
            pc.push_back(recon[i]);
        }
        CHECK(spi(to_matrix(pr), to_matrix(pc)) == doctest::Approx(s).epsilon(1e-12));
        CHECK(sai(to_matrix(pr), to_matrix(pc)) == doctest::Approx(a).epsilon(1e-12));
    }
}

TEST_CASE("cosine histogram binning") {
    Matrix X(3, 2), Y(3, 2);
    for (std::size_t r = 0; r < 3; ++r) X(r, 0) = 1.0;
    Y(0, 0) = 1.0;              // cosine 1 -> last bin (right-inclusive)
    Y(1, 1) = 1.0;              // cosine 0 -> first bin
    Y(2, 0) = Y(2, 1) = 1.0;    // cosine 1/sqrt(2) ~ 0.707

    const Histogram h = cosine_histogram(X, Y, 20);
    CHECK(h.counts.size() == 20);
    std::size_t total = 0;
    for (std::size_t c : h.counts) total += c;
    CHECK(total == 3);
    CHECK(h.counts[19] == 1);
    CHECK(h.counts[0] == 1);
    CHECK(h.counts[14] == 1);  // 0.707 falls in [0.70, 0.75)
}
