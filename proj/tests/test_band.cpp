#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "dense_oracle.hpp"
#include "lcnls/band.hpp"
#include "lcnls/errors.hpp"

using lcnls::BandMatrix;
using lcnls::cplx;
using testref::dense_of;
using testref::dense_solve;
using testref::random_dominant;
using testref::random_vector;
using testref::rel_error;

TEST_CASE("order-200 pentadiagonal system matches the dense reference") {
    std::mt19937_64 rng(7001);
    BandMatrix m = random_dominant(rng, 200, 2, 2);
    const std::vector<cplx> b = random_vector(rng, 200);
    const auto x = lcnls::factor(m).solve(b);
    const auto ref = dense_solve(dense_of(m), b, 200);
    CHECK(rel_error(x, ref) < 1e-10);
}

TEST_CASE("200 random well-conditioned systems stay within 1e-10 of the reference") {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> order_d(5, 500);
    std::uniform_int_distribution<int> band_d(1, 5);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = order_d(rng);
        const int kl = std::min(band_d(rng), n - 1);
        const int ku = std::min(band_d(rng), n - 1);
        BandMatrix m = random_dominant(rng, n, kl, ku);
        const std::vector<cplx> b = random_vector(rng, n);
        const auto x = lcnls::factor(m).solve(b);
        const auto ref = dense_solve(dense_of(m), b, n);
        CAPTURE(trial);
        CAPTURE(n);
        REQUIRE(rel_error(x, ref) < 1e-10);
    }
}

TEST_CASE("rows that need pivoting are handled") {
    // zero diagonal entry in the first row forces an immediate row swap
    BandMatrix m(4, 1, 1);
    m.at(0, 0) = 0.0;
    m.at(0, 1) = cplx(2.0, 1.0);
    m.at(1, 0) = cplx(3.0, 0.0);
    m.at(1, 1) = cplx(0.5, 0.0);
    m.at(1, 2) = cplx(-1.0, 0.5);
    m.at(2, 1) = cplx(1.0, -2.0);
    m.at(2, 2) = cplx(0.2, 0.0);
    m.at(2, 3) = cplx(1.5, 0.0);
    m.at(3, 2) = cplx(-0.7, 0.3);
    m.at(3, 3) = cplx(2.0, -1.0);
    const std::vector<cplx> b = {cplx(1, 0), cplx(0, 1), cplx(-1, 1), cplx(2, 2)};
    const auto x = lcnls::factor(m).solve(b);
    const auto ref = dense_solve(dense_of(m), b, 4);
    CHECK(rel_error(x, ref) < 1e-12);
}

TEST_CASE("factored systems can be reused across right-hand sides") {
    std::mt19937_64 rng(99);
    BandMatrix m = random_dominant(rng, 50, 2, 3);
    const auto f = lcnls::factor(m);
    for (int k = 0; k < 5; ++k) {
        const std::vector<cplx> b = random_vector(rng, 50);
        const auto x = f.solve(b);
        const auto y = m.apply(x);
        CHECK(rel_error(y, b) < 1e-12);
    }
}

TEST_CASE("an exactly singular matrix is rejected") {
    BandMatrix m(3, 1, 1);
    // second row is a multiple of the first restricted to the shared band
    m.at(0, 0) = 1.0;
    m.at(0, 1) = 2.0;
    m.at(1, 0) = 2.0;
    m.at(1, 1) = 4.0;
    m.at(1, 2) = 0.0;
    m.at(2, 1) = 0.0;
    m.at(2, 2) = 1.0;
    CHECK_THROWS_AS(lcnls::factor(m), lcnls::SingularMatrix);
}

TEST_CASE("solve rejects a right-hand side of the wrong length") {
    std::mt19937_64 rng(3);
    BandMatrix m = random_dominant(rng, 10, 1, 1);
    const auto f = lcnls::factor(m);
    CHECK_THROWS_AS(f.solve(std::vector<cplx>(9)), lcnls::DimensionMismatch);
}

TEST_CASE("band access rules") {
    BandMatrix m(6, 1, 2);
    m.at(2, 1) = cplx(1.0, 0.0);
    m.at(2, 4) = cplx(0.0, 1.0);
    CHECK_THROWS_AS(m.at(2, 0), std::out_of_range);  // below the band
    CHECK_THROWS_AS(m.at(2, 5), std::out_of_range);  // above the band
    CHECK_THROWS_AS(m.get(6, 0), std::out_of_range); // outside the matrix
    CHECK(m.get(2, 0) == cplx(0.0, 0.0));            // out-of-band reads as zero
    CHECK(m.get(2, 4) == cplx(0.0, 1.0));
    m.clear();
    CHECK(m.get(2, 4) == cplx(0.0, 0.0));
}

TEST_CASE("apply multiplies by the declared band only") {
    BandMatrix m(3, 0, 1);
    m.at(0, 0) = 2.0;
    m.at(0, 1) = 1.0;
    m.at(1, 1) = 3.0;
    m.at(1, 2) = -1.0;
    m.at(2, 2) = 4.0;
    const std::vector<cplx> x = {cplx(1, 1), cplx(2, 0), cplx(0, -1)};
    const auto y = m.apply(x);
    CHECK(std::abs(y[0] - cplx(4.0, 2.0)) < 1e-15);
    CHECK(std::abs(y[1] - cplx(6.0, 1.0)) < 1e-15);
    CHECK(std::abs(y[2] - cplx(0.0, -4.0)) < 1e-15);
}
