#include "elbowsig/elbow.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace elbowsig;

TEST_CASE("hand-evaluated stencil: H = [10, 4, 3, 2.5] gives delta = [5, 1]") {
    const ElbowSequence seq = elbow_sequence(std::vector<double>{10.0, 4.0, 3.0, 2.5});
    REQUIRE(seq.k_values == std::vector<int>{2, 3});
    CHECK(seq.delta[0] == 5.0);  // -(3 - 8 + 10)/(3 - 4)
    CHECK(seq.delta[1] == 1.0);  // -(2.5 - 6 + 4)/(2.5 - 3)
    CHECK_FALSE(seq.degenerate_flags[0]);
    CHECK_FALSE(seq.degenerate_flags[1]);
}

TEST_CASE("linear H has identically zero curvature") {
    const ElbowSequence seq = elbow_sequence(std::vector<double>{10, 8, 6, 4, 2});
    REQUIRE(seq.delta.size() == 3);
    for (std::size_t i = 0; i < seq.delta.size(); ++i) {
        CHECK(seq.delta[i] == 0.0);
        CHECK_FALSE(seq.degenerate_flags[i]);
    }
}

TEST_CASE("any affine H gives exact zeros (dyadic coefficients)") {
    // Slope/intercept representable exactly in binary, so the second
    // difference cancels to exactly 0.0 in floating point.
    std::vector<double> H;
    for (int k = 1; k <= 9; ++k) H.push_back(100.0 - 3.5 * k);
    const ElbowSequence seq = elbow_sequence(H);
    for (double d : seq.delta) CHECK(d == 0.0);
}

TEST_CASE("geometric H matches the (1 - r)/r closed form") {
    for (double r : {0.25, 0.5, 0.9}) {
        std::vector<double> H;
        double value = 7.0;
        for (int k = 0; k < 12; ++k) {
            H.push_back(value);
            value *= r;
        }
        const ElbowSequence seq = elbow_sequence(H);
        const double expected = (1.0 - r) / r;
        for (std::size_t i = 0; i < seq.delta.size(); ++i) {
            CHECK(seq.delta[i] == doctest::Approx(expected).epsilon(1e-12));
            CHECK_FALSE(seq.degenerate_flags[i]);
        }
    }
}

TEST_CASE("delta is invariant to positive affine rescaling of H") {
    const std::vector<double> H{50.0, 20.0, 11.0, 8.0, 6.5, 6.1};
    std::vector<double> scaled;
    for (double h : H) scaled.push_back(3.7 * h + 11.0);
    const ElbowSequence base = elbow_sequence(H);
    const ElbowSequence rescaled = elbow_sequence(scaled);
    REQUIRE(base.delta.size() == rescaled.delta.size());
    for (std::size_t i = 0; i < base.delta.size(); ++i)
        CHECK(rescaled.delta[i] == doctest::Approx(base.delta[i]).epsilon(1e-12));
}

TEST_CASE("flat heterogeneity steps trigger the denominator guard") {
    const ElbowSequence seq = elbow_sequence(std::vector<double>{10.0, 4.0, 4.0, 4.0});
    REQUIRE(seq.delta.size() == 2);
    CHECK(seq.delta[0] == 0.0);
    CHECK(seq.degenerate_flags[0]);
    CHECK(seq.delta[1] == 0.0);
    CHECK(seq.degenerate_flags[1]);
}

TEST_CASE("guard scale follows H_1, not absolute step size") {
    // With H_1 = 1e9 the guard threshold is 1e-12 * 1e9 = 1e-3, so a 1e-6
    // step is treated as flat; with H_1 = 10 the same step is live.
    const ElbowSequence big = elbow_sequence(std::vector<double>{1e9, 1.0, 1.0 - 1e-6, 1.0 - 2e-6});
    CHECK(big.degenerate_flags[0]);
    const ElbowSequence small =
        elbow_sequence(std::vector<double>{10.0, 1.0, 1.0 - 1e-6, 1.0 - 2e-6});
    CHECK_FALSE(small.degenerate_flags[0]);
}

TEST_CASE("sequences shorter than three entries are rejected") {
    CHECK_THROWS_AS(elbow_sequence(std::vector<double>{3.0, 1.0}), DataError);
    CHECK_THROWS_AS(elbow_sequence(std::vector<double>{}), DataError);
}

TEST_CASE("non-finite heterogeneity input is rejected") {
    CHECK_THROWS_AS(elbow_sequence(std::vector<double>{10.0, std::nan(""), 1.0}), NumericError);
}

TEST_CASE("delta_k consumes exactly its three-point stencil") {
    // Perturbing H_5 must change delta_4, delta_5, delta_6 and nothing else.
    std::vector<double> H{100, 60, 40, 28, 20, 15, 12, 10.5};
    const ElbowSequence base = elbow_sequence(H);
    H[4] += 0.5;  // H at k=5
    const ElbowSequence bumped = elbow_sequence(H);
    for (std::size_t i = 0; i < base.delta.size(); ++i) {
        const int k = base.k_values[i];
        if (k >= 4 && k <= 6)
            CHECK(bumped.delta[i] != base.delta[i]);
        else
            CHECK(bumped.delta[i] == base.delta[i]);
    }
}
