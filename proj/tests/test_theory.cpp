#include "elbowsig/theory.hpp"
#include "elbowsig/common.hpp"

#include <doctest.h>

#include <cmath>

using namespace elbowsig;

TEST_CASE("large-N prediction substitutions") {
    CHECK(predicted_delta_large_n(2, 10) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(predicted_delta_large_n(1, 3) == doctest::Approx(1.0).epsilon(1e-15));
    // D -> infinity approaches 1/k.
    CHECK(predicted_delta_large_n(1000000, 4) == doctest::Approx(0.25).epsilon(1e-5));
}

TEST_CASE("large-N prediction decreases in both k and D") {
    for (int d = 1; d <= 64; d *= 2)
        for (int k = 2; k < 40; ++k)
            CHECK(predicted_delta_large_n(d, k + 1) < predicted_delta_large_n(d, k));
    for (int k : {2, 5, 17})
        for (int d = 1; d < 32; ++d)
            CHECK(predicted_delta_large_n(d + 1, k) < predicted_delta_large_n(d, k));
}

TEST_CASE("FCM prediction substitutions") {
    // k=3, m=2: (1/3 - 1/2)/(1/4 - 1/3) - 1 = 2 - 1 = 1.
    CHECK(predicted_delta_fcm(3, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    // k=2, m=2: (1/2 - 1)/(1/3 - 1/2) - 1 = 3 - 1 = 2.
    CHECK(predicted_delta_fcm(2, 2.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("FCM prediction is positive, decreasing in k, and increasing in m") {
    for (double m : {1.2, 2.0, 3.5}) {
        double prev = predicted_delta_fcm(2, m);
        CHECK(prev > 0.0);
        for (int k = 3; k <= 30; ++k) {
            const double cur = predicted_delta_fcm(k, m);
            CHECK(cur > 0.0);
            CHECK(cur < prev);
            prev = cur;
        }
    }
    // Fuzzier memberships blunt the heterogeneity drop at the true k less than
    // they blunt the neighbours', so the predicted elbow grows with m.
    for (int k : {2, 3, 7}) {
        CHECK(predicted_delta_fcm(k, 1.1) < predicted_delta_fcm(k, 2.0));
        CHECK(predicted_delta_fcm(k, 2.0) < predicted_delta_fcm(k, 8.0));
    }
}

TEST_CASE("FCM prediction approaches the GMM prediction as m -> 1") {
    // With m = 1 + eps the power differences reduce to log ratios:
    // delta -> ln(k^2 / (k^2 - 1)) / ln((k+1)/k), the same closed form as the
    // mixture prediction.
    for (int k : {2, 3, 7, 15})
        CHECK(predicted_delta_fcm(k, 1.0 + 1e-6) ==
              doctest::Approx(predicted_delta_gmm(k)).epsilon(1e-4));
}

TEST_CASE("GMM prediction substitutions") {
    CHECK(predicted_delta_gmm(3) == doctest::Approx(0.40942).epsilon(1e-4));
    CHECK(predicted_delta_gmm(2) == doctest::Approx(0.70951).epsilon(1e-4));
    // Closed form re-evaluated independently.
    for (int k : {2, 3, 5, 11}) {
        const double kk = static_cast<double>(k);
        const double expected = -std::log(1.0 - 1.0 / (kk * kk)) / std::log(1.0 + 1.0 / kk);
        CHECK(predicted_delta_gmm(k) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("k * GMM prediction approaches 1 monotonically from above") {
    double prev = 2.0 * predicted_delta_gmm(2);
    CHECK(prev > 1.0);
    for (int k = 3; k <= 200; ++k) {
        const double cur = k * predicted_delta_gmm(k);
        CHECK(cur > 1.0);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK(std::abs(predicted_delta_gmm(1000) - 1.0 / 1000.0) < 1e-3);
}

TEST_CASE("parameter domains are enforced") {
    CHECK_THROWS_AS(predicted_delta_large_n(0, 3), DataError);
    CHECK_THROWS_AS(predicted_delta_large_n(2, 1), DataError);
    CHECK_THROWS_AS(predicted_delta_fcm(1, 2.0), DataError);
    CHECK_THROWS_AS(predicted_delta_fcm(3, 1.0), DataError);
    CHECK_THROWS_AS(predicted_delta_gmm(1), DataError);
}
