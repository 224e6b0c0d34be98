#include "elbowsig/theory.hpp"

#include "elbowsig/common.hpp"

#include <cmath>
#include <string>

namespace elbowsig {
namespace {

void require_k(int k) {
    if (k < 2) throw DataError("prediction requires k >= 2, got " + std::to_string(k));
}

}  // namespace

double predicted_delta_large_n(int D, int k) {
    if (D < 1) throw DataError("prediction requires D >= 1, got " + std::to_string(D));
    require_k(k);
    return (1.0 + 2.0 / static_cast<double>(D)) / static_cast<double>(k);
}

double predicted_delta_fcm(int k, double m) {
    require_k(k);
    if (!(m > 1.0)) throw DataError("prediction requires fuzzifier m > 1, got " + std::to_string(m));
    const double e = 1.0 - m;
    const double kd = static_cast<double>(k);
    const double numerator = std::pow(kd, e) - std::pow(kd - 1.0, e);
    const double denominator = std::pow(kd + 1.0, e) - std::pow(kd, e);
    return numerator / denominator - 1.0;
}

double predicted_delta_gmm(int k) {
    require_k(k);
    const double kd = static_cast<double>(k);
    return -std::log1p(-1.0 / (kd * kd)) / std::log1p(1.0 / kd);
}

}  // namespace elbowsig
