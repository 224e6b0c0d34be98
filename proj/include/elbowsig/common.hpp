#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace elbowsig {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Input data could not be read or violates a data contract (bad CSV cell,
/// ragged rows, non-finite values, degenerate dataset).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerical procedure failed (singular covariance, zero within-cluster
/// dispersion where a logarithm is needed, non-finite statistic).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Relative change between successive objective values, used by the
/// iterative fitters' stop rules.
inline double relative_change(double prev, double cur) {
    const double scale = std::max({std::abs(prev), std::abs(cur), 1e-12});
    return std::abs(cur - prev) / scale;
}

}  // namespace elbowsig
