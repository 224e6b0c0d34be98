#pragma once

#include "elbowsig/common.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace elbowsig {

/// Immutable N x D matrix of observations (rows) by features (columns),
/// with optional feature names. N >= 2, D >= 1, all entries finite.
class Dataset {
public:
    explicit Dataset(Matrix values, std::vector<std::string> feature_names = {});

    const Matrix& values() const { return values_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    bool has_feature_names() const { return !feature_names_.empty(); }

    Eigen::Index n_rows() const { return values_.rows(); }
    Eigen::Index n_cols() const { return values_.cols(); }

private:
    Matrix values_;
    std::vector<std::string> feature_names_;
};

struct FeatureRange {
    double lo = 0.0;
    double hi = 0.0;
};

/// Per-feature observed (min, max).
std::vector<FeatureRange> column_ranges(const Dataset& data);

/// RFC-4180-style CSV: comma separator, '.' decimal point, optional single
/// header row. Every data cell must parse as a finite real; errors name the
/// offending row and column.
Dataset load_csv(const std::filesystem::path& path, bool has_header);

/// Writes values with 17 significant digits (lossless double round-trip);
/// a header row is emitted when the dataset carries feature names.
void write_csv(const Dataset& data, const std::filesystem::path& path);

/// Returns a copy with each column centered and scaled to unit sample
/// standard deviation (constant columns are centered only).
Dataset standardized(const Dataset& data);

}  // namespace elbowsig
