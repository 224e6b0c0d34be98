#include "elbowsig/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace elbowsig {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
        return s.substr(1, s.size() - 2);
    return s;
}

// 1-based row/column in error messages; row counts data rows only.
double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
    const std::string text = trim(raw);
    double value = 0.0;
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc{} || result.ptr != end) {
        throw DataError("CSV cell is not numeric at row " + std::to_string(row) +
                        ", column " + std::to_string(col) + ": '" + text + "'");
    }
    if (!std::isfinite(value)) {
        throw DataError("CSV cell is not finite at row " + std::to_string(row) +
                        ", column " + std::to_string(col) + ": '" + text + "'");
    }
    return value;
}

bool looks_like_number(const std::string& raw) {
    const std::string text = trim(raw);
    double value = 0.0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    return result.ec == std::errc{} && result.ptr == text.data() + text.size();
}

}  // namespace

Dataset::Dataset(Matrix values, std::vector<std::string> feature_names)
    : values_(std::move(values)), feature_names_(std::move(feature_names)) {
    if (values_.rows() < 2) throw DataError("Dataset needs at least 2 observations");
    if (values_.cols() < 1) throw DataError("Dataset needs at least 1 feature");
    if (!feature_names_.empty() &&
        static_cast<Eigen::Index>(feature_names_.size()) != values_.cols()) {
        throw DataError("feature_names length does not match the number of columns");
    }
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
        for (Eigen::Index j = 0; j < values_.cols(); ++j) {
            if (!std::isfinite(values_(i, j))) {
                throw DataError("non-finite value at row " + std::to_string(i + 1) +
                                ", column " + std::to_string(j + 1));
            }
        }
    }
}

std::vector<FeatureRange> column_ranges(const Dataset& data) {
    const Matrix& x = data.values();
    std::vector<FeatureRange> ranges(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        ranges[static_cast<std::size_t>(j)] = {x.col(j).minCoeff(), x.col(j).maxCoeff()};
    }
    return ranges;
}

Dataset load_csv(const std::filesystem::path& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CSV file: " + path.string());

    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> rows;
    std::size_t n_cols = 0;
    std::string line;
    std::size_t data_row = 0;
    bool header_pending = has_header;

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto cells = split_line(line);
        if (header_pending) {
            header_pending = false;
            n_cols = cells.size();
            feature_names.reserve(n_cols);
            for (const auto& c : cells) feature_names.push_back(unquote(trim(c)));
            continue;
        }
        ++data_row;
        if (n_cols == 0) n_cols = cells.size();
        if (cells.size() != n_cols) {
            throw DataError("ragged CSV: row " + std::to_string(data_row) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(n_cols));
        }
        std::vector<double> parsed(n_cols);
        for (std::size_t j = 0; j < n_cols; ++j)
            parsed[j] = parse_cell(cells[j], data_row, j + 1);
        rows.push_back(std::move(parsed));
    }
    if (in.bad()) throw DataError("I/O failure reading " + path.string());
    if (rows.empty()) throw DataError("CSV has no data rows: " + path.string());

    // A "header" made of numbers is almost certainly data; reject loudly
    // rather than silently dropping a row.
    if (has_header && !feature_names.empty()) {
        bool all_numeric = true;
        for (const auto& name : feature_names)
            if (!looks_like_number(name)) { all_numeric = false; break; }
        if (all_numeric) {
            throw DataError("header row of " + path.string() +
                            " is entirely numeric; rerun without --header");
        }
    }

    Matrix values(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(n_cols));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < n_cols; ++j)
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return Dataset(std::move(values), std::move(feature_names));
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open CSV file for writing: " + path.string());
    if (data.has_feature_names()) {
        const auto& names = data.feature_names();
        for (std::size_t j = 0; j < names.size(); ++j)
            out << (j ? "," : "") << names[j];
        out << '\n';
    }
    char buf[64];
    const Matrix& x = data.values();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", x(i, j));
            out << (j ? "," : "") << buf;
        }
        out << '\n';
    }
    if (!out) throw DataError("I/O failure writing " + path.string());
}

Dataset standardized(const Dataset& data) {
    Matrix x = data.values();
    const double n = static_cast<double>(x.rows());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double mean = x.col(j).mean();
        x.col(j).array() -= mean;
        const double sd = std::sqrt(x.col(j).squaredNorm() / (n - 1.0));
        if (sd > 0.0) x.col(j) /= sd;
    }
    return Dataset(std::move(x), data.feature_names());
}

}  // namespace elbowsig
