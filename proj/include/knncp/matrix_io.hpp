#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace knncp {

/// Observations in time order: row t holds y_{t+1}. Values are row-major.
class DataMatrix {
public:
    DataMatrix() = default;

    /// Throws ValidationError on a non-finite entry and InvalidArgument when
    /// values.size() != n * d or d == 0.
    DataMatrix(std::size_t n, std::size_t d, std::vector<double> values);

    static DataMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t n() const noexcept { return n_; }
    std::size_t d() const noexcept { return d_; }

    std::span<const double> row(std::size_t i) const noexcept {
        return {values_.data() + i * d_, d_};
    }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * d_ + j]; }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Copy of rows [first, last).
    DataMatrix slice_rows(std::size_t first, std::size_t last) const;

    friend bool operator==(const DataMatrix&, const DataMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> values_;
};

/// Smallest sequence length for which the scan statistic is defined.
inline constexpr std::size_t kMinObservations = 5;

/// Throws TooFewObservations when data.n() < kMinObservations.
void require_min_observations(const DataMatrix& data);

enum class MatrixFormat { csv, raw };

MatrixFormat parse_matrix_format(std::string_view name);

/// Parses a matrix and checks it is long enough to scan.
DataMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format);

/// Parses CSV text; a non-numeric first line is treated as a header.
DataMatrix parse_csv(std::string_view text);

/// Raw layout: "CPKN", u64 n, u64 d, then n*d little-endian f64.
DataMatrix parse_raw(std::span<const unsigned char> bytes);
std::vector<unsigned char> encode_raw(const DataMatrix& data);

void write_matrix(const DataMatrix& data, const std::filesystem::path& path, MatrixFormat format);

} // namespace knncp
