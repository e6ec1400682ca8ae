#include <knncp/matrix_io.hpp>

#include <knncp/errors.hpp>

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

namespace knncp {
namespace {

constexpr std::array<unsigned char, 4> kRawMagic{'C', 'P', 'K', 'N'};
constexpr std::size_t kRawHeaderBytes = 4 + 8 + 8;

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

// from_chars rejects a leading '+', which some exporters write.
bool parse_double(std::string_view cell, double& out) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    if (cell.empty()) {
        return false;
    }
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc{} && ptr == cell.data() + cell.size();
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
        out.push_back(static_cast<unsigned char>(v >> (8 * b)));
    }
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) {
        v = (v << 8) | p[b];
    }
    return v;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

DataMatrix::DataMatrix(std::size_t n, std::size_t d, std::vector<double> values)
    : n_(n), d_(d), values_(std::move(values)) {
    if (d_ == 0) {
        throw InvalidArgument("data matrix needs at least one column");
    }
    if (values_.size() != n_ * d_) {
        throw InvalidArgument("data matrix size does not match n * d");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw ValidationError(i / d_, i % d_,
                                  "non-finite value at row " + std::to_string(i / d_ + 1) +
                                      ", column " + std::to_string(i % d_ + 1));
        }
    }
}

DataMatrix DataMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        throw InvalidArgument("data matrix needs at least one row");
    }
    const std::size_t d = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * d);
    for (const auto& r : rows) {
        if (r.size() != d) {
            throw InvalidArgument("ragged rows");
        }
        values.insert(values.end(), r.begin(), r.end());
    }
    return DataMatrix(rows.size(), d, std::move(values));
}

DataMatrix DataMatrix::slice_rows(std::size_t first, std::size_t last) const {
    if (first > last || last > n_) {
        throw InvalidArgument("row slice out of range");
    }
    std::vector<double> values(values_.begin() + static_cast<std::ptrdiff_t>(first * d_),
                               values_.begin() + static_cast<std::ptrdiff_t>(last * d_));
    DataMatrix out;
    out.n_ = last - first;
    out.d_ = d_;
    out.values_ = std::move(values);
    return out;
}

void require_min_observations(const DataMatrix& data) {
    if (data.n() < kMinObservations) {
        throw TooFewObservations("need at least " + std::to_string(kMinObservations) +
                                 " observations, got " + std::to_string(data.n()));
    }
}

MatrixFormat parse_matrix_format(std::string_view name) {
    if (name == "csv") {
        return MatrixFormat::csv;
    }
    if (name == "raw" || name == "raw-f64") {
        return MatrixFormat::raw;
    }
    throw InvalidArgument("unknown matrix format '" + std::string(name) + "'");
}

DataMatrix parse_csv(std::string_view text) {
    std::vector<double> values;
    std::size_t d = 0;
    std::size_t n = 0;
    std::size_t line_no = 0;
    bool first_content_line = true;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        const std::string_view line = trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty()) {
            continue;
        }

        const auto cells = split_cells(line);
        std::vector<double> parsed(cells.size());
        bool numeric = true;
        for (std::size_t c = 0; c < cells.size() && numeric; ++c) {
            numeric = parse_double(cells[c], parsed[c]);
        }
        if (first_content_line) {
            first_content_line = false;
            d = cells.size();
            if (!numeric) {
                continue; // header
            }
        }
        if (!numeric) {
            throw ParseError("line " + std::to_string(line_no) + ": non-numeric cell");
        }
        if (cells.size() != d) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(d) +
                             " columns, found " + std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < d; ++c) {
            if (!std::isfinite(parsed[c])) {
                throw ValidationError(n, c,
                                      "non-finite value at row " + std::to_string(n + 1) +
                                          ", column " + std::to_string(c + 1));
            }
        }
        values.insert(values.end(), parsed.begin(), parsed.end());
        ++n;
    }
    if (n == 0) {
        throw ParseError("no data rows");
    }
    return DataMatrix(n, d, std::move(values));
}

DataMatrix parse_raw(std::span<const unsigned char> bytes) {
    if (bytes.size() < kRawHeaderBytes ||
        std::memcmp(bytes.data(), kRawMagic.data(), kRawMagic.size()) != 0) {
        throw ParseError("missing CPKN header");
    }
    const std::uint64_t n = get_u64(bytes.data() + 4);
    const std::uint64_t d = get_u64(bytes.data() + 12);
    if (d == 0 || n > (bytes.size() - kRawHeaderBytes) / 8 / d ||
        bytes.size() - kRawHeaderBytes != n * d * 8) {
        throw ParseError("raw payload size does not match header (n=" + std::to_string(n) +
                         ", d=" + std::to_string(d) + ")");
    }
    std::vector<double> values(n * d);
    const unsigned char* p = bytes.data() + kRawHeaderBytes;
    for (std::size_t i = 0; i < values.size(); ++i, p += 8) {
        const double v = std::bit_cast<double>(get_u64(p));
        if (!std::isfinite(v)) {
            throw ValidationError(i / d, i % d,
                                  "non-finite value at row " + std::to_string(i / d + 1) +
                                      ", column " + std::to_string(i % d + 1));
        }
        values[i] = v;
    }
    return DataMatrix(n, d, std::move(values));
}

std::vector<unsigned char> encode_raw(const DataMatrix& data) {
    std::vector<unsigned char> out(kRawMagic.begin(), kRawMagic.end());
    out.reserve(kRawHeaderBytes + data.values().size() * 8);
    put_u64(out, data.n());
    put_u64(out, data.d());
    for (double v : data.values()) {
        put_u64(out, std::bit_cast<std::uint64_t>(v));
    }
    return out;
}

DataMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
    const std::string content = read_file(path);
    DataMatrix data = format == MatrixFormat::csv
                          ? parse_csv(content)
                          : parse_raw({reinterpret_cast<const unsigned char*>(content.data()),
                                       content.size()});
    require_min_observations(data);
    return data;
}

void write_matrix(const DataMatrix& data, const std::filesystem::path& path, MatrixFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    if (format == MatrixFormat::raw) {
        const auto bytes = encode_raw(data);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
    } else {
        std::array<char, 32> buf{};
        for (std::size_t i = 0; i < data.n(); ++i) {
            for (std::size_t j = 0; j < data.d(); ++j) {
                const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), data(i, j));
                if (j > 0) {
                    out.put(',');
                }
                out.write(buf.data(), ptr - buf.data());
            }
            out.put('\n');
        }
    }
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

} // namespace knncp
