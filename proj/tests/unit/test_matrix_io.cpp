#include <doctest.h>

#include <knncp/errors.hpp>
#include <knncp/matrix_io.hpp>

#include <filesystem>
#include <fstream>
#include <random>

using namespace knncp;

namespace {

std::filesystem::path tmp(const std::string& name) {
    return std::filesystem::path(KNNCP_TEST_TMP) / name;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

DataMatrix random_matrix(std::size_t n, std::size_t d, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> v(n * d);
    for (double& x : v) {
        x = g(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    }
    return DataMatrix(n, d, v);
}

} // namespace

TEST_SUITE("matrix_io") {

TEST_CASE("5x2 CSV of zeros loads as all zeros") {
    const auto p = tmp("zeros.csv");
    write_file(p, "0,0\n0,0\n0,0\n0,0\n0,0\n");
    const DataMatrix m = load_matrix(p, MatrixFormat::csv);
    CHECK(m.n() == 5);
    CHECK(m.d() == 2);
    for (double v : m.values()) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("NaN cell raises ValidationError at that cell") {
    try {
        parse_csv("1,2,3\n4,NaN,6\n");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.row() == 1);
        CHECK(e.col() == 1);
    }
    CHECK_THROWS_AS(parse_csv("1,inf\n"), ValidationError);
}

TEST_CASE("four rows are too few") {
    const auto p = tmp("four.csv");
    write_file(p, "1\n2\n3\n4\n");
    CHECK_THROWS_AS(load_matrix(p, MatrixFormat::csv), TooFewObservations);
}

TEST_CASE("ragged and non-numeric rows are parse errors") {
    CHECK_THROWS_AS(parse_csv("1,2\n3\n"), ParseError);
    CHECK_THROWS_AS(parse_csv("1,2\n3,abc\n"), ParseError);
}

TEST_CASE("header is skipped, scientific notation accepted, order kept") {
    const DataMatrix m = parse_csv("x,y\n1e-3,+2.5E2\n-3,4\r\n");
    REQUIRE(m.n() == 2);
    CHECK(m(0, 0) == doctest::Approx(1e-3));
    CHECK(m(0, 1) == 250.0);
    CHECK(m(1, 0) == -3.0);
    CHECK(m(1, 1) == 4.0);
}

TEST_CASE("raw round trip is bit exact, CSV round trip exact") {
    const DataMatrix m = random_matrix(37, 6, 7);
    const auto raw = tmp("m.raw");
    const auto csv = tmp("m.csv");
    write_matrix(m, raw, MatrixFormat::raw);
    write_matrix(m, csv, MatrixFormat::csv);
    CHECK(load_matrix(raw, MatrixFormat::raw) == m);
    const DataMatrix back = load_matrix(csv, MatrixFormat::csv);
    REQUIRE(back.n() == m.n());
    for (std::size_t i = 0; i < m.values().size(); ++i) {
        CHECK(std::abs(back.values()[i] - m.values()[i]) <= 1e-12 * std::max(1.0, std::abs(m.values()[i])));
    }
}

TEST_CASE("raw layout: magic, u64 n, u64 d, little-endian doubles") {
    const DataMatrix m(1, 1, {1.0});
    const auto bytes = encode_raw(m);
    REQUIRE(bytes.size() == 4 + 8 + 8 + 8);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "CPKN");
    CHECK(bytes[4] == 1);
    CHECK(bytes[12] == 1);
    CHECK(bytes[27] == 0x3f);
    CHECK(bytes[26] == 0xf0);
    auto truncated = bytes;
    truncated.pop_back();
    CHECK_THROWS_AS(parse_raw(truncated), ParseError);
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(parse_raw(bad_magic), ParseError);
}

TEST_CASE("format names") {
    CHECK(parse_matrix_format("csv") == MatrixFormat::csv);
    CHECK(parse_matrix_format("raw-f64") == MatrixFormat::raw);
    CHECK_THROWS_AS(parse_matrix_format("xlsx"), InvalidArgument);
}

TEST_CASE("missing file is an IoError") {
    CHECK_THROWS_AS(load_matrix(tmp("does-not-exist.csv"), MatrixFormat::csv), IoError);
}

TEST_CASE("slice_rows keeps order") {
    const DataMatrix m = DataMatrix::from_rows({{1}, {2}, {3}, {4}});
    const DataMatrix s = m.slice_rows(1, 3);
    CHECK(s.n() == 2);
    CHECK(s(0, 0) == 2.0);
    CHECK(s(1, 0) == 3.0);
}

}
