#include <sstream>
#include <string>

#include "catch_amalgamated.hpp"
#include "support.hpp"
#include "vads/io.hpp"

using namespace vads;

namespace {

std::string bytes_of_vads(const Dataset& ds) {
    std::ostringstream os(std::ios::binary);
    io::write_vads(os, ds);
    return os.str();
}

}  // namespace

TEST_CASE("native dataset format round-trips bit-exactly", "[io]") {
    const auto ds = vads::testing::random_dataset(257, 3, Metric::L1, 9, -1e9, 1e9);
    const std::string bytes = bytes_of_vads(ds);
    CHECK(bytes.size() == 4 + 4 + 4 + 4 + 1 + 257 * 3 * 8);
    CHECK(bytes.substr(0, 4) == "VADS");
    std::istringstream is(bytes, std::ios::binary);
    const Dataset back = io::read_vads(is);
    CHECK(back == ds);
    CHECK(bytes_of_vads(back) == bytes);
}

TEST_CASE("native dataset header layout", "[io]") {
    const Dataset ds(2, Metric::L2, {1.0, -2.5});
    const std::string b = bytes_of_vads(ds);
    // version 1, n 1, dim 2, metric byte 1, all little-endian
    CHECK(b.substr(4, 4) == std::string("\x01\x00\x00\x00", 4));
    CHECK(b.substr(8, 4) == std::string("\x01\x00\x00\x00", 4));
    CHECK(b.substr(12, 4) == std::string("\x02\x00\x00\x00", 4));
    CHECK(b[16] == '\x01');
    CHECK(b.substr(17, 8) == std::string("\x00\x00\x00\x00\x00\x00\xf0\x3f", 8));
}

TEST_CASE("malformed native files are rejected", "[io]") {
    const Dataset ds(1, Metric::L2, {1.0, 2.0});
    std::string b = bytes_of_vads(ds);

    std::string bad_magic = b;
    bad_magic[0] = 'X';
    std::istringstream s1(bad_magic);
    CHECK_THROWS_AS(io::read_vads(s1), FormatError);

    std::istringstream s2(b.substr(0, b.size() - 3));
    CHECK_THROWS_AS(io::read_vads(s2), FormatError);

    std::istringstream s3(b + "x");
    CHECK_THROWS_AS(io::read_vads(s3), FormatError);

    std::string bad_metric = b;
    bad_metric[16] = '\x07';
    std::istringstream s4(bad_metric);
    CHECK_THROWS_AS(io::read_vads(s4), FormatError);

    CHECK_THROWS_AS(io::read_vads("/nonexistent/dir/file.vads"), IoError);
}

TEST_CASE("fvecs and bin round-trip f32-exact coordinates", "[io]") {
    std::vector<double> coords;
    for (int i = 0; i < 60; ++i) coords.push_back(0.25 * i - 3.0);
    const Dataset ds(3, Metric::L2, coords);
    CHECK(io::downcast_report(ds).lossless());

    std::stringstream fv(std::ios::in | std::ios::out | std::ios::binary);
    CHECK(io::write_fvecs(fv, ds).lossless());
    CHECK(fv.str().size() == 20 * (4 + 3 * 4));
    CHECK(io::read_fvecs(fv, Metric::L2) == ds);

    std::stringstream bn(std::ios::in | std::ios::out | std::ios::binary);
    io::write_bin(bn, ds);
    CHECK(bn.str().size() == 8 + 60 * 4);
    CHECK(io::read_bin(bn, Metric::L2) == ds);
}

TEST_CASE("fvecs export narrows each coordinate to the nearest float", "[io]") {
    const Dataset ds(2, Metric::L2, {0.1, 1e9 + 0.5, 3.0, -7.0});
    const auto report = io::downcast_report(ds);
    CHECK(report.lossy_coordinates == 2);
    std::stringstream fv(std::ios::in | std::ios::out | std::ios::binary);
    io::write_fvecs(fv, ds);
    const Dataset back = io::read_fvecs(fv, Metric::L2);
    for (std::size_t i = 0; i < ds.coords().size(); ++i) {
        CHECK(back.coords()[i] == static_cast<double>(static_cast<float>(ds.coords()[i])));
    }
}

TEST_CASE("ivecs round-trip", "[io]") {
    const std::vector<std::vector<VertexId>> rows{{1, 2, 3, 4, 5}, {}, {42}};
    std::stringstream s(std::ios::in | std::ios::out | std::ios::binary);
    io::write_ivecs(s, rows);
    CHECK(io::read_ivecs(s) == rows);

    std::istringstream trunc(std::string("\x02\x00\x00\x00\x01\x00\x00\x00", 8));
    CHECK_THROWS_AS(io::read_ivecs(trunc), FormatError);
}

TEST_CASE("inconsistent fvecs dimensions are rejected", "[io]") {
    std::stringstream s(std::ios::in | std::ios::out | std::ios::binary);
    io::le::put_i32(s, 1);
    io::le::put_f32(s, 1.0f);
    io::le::put_i32(s, 2);
    io::le::put_f32(s, 1.0f);
    io::le::put_f32(s, 2.0f);
    CHECK_THROWS_AS(io::read_fvecs(s, Metric::L2), FormatError);
}
