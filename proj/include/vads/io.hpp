#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "vads/error.hpp"
#include "vads/metric.hpp"

namespace vads::io {

// All on-disk integers and floats are little-endian regardless of host order.

namespace le {

template <typename U>
void put_uint(std::ostream& os, U v) {
    std::array<char, sizeof(U)> buf{};
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    }
    os.write(buf.data(), buf.size());
}

template <typename U>
U get_uint(std::istream& is, const char* what) {
    std::array<unsigned char, sizeof(U)> buf{};
    is.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (is.gcount() != static_cast<std::streamsize>(buf.size())) {
        throw FormatError(std::string("truncated input while reading ") + what);
    }
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
    return v;
}

inline void put_u32(std::ostream& os, std::uint32_t v) { put_uint(os, v); }
inline void put_i32(std::ostream& os, std::int32_t v) { put_uint(os, std::bit_cast<std::uint32_t>(v)); }
inline void put_f32(std::ostream& os, float v) { put_uint(os, std::bit_cast<std::uint32_t>(v)); }
inline void put_f64(std::ostream& os, double v) { put_uint(os, std::bit_cast<std::uint64_t>(v)); }

inline std::uint32_t get_u32(std::istream& is, const char* what) { return get_uint<std::uint32_t>(is, what); }
inline std::int32_t get_i32(std::istream& is, const char* what) {
    return std::bit_cast<std::int32_t>(get_uint<std::uint32_t>(is, what));
}
inline float get_f32(std::istream& is, const char* what) {
    return std::bit_cast<float>(get_uint<std::uint32_t>(is, what));
}
inline double get_f64(std::istream& is, const char* what) {
    return std::bit_cast<double>(get_uint<std::uint64_t>(is, what));
}

inline bool at_eof(std::istream& is) {
    return is.peek() == std::char_traits<char>::eof();
}

}  // namespace le

inline std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    return os;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "' for reading");
    return is;
}

inline void check_written(std::ostream& os, const std::string& what) {
    os.flush();
    if (!os) throw IoError("write failed for " + what);
}

// ---------------------------------------------------------------------------
// Native lossless dataset format:
//   "VADS" | u32 version | u32 n | u32 dim | u8 metric | n*dim f64

inline constexpr std::uint32_t kDatasetVersion = 1;
inline constexpr char kDatasetMagic[4] = {'V', 'A', 'D', 'S'};

inline void write_vads(std::ostream& os, const Dataset& ds) {
    os.write(kDatasetMagic, 4);
    le::put_u32(os, kDatasetVersion);
    le::put_u32(os, static_cast<std::uint32_t>(ds.size()));
    le::put_u32(os, static_cast<std::uint32_t>(ds.dim()));
    os.put(static_cast<char>(ds.metric()));
    for (double c : ds.coords()) le::put_f64(os, c);
}

inline Dataset read_vads(std::istream& is) {
    char magic[4] = {};
    is.read(magic, 4);
    if (is.gcount() != 4 || std::memcmp(magic, kDatasetMagic, 4) != 0) {
        throw FormatError("not a VADS dataset (bad magic)");
    }
    const auto version = le::get_u32(is, "version");
    if (version != kDatasetVersion) {
        throw FormatError("unsupported VADS version " + std::to_string(version));
    }
    const auto n = le::get_u32(is, "n");
    const auto dim = le::get_u32(is, "dim");
    const int metric_byte = is.get();
    if (metric_byte != 0 && metric_byte != 1) throw FormatError("bad metric byte in VADS header");
    if (n == 0 || dim == 0) throw FormatError("VADS header declares an empty dataset");
    std::vector<double> coords(static_cast<std::size_t>(n) * dim);
    for (double& c : coords) c = le::get_f64(is, "coordinates");
    if (!le::at_eof(is)) throw FormatError("trailing bytes after VADS payload");
    return Dataset(dim, static_cast<Metric>(metric_byte), std::move(coords));
}

inline void write_vads(const std::string& path, const Dataset& ds) {
    auto os = open_out(path);
    write_vads(os, ds);
    check_written(os, path);
}

inline Dataset read_vads(const std::string& path) {
    auto is = open_in(path);
    return read_vads(is);
}

// ---------------------------------------------------------------------------
// fvecs / bin (32-bit float). Writers report how many coordinates changed value
// when narrowed from 64 to 32 bits.

struct DowncastReport {
    std::size_t lossy_coordinates = 0;
    bool lossless() const { return lossy_coordinates == 0; }
};

inline DowncastReport downcast_report(const Dataset& ds) {
    DowncastReport r;
    for (double c : ds.coords()) {
        if (static_cast<double>(static_cast<float>(c)) != c) ++r.lossy_coordinates;
    }
    return r;
}

inline DowncastReport write_fvecs(std::ostream& os, const Dataset& ds) {
    for (std::size_t i = 0; i < ds.size(); ++i) {
        le::put_i32(os, static_cast<std::int32_t>(ds.dim()));
        for (double c : ds.point(i)) le::put_f32(os, static_cast<float>(c));
    }
    return downcast_report(ds);
}

inline Dataset read_fvecs(std::istream& is, Metric metric) {
    std::vector<double> coords;
    std::size_t dim = 0;
    while (!le::at_eof(is)) {
        const auto d = le::get_i32(is, "fvecs dimension");
        if (d <= 0) throw FormatError("non-positive fvecs dimension");
        if (dim == 0) dim = static_cast<std::size_t>(d);
        if (static_cast<std::size_t>(d) != dim) throw FormatError("inconsistent fvecs dimensions");
        for (std::size_t j = 0; j < dim; ++j) coords.push_back(le::get_f32(is, "fvecs payload"));
    }
    if (dim == 0) throw FormatError("empty fvecs file");
    return Dataset(dim, metric, std::move(coords));
}

inline DowncastReport write_fvecs(const std::string& path, const Dataset& ds) {
    auto os = open_out(path);
    auto r = write_fvecs(os, ds);
    check_written(os, path);
    return r;
}

inline Dataset read_fvecs(const std::string& path, Metric metric) {
    auto is = open_in(path);
    return read_fvecs(is, metric);
}

/// Flat bin: i32 n | i32 dim | n*dim f32.
inline DowncastReport write_bin(std::ostream& os, const Dataset& ds) {
    le::put_i32(os, static_cast<std::int32_t>(ds.size()));
    le::put_i32(os, static_cast<std::int32_t>(ds.dim()));
    for (double c : ds.coords()) le::put_f32(os, static_cast<float>(c));
    return downcast_report(ds);
}

inline Dataset read_bin(std::istream& is, Metric metric) {
    const auto n = le::get_i32(is, "bin n");
    const auto dim = le::get_i32(is, "bin dim");
    if (n <= 0 || dim <= 0) throw FormatError("bin header declares an empty dataset");
    std::vector<double> coords(static_cast<std::size_t>(n) * static_cast<std::size_t>(dim));
    for (double& c : coords) c = le::get_f32(is, "bin payload");
    if (!le::at_eof(is)) throw FormatError("trailing bytes after bin payload");
    return Dataset(static_cast<std::size_t>(dim), metric, std::move(coords));
}

inline DowncastReport write_bin(const std::string& path, const Dataset& ds) {
    auto os = open_out(path);
    auto r = write_bin(os, ds);
    check_written(os, path);
    return r;
}

inline Dataset read_bin(const std::string& path, Metric metric) {
    auto is = open_in(path);
    return read_bin(is, metric);
}

// ---------------------------------------------------------------------------
// ivecs: per row i32 count then count i32 values (ground-truth ids).

inline void write_ivecs(std::ostream& os, const std::vector<std::vector<VertexId>>& rows) {
    for (const auto& row : rows) {
        le::put_i32(os, static_cast<std::int32_t>(row.size()));
        for (VertexId v : row) le::put_i32(os, static_cast<std::int32_t>(v));
    }
}

inline std::vector<std::vector<VertexId>> read_ivecs(std::istream& is) {
    std::vector<std::vector<VertexId>> rows;
    while (!le::at_eof(is)) {
        const auto k = le::get_i32(is, "ivecs count");
        if (k < 0) throw FormatError("negative ivecs row length");
        auto& row = rows.emplace_back(static_cast<std::size_t>(k));
        for (auto& v : row) {
            const auto x = le::get_i32(is, "ivecs payload");
            if (x < 0) throw FormatError("negative id in ivecs");
            v = static_cast<VertexId>(x);
        }
    }
    return rows;
}

inline void write_ivecs(const std::string& path, const std::vector<std::vector<VertexId>>& rows) {
    auto os = open_out(path);
    write_ivecs(os, rows);
    check_written(os, path);
}

inline std::vector<std::vector<VertexId>> read_ivecs(const std::string& path) {
    auto is = open_in(path);
    return read_ivecs(is);
}

}  // namespace vads::io
