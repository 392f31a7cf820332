#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "onmf/dense_matrix.hpp"
#include "onmf/labels.hpp"
#include "onmf/orthogonal_h.hpp"
#include "onmf/run_report.hpp"
#include "onmf/sparse_matrix.hpp"

namespace onmf {

namespace detail {

[[noreturn]] inline void io_fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Splits on whitespace; returns the tokens.
inline std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t b = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > b) out.push_back(line.substr(b, i - b));
    }
    return out;
}

inline bool parse_size(std::string_view tok, std::size_t& out) {
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc() && ptr == tok.data() + tok.size();
}

inline bool parse_double(std::string_view tok, double& out) {
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc() && ptr == tok.data() + tok.size();
}

class FileWriter {
public:
    explicit FileWriter(const std::filesystem::path& path)
        : path_(path), f_(std::fopen(path.string().c_str(), "wb")) {
        if (!f_) io_fail(path, "cannot open for writing");
    }
    ~FileWriter() {
        if (f_) std::fclose(f_);
    }
    FileWriter(const FileWriter&) = delete;
    FileWriter& operator=(const FileWriter&) = delete;

    template <typename... Args>
    void printf(const char* fmt, Args... args) {
        if (std::fprintf(f_, fmt, args...) < 0) io_fail(path_, "write failed");
    }
    void put(const char* s) {
        if (std::fputs(s, f_) < 0) io_fail(path_, "write failed");
    }
    void write_bytes(const void* data, std::size_t count) {
        if (std::fwrite(data, 1, count, f_) != count) io_fail(path_, "write failed");
    }

private:
    std::filesystem::path path_;
    std::FILE* f_ = nullptr;
};

}  // namespace detail

// --- MatrixMarket coordinate files ---------------------------------------

// Reads "matrix coordinate real general" and the pattern variant (entries get
// value 1.0). Indices are one-based in the file; duplicates are summed.
inline SparseMatrix read_matrix_market(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) detail::io_fail(path, "cannot open");
    std::string line;
    if (!std::getline(in, line)) detail::io_fail(path, "empty file");
    const auto banner = detail::tokens(line);
    if (banner.size() < 5 || banner[0] != "%%MatrixMarket")
        detail::io_fail(path, "malformed MatrixMarket banner");
    const std::string object = detail::lower(banner[1]);
    const std::string format = detail::lower(banner[2]);
    const std::string field = detail::lower(banner[3]);
    const std::string symmetry = detail::lower(banner[4]);
    if (object != "matrix" || format != "coordinate")
        detail::io_fail(path, "unsupported MatrixMarket type: " + object + " " + format);
    if (field != "real" && field != "pattern")
        detail::io_fail(path, "unsupported MatrixMarket field: " + field);
    if (symmetry != "general")
        detail::io_fail(path, "unsupported MatrixMarket symmetry: " + symmetry);
    const bool pattern = field == "pattern";

    std::size_t m = 0, n = 0, nnz = 0;
    bool have_size = false;
    while (std::getline(in, line)) {
        const std::string_view t = detail::trim(line);
        if (t.empty() || t.front() == '%') continue;
        const auto toks = detail::tokens(t);
        if (toks.size() != 3 || !detail::parse_size(toks[0], m) ||
            !detail::parse_size(toks[1], n) || !detail::parse_size(toks[2], nnz))
            detail::io_fail(path, "malformed size line");
        have_size = true;
        break;
    }
    if (!have_size) detail::io_fail(path, "missing size line");

    std::vector<Triplet> entries;
    entries.reserve(nnz);
    while (entries.size() < nnz) {
        if (!std::getline(in, line)) detail::io_fail(path, "unexpected end of file");
        const std::string_view t = detail::trim(line);
        if (t.empty() || t.front() == '%') continue;
        const auto toks = detail::tokens(t);
        std::size_t i = 0, j = 0;
        double v = 1.0;
        const std::size_t want = pattern ? 2 : 3;
        if (toks.size() != want || !detail::parse_size(toks[0], i) ||
            !detail::parse_size(toks[1], j) ||
            (!pattern && !detail::parse_double(toks[2], v)))
            detail::io_fail(path, "malformed entry line");
        if (i < 1 || i > m || j < 1 || j > n)
            detail::io_fail(path, "entry index out of range");
        entries.push_back({i - 1, j - 1, v});
    }
    try {
        return SparseMatrix::from_triplets(m, n, std::move(entries));
    } catch (const std::invalid_argument& e) {
        detail::io_fail(path, e.what());
    }
}

inline void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& x) {
    detail::FileWriter out(path);
    out.put("%%MatrixMarket matrix coordinate real general\n");
    out.printf("%zu %zu %zu\n", x.rows(), x.cols(), x.nnz());
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const auto cv = x.column(j);
        for (std::size_t t = 0; t < cv.size(); ++t)
            out.printf("%zu %zu %.17g\n", cv.row[t] + 1, j + 1, cv.value[t]);
    }
}

// Writes every entry of a dense matrix in coordinate form, zeros included, so
// the file round-trips to the same dense contents.
inline void write_matrix_market_dense(const std::filesystem::path& path,
                                      const DenseMatrix& w) {
    detail::FileWriter out(path);
    out.put("%%MatrixMarket matrix coordinate real general\n");
    out.printf("%zu %zu %zu\n", w.rows(), w.cols(), w.rows() * w.cols());
    for (std::size_t j = 0; j < w.cols(); ++j)
        for (std::size_t i = 0; i < w.rows(); ++i)
            out.printf("%zu %zu %.17g\n", i + 1, j + 1, w(i, j));
}

inline DenseMatrix dense_from_sparse(const SparseMatrix& x) {
    DenseMatrix out(x.rows(), x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const auto cv = x.column(j);
        for (std::size_t t = 0; t < cv.size(); ++t) out(cv.row[t], j) = cv.value[t];
    }
    return out;
}

// --- label files ----------------------------------------------------------

// One base-0 cluster index per line.
inline LabelVector read_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) detail::io_fail(path, "cannot open");
    LabelVector out;
    std::string line;
    while (std::getline(in, line)) {
        const std::string_view t = detail::trim(line);
        if (t.empty()) continue;
        long long v = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || ptr != t.data() + t.size())
            detail::io_fail(path, "malformed label line: " + std::string(t));
        if (v < 0) detail::io_fail(path, "negative label");
        out.labels.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

inline void write_labels(const std::filesystem::path& path, const LabelVector& labels) {
    detail::FileWriter out(path);
    for (std::size_t v : labels.labels) out.printf("%zu\n", v);
}

// --- hyperspectral cubes --------------------------------------------------

enum class HsiDtype { F32, F64 };

// Band-sequential cube: values[b * width * height + row * width + col].
struct HsiCube {
    std::size_t bands = 0, width = 0, height = 0;
    std::vector<double> values;
    std::vector<double> wavelengths_nm;  // empty when the header has none

    std::size_t pixel_count() const { return width * height; }
};

// Header format, one "key: value" per line:
//   bands: 3
//   width: 4
//   height: 2
//   dtype: f32|f64
//   byteorder: le|be
//   data: relative/path.raw
//   wavelengths: 500,510,520        (optional, nm, one per band)
inline HsiCube read_hsi_cube(const std::filesystem::path& header_path) {
    std::ifstream in(header_path);
    if (!in) detail::io_fail(header_path, "cannot open");
    HsiCube cube;
    std::string dtype, byteorder, data_name, wavelengths;
    bool have_bands = false, have_width = false, have_height = false;
    std::string line;
    while (std::getline(in, line)) {
        const std::string_view t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const std::size_t colon = t.find(':');
        if (colon == std::string_view::npos)
            detail::io_fail(header_path, "malformed header line: " + std::string(t));
        const std::string key = detail::lower(detail::trim(t.substr(0, colon)));
        const std::string_view value = detail::trim(t.substr(colon + 1));
        if (key == "bands") {
            have_bands = detail::parse_size(value, cube.bands);
            if (!have_bands) detail::io_fail(header_path, "malformed bands value");
        } else if (key == "width") {
            have_width = detail::parse_size(value, cube.width);
            if (!have_width) detail::io_fail(header_path, "malformed width value");
        } else if (key == "height") {
            have_height = detail::parse_size(value, cube.height);
            if (!have_height) detail::io_fail(header_path, "malformed height value");
        } else if (key == "dtype") {
            dtype = detail::lower(value);
        } else if (key == "byteorder") {
            byteorder = detail::lower(value);
        } else if (key == "data") {
            data_name = std::string(value);
        } else if (key == "wavelengths") {
            wavelengths = std::string(value);
        } else {
            detail::io_fail(header_path, "unknown header key: " + key);
        }
    }
    if (!have_bands || !have_width || !have_height)
        detail::io_fail(header_path, "missing bands/width/height");
    if (cube.bands == 0 || cube.width == 0 || cube.height == 0)
        detail::io_fail(header_path, "zero cube dimension");
    if (dtype != "f32" && dtype != "f64")
        detail::io_fail(header_path, "dtype must be f32 or f64");
    if (byteorder != "le" && byteorder != "be")
        detail::io_fail(header_path, "byteorder must be le or be");
    if (data_name.empty()) detail::io_fail(header_path, "missing data path");

    const std::filesystem::path data_path = header_path.parent_path() / data_name;
    std::ifstream raw(data_path, std::ios::binary);
    if (!raw) detail::io_fail(data_path, "cannot open");
    std::vector<char> bytes((std::istreambuf_iterator<char>(raw)),
                            std::istreambuf_iterator<char>());
    const std::size_t count = cube.bands * cube.width * cube.height;
    const std::size_t elsize = dtype == "f32" ? 4 : 8;
    if (bytes.size() != count * elsize)
        detail::io_fail(data_path, "data size does not match header dimensions");

    const bool big = byteorder == "be";
    cube.values.resize(count);
    const auto* b = reinterpret_cast<const unsigned char*>(bytes.data());
    for (std::size_t t = 0; t < count; ++t) {
        double v;
        if (elsize == 4) {
            std::uint32_t bits = 0;
            for (std::size_t k = 0; k < 4; ++k)
                bits = (bits << 8) | b[t * 4 + (big ? k : 3 - k)];
            v = static_cast<double>(std::bit_cast<float>(bits));
        } else {
            std::uint64_t bits = 0;
            for (std::size_t k = 0; k < 8; ++k)
                bits = (bits << 8) | b[t * 8 + (big ? k : 7 - k)];
            v = std::bit_cast<double>(bits);
        }
        if (!std::isfinite(v)) detail::io_fail(data_path, "non-finite sample");
        if (v < 0.0) detail::io_fail(data_path, "negative sample");
        cube.values[t] = v;
    }

    if (!wavelengths.empty()) {
        std::stringstream ss{wavelengths};
        std::string item;
        while (std::getline(ss, item, ',')) {
            double v = 0.0;
            if (!detail::parse_double(detail::trim(item), v))
                detail::io_fail(header_path, "malformed wavelengths value");
            cube.wavelengths_nm.push_back(v);
        }
        if (cube.wavelengths_nm.size() != cube.bands)
            detail::io_fail(header_path, "wavelength count != bands");
    }
    return cube;
}

inline void write_hsi_cube(const std::filesystem::path& header_path, const HsiCube& cube,
                           HsiDtype dtype = HsiDtype::F64, bool big_endian = false) {
    const std::size_t count = cube.bands * cube.width * cube.height;
    if (cube.values.size() != count)
        throw std::invalid_argument("write_hsi_cube: values size != bands*width*height");
    if (!cube.wavelengths_nm.empty() && cube.wavelengths_nm.size() != cube.bands)
        throw std::invalid_argument("write_hsi_cube: wavelength count != bands");
    std::filesystem::path data_path = header_path;
    data_path.replace_extension(".raw");

    {
        detail::FileWriter out(header_path);
        out.printf("bands: %zu\n", cube.bands);
        out.printf("width: %zu\n", cube.width);
        out.printf("height: %zu\n", cube.height);
        out.printf("dtype: %s\n", dtype == HsiDtype::F32 ? "f32" : "f64");
        out.printf("byteorder: %s\n", big_endian ? "be" : "le");
        out.printf("data: %s\n", data_path.filename().string().c_str());
        if (!cube.wavelengths_nm.empty()) {
            std::string list;
            char buf[64];
            for (std::size_t i = 0; i < cube.wavelengths_nm.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.17g", cube.wavelengths_nm[i]);
                if (i) list += ",";
                list += buf;
            }
            out.printf("wavelengths: %s\n", list.c_str());
        }
    }

    detail::FileWriter out(data_path);
    std::vector<unsigned char> bytes;
    const std::size_t elsize = dtype == HsiDtype::F32 ? 4 : 8;
    bytes.resize(count * elsize);
    for (std::size_t t = 0; t < count; ++t) {
        if (elsize == 4) {
            const std::uint32_t bits = std::bit_cast<std::uint32_t>(
                static_cast<float>(cube.values[t]));
            for (std::size_t k = 0; k < 4; ++k)
                bytes[t * 4 + k] = static_cast<unsigned char>(
                    bits >> (8 * (big_endian ? 3 - k : k)));
        } else {
            const std::uint64_t bits = std::bit_cast<std::uint64_t>(cube.values[t]);
            for (std::size_t k = 0; k < 8; ++k)
                bytes[t * 8 + k] = static_cast<unsigned char>(
                    bits >> (8 * (big_endian ? 7 - k : k)));
        }
    }
    out.write_bytes(bytes.data(), bytes.size());
}

// Flattens to the bands x pixels matrix; pixel (row, col) becomes column
// row * width + col. Zero samples are not stored.
inline SparseMatrix hsi_to_matrix(const HsiCube& cube) {
    const std::size_t npix = cube.pixel_count();
    std::vector<Triplet> entries;
    for (std::size_t b = 0; b < cube.bands; ++b)
        for (std::size_t p = 0; p < npix; ++p) {
            const double v = cube.values[b * npix + p];
            if (v != 0.0) entries.push_back({b, p, v});
        }
    return SparseMatrix::from_triplets(cube.bands, npix, std::move(entries));
}

// --- cluster maps ---------------------------------------------------------

// Fixed 16-color palette; index 0..15. Black is reserved for unassigned
// pixels and never appears in the palette.
inline constexpr std::array<std::array<std::uint8_t, 3>, 16> kClusterPalette = {{
    {230, 25, 75},   {60, 180, 75},   {255, 225, 25},  {0, 130, 200},
    {245, 130, 48},  {145, 30, 180},  {70, 240, 240},  {240, 50, 230},
    {210, 245, 60},  {250, 190, 212}, {0, 128, 128},   {220, 190, 255},
    {170, 110, 40},  {255, 250, 200}, {128, 0, 0},     {170, 255, 195},
}};

// Binary PPM (P6) cluster map; pixel (row, col) reads H column row*width+col.
inline void write_cluster_map(const std::filesystem::path& path, const OrthogonalH& h,
                              std::size_t width, std::size_t height) {
    if (h.cluster_count() > kClusterPalette.size())
        throw std::invalid_argument("write_cluster_map: more than 16 clusters");
    if (h.column_count() != width * height)
        throw std::invalid_argument("write_cluster_map: H columns != width*height");
    detail::FileWriter out(path);
    out.printf("P6\n%zu %zu\n255\n", width, height);
    std::vector<unsigned char> pixels(width * height * 3, 0);
    for (std::size_t j = 0; j < h.column_count(); ++j) {
        const std::size_t k = h.assignment(j);
        if (k == OrthogonalH::kUnassigned) continue;
        pixels[j * 3 + 0] = kClusterPalette[k][0];
        pixels[j * 3 + 1] = kClusterPalette[k][1];
        pixels[j * 3 + 2] = kClusterPalette[k][2];
    }
    out.write_bytes(pixels.data(), pixels.size());
}

// --- benchmark reports ----------------------------------------------------

inline void write_trace_csv(const std::filesystem::path& path,
                            std::span<const double> objective,
                            std::span<const double> h_change) {
    if (objective.size() != h_change.size())
        throw std::invalid_argument("write_trace_csv: trace lengths differ");
    detail::FileWriter out(path);
    out.put("iter,objective,h_change\n");
    for (std::size_t i = 0; i < objective.size(); ++i)
        out.printf("%zu,%.17g,%.17g\n", i + 1, objective[i], h_change[i]);
}

// Writes the per-run summary CSV plus one `<dataset>_<algorithm>_<seed>.trace.csv`
// per run next to it.
inline void write_report_csv(const std::filesystem::path& path,
                             std::span<const RunReport> reports) {
    detail::FileWriter out(path);
    out.put("dataset,algorithm,r,seed,metric_name,metric_value,iterations,time_s\n");
    for (const RunReport& r : reports) {
        out.printf("%s,%s,%zu,%llu,%s,", r.dataset.c_str(), r.algorithm.c_str(), r.r,
                   static_cast<unsigned long long>(r.seed), r.metric_name.c_str());
        if (r.metric_value) out.printf("%.17g", *r.metric_value);
        out.printf(",%zu,%.17g\n", r.iterations, r.time_s);
    }
    const std::filesystem::path dir = path.parent_path();
    for (const RunReport& r : reports) {
        const std::string name =
            r.dataset + "_" + r.algorithm + "_" + std::to_string(r.seed) + ".trace.csv";
        write_trace_csv(dir / name, r.objective_trace, r.h_change_trace);
    }
}

}  // namespace onmf
