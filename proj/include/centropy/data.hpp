#ifndef CENTROPY_DATA_HPP
#define CENTROPY_DATA_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "centropy/types.hpp"

namespace centropy {

// Identifier written into synthetic-dataset manifests so runs can be
// reproduced by other implementations of the same sampler.
inline constexpr const char* kGaussianSamplerId = "mt19937_64/box-muller/v1";

namespace detail {

inline std::uint32_t read_be_u32(std::istream& in, const std::string& path, std::size_t offset) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in)
        throw ParseError(path + ": truncated at byte offset " + std::to_string(offset));
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
           std::uint32_t(b[3]);
}

}  // namespace detail

/// IDX (MNIST container) loader. Pixels are scaled to [0,1]; the image and
/// label files must agree on the sample count.
inline Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw ParseError(images_path + ": cannot open");
    std::uint32_t magic = detail::read_be_u32(img, images_path, 0);
    if (magic != 0x00000803)
        throw ParseError(images_path + ": bad magic at offset 0 (expected 0x00000803, got 0x" +
                         [&] { std::ostringstream s; s << std::hex << magic; return s.str(); }() + ")");
    std::uint32_t count = detail::read_be_u32(img, images_path, 4);
    std::uint32_t rows = detail::read_be_u32(img, images_path, 8);
    std::uint32_t cols = detail::read_be_u32(img, images_path, 12);
    const std::size_t pixels = std::size_t(count) * rows * cols;
    std::vector<unsigned char> buf(pixels);
    img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels));
    if (static_cast<std::size_t>(img.gcount()) != pixels)
        throw ParseError(images_path + ": truncated payload at byte offset " +
                         std::to_string(16 + img.gcount()) + " (declared " + std::to_string(pixels) +
                         " pixels)");

    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw ParseError(labels_path + ": cannot open");
    std::uint32_t lmagic = detail::read_be_u32(lab, labels_path, 0);
    if (lmagic != 0x00000801)
        throw ParseError(labels_path + ": bad magic at offset 0 (expected 0x00000801)");
    std::uint32_t lcount = detail::read_be_u32(lab, labels_path, 4);
    if (lcount != count)
        throw ParseError(labels_path + ": label count " + std::to_string(lcount) +
                         " does not match image count " + std::to_string(count));
    std::vector<unsigned char> lbuf(lcount);
    lab.read(reinterpret_cast<char*>(lbuf.data()), static_cast<std::streamsize>(lcount));
    if (static_cast<std::size_t>(lab.gcount()) != lcount)
        throw ParseError(labels_path + ": truncated payload at byte offset " +
                         std::to_string(8 + lab.gcount()));

    Dataset ds;
    ds.source = Dataset::Source::IDX;
    ds.inputs.resize(count, static_cast<Eigen::Index>(rows) * cols);
    for (std::uint32_t i = 0; i < count; ++i)
        for (std::uint32_t p = 0; p < rows * cols; ++p)
            ds.inputs(i, p) = buf[std::size_t(i) * rows * cols + p] / 255.0;
    ds.labels.assign(lbuf.begin(), lbuf.end());
    return ds;
}

/// i.i.d. N(0, variance I_d) samples from a seeded mt19937_64 via the basic
/// Box-Muller transform (two uniforms per pair of normals, fixed draw order).
inline Dataset sample_gaussian(Eigen::Index n, Eigen::Index d, double variance, std::uint64_t seed) {
    if (n < 2) throw ParameterError("sample_gaussian: need n >= 2");
    if (d < 1) throw ParameterError("sample_gaussian: need d >= 1");
    if (variance <= 0.0) throw ParameterError("sample_gaussian: variance must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(std::numeric_limits<double>::min(), 1.0);
    const double sd = std::sqrt(variance);
    Dataset ds;
    ds.source = Dataset::Source::Synthetic;
    ds.seed = seed;
    ds.inputs.resize(n, d);
    double spare = 0.0;
    bool have_spare = false;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            double z;
            if (have_spare) {
                z = spare;
                have_spare = false;
            } else {
                double u1 = unit(rng), u2 = unit(rng);
                double r = std::sqrt(-2.0 * std::log(u1));
                z = r * std::cos(2.0 * std::numbers::pi * u2);
                spare = r * std::sin(2.0 * std::numbers::pi * u2);
                have_spare = true;
            }
            ds.inputs(i, j) = sd * z;
        }
    return ds;
}

/// Headered CSV: one row per sample, optional trailing `label` column.
inline Dataset load_csv(const std::string& path, bool has_labels = false) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    std::size_t columns = std::count(line.begin(), line.end(), ',') + 1;
    const std::size_t value_cols = has_labels ? columns - 1 : columns;
    if (has_labels && columns < 2)
        throw ParseError(path + ": label column requested but only one column present");

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t start = 0, col = 0;
        while (start <= line.size()) {
            std::size_t end = line.find(',', start);
            if (end == std::string::npos) end = line.size();
            std::string cell = line.substr(start, end - start);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size())
                throw ParseError(path + ": non-numeric cell at row " + std::to_string(line_no) +
                                 ", column " + std::to_string(col + 1));
            row.push_back(v);
            start = end + 1;
            ++col;
            if (end == line.size()) break;
        }
        if (row.size() != columns)
            throw ParseError(path + ": ragged row " + std::to_string(line_no) + " (expected " +
                             std::to_string(columns) + " cells, got " + std::to_string(row.size()) + ")");
        if (has_labels) {
            labels.push_back(static_cast<int>(row.back()));
            row.pop_back();
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path + ": no data rows");

    Dataset ds;
    ds.source = Dataset::Source::CSV;
    ds.inputs.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(value_cols));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < value_cols; ++j)
            ds.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    ds.labels = std::move(labels);
    return ds;
}

/// Writes a matrix (plus optional labels) as headered CSV at 17 significant
/// digits, enough for an exact f64 round trip.
inline void save_csv(const Matrix& m, const std::string& path, const std::vector<int>* labels = nullptr) {
    if (labels && static_cast<Eigen::Index>(labels->size()) != m.rows())
        throw ParameterError("save_csv: label count must match row count");
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j) out << ',';
        out << 'c' << j;
    }
    if (labels) out << ",label";
    out << '\n';
    char buf[64];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            auto res = std::to_chars(buf, buf + sizeof(buf), m(i, j), std::chars_format::general, 17);
            out.write(buf, res.ptr - buf);
        }
        if (labels) out << ',' << (*labels)[static_cast<std::size_t>(i)];
        out << '\n';
    }
}

}  // namespace centropy

#endif
