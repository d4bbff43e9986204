#include "planeguard/feature_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "planeguard/error.hpp"

namespace planeguard {
namespace {

template <typename T>
void put_le(std::ostream& os, T v) {
    std::array<char, sizeof(T)> buf{};
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(buf.data(), buf.size());
}

template <typename T>
T get_le(std::istream& is) {
    std::array<unsigned char, sizeof(T)> buf{};
    is.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (is.gcount() != static_cast<std::streamsize>(buf.size())) throw InvalidInput("feature file: truncated header");
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(buf[i]) << (8 * i));
    return v;
}

std::string trim_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

void write_feature_file(std::ostream& os, const Eigen::MatrixXd& rows) {
    if (rows.cols() > std::numeric_limits<std::uint32_t>::max() || rows.rows() > std::numeric_limits<std::uint32_t>::max()) {
        throw InvalidInput("feature matrix too large for the file format");
    }
    os.write("RM1F", 4);
    put_le<std::uint16_t>(os, kFeatureFileVersion);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(rows.cols()));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(rows.rows()));
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        for (Eigen::Index c = 0; c < rows.cols(); ++c) {
            put_le<std::uint32_t>(os, std::bit_cast<std::uint32_t>(static_cast<float>(rows(r, c))));
        }
    }
}

Eigen::MatrixXd read_feature_file(std::istream& is) {
    char magic[4] = {};
    is.read(magic, 4);
    if (is.gcount() != 4 || std::memcmp(magic, "RM1F", 4) != 0) throw InvalidInput("feature file: bad magic");
    const auto version = get_le<std::uint16_t>(is);
    if (version != kFeatureFileVersion) {
        throw InvalidInput("feature file: unsupported version " + std::to_string(version));
    }
    const auto dim = get_le<std::uint32_t>(is);
    const auto count = get_le<std::uint32_t>(is);
    Eigen::MatrixXd rows(count, dim);
    std::vector<unsigned char> buf(static_cast<std::size_t>(dim) * 4);
    for (std::uint32_t r = 0; r < count; ++r) {
        is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (is.gcount() != static_cast<std::streamsize>(buf.size())) {
            throw InvalidInput("feature file: truncated at row " + std::to_string(r));
        }
        for (std::uint32_t c = 0; c < dim; ++c) {
            const unsigned char* p = buf.data() + 4 * c;
            const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                                       (static_cast<std::uint32_t>(p[2]) << 16) |
                                       (static_cast<std::uint32_t>(p[3]) << 24);
            rows(r, c) = static_cast<double>(std::bit_cast<float>(bits));
        }
    }
    return rows;
}

void write_feature_csv(std::ostream& os, const LabeledFeatureSet& data) {
    os << "label";
    for (std::size_t c = 0; c < data.dim(); ++c) os << ",f" << c;
    os << '\n';
    // Shortest text that reads back to the same double, so CSV is lossless.
    char buf[32];
    for (std::size_t r = 0; r < data.size(); ++r) {
        os << name(data.labels[r]);
        for (Eigen::Index c = 0; c < data.features.cols(); ++c) {
            const auto res = std::to_chars(buf, buf + sizeof buf, data.features(static_cast<Eigen::Index>(r), c));
            os << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
        }
        os << '\n';
    }
}

LabeledFeatureSet read_feature_csv(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line)) throw ParseError("empty feature CSV", 1);
    ++line_no;
    line = trim_cr(line);
    if (line.rfind("label", 0) != 0) throw ParseError("feature CSV must start with a 'label' header", line_no);
    std::size_t dim = 0;
    for (char ch : line) dim += ch == ',';

    std::vector<std::vector<double>> rows;
    LabeledFeatureSet out;
    while (std::getline(is, line)) {
        ++line_no;
        line = trim_cr(line);
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        try {
            out.labels.push_back(parse_label(cell));
        } catch (const InvalidInput& e) {
            throw ParseError(e.what(), line_no);
        }
        std::vector<double> row;
        row.reserve(dim);
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ParseError("invalid number '" + cell + "'", line_no);
            }
        }
        if (row.size() != dim) {
            throw ParseError("expected " + std::to_string(dim) + " values, got " + std::to_string(row.size()), line_no);
        }
        rows.push_back(std::move(row));
    }
    out.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            out.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return out;
}

void write_labels(std::ostream& os, const std::vector<Label>& labels) {
    for (Label l : labels) os << name(l) << '\n';
}

std::vector<Label> read_labels(std::istream& is) {
    std::vector<Label> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        line = trim_cr(line);
        if (line.empty()) continue;
        try {
            labels.push_back(parse_label(line));
        } catch (const InvalidInput& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return labels;
}

}  // namespace planeguard
