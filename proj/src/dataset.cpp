#include "planeguard/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "planeguard/error.hpp"
#include "planeguard/image_io.hpp"
#include "planeguard/rng.hpp"

namespace planeguard {
namespace fs = std::filesystem;
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    for (auto& c : cells) {
        const auto b = c.find_first_not_of(" \t");
        const auto e = c.find_last_not_of(" \t\r");
        c = b == std::string::npos ? std::string() : c.substr(b, e - b + 1);
    }
    return cells;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over (seed, stream)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> k(2 * radius + 1);
    double sum = 0;
    for (int t = -radius; t <= radius; ++t) {
        k[t + radius] = std::exp(-0.5 * t * t / (sigma * sigma));
        sum += k[t + radius];
    }
    for (auto& v : k) v /= sum;
    return k;
}

std::size_t mirror(long idx, long n) {
    while (idx < 0 || idx >= n) idx = idx < 0 ? -idx - 1 : 2 * n - idx - 1;
    return static_cast<std::size_t>(idx);
}

// Separable Gaussian blur with symmetric boundary extension.
std::vector<double> blur(const std::vector<double>& field, std::size_t n, double sigma) {
    const auto k = gaussian_kernel(sigma);
    const long radius = static_cast<long>(k.size() / 2);
    const long ln = static_cast<long>(n);
    std::vector<double> tmp(field.size()), out(field.size());
    for (long i = 0; i < ln; ++i) {
        for (long j = 0; j < ln; ++j) {
            double acc = 0;
            for (long t = -radius; t <= radius; ++t) acc += k[t + radius] * field[i * ln + mirror(j + t, ln)];
            tmp[i * ln + j] = acc;
        }
    }
    for (long i = 0; i < ln; ++i) {
        for (long j = 0; j < ln; ++j) {
            double acc = 0;
            for (long t = -radius; t <= radius; ++t) acc += k[t + radius] * tmp[mirror(i + t, ln) * ln + j];
            out[i * ln + j] = acc;
        }
    }
    return out;
}

}  // namespace

std::size_t DatasetManifest::count(Label label) const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [label](const ManifestEntry& e) { return e.label == label; }));
}

DatasetManifest parse_manifest(std::istream& is, const fs::path& base_dir) {
    DatasetManifest manifest;
    std::string line;
    std::size_t line_no = 0;
    int col_path = 0, col_label = 1, col_class = 2, col_group = 3;
    bool first = true;
    std::set<std::string> seen;
    while (std::getline(is, line)) {
        ++line_no;
        auto cells = split_csv_line(line);
        if (cells.empty() || (cells.size() == 1 && cells[0].empty())) continue;
        if (first) {
            first = false;
            // A data row never has "path" or "label" as a cell value in the
            // label column, so either name marks a header.
            if (std::find(cells.begin(), cells.end(), "path") != cells.end() ||
                std::find(cells.begin(), cells.end(), "label") != cells.end()) {
                col_path = col_label = col_class = col_group = -1;
                for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
                    if (cells[c] == "label") col_label = c;
                    else if (cells[c] == "class") col_class = c;
                    else if (cells[c] == "group") col_group = c;
                    else if (cells[c] == "path") col_path = c;
                    else throw ParseError("unknown manifest column '" + cells[c] + "'", line_no);
                }
                if (col_path < 0 || col_label < 0) {
                    throw ParseError("manifest header needs 'path' and 'label' columns", line_no);
                }
                continue;
            }
        }
        if (cells.size() < 2 || cells.size() > 4) {
            throw ParseError("manifest rows need 2 to 4 columns, got " + std::to_string(cells.size()), line_no);
        }
        auto cell = [&](int c) { return c >= 0 && c < static_cast<int>(cells.size()) ? cells[c] : std::string(); };
        ManifestEntry e;
        if (cell(col_path).empty()) throw ParseError("empty path", line_no);
        fs::path p(cell(col_path));
        e.path = p.is_absolute() ? p : base_dir / p;
        e.path = e.path.lexically_normal();
        try {
            e.label = parse_label(cell(col_label));
        } catch (const InvalidInput& err) {
            throw ParseError(err.what(), line_no);
        }
        e.content_class = cell(col_class);
        e.group = cell(col_group);
        if (!seen.insert(e.path.string()).second) {
            throw ParseError("duplicate path '" + e.path.string() + "'", line_no);
        }
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

DatasetManifest ingest_manifest(const fs::path& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw IoError("cannot open manifest " + csv_path.string());
    return parse_manifest(in, csv_path.parent_path());
}

void write_manifest(std::ostream& os, const DatasetManifest& manifest, const fs::path& base_dir) {
    bool has_class = false, has_group = false;
    for (const auto& e : manifest.entries) {
        has_class |= !e.content_class.empty();
        has_group |= !e.group.empty();
    }
    os << "path,label" << (has_class ? ",class" : "") << (has_group ? ",group" : "") << '\n';
    for (const auto& e : manifest.entries) {
        fs::path p = e.path;
        if (!base_dir.empty()) {
            const auto rel = e.path.lexically_relative(base_dir);
            if (!rel.empty() && *rel.begin() != "..") p = rel;
        }
        os << p.generic_string() << ',' << name(e.label);
        if (has_class) os << ',' << e.content_class;
        if (has_group) os << ',' << e.group;
        os << '\n';
    }
}

SplitIndices split(const DatasetManifest& manifest, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("split ratio must lie in (0, 1)");

    // Units: one per group id, one per ungrouped entry, in first-appearance order.
    std::vector<std::vector<std::size_t>> units;
    std::map<std::string, std::size_t> unit_of_group;
    for (std::size_t i = 0; i < manifest.size(); ++i) {
        const auto& g = manifest.entries[i].group;
        if (g.empty()) {
            units.push_back({i});
            continue;
        }
        auto [it, inserted] = unit_of_group.emplace(g, units.size());
        if (inserted) units.emplace_back();
        units[it->second].push_back(i);
    }

    std::map<Label, std::size_t> target, total;
    for (Label l : {Label::Authentic, Label::Tampered}) {
        total[l] = manifest.count(l);
        if (total[l] == 0) continue;
        if (total[l] < 2) {
            throw InvalidSplit("label '" + std::string(name(l)) + "' has " + std::to_string(total[l]) +
                               " entries; a split needs at least 2");
        }
        const auto t = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(total[l]) + 0.5));
        target[l] = std::clamp<std::size_t>(t, 1, total[l] - 1);
    }

    Rng rng(seed);
    std::vector<std::size_t> order(units.size());
    for (std::size_t u = 0; u < order.size(); ++u) order[u] = u;
    rng.shuffle(order);

    std::map<Label, std::size_t> in_train;
    SplitIndices out;
    for (std::size_t u : order) {
        std::map<Label, std::size_t> need;
        for (std::size_t i : units[u]) ++need[manifest.entries[i].label];
        bool fits = true;
        for (const auto& [l, c] : need) fits &= in_train[l] + c <= target[l];
        auto& side = fits ? out.train : out.test;
        if (fits) {
            for (const auto& [l, c] : need) in_train[l] += c;
        }
        side.insert(side.end(), units[u].begin(), units[u].end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());

    for (Label l : {Label::Authentic, Label::Tampered}) {
        if (total[l] == 0) continue;
        const std::size_t tr = in_train[l];
        if (tr == 0 || tr == total[l]) {
            throw InvalidSplit("groups leave label '" + std::string(name(l)) + "' on one side of the split");
        }
    }
    return out;
}

GrayImage synthesize_authentic(std::uint64_t seed, std::size_t size, double blur_sigma, const SynthParams& params) {
    if (size < 64) throw InvalidArgument("synthetic images must be at least 64x64");
    Rng rng(seed);
    std::vector<double> field(size * size);
    for (auto& v : field) v = params.noise_sigma * rng.normal();
    field = blur(field, size, blur_sigma);

    // Random low-frequency ramp through the image center.
    const double angle = 2.0 * 3.14159265358979323846 * rng.uniform();
    const double amp = params.gradient_amplitude * (0.5 + 0.5 * rng.uniform());
    const double mean = 96.0 + 64.0 * rng.uniform();
    const double gx = std::cos(angle) * amp / static_cast<double>(size);
    const double gy = std::sin(angle) * amp / static_cast<double>(size);
    const double half = 0.5 * static_cast<double>(size - 1);

    std::vector<std::uint8_t> px(size * size);
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) {
            const double v = field[i * size + j] + params.fine_noise_sigma * rng.normal() + mean +
                             gx * (static_cast<double>(j) - half) + gy * (static_cast<double>(i) - half);
            px[i * size + j] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    }
    return GrayImage(size, size, std::move(px));
}

TamperedSample synthesize_tampered(std::uint64_t seed, std::size_t size, const SynthParams& params) {
    Rng rng(seed);
    TamperedSample out;
    out.base = synthesize_authentic(rng.next(), size, params.blur_sigma, params);
    const GrayImage donor = synthesize_authentic(rng.next(), size, params.donor_blur_sigma, params);

    const std::size_t max_side = std::min(params.max_patch, size);
    out.patch.side = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(params.min_patch),
                                                          static_cast<std::int64_t>(max_side)));
    const auto span = static_cast<std::int64_t>(size - out.patch.side);
    out.patch.row = static_cast<std::size_t>(rng.between(0, span));
    out.patch.col = static_cast<std::size_t>(rng.between(0, span));
    const auto src_row = static_cast<std::size_t>(rng.between(0, span));
    const auto src_col = static_cast<std::size_t>(rng.between(0, span));

    out.tampered = out.base;
    for (std::size_t i = 0; i < out.patch.side; ++i) {
        for (std::size_t j = 0; j < out.patch.side; ++j) {
            out.tampered.at(out.patch.row + i, out.patch.col + j) = donor.at(src_row + i, src_col + j);
        }
    }
    return out;
}

SyntheticDataset synthesize_dataset(std::uint64_t seed, std::size_t n_per_class, std::size_t size,
                                    const SynthParams& params) {
    if (n_per_class < 10) throw InvalidArgument("synthetic datasets need at least 10 images per class");
    if (size < 64) throw InvalidArgument("synthetic images must be at least 64x64");
    SyntheticDataset data;
    data.images.reserve(2 * n_per_class);
    for (std::size_t i = 0; i < n_per_class; ++i) {
        data.images.push_back(synthesize_authentic(mix_seed(seed, 2 * i), size, params.blur_sigma, params));
        char name[64];
        std::snprintf(name, sizeof name, "authentic_%05zu.pgm", i);
        data.manifest.entries.push_back({name, Label::Authentic, {}, {}});
    }
    for (std::size_t i = 0; i < n_per_class; ++i) {
        data.images.push_back(synthesize_tampered(mix_seed(seed, 2 * i + 1), size, params).tampered);
        char name[64];
        std::snprintf(name, sizeof name, "tampered_%05zu.pgm", i);
        data.manifest.entries.push_back({name, Label::Tampered, {}, {}});
    }
    return data;
}

DatasetManifest write_synthetic_dataset(const SyntheticDataset& data, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    DatasetManifest manifest = data.manifest;
    for (std::size_t i = 0; i < data.images.size(); ++i) {
        manifest.entries[i].path = out_dir / data.manifest.entries[i].path.filename();
        write_image(manifest.entries[i].path, data.images[i]);
    }
    write_file_atomic(out_dir / "manifest.csv",
                      [&](std::ostream& os) { write_manifest(os, manifest, out_dir); });
    return manifest;
}

}  // namespace planeguard
