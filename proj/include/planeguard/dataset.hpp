#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "planeguard/classifier.hpp"
#include "planeguard/image.hpp"

namespace planeguard {

struct ManifestEntry {
    std::filesystem::path path;
    Label label = Label::Authentic;
    std::string content_class;  // optional
    std::string group;          // optional; entries sharing a group never straddle a split
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    std::size_t size() const { return entries.size(); }
    std::size_t count(Label label) const;
};

/// Manifest CSV: `path,label[,class][,group]`, optional header row. Relative
/// paths resolve against `base_dir`.
DatasetManifest parse_manifest(std::istream& is, const std::filesystem::path& base_dir);
DatasetManifest ingest_manifest(const std::filesystem::path& csv_path);
/// Paths are written relative to `base_dir` when they lie below it.
void write_manifest(std::ostream& os, const DatasetManifest& manifest, const std::filesystem::path& base_dir);

struct SplitIndices {
    std::vector<std::size_t> train;  // ascending manifest indices
    std::vector<std::size_t> test;
};

/// Deterministic label-stratified split that keeps groups intact. Each label
/// gets round(ratio * count) training entries when no group forces otherwise.
SplitIndices split(const DatasetManifest& manifest, double ratio, std::uint64_t seed);

// ---- synthetic stand-in for a splicing benchmark --------------------------

struct SynthParams {
    double noise_sigma = 24.0;        // white noise before blurring
    double blur_sigma = 1.5;          // authentic content
    double donor_blur_sigma = 0.5;    // spliced-in content
    double fine_noise_sigma = 2.0;    // added after blurring
    double gradient_amplitude = 60.0; // peak-to-peak of the low-frequency ramp
    std::size_t min_patch = 16;
    std::size_t max_patch = 64;
};

struct PatchRect {
    std::size_t row = 0;
    std::size_t col = 0;
    std::size_t side = 0;
};

struct TamperedSample {
    GrayImage base;      // authentic image the splice was pasted into
    GrayImage tampered;
    PatchRect patch;
};

GrayImage synthesize_authentic(std::uint64_t seed, std::size_t size, double blur_sigma,
                               const SynthParams& params = {});
TamperedSample synthesize_tampered(std::uint64_t seed, std::size_t size, const SynthParams& params = {});

struct SyntheticDataset {
    DatasetManifest manifest;
    std::vector<GrayImage> images;  // parallel to manifest.entries
};

/// n_per_class authentic images followed by n_per_class tampered ones. Every
/// image has its own content; no tampered base appears as an authentic entry.
SyntheticDataset synthesize_dataset(std::uint64_t seed, std::size_t n_per_class, std::size_t size,
                                    const SynthParams& params = {});

/// Writes the images as PGM plus `manifest.csv` into out_dir.
DatasetManifest write_synthetic_dataset(const SyntheticDataset& data, const std::filesystem::path& out_dir);

}  // namespace planeguard
