#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>

#include "planeguard/image.hpp"

namespace planeguard {

/// Binary PGM (P5, maxval 255).
GrayImage read_pgm(std::istream& is);
void write_pgm(std::ostream& os, const GrayImage& img);

/// 8-bit grayscale or RGB PNG; RGB is converted to luminance. Other bit
/// depths and color types are rejected.
GrayImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const GrayImage& img);

/// Dispatches on the file signature (P5 or PNG).
GrayImage read_image(const std::filesystem::path& path);

/// Writes PNG for a .png extension, PGM otherwise. Atomic.
void write_image(const std::filesystem::path& path, const GrayImage& img);

/// Writes through a sibling temporary file and renames it into place, so
/// a failed write leaves no partial output.
void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);

}  // namespace planeguard
