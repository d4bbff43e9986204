#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace planeguard {

/// 8-bit grayscale raster, row-major. Row index i in [0, height),
/// column index j in [0, width).
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(std::size_t width, std::size_t height, std::uint8_t fill = 0);
    GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    bool empty() const noexcept { return pixels_.empty(); }

    std::uint8_t at(std::size_t i, std::size_t j) const { return pixels_[i * width_ + j]; }
    std::uint8_t& at(std::size_t i, std::size_t j) { return pixels_[i * width_ + j]; }

    std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
    std::span<std::uint8_t> pixels() noexcept { return pixels_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// 8-bit interleaved raster with an arbitrary channel count. Only
/// three-channel RGB is accepted by to_luminance.
struct ColorImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 0;
    std::vector<std::uint8_t> data;
};

GrayImage rotate180(const GrayImage& img);
GrayImage invert(const GrayImage& img);

}  // namespace planeguard
