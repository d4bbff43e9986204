#include "planeguard/image.hpp"

#include <algorithm>
#include <string>

#include "planeguard/error.hpp"

namespace planeguard {

GrayImage::GrayImage(std::size_t width, std::size_t height, std::uint8_t fill)
    : width_(width), height_(height), pixels_(width * height, fill) {}

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (pixels_.size() != width_ * height_) {
        throw InvalidInput("pixel count " + std::to_string(pixels_.size()) + " does not match " +
                           std::to_string(width_) + "x" + std::to_string(height_));
    }
}

GrayImage rotate180(const GrayImage& img) {
    std::vector<std::uint8_t> out(img.pixels().begin(), img.pixels().end());
    std::reverse(out.begin(), out.end());
    return GrayImage(img.width(), img.height(), std::move(out));
}

GrayImage invert(const GrayImage& img) {
    GrayImage out = img;
    for (auto& p : out.pixels()) p = static_cast<std::uint8_t>(255 - p);
    return out;
}

}  // namespace planeguard
