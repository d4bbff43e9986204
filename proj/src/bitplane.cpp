#include "planeguard/bitplane.hpp"

#include <string>
#include <vector>

#include "planeguard/error.hpp"

namespace planeguard {

void check_plane_count(int s) {
    if (s < 0 || s > 8) throw InvalidArgument("plane count s must be in [0, 8], got " + std::to_string(s));
}

GrayImage to_luminance(const ColorImage& rgb) {
    if (rgb.channels != 3) {
        throw InvalidInput("luminance conversion needs 3 channels, got " + std::to_string(rgb.channels));
    }
    const std::size_t n = rgb.width * rgb.height;
    if (rgb.data.size() != n * 3) throw InvalidInput("color raster size does not match its dimensions");
    std::vector<std::uint8_t> out(n);
    for (std::size_t p = 0; p < n; ++p) {
        const unsigned r = rgb.data[3 * p], g = rgb.data[3 * p + 1], b = rgb.data[3 * p + 2];
        // Exact integer evaluation of the rounded weighted sum; never exceeds 255.
        out[p] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
    }
    return GrayImage(rgb.width, rgb.height, std::move(out));
}

GrayImage encrypt_planes(const GrayImage& img, const EncryptionParams& params) {
    check_plane_count(params.planes);
    GrayImage out = img;
    const std::size_t n = img.size();
    const auto s = static_cast<std::size_t>(params.planes);
    if (s == 0 || n == 0) return out;

    const auto bytes = keystream_bytes(params.stream, (s * n + 7) / 8);
    auto px = out.pixels();
    for (std::size_t k = 0; k < s; ++k) {
        const std::size_t base = k * n;
        const auto plane_bit = static_cast<std::uint8_t>(0x80u >> k);
        for (std::size_t p = 0; p < n; ++p) {
            const std::size_t t = base + p;
            if ((bytes[t >> 3] >> (7 - (t & 7))) & 1u) px[p] ^= plane_bit;
        }
    }
    return out;
}

GrayImage zero_planes(const GrayImage& img, int s) {
    check_plane_count(s);
    GrayImage out = img;
    for (auto& p : out.pixels()) p = static_cast<std::uint8_t>(static_cast<std::uint8_t>(p << s) >> s);
    return out;
}

GrayImage shift_planes(const GrayImage& img, int s) {
    check_plane_count(s);
    GrayImage out = img;
    for (auto& p : out.pixels()) p = static_cast<std::uint8_t>(p << s);
    return out;
}

}  // namespace planeguard
