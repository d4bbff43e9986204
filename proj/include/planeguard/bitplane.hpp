#pragma once

#include "planeguard/image.hpp"
#include "planeguard/keystream.hpp"

namespace planeguard {

/// Key, nonce and the number of most significant bitplanes to encrypt.
/// Bit index k = 0 is the MSB (weight 2^(7-k)).
struct EncryptionParams {
    KeystreamSpec stream;
    int planes = 0;
};

/// Rec.601 luma with integer rounding: round(0.299 R + 0.587 G + 0.114 B).
GrayImage to_luminance(const ColorImage& rgb);

/// XORs bits k = 0..s-1 of every pixel with keystream bits. Keystream bit t
/// maps to plane k = t / (m n) and raster position t mod (m n).
/// Applying it twice with the same params restores the input.
GrayImage encrypt_planes(const GrayImage& img, const EncryptionParams& params);

/// (p << s) >> s in 8-bit registers, i.e. p & (0xFF >> s).
GrayImage zero_planes(const GrayImage& img, int s);

/// (p << s) mod 256: moves the clear planes to the top of the byte.
GrayImage shift_planes(const GrayImage& img, int s);

void check_plane_count(int s);

}  // namespace planeguard
