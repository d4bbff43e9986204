#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "planeguard/image.hpp"

namespace planeguard {

// Offsets are (row, column); N points to row - 1, E to column + 1.
enum class Direction { E, W, N, S, NE, NW, SE, SW };

// Second-order axes: h horizontal, v vertical, d main diagonal (NW-SE),
// m minor diagonal (NE-SW).
enum class Axis { H, V, D, M };

enum class KernelKind { Square3, Square5, Edge3N, Edge3S, Edge3E, Edge3W };

struct Tap {
    int di;
    int dj;
    int coef;
};

/// Zero-sum integer filter. `order` is the normalizing coefficient c used as
/// the quantization step.
struct Stencil {
    std::vector<Tap> taps;
    int order = 1;

    int reach() const;  // max |offset| over all taps
    int l1_norm() const;
};

/// Signed residuals over a rectangular region of the source image.
/// Element (r, c) belongs to source pixel (origin_row + r, origin_col + c).
struct ResidualMap {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t origin_row = 0;
    std::size_t origin_col = 0;
    std::vector<std::int32_t> values;

    std::int32_t at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

    friend bool operator==(const ResidualMap&, const ResidualMap&) = default;
};

Direction reverse(Direction d);
std::string_view name(Direction d);
std::string_view name(Axis a);
std::string_view name(KernelKind k);

Stencil directional_stencil(int order, Direction d);
Stencil axial_stencil(Axis a);
Stencil kernel_stencil(KernelKind kind);

/// Residual over the valid region: every pixel whose full stencil support
/// lies inside the image.
ResidualMap apply_stencil(const GrayImage& img, const Stencil& stencil);

/// Residual over the region that leaves `margin` pixels on every side.
/// Requires margin >= stencil.reach(). Maps computed with the same margin
/// share one pixel grid, so they can be combined elementwise.
ResidualMap apply_stencil(const GrayImage& img, const Stencil& stencil, int margin);

/// Orders 1 and 3 use the direction as given; order 2 uses the axis the
/// direction lies on.
ResidualMap directional_residual(const GrayImage& img, int order, Direction d);
ResidualMap directional_residual(const GrayImage& img, Axis a);
ResidualMap kernel_residual(const GrayImage& img, KernelKind kind);

/// Text dump: "RESIDUAL rows cols origin_row origin_col" then one row per line.
void write_residual_text(std::ostream& os, const ResidualMap& map);

}  // namespace planeguard
