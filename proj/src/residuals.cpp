#include "planeguard/residuals.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <string>

#include "planeguard/error.hpp"

namespace planeguard {
namespace {

struct Offset {
    int di;
    int dj;
};

Offset offset_of(Direction d) {
    switch (d) {
        case Direction::E: return {0, 1};
        case Direction::W: return {0, -1};
        case Direction::N: return {-1, 0};
        case Direction::S: return {1, 0};
        case Direction::NE: return {-1, 1};
        case Direction::NW: return {-1, -1};
        case Direction::SE: return {1, 1};
        case Direction::SW: return {1, -1};
    }
    throw InvalidArgument("unknown direction");
}

Offset offset_of(Axis a) {
    switch (a) {
        case Axis::H: return {0, 1};
        case Axis::V: return {1, 0};
        case Axis::D: return {1, 1};
        case Axis::M: return {1, -1};
    }
    throw InvalidArgument("unknown axis");
}

Axis axis_of(Direction d) {
    switch (d) {
        case Direction::E:
        case Direction::W: return Axis::H;
        case Direction::N:
        case Direction::S: return Axis::V;
        case Direction::NW:
        case Direction::SE: return Axis::D;
        case Direction::NE:
        case Direction::SW: return Axis::M;
    }
    throw InvalidArgument("unknown direction");
}

Stencil grid_stencil(const std::vector<std::vector<int>>& grid, int anchor_row, int anchor_col, int order) {
    Stencil s;
    s.order = order;
    for (int r = 0; r < static_cast<int>(grid.size()); ++r) {
        for (int c = 0; c < static_cast<int>(grid[r].size()); ++c) {
            if (grid[r][c] != 0) s.taps.push_back({r - anchor_row, c - anchor_col, grid[r][c]});
        }
    }
    return s;
}

// Rotate a stencil by 90 degrees clockwise: (di, dj) -> (dj, -di).
Stencil rotate_cw(Stencil s) {
    for (auto& t : s.taps) t = {t.dj, -t.di, t.coef};
    return s;
}

ResidualMap apply_region(const GrayImage& img, const Stencil& stencil, int top, int bottom, int left, int right) {
    const auto h = static_cast<long>(img.height());
    const auto w = static_cast<long>(img.width());
    const long rows = h - top - bottom;
    const long cols = w - left - right;
    if (rows <= 0 || cols <= 0) {
        throw DegenerateInput("image " + std::to_string(w) + "x" + std::to_string(h) +
                              " is smaller than the residual stencil support");
    }
    ResidualMap map;
    map.rows = static_cast<std::size_t>(rows);
    map.cols = static_cast<std::size_t>(cols);
    map.origin_row = static_cast<std::size_t>(top);
    map.origin_col = static_cast<std::size_t>(left);
    map.values.assign(map.rows * map.cols, 0);

    const auto px = img.pixels();
    for (const Tap& t : stencil.taps) {
        for (long r = 0; r < rows; ++r) {
            const std::uint8_t* src = px.data() + (r + top + t.di) * w + left + t.dj;
            std::int32_t* dst = map.values.data() + r * cols;
            for (long c = 0; c < cols; ++c) dst[c] += t.coef * static_cast<std::int32_t>(src[c]);
        }
    }
    return map;
}

}  // namespace

int Stencil::reach() const {
    int r = 0;
    for (const auto& t : taps) r = std::max({r, std::abs(t.di), std::abs(t.dj)});
    return r;
}

int Stencil::l1_norm() const {
    int n = 0;
    for (const auto& t : taps) n += std::abs(t.coef);
    return n;
}

Direction reverse(Direction d) {
    switch (d) {
        case Direction::E: return Direction::W;
        case Direction::W: return Direction::E;
        case Direction::N: return Direction::S;
        case Direction::S: return Direction::N;
        case Direction::NE: return Direction::SW;
        case Direction::NW: return Direction::SE;
        case Direction::SE: return Direction::NW;
        case Direction::SW: return Direction::NE;
    }
    throw InvalidArgument("unknown direction");
}

std::string_view name(Direction d) {
    switch (d) {
        case Direction::E: return "E";
        case Direction::W: return "W";
        case Direction::N: return "N";
        case Direction::S: return "S";
        case Direction::NE: return "NE";
        case Direction::NW: return "NW";
        case Direction::SE: return "SE";
        case Direction::SW: return "SW";
    }
    return "?";
}

std::string_view name(Axis a) {
    switch (a) {
        case Axis::H: return "h";
        case Axis::V: return "v";
        case Axis::D: return "d";
        case Axis::M: return "m";
    }
    return "?";
}

std::string_view name(KernelKind k) {
    switch (k) {
        case KernelKind::Square3: return "SQUARE3";
        case KernelKind::Square5: return "SQUARE5";
        case KernelKind::Edge3N: return "EDGE3_N";
        case KernelKind::Edge3S: return "EDGE3_S";
        case KernelKind::Edge3E: return "EDGE3_E";
        case KernelKind::Edge3W: return "EDGE3_W";
    }
    return "?";
}

Stencil directional_stencil(int order, Direction d) {
    const auto [di, dj] = offset_of(d);
    switch (order) {
        case 1: return Stencil{{{0, 0, -1}, {di, dj, 1}}, 1};
        case 2: return axial_stencil(axis_of(d));
        case 3: return Stencil{{{-di, -dj, -1}, {0, 0, 3}, {di, dj, -3}, {2 * di, 2 * dj, 1}}, 3};
        default: throw InvalidArgument("residual order must be 1, 2 or 3, got " + std::to_string(order));
    }
}

Stencil axial_stencil(Axis a) {
    const auto [di, dj] = offset_of(a);
    return Stencil{{{-di, -dj, 1}, {0, 0, -2}, {di, dj, 1}}, 2};
}

Stencil kernel_stencil(KernelKind kind) {
    static const std::vector<std::vector<int>> kSquare3 = {{-1, 2, -1}, {2, -4, 2}, {-1, 2, -1}};
    static const std::vector<std::vector<int>> kSquare5 = {{-1, 2, -2, 2, -1},
                                                           {2, -6, 8, -6, 2},
                                                           {-2, 8, -12, 8, -2},
                                                           {2, -6, 8, -6, 2},
                                                           {-1, 2, -2, 2, -1}};
    static const std::vector<std::vector<int>> kEdge3N = {{-1, 2, -1}, {2, -4, 2}};
    switch (kind) {
        case KernelKind::Square3: return grid_stencil(kSquare3, 1, 1, 4);
        case KernelKind::Square5: return grid_stencil(kSquare5, 2, 2, 12);
        case KernelKind::Edge3N: return grid_stencil(kEdge3N, 1, 1, 4);
        case KernelKind::Edge3E: return rotate_cw(grid_stencil(kEdge3N, 1, 1, 4));
        case KernelKind::Edge3S: return rotate_cw(rotate_cw(grid_stencil(kEdge3N, 1, 1, 4)));
        case KernelKind::Edge3W: return rotate_cw(rotate_cw(rotate_cw(grid_stencil(kEdge3N, 1, 1, 4))));
    }
    throw InvalidArgument("unknown kernel kind");
}

ResidualMap apply_stencil(const GrayImage& img, const Stencil& stencil) {
    int top = 0, bottom = 0, left = 0, right = 0;
    for (const auto& t : stencil.taps) {
        top = std::max(top, -t.di);
        bottom = std::max(bottom, t.di);
        left = std::max(left, -t.dj);
        right = std::max(right, t.dj);
    }
    return apply_region(img, stencil, top, bottom, left, right);
}

ResidualMap apply_stencil(const GrayImage& img, const Stencil& stencil, int margin) {
    if (margin < stencil.reach()) {
        throw InvalidArgument("margin " + std::to_string(margin) + " is smaller than the stencil reach " +
                              std::to_string(stencil.reach()));
    }
    return apply_region(img, stencil, margin, margin, margin, margin);
}

ResidualMap directional_residual(const GrayImage& img, int order, Direction d) {
    return apply_stencil(img, directional_stencil(order, d));
}

ResidualMap directional_residual(const GrayImage& img, Axis a) { return apply_stencil(img, axial_stencil(a)); }

ResidualMap kernel_residual(const GrayImage& img, KernelKind kind) { return apply_stencil(img, kernel_stencil(kind)); }

void write_residual_text(std::ostream& os, const ResidualMap& map) {
    os << "RESIDUAL " << map.rows << ' ' << map.cols << ' ' << map.origin_row << ' ' << map.origin_col << '\n';
    for (std::size_t r = 0; r < map.rows; ++r) {
        for (std::size_t c = 0; c < map.cols; ++c) {
            if (c) os << ' ';
            os << map.at(r, c);
        }
        os << '\n';
    }
}

}  // namespace planeguard
