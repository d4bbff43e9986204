#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "planeguard/image.hpp"
#include "planeguard/residuals.hpp"

namespace planeguard {

inline constexpr int kTruncation = 2;
inline constexpr std::size_t kCoocBins = 625;  // 5^4
inline constexpr std::size_t kSpamOrbits = 169;
inline constexpr std::size_t kMinmaxOrbits = 325;
inline constexpr std::size_t kSpamDim = 2 * kSpamOrbits;
inline constexpr std::size_t kMinmaxDim = kMinmaxOrbits;
inline constexpr std::size_t kFeatureDim = 12753;
inline constexpr std::size_t kMinImageSide = 20;  // 16 after the widest margin

/// Residuals mapped to {-T..T}.
struct QuantizedResidualMap {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::int8_t> values;
    int q = 1;

    std::int8_t at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

enum class Scan { Horizontal, Vertical };

/// Counts of 4-tuples (d1, d2, d3, d4) in {-2..2}^4. Bin index is the base-5
/// number with digits d+2, d1 most significant, so index order is
/// lexicographic order.
struct CoocHistogram {
    std::array<std::uint64_t, kCoocBins> counts{};
    std::uint64_t group_count = 0;

    CoocHistogram& operator+=(const CoocHistogram& other);
};

std::size_t quad_index(int d1, int d2, int d3, int d4);
std::array<int, 4> quad_from_index(std::size_t index);

/// clamp(round_half_away_from_zero(r / q), -T, T)
std::int8_t quantize_value(std::int32_t r, int q, int T = kTruncation);
QuantizedResidualMap quantize_truncate(const ResidualMap& map, int q, int T = kTruncation);

/// Slides a length-4 window with stride 1 along every row or column.
CoocHistogram cooccurrence4(const QuantizedResidualMap& qmap, Scan scan);

/// Orbit of each bin under {id, negate, reverse, negate+reverse}, numbered in
/// order of the orbit's lexicographically smallest member.
const std::array<std::uint16_t, kCoocBins>& spam_orbit_table();
/// Orbit of each bin under reversal, after bin d of the max histogram has
/// been folded onto bin -d of the min histogram.
const std::array<std::uint16_t, kCoocBins>& minmax_orbit_table();

/// Sign and direction symmetrization of one scan direction each; output is
/// the L1-normalized horizontal block followed by the vertical block.
std::vector<double> symmetrize_spam(const CoocHistogram& hist_h, const CoocHistogram& hist_v);

/// merged(d) = min(d) + max(-d), then reversal symmetrization, L1-normalized.
std::vector<double> symmetrize_minmax(const CoocHistogram& hist_min, const CoocHistogram& hist_max);

enum class SubmodelType { Spam, MinMax };

struct SubmodelSpec {
    std::string id;
    SubmodelType type;
    int q;  // quantizer, equal to the residual normalizer
    std::size_t offset;
    std::size_t dim;
};

/// Frozen roster: 6 spam submodels then 33 minmax submodels.
std::span<const SubmodelSpec> roster();

/// FNV-1a 64-bit digest of the roster manifest (ids, offsets, dims, q).
std::uint64_t roster_hash();

struct FeatureVector {
    std::vector<double> values;

    std::span<const SubmodelSpec> manifest() const { return roster(); }
};

/// Zeroes the s MSB planes, then computes every roster submodel. s = 8 is
/// allowed and yields the all-zero-residual vector.
FeatureVector extract_features(const GrayImage& img, int s);

}  // namespace planeguard
