#include "planeguard/features.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "planeguard/bitplane.hpp"
#include "planeguard/error.hpp"

namespace planeguard {
namespace {

std::size_t negate_index(std::size_t idx) { return kCoocBins - 1 - idx; }

std::size_t reverse_index(std::size_t idx) {
    const auto d = quad_from_index(idx);
    return quad_index(d[3], d[2], d[1], d[0]);
}

template <typename RepFn>
std::array<std::uint16_t, kCoocBins> build_orbit_table(RepFn representative) {
    std::array<std::size_t, kCoocBins> rep{};
    for (std::size_t i = 0; i < kCoocBins; ++i) rep[i] = representative(i);
    std::vector<std::size_t> reps(rep.begin(), rep.end());
    std::sort(reps.begin(), reps.end());
    reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
    std::array<std::uint16_t, kCoocBins> table{};
    for (std::size_t i = 0; i < kCoocBins; ++i) {
        table[i] = static_cast<std::uint16_t>(std::lower_bound(reps.begin(), reps.end(), rep[i]) - reps.begin());
    }
    return table;
}

// ---- roster -------------------------------------------------------------

constexpr std::array<Direction, 8> kDirections = {Direction::E,  Direction::W,  Direction::N,  Direction::S,
                                                  Direction::NE, Direction::NW, Direction::SE, Direction::SW};
constexpr std::array<Axis, 4> kAxes = {Axis::H, Axis::V, Axis::D, Axis::M};

using Mask = unsigned;

Mask dir_mask(std::initializer_list<Direction> ds) {
    Mask m = 0;
    for (auto d : ds) m |= 1u << static_cast<unsigned>(std::find(kDirections.begin(), kDirections.end(), d) - kDirections.begin());
    return m;
}

Mask axis_mask(std::initializer_list<Axis> as) {
    Mask m = 0;
    for (auto a : as) m |= 1u << static_cast<unsigned>(std::find(kAxes.begin(), kAxes.end(), a) - kAxes.begin());
    return m;
}

enum class SpamSource { Order1E, Order2H, Order3E, Square3, Square5, Edge3 };

struct Contribution {
    Mask members;
    Scan scan;
};

// A minmax slot accumulates min/max co-occurrences of every contribution.
struct MinmaxPlan {
    int order;
    std::string label;
    std::vector<Contribution> parts;
};

struct RosterPlan {
    std::vector<SubmodelSpec> specs;
    std::vector<SpamSource> spam;
    std::vector<MinmaxPlan> minmax;
};

std::string set_label(Mask m, int order) {
    std::string s;
    for (unsigned b = 0; b < 8; ++b) {
        if (!(m & (1u << b))) continue;
        if (!s.empty()) s += '+';
        s += order == 2 ? std::string(name(kAxes[b])) : std::string(name(kDirections[b]));
    }
    return s;
}

void add_directional_sets(RosterPlan& plan, int order) {
    using D = Direction;
    const Mask all = 0xFFu;
    const std::vector<Mask> symmetric = {dir_mask({D::E, D::W}),          dir_mask({D::N, D::S}),
                                         dir_mask({D::NE, D::SW}),        dir_mask({D::NW, D::SE}),
                                         dir_mask({D::E, D::W, D::N, D::S}), dir_mask({D::NE, D::NW, D::SE, D::SW})};
    for (Mask m : symmetric) {
        plan.minmax.push_back({order, set_label(m, order), {{m, Scan::Horizontal}, {m, Scan::Vertical}}});
    }
    // Corner sets come in reversal pairs (a, -a) and (b, -b). A 180-degree
    // rotation swaps each set with its partner and keeps scan orientation,
    // so every slot pools one scan orientation over both partners.
    const Mask a = dir_mask({D::E, D::N, D::NE});
    const Mask b = dir_mask({D::W, D::N, D::NW});
    const Mask neg_b = dir_mask({D::E, D::S, D::SE});
    const Mask neg_a = dir_mask({D::W, D::S, D::SW});
    plan.minmax.push_back({order, set_label(a, order), {{a, Scan::Horizontal}, {neg_a, Scan::Horizontal}}});
    plan.minmax.push_back({order, set_label(b, order), {{b, Scan::Horizontal}, {neg_b, Scan::Horizontal}}});
    plan.minmax.push_back({order, set_label(neg_b, order), {{b, Scan::Vertical}, {neg_b, Scan::Vertical}}});
    plan.minmax.push_back({order, set_label(neg_a, order), {{a, Scan::Vertical}, {neg_a, Scan::Vertical}}});
    plan.minmax.push_back({order, set_label(all, order), {{all, Scan::Horizontal}, {all, Scan::Vertical}}});
}

void add_axial_sets(RosterPlan& plan) {
    using A = Axis;
    const std::vector<Mask> sets = {axis_mask({A::H, A::V}),       axis_mask({A::H, A::D}),       axis_mask({A::H, A::M}),
                                    axis_mask({A::V, A::D}),       axis_mask({A::V, A::M}),       axis_mask({A::D, A::M}),
                                    axis_mask({A::H, A::V, A::D}), axis_mask({A::H, A::V, A::M}), axis_mask({A::H, A::D, A::M}),
                                    axis_mask({A::V, A::D, A::M}), axis_mask({A::H, A::V, A::D, A::M})};
    for (Mask m : sets) plan.minmax.push_back({2, set_label(m, 2), {{m, Scan::Horizontal}, {m, Scan::Vertical}}});
}

RosterPlan build_roster() {
    RosterPlan plan;
    plan.spam = {SpamSource::Order1E, SpamSource::Order2H, SpamSource::Order3E,
                 SpamSource::Square3, SpamSource::Square5, SpamSource::Edge3};
    const std::vector<std::pair<std::string, int>> spam_ids = {{"spam1_E", 1},      {"spam2_h", 2},
                                                               {"spam3_E", 3},      {"spam_SQUARE3", 4},
                                                               {"spam_SQUARE5", 12}, {"spam_EDGE3", 4}};
    add_directional_sets(plan, 1);
    add_axial_sets(plan);
    add_directional_sets(plan, 3);

    std::size_t offset = 0;
    for (const auto& [id, q] : spam_ids) {
        plan.specs.push_back({id, SubmodelType::Spam, q, offset, kSpamDim});
        offset += kSpamDim;
    }
    for (const auto& mm : plan.minmax) {
        plan.specs.push_back({"minmax" + std::to_string(mm.order) + "_" + mm.label, SubmodelType::MinMax, mm.order,
                              offset, kMinmaxDim});
        offset += kMinmaxDim;
    }
    if (plan.spam.size() != 6 || plan.minmax.size() != 33 || offset != kFeatureDim) {
        throw std::logic_error("feature roster does not add up to " + std::to_string(kFeatureDim));
    }
    return plan;
}

const RosterPlan& roster_plan() {
    static const RosterPlan plan = build_roster();
    return plan;
}

// ---- extraction ---------------------------------------------------------

QuantizedResidualMap elementwise(const std::vector<const QuantizedResidualMap*>& maps, bool take_min) {
    QuantizedResidualMap out = *maps.front();
    std::int8_t* dst = out.values.data();
    const std::size_t n = out.values.size();
    for (std::size_t k = 1; k < maps.size(); ++k) {
        const std::int8_t* src = maps[k]->values.data();
        if (take_min) {
            for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] < dst[i] ? src[i] : dst[i];
        } else {
            for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] > dst[i] ? src[i] : dst[i];
        }
    }
    return out;
}

struct MinMaxHist {
    CoocHistogram min_h, max_h, min_v, max_v;
};

MinMaxHist minmax_histograms(const std::vector<QuantizedResidualMap>& maps, Mask members) {
    std::vector<const QuantizedResidualMap*> sel;
    for (unsigned b = 0; b < maps.size(); ++b) {
        if (members & (1u << b)) sel.push_back(&maps[b]);
    }
    const auto lo = elementwise(sel, true);
    const auto hi = elementwise(sel, false);
    return {cooccurrence4(lo, Scan::Horizontal), cooccurrence4(hi, Scan::Horizontal),
            cooccurrence4(lo, Scan::Vertical), cooccurrence4(hi, Scan::Vertical)};
}

// Monotone quantization commutes with min/max, so the member residuals are
// quantized once and combined afterwards.
std::vector<QuantizedResidualMap> quantized_family(const GrayImage& img, int order) {
    std::vector<QuantizedResidualMap> maps;
    if (order == 2) {
        for (Axis a : kAxes) maps.push_back(quantize_truncate(apply_stencil(img, axial_stencil(a), 1), 2));
    } else {
        const int margin = order == 1 ? 1 : 2;
        for (Direction d : kDirections) {
            maps.push_back(quantize_truncate(apply_stencil(img, directional_stencil(order, d), margin), order));
        }
    }
    return maps;
}

std::vector<double> spam_block(const GrayImage& img, SpamSource source) {
    auto both = [](const QuantizedResidualMap& q) {
        return symmetrize_spam(cooccurrence4(q, Scan::Horizontal), cooccurrence4(q, Scan::Vertical));
    };
    switch (source) {
        case SpamSource::Order1E: return both(quantize_truncate(directional_residual(img, 1, Direction::E), 1));
        case SpamSource::Order2H: return both(quantize_truncate(directional_residual(img, Axis::H), 2));
        case SpamSource::Order3E: return both(quantize_truncate(directional_residual(img, 3, Direction::E), 3));
        case SpamSource::Square3: return both(quantize_truncate(kernel_residual(img, KernelKind::Square3), 4));
        case SpamSource::Square5: return both(quantize_truncate(kernel_residual(img, KernelKind::Square5), 12));
        case SpamSource::Edge3: {
            // Horizontal scans run along the N/S edge kernels, vertical scans
            // along E/W; each pools the two opposite orientations.
            auto h = cooccurrence4(quantize_truncate(kernel_residual(img, KernelKind::Edge3N), 4), Scan::Horizontal);
            h += cooccurrence4(quantize_truncate(kernel_residual(img, KernelKind::Edge3S), 4), Scan::Horizontal);
            auto v = cooccurrence4(quantize_truncate(kernel_residual(img, KernelKind::Edge3E), 4), Scan::Vertical);
            v += cooccurrence4(quantize_truncate(kernel_residual(img, KernelKind::Edge3W), 4), Scan::Vertical);
            return symmetrize_spam(h, v);
        }
    }
    throw std::logic_error("unknown spam source");
}

}  // namespace

CoocHistogram& CoocHistogram::operator+=(const CoocHistogram& other) {
    for (std::size_t i = 0; i < kCoocBins; ++i) counts[i] += other.counts[i];
    group_count += other.group_count;
    return *this;
}

std::size_t quad_index(int d1, int d2, int d3, int d4) {
    return static_cast<std::size_t>((((d1 + 2) * 5 + (d2 + 2)) * 5 + (d3 + 2)) * 5 + (d4 + 2));
}

std::array<int, 4> quad_from_index(std::size_t index) {
    std::array<int, 4> d{};
    for (int k = 3; k >= 0; --k) {
        d[k] = static_cast<int>(index % 5) - 2;
        index /= 5;
    }
    return d;
}

std::int8_t quantize_value(std::int32_t r, int q, int T) {
    if (q < 1) throw InvalidArgument("quantizer must be >= 1, got " + std::to_string(q));
    // round half away from zero of |r| / q, computed exactly in integers
    const std::int64_t mag = (2 * static_cast<std::int64_t>(r < 0 ? -static_cast<std::int64_t>(r) : r) + q) / (2 * q);
    const std::int64_t clamped = std::min<std::int64_t>(mag, T);
    return static_cast<std::int8_t>(r < 0 ? -clamped : clamped);
}

QuantizedResidualMap quantize_truncate(const ResidualMap& map, int q, int T) {
    if (q < 1) throw InvalidArgument("quantizer must be >= 1, got " + std::to_string(q));
    if (T < 0 || T > 127) throw InvalidArgument("truncation threshold out of range");
    QuantizedResidualMap out;
    out.rows = map.rows;
    out.cols = map.cols;
    out.q = q;
    out.values.resize(map.values.size());
    // Every |r| >= (T + 1) q saturates, so a table over that range suffices.
    const std::int32_t bound = (T + 1) * q;
    std::vector<std::int8_t> table(2 * static_cast<std::size_t>(bound) + 1);
    for (std::int32_t r = -bound; r <= bound; ++r) table[static_cast<std::size_t>(r + bound)] = quantize_value(r, q, T);
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        const std::int32_t r = std::clamp(map.values[i], -bound, bound);
        out.values[i] = table[static_cast<std::size_t>(r + bound)];
    }
    return out;
}

CoocHistogram cooccurrence4(const QuantizedResidualMap& qmap, Scan scan) {
    const std::size_t lines = scan == Scan::Horizontal ? qmap.rows : qmap.cols;
    const std::size_t len = scan == Scan::Horizontal ? qmap.cols : qmap.rows;
    if (len < 4 || lines == 0) {
        throw DegenerateInput("residual map " + std::to_string(qmap.rows) + "x" + std::to_string(qmap.cols) +
                              " has no complete co-occurrence window");
    }
    for (auto v : qmap.values) {
        if (v < -kTruncation || v > kTruncation) throw InvalidInput("quantized residual outside [-2, 2]");
    }
    CoocHistogram hist;
    // Digits are stored as d in [-2, 2]; the +2 offsets fold into one constant.
    constexpr long kOffset = 2 * (125 + 25 + 5 + 1);
    const std::int8_t* data = qmap.values.data();
    if (scan == Scan::Horizontal) {
        for (std::size_t r = 0; r < qmap.rows; ++r) {
            const std::int8_t* p = data + r * qmap.cols;
            for (std::size_t c = 0; c + 3 < qmap.cols; ++c) {
                ++hist.counts[static_cast<std::size_t>(125 * p[c] + 25 * p[c + 1] + 5 * p[c + 2] + p[c + 3] + kOffset)];
            }
        }
    } else {
        for (std::size_t r = 0; r + 3 < qmap.rows; ++r) {
            const std::int8_t* p0 = data + r * qmap.cols;
            const std::int8_t* p1 = p0 + qmap.cols;
            const std::int8_t* p2 = p1 + qmap.cols;
            const std::int8_t* p3 = p2 + qmap.cols;
            for (std::size_t c = 0; c < qmap.cols; ++c) {
                ++hist.counts[static_cast<std::size_t>(125 * p0[c] + 25 * p1[c] + 5 * p2[c] + p3[c] + kOffset)];
            }
        }
    }
    hist.group_count = lines * (len - 3);
    return hist;
}

const std::array<std::uint16_t, kCoocBins>& spam_orbit_table() {
    static const auto table = build_orbit_table([](std::size_t i) {
        const std::size_t r = reverse_index(i);
        return std::min({i, negate_index(i), r, negate_index(r)});
    });
    return table;
}

const std::array<std::uint16_t, kCoocBins>& minmax_orbit_table() {
    static const auto table = build_orbit_table([](std::size_t i) { return std::min(i, reverse_index(i)); });
    return table;
}

std::vector<double> symmetrize_spam(const CoocHistogram& hist_h, const CoocHistogram& hist_v) {
    const auto& orbit = spam_orbit_table();
    std::vector<double> out(kSpamDim, 0.0);
    const CoocHistogram* hists[2] = {&hist_h, &hist_v};
    for (int h = 0; h < 2; ++h) {
        if (hists[h]->group_count == 0) throw DegenerateInput("empty co-occurrence histogram");
        std::array<std::uint64_t, kSpamOrbits> merged{};
        for (std::size_t i = 0; i < kCoocBins; ++i) merged[orbit[i]] += hists[h]->counts[i];
        const auto total = static_cast<double>(hists[h]->group_count);
        for (std::size_t o = 0; o < kSpamOrbits; ++o) out[h * kSpamOrbits + o] = static_cast<double>(merged[o]) / total;
    }
    return out;
}

std::vector<double> symmetrize_minmax(const CoocHistogram& hist_min, const CoocHistogram& hist_max) {
    if (hist_min.group_count == 0 || hist_max.group_count == 0) throw DegenerateInput("empty co-occurrence histogram");
    if (hist_min.group_count != hist_max.group_count) {
        throw InvalidInput("min and max histograms must have equal group counts");
    }
    const auto& orbit = minmax_orbit_table();
    std::array<std::uint64_t, kMinmaxOrbits> merged{};
    for (std::size_t i = 0; i < kCoocBins; ++i) {
        merged[orbit[i]] += hist_min.counts[i];
        merged[orbit[negate_index(i)]] += hist_max.counts[i];
    }
    const auto total = static_cast<double>(hist_min.group_count + hist_max.group_count);
    std::vector<double> out(kMinmaxDim);
    for (std::size_t o = 0; o < kMinmaxOrbits; ++o) out[o] = static_cast<double>(merged[o]) / total;
    return out;
}

std::span<const SubmodelSpec> roster() { return roster_plan().specs; }

std::uint64_t roster_hash() {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& s : roster()) {
        mix(s.id + ':' + (s.type == SubmodelType::Spam ? "spam" : "minmax") + ':' + std::to_string(s.q) + ':' +
            std::to_string(s.offset) + ':' + std::to_string(s.dim) + ';');
    }
    return h;
}

FeatureVector extract_features(const GrayImage& img, int s) {
    check_plane_count(s);
    if (img.width() < kMinImageSide || img.height() < kMinImageSide) {
        throw DegenerateInput("image " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                              " is too small for feature extraction (minimum " + std::to_string(kMinImageSide) +
                              "x" + std::to_string(kMinImageSide) + ")");
    }
    const GrayImage clear = zero_planes(img, s);
    const RosterPlan& plan = roster_plan();

    FeatureVector fv;
    fv.values.reserve(kFeatureDim);
    for (SpamSource src : plan.spam) {
        const auto block = spam_block(clear, src);
        fv.values.insert(fv.values.end(), block.begin(), block.end());
    }

    std::map<int, std::vector<QuantizedResidualMap>> families;
    for (int order : {1, 2, 3}) families.emplace(order, quantized_family(clear, order));

    std::map<std::pair<int, Mask>, MinMaxHist> cache;
    for (const auto& mm : plan.minmax) {
        CoocHistogram lo, hi;
        for (const auto& part : mm.parts) {
            auto key = std::make_pair(mm.order, part.members);
            auto it = cache.find(key);
            if (it == cache.end()) it = cache.emplace(key, minmax_histograms(families.at(mm.order), part.members)).first;
            lo += part.scan == Scan::Horizontal ? it->second.min_h : it->second.min_v;
            hi += part.scan == Scan::Horizontal ? it->second.max_h : it->second.max_v;
        }
        const auto block = symmetrize_minmax(lo, hi);
        fv.values.insert(fv.values.end(), block.begin(), block.end());
    }
    return fv;
}

}  // namespace planeguard
