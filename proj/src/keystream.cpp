#include "planeguard/keystream.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "planeguard/error.hpp"

namespace planeguard {
namespace {

constexpr std::uint32_t rotl(std::uint32_t v, int c) { return (v << c) | (v >> (32 - c)); }

constexpr void quarter_round(std::array<std::uint32_t, 16>& x, int a, int b, int c, int d) {
    x[a] += x[b]; x[d] ^= x[a]; x[d] = rotl(x[d], 16);
    x[c] += x[d]; x[b] ^= x[c]; x[b] = rotl(x[b], 12);
    x[a] += x[b]; x[d] ^= x[a]; x[d] = rotl(x[d], 8);
    x[c] += x[d]; x[b] ^= x[c]; x[b] = rotl(x[b], 7);
}

std::uint32_t load_le32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

template <std::size_t N>
std::array<std::uint8_t, N> parse_hex(std::string_view hex, const char* what) {
    if (hex.size() != 2 * N) {
        throw InvalidArgument(std::string(what) + " must be " + std::to_string(2 * N) +
                              " hex characters, got " + std::to_string(hex.size()));
    }
    std::array<std::uint8_t, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        int hi = hex_value(hex[2 * i]);
        int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw InvalidArgument(std::string(what) + " contains a non-hex character");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

}  // namespace

std::array<std::uint8_t, 64> chacha20_block(const Key& key, const Nonce& nonce, std::uint32_t counter) {
    std::array<std::uint32_t, 16> state{0x61707865u, 0x3320646eu, 0x79622d32u, 0x6b206574u};
    for (int i = 0; i < 8; ++i) state[4 + i] = load_le32(key.data() + 4 * i);
    state[12] = counter;
    for (int i = 0; i < 3; ++i) state[13 + i] = load_le32(nonce.data() + 4 * i);

    auto x = state;
    for (int round = 0; round < 10; ++round) {
        quarter_round(x, 0, 4, 8, 12);
        quarter_round(x, 1, 5, 9, 13);
        quarter_round(x, 2, 6, 10, 14);
        quarter_round(x, 3, 7, 11, 15);
        quarter_round(x, 0, 5, 10, 15);
        quarter_round(x, 1, 6, 11, 12);
        quarter_round(x, 2, 7, 8, 13);
        quarter_round(x, 3, 4, 9, 14);
    }

    std::array<std::uint8_t, 64> out{};
    for (int i = 0; i < 16; ++i) {
        std::uint32_t v = x[i] + state[i];
        out[4 * i + 0] = static_cast<std::uint8_t>(v);
        out[4 * i + 1] = static_cast<std::uint8_t>(v >> 8);
        out[4 * i + 2] = static_cast<std::uint8_t>(v >> 16);
        out[4 * i + 3] = static_cast<std::uint8_t>(v >> 24);
    }
    return out;
}

void keystream_fill(const KeystreamSpec& spec, std::uint64_t offset, std::span<std::uint8_t> out) {
    // The 32-bit block counter bounds a single stream at 256 GiB.
    constexpr std::uint64_t kMaxBytes = (std::uint64_t{1} << 32) * 64;
    if (offset > kMaxBytes || out.size() > kMaxBytes - offset) {
        throw InvalidArgument("keystream request exceeds the 32-bit block counter range");
    }
    std::size_t written = 0;
    while (written < out.size()) {
        const std::uint64_t pos = offset + written;
        const auto block = chacha20_block(spec.key, spec.nonce, static_cast<std::uint32_t>(pos / 64));
        const std::size_t start = pos % 64;
        const std::size_t take = std::min<std::size_t>(64 - start, out.size() - written);
        std::copy_n(block.begin() + static_cast<std::ptrdiff_t>(start), take, out.begin() + static_cast<std::ptrdiff_t>(written));
        written += take;
    }
}

std::vector<std::uint8_t> keystream_bytes(const KeystreamSpec& spec, std::size_t count) {
    std::vector<std::uint8_t> out(count);
    keystream_fill(spec, 0, out);
    return out;
}

std::vector<std::uint8_t> keystream_bits(const KeystreamSpec& spec, std::size_t count) {
    const auto bytes = keystream_bytes(spec, (count + 7) / 8);
    std::vector<std::uint8_t> bits(count);
    for (std::size_t t = 0; t < count; ++t) bits[t] = (bytes[t / 8] >> (7 - t % 8)) & 1u;
    return bits;
}

Nonce nonce_from_index(std::uint64_t index) {
    Nonce n{};
    for (int i = 0; i < 8; ++i) n[i] = static_cast<std::uint8_t>(index >> (8 * i));
    return n;
}

Key parse_key_hex(std::string_view hex) { return parse_hex<32>(hex, "key"); }

Nonce parse_nonce_hex(std::string_view hex) { return parse_hex<12>(hex, "nonce"); }

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        s.push_back(kDigits[b >> 4]);
        s.push_back(kDigits[b & 0xF]);
    }
    return s;
}

}  // namespace planeguard
