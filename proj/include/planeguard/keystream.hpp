#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace planeguard {

using Key = std::array<std::uint8_t, 32>;
using Nonce = std::array<std::uint8_t, 12>;

/// ChaCha20 (20 rounds, 96-bit nonce, 32-bit block counter starting at 0).
struct KeystreamSpec {
    Key key{};
    Nonce nonce{};
};

/// One 64-byte ChaCha20 block for the given counter value.
std::array<std::uint8_t, 64> chacha20_block(const Key& key, const Nonce& nonce, std::uint32_t counter);

/// Fills `out` with keystream bytes starting at absolute byte `offset`.
/// Any range can be produced independently of the others.
void keystream_fill(const KeystreamSpec& spec, std::uint64_t offset, std::span<std::uint8_t> out);

std::vector<std::uint8_t> keystream_bytes(const KeystreamSpec& spec, std::size_t count);

/// First `count` keystream bits, one 0/1 value per element. Bits are read
/// from successive bytes, most significant bit of each byte first.
std::vector<std::uint8_t> keystream_bits(const KeystreamSpec& spec, std::size_t count);

/// Nonce from a dataset ingestion counter: the low 96 bits of the counter,
/// little-endian.
Nonce nonce_from_index(std::uint64_t index);

Key parse_key_hex(std::string_view hex);
Nonce parse_nonce_hex(std::string_view hex);
std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace planeguard
