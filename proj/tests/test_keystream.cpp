#include <doctest.h>

#include <bit>

#include "planeguard/error.hpp"
#include "planeguard/keystream.hpp"

using namespace planeguard;

namespace {

// First 64 bytes for the all-zero key and nonce 00..02, counter 0. Produced
// by an independent ChaCha20 implementation (Python `cryptography`).
constexpr std::string_view kGoldenZeroKey =
    "c2c64d378cd536374ae204b9ef933fcd1a8b2288b3dfa49672ab765b54ee27c7"
    "8a970e0e955c14f3a88e741b97c286f75f8fc299e8148362fa198a39531bed6d";

// Block function test vector: key 00..1f, nonce 000000090000004a00000000,
// block counter 1.
constexpr std::string_view kRfcBlock =
    "10f1e7e4d13b5915500fdd1fa32071c4c7d1f4c733c068030422aa9ac3d46c4e"
    "d2826446079faa0914c2d705d98b02a2b5129cd1de164eb9cbd083e8a2503c4e";

KeystreamSpec spec_with_nonce(std::uint64_t index) {
    KeystreamSpec s;
    s.key = parse_key_hex("000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f");
    s.nonce = nonce_from_index(index);
    return s;
}

}  // namespace

TEST_CASE("golden keystream for the all-zero key") {
    KeystreamSpec s;
    s.nonce = parse_nonce_hex("000000000000000000000002");
    CHECK(to_hex(keystream_bytes(s, 64)) == kGoldenZeroKey);
}

TEST_CASE("block function reference vector") {
    Key key;
    for (std::size_t i = 0; i < key.size(); ++i) key[i] = static_cast<std::uint8_t>(i);
    const auto nonce = parse_nonce_hex("000000090000004a00000000");
    const auto block = chacha20_block(key, nonce, 1);
    CHECK(to_hex(block) == kRfcBlock);
}

TEST_CASE("keystream is deterministic and prefix consistent") {
    const auto s = spec_with_nonce(5);
    CHECK(keystream_bits(s, 3000) == keystream_bits(s, 3000));
    const auto longer = keystream_bits(s, 5003);
    for (std::size_t a : {0u, 1u, 7u, 512u, 513u, 4999u}) {
        const auto prefix = keystream_bits(s, a);
        REQUIRE(std::equal(prefix.begin(), prefix.end(), longer.begin()));
    }
}

TEST_CASE("bits are read most significant bit first") {
    const auto s = spec_with_nonce(9);
    const auto bytes = keystream_bytes(s, 40);
    const auto bits = keystream_bits(s, 320);
    for (std::size_t t = 0; t < bits.size(); ++t) REQUIRE(bits[t] == ((bytes[t / 8] >> (7 - t % 8)) & 1));
}

TEST_CASE("random access agrees with sequential generation") {
    const auto s = spec_with_nonce(1);
    const auto all = keystream_bytes(s, 1000);
    for (std::size_t off : {0u, 1u, 63u, 64u, 65u, 130u, 700u}) {
        std::vector<std::uint8_t> part(200);
        keystream_fill(s, off, part);
        REQUIRE(std::equal(part.begin(), part.end(), all.begin() + static_cast<std::ptrdiff_t>(off)));
    }
}

TEST_CASE("distinct nonces give unrelated streams") {
    const auto a = keystream_bits(spec_with_nonce(0), 1024);
    const auto b = keystream_bits(spec_with_nonce(1), 1024);
    std::size_t distance = 0;
    for (std::size_t t = 0; t < a.size(); ++t) distance += a[t] != b[t];
    CHECK(distance >= 392);
    CHECK(distance <= 632);
}

TEST_CASE("bit balance over 10^5 bits") {
    for (std::uint64_t n : {0u, 17u, 123456u}) {
        const auto bits = keystream_bits(spec_with_nonce(n), 100000);
        const auto ones = std::count(bits.begin(), bits.end(), 1);
        const double frac = static_cast<double>(ones) / 100000.0;
        CHECK(frac >= 0.49);
        CHECK(frac <= 0.51);
    }
}

TEST_CASE("nonce from index is little-endian") {
    const auto n = nonce_from_index(0x0102030405060708ULL);
    CHECK(to_hex(n) == "080706050403020100000000");
    CHECK(nonce_from_index(0) == Nonce{});
}

TEST_CASE("hex parsing") {
    CHECK(to_hex(parse_nonce_hex("00FFaa000000000000000001")) == "00ffaa000000000000000001");
    CHECK_THROWS_AS(parse_key_hex("00"), InvalidArgument);
    CHECK_THROWS_AS(parse_nonce_hex("zz0000000000000000000000"), InvalidArgument);
    CHECK_THROWS_AS(parse_key_hex(std::string(63, '0')), InvalidArgument);
}
