// Copyright 2026 The qmanizk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmanizk {

using Bytes = std::vector<std::uint8_t>;
using Bits = std::vector<std::uint8_t>;  // one bit per entry, values 0/1

/// Deterministic PRNG. Every randomized operation in the library takes one
/// explicitly; identical seeds reproduce transcripts bit-exactly, so sampling
/// primitives below avoid the implementation-defined std:: distributions.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    return Rng(splitmix64(s));
}

/// Independent per-trial stream derived from a base seed.
inline Rng derive_rng(std::uint64_t base_seed, std::uint64_t stream) {
    std::uint64_t s = base_seed ^ (0xd1342543de82ef95ULL * (stream + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return Rng(a ^ (b << 1));
}

inline std::uint64_t rand_u64(Rng& rng) { return rng(); }

/// Uniform integer in [0, n) by rejection, exact for any n >= 1.
inline std::uint64_t rand_below(Rng& rng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("rand_below: n must be positive");
    const std::uint64_t limit = n * (~0ULL / n);
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

inline int rand_bit(Rng& rng) { return static_cast<int>(rng() >> 63); }

/// Uniform double in [0, 1) with 53 random bits.
inline double rand_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline Bytes rand_bytes(Rng& rng, std::size_t n) {
    Bytes out(n);
    std::size_t i = 0;
    while (i < n) {
        std::uint64_t v = rng();
        for (int k = 0; k < 8 && i < n; ++k, ++i) {
            out[i] = static_cast<std::uint8_t>(v >> (8 * k));
        }
    }
    return out;
}

inline Bits rand_bits(Rng& rng, std::size_t n) {
    Bits out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rand_bit(rng));
    return out;
}

// Bitstrings serialize LSB-first into bytes, then lowercase hex.
inline Bytes pack_bits(const Bits& bits) {
    Bytes out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) out[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    }
    return out;
}

inline Bits unpack_bits(const Bytes& bytes, std::size_t nbits) {
    if (bytes.size() < (nbits + 7) / 8) {
        throw std::invalid_argument("unpack_bits: byte string too short");
    }
    Bits out(nbits);
    for (std::size_t i = 0; i < nbits; ++i) {
        out[i] = (bytes[i / 8] >> (i % 8)) & 1u;
    }
    return out;
}

inline std::string to_hex(const Bytes& data) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(2 * data.size());
    for (std::uint8_t b : data) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

inline Bytes from_hex(const std::string& s) {
    if (s.size() % 2 != 0) throw std::invalid_argument("from_hex: odd length");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::invalid_argument("from_hex: bad digit");
    };
    Bytes out(s.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>((nibble(s[2 * i]) << 4) | nibble(s[2 * i + 1]));
    }
    return out;
}

inline std::string to_base64(const Bytes& data) {
    static const char* tbl = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string s;
    s.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= data.size(); i += 3) {
        std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
        s.push_back(tbl[(v >> 18) & 63]);
        s.push_back(tbl[(v >> 12) & 63]);
        s.push_back(tbl[(v >> 6) & 63]);
        s.push_back(tbl[v & 63]);
    }
    if (i + 1 == data.size()) {
        std::uint32_t v = data[i] << 16;
        s.push_back(tbl[(v >> 18) & 63]);
        s.push_back(tbl[(v >> 12) & 63]);
        s += "==";
    } else if (i + 2 == data.size()) {
        std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
        s.push_back(tbl[(v >> 18) & 63]);
        s.push_back(tbl[(v >> 12) & 63]);
        s.push_back(tbl[(v >> 6) & 63]);
        s.push_back('=');
    }
    return s;
}

inline Bytes from_base64(const std::string& s) {
    auto val = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        throw std::invalid_argument("from_base64: bad character");
    };
    if (s.size() % 4 != 0) throw std::invalid_argument("from_base64: bad length");
    Bytes out;
    out.reserve(s.size() / 4 * 3);
    for (std::size_t i = 0; i < s.size(); i += 4) {
        int pad = 0;
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) {
            char c = s[i + k];
            if (c == '=') {
                ++pad;
                v <<= 6;
            } else {
                if (pad) throw std::invalid_argument("from_base64: embedded padding");
                v = (v << 6) | static_cast<std::uint32_t>(val(c));
            }
        }
        out.push_back(static_cast<std::uint8_t>(v >> 16));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>(v >> 8));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(v));
    }
    return out;
}

inline void append_u32(Bytes& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

inline void append_bytes(Bytes& out, const Bytes& b) {
    append_u32(out, static_cast<std::uint32_t>(b.size()));
    out.insert(out.end(), b.begin(), b.end());
}

}  // namespace qmanizk
