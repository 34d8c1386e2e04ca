#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace secrecy {

// splitmix64; portable and fast, used for all seeded randomness so that
// results are bit-identical across platforms (std:: distributions are not).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform over [0, bound) via 128-bit multiply reduction
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    // uniform double in [0, 1) with 53 random bits
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Stateless mix of a few words; used as the random-binning PRF.
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
}

// All experiment randomness flows from one master seed; each component
// derives its own stream by hashing a label into the seed, so runs are
// replayable piecemeal.
inline SplitMix64 derive_stream(std::uint64_t master_seed, std::string_view label) {
    return SplitMix64(mix64(master_seed ^ fnv1a64(label)));
}

// A source of uniform bits with a consumption counter. Two flavors: a
// finite bit string (throws when exhausted) or an unbounded PRNG stream.
// The counter makes seed-rate claims measurable.
class BitSource {
public:
    static BitSource from_bits(std::vector<bool> bits) {
        BitSource src;
        src.fixed_ = std::move(bits);
        src.finite_ = true;
        return src;
    }

    static BitSource from_stream(SplitMix64 gen) {
        BitSource src;
        src.gen_ = gen;
        src.finite_ = false;
        return src;
    }

    bool next_bit() {
        if (finite_) {
            if (pos_ >= fixed_.size()) throw std::runtime_error("bit source exhausted");
            ++consumed_;
            return fixed_[pos_++];
        }
        if (buffered_ == 0) {
            buffer_ = gen_.next();
            buffered_ = 64;
        }
        bool b = buffer_ & 1;
        buffer_ >>= 1;
        --buffered_;
        ++consumed_;
        return b;
    }

    // k bits, MSB first, k <= 63
    std::uint64_t next_bits(unsigned k) {
        std::uint64_t v = 0;
        for (unsigned i = 0; i < k; ++i) v = (v << 1) | (next_bit() ? 1u : 0u);
        return v;
    }

    // Uniform over [0, bound) by rejection sampling on fixed-width chunks.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("bound must be positive");
        if (bound == 1) return 0;
        unsigned width = 0;
        while ((1ULL << width) < bound) ++width;
        for (;;) {
            std::uint64_t v = next_bits(width);
            if (v < bound) return v;
        }
    }

    std::uint64_t consumed() const { return consumed_; }

private:
    BitSource() : gen_(0) {}

    std::vector<bool> fixed_;
    std::size_t pos_ = 0;
    SplitMix64 gen_;
    std::uint64_t buffer_ = 0;
    unsigned buffered_ = 0;
    bool finite_ = false;
    std::uint64_t consumed_ = 0;
};

}  // namespace secrecy
