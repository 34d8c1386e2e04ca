#include "secrecy/extractor.hpp"

#include <stdexcept>
#include <vector>

#include "secrecy/rng.hpp"

namespace secrecy {

namespace {

unsigned poly_degree(std::uint64_t p) {
    unsigned d = 0;
    while (p >> (d + 1)) ++d;
    return d;
}

std::uint64_t poly_mod(std::uint64_t a, std::uint64_t mod) {
    unsigned dm = poly_degree(mod);
    while (a >> dm) {
        unsigned da = poly_degree(a);
        a ^= mod << (da - dm);
    }
    return a;
}

bool poly_divides(std::uint64_t d, std::uint64_t p) {
    return poly_mod(p, d) == 0;
}

}  // namespace

std::uint64_t gf2poly_mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t mod) {
    std::uint64_t r = 0;
    while (b) {
        if (b & 1) r ^= a;
        b >>= 1;
        a <<= 1;
        if (a >> poly_degree(mod)) a ^= mod;
    }
    return r;
}

std::uint64_t find_irreducible_poly(unsigned degree) {
    if (degree == 0 || degree > 30) throw std::invalid_argument("degree out of range");
    if (degree == 1) return 0b10;  // x
    // candidates with constant term set (otherwise x divides)
    for (std::uint64_t c = (1ULL << degree) | 1;; c += 2) {
        bool irreducible = true;
        for (std::uint64_t d = 2; d < (1ULL << (degree / 2 + 1)); ++d) {
            if (poly_divides(d, c)) {
                irreducible = false;
                break;
            }
        }
        if (irreducible) return c;
    }
}

AffineFieldExtractor::AffineFieldExtractor(unsigned width) : width_(width) {
    if (width == 0 || width > 30) throw std::invalid_argument("width out of range");
    modulus_ = find_irreducible_poly(width);
    mask_ = (width == 64) ? ~0ULL : ((1ULL << width) - 1);
}

std::uint64_t AffineFieldExtractor::apply(std::uint64_t x, std::uint64_t seed) const {
    std::uint64_t a = (seed >> width_) & mask_;
    std::uint64_t c = seed & mask_;
    if (a == 0) a = 1;
    return gf2poly_mulmod(a, x & mask_, modulus_) ^ c;
}

std::uint64_t AffineFieldExtractor::invert(std::uint64_t y, std::uint64_t seed) const {
    std::uint64_t a = (seed >> width_) & mask_;
    std::uint64_t c = seed & mask_;
    if (a == 0) a = 1;
    return gf2poly_mulmod(field_inverse(a), (y ^ c) & mask_, modulus_);
}

std::uint64_t AffineFieldExtractor::field_inverse(std::uint64_t a) const {
    // a^(2^w - 2) by square-and-multiply
    std::uint64_t result = 1;
    std::uint64_t base = a;
    std::uint64_t e = (width_ == 64) ? ~1ULL : ((1ULL << width_) - 2);
    while (e) {
        if (e & 1) result = gf2poly_mulmod(result, base, modulus_);
        base = gf2poly_mulmod(base, base, modulus_);
        e >>= 1;
    }
    return result;
}

void verify_invertible(const InvertibleExtractor& ext) {
    unsigned w = ext.width();
    std::uint64_t domain = 1ULL << w;
    SplitMix64 gen(0x5eedULL);
    const unsigned seed_samples = 16;
    for (unsigned t = 0; t < seed_samples; ++t) {
        std::uint64_t seed =
            ext.seed_bits() == 0 ? 0 : gen.next() & ((1ULL << ext.seed_bits()) - 1);
        if (w <= 16) {
            std::vector<bool> hit(domain, false);
            for (std::uint64_t x = 0; x < domain; ++x) {
                std::uint64_t y = ext.apply(x, seed);
                if (y >= domain || hit[y] || ext.invert(y, seed) != x)
                    throw std::invalid_argument("extractor is not invertible");
                hit[y] = true;
            }
        } else {
            for (unsigned i = 0; i < 1024; ++i) {
                std::uint64_t x = gen.next() & (domain - 1);
                std::uint64_t y = ext.apply(x, seed);
                if (y >= domain || ext.invert(y, seed) != x)
                    throw std::invalid_argument("extractor is not invertible");
            }
        }
    }
}

}  // namespace secrecy
