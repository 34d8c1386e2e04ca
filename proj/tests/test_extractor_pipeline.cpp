#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>

#include "secrecy/extractor.hpp"
#include "secrecy/info.hpp"
#include "secrecy/uniform_compression.hpp"

using namespace secrecy;

namespace {

// deliberately broken candidate for the registration check
class ConstantMap : public InvertibleExtractor {
public:
    explicit ConstantMap(unsigned w) : w_(w) {}
    unsigned width() const override { return w_; }
    unsigned seed_bits() const override { return 0; }
    std::uint64_t apply(std::uint64_t, std::uint64_t) const override { return 0; }
    std::uint64_t invert(std::uint64_t, std::uint64_t) const override { return 0; }
    std::string name() const override { return "constant"; }

private:
    unsigned w_;
};

}  // namespace

TEST_CASE("gf2 polynomial arithmetic and irreducibles") {
    // x * x = x^2 reduced mod x^2+x+1 -> x+1
    CHECK(gf2poly_mulmod(0b10, 0b10, 0b111) == 0b11);
    for (unsigned d : {2u, 3u, 4u, 7u, 8u, 10u, 14u, 16u}) {
        std::uint64_t f = find_irreducible_poly(d);
        CHECK((f >> d) == 1);  // monic of the right degree
        CHECK((f & 1) == 1);   // nonzero constant term
        // no roots in GF(2): f(0) = f(1) = 1
        CHECK(__builtin_popcountll(f) % 2 == 1);
    }
}

TEST_CASE("affine field extractor is a seeded bijection") {
    AffineFieldExtractor ext(7);
    CHECK_NOTHROW(verify_invertible(ext));
    SplitMix64 gen(5);
    for (int t = 0; t < 200; ++t) {
        std::uint64_t seed = gen.next() & ((1ULL << 14) - 1);
        std::uint64_t x = gen.next() & 127;
        std::uint64_t y = ext.apply(x, seed);
        CHECK(y < 128);
        CHECK(ext.invert(y, seed) == x);
    }
    CHECK_THROWS_AS(verify_invertible(ConstantMap(6)), std::invalid_argument);
}

TEST_CASE("pipeline with the identity extractor reduces to the source code") {
    Pmf p = Pmf::bernoulli(0.3);
    TypicalSetIndex index = build_typical_index(p, 10, 0.3);
    REQUIRE(index.count() == 120);
    unsigned w = 7;  // ceil(log2 120)
    ExtractorPipelineCode pipe(index, std::make_shared<IdentityExtractor>(w));
    CHECK(pipe.width() == w);
    Pmf out = pipe.exact_output_pmf();
    Pmf ts = ts_output_pmf_seeded(index, p);
    for (std::uint64_t m = 0; m < pipe.message_count(); ++m) {
        double expect = m < ts.size() ? ts[m] : 0.0;
        CHECK(out[m] == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("affine pipeline roundtrips every typical input") {
    Pmf p = Pmf::bernoulli(0.3);
    TypicalSetIndex index = build_typical_index(p, 10, 0.3);
    ExtractorPipelineCode pipe(index, std::make_shared<AffineFieldExtractor>(7));
    SplitMix64 gen(17);
    for (MessageId m = 1; m <= index.count(); ++m) {
        Sequence x = index.sequence(m);
        for (int t = 0; t < 4; ++t) {
            std::uint64_t seed = gen.next() & ((1ULL << 14) - 1);
            BitSource fb = BitSource::from_stream(SplitMix64(1));
            MessageId msg = pipe.encode(x, seed, fb);
            CHECK(pipe.decode(msg, seed) == x);
            CHECK(fb.consumed() == 0);
        }
    }
    // atypical inputs consume fallback bits and fail the roundtrip
    Sequence atypical(10, 1);
    BitSource fb = BitSource::from_stream(SplitMix64(2));
    MessageId msg = pipe.encode(atypical, 5, fb);
    CHECK(fb.consumed() > 0);
    CHECK(pipe.decode(msg, 5) != atypical);
}

TEST_CASE("pipeline uniformity: exact output, pad identity, and ordering") {
    Pmf p = Pmf::bernoulli(0.3);
    TypicalSetIndex index = build_typical_index(p, 10, 0.3);
    ExtractorPipelineCode pipe(index, std::make_shared<AffineFieldExtractor>(7));

    // full enumeration over the 2^14 seeds: the additive pad makes the
    // output exactly uniform
    Pmf out = pipe.exact_output_pmf();
    double v = variational_distance(out, Pmf::uniform(pipe.message_count()));
    CHECK(v <= 1e-12);

    // like-for-like on the 2^w message space: mixing over seeded
    // permutations never increases the distance to uniform
    Pmf ts = ts_output_pmf_seeded(index, p);
    std::vector<double> embedded(pipe.message_count(), 0.0);
    for (std::uint64_t s = 0; s < ts.size(); ++s) embedded[s] = ts[s];
    double v_ts = 0.0;
    for (double e : embedded)
        v_ts += std::abs(e - 1.0 / static_cast<double>(pipe.message_count()));
    CHECK(v <= v_ts + 1e-12);

    UcReport r = pipe.evaluate_exact();
    CHECK(r.pe ==
          doctest::Approx(atypicality_probability_exact(p, 10, 0.3)).epsilon(1e-12));
    CHECK(r.seed_len == 14);
    CHECK(r.note.find("seed length") != std::string::npos);
}

TEST_CASE("pipeline rejects width mismatches") {
    Pmf p = Pmf::bernoulli(0.3);
    TypicalSetIndex index = build_typical_index(p, 10, 0.3);
    CHECK_THROWS_AS(
        ExtractorPipelineCode(index, std::make_shared<AffineFieldExtractor>(9)),
        std::invalid_argument);
}
