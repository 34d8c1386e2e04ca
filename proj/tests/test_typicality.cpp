#include <doctest.h>

#include <cmath>
#include <sstream>

#include "secrecy/info.hpp"
#include "secrecy/typicality.hpp"

using namespace secrecy;

namespace {

// independent per-symbol frequency check, used as the enumeration oracle
bool oracle_typical(std::uint64_t rank, const Pmf& p, unsigned n, double eps) {
    std::vector<unsigned> counts(p.size(), 0);
    for (unsigned i = 0; i < n; ++i) {
        counts[rank % p.size()]++;
        rank /= p.size();
    }
    for (std::size_t a = 0; a < p.size(); ++a) {
        if (p[a] == 0.0 && counts[a] != 0) return false;
        if (p[a] > 0.0 &&
            std::abs(static_cast<double>(counts[a]) / n - p[a]) > eps * p[a])
            return false;
    }
    return true;
}

std::uint64_t oracle_count(const Pmf& p, unsigned n, double eps) {
    std::uint64_t total = 1;
    for (unsigned i = 0; i < n; ++i) total *= p.size();
    std::uint64_t c = 0;
    for (std::uint64_t r = 0; r < total; ++r) c += oracle_typical(r, p, n, eps);
    return c;
}

}  // namespace

TEST_CASE("letter typicality basics") {
    Pmf half = Pmf::bernoulli(0.5);
    CHECK(is_typical({0, 1, 0, 1}, half, 1e-9));  // exact type, any eps
    CHECK_FALSE(is_typical({1, 1, 1, 1}, half, 0.1));
    CHECK_THROWS_AS(is_typical({0, 2}, half, 0.1), std::out_of_range);
    CHECK_THROWS_AS(is_typical({0, 1}, half, 0.0), std::invalid_argument);
    // zero-probability symbols must not appear
    Pmf p({1.0, 0.0});
    CHECK(is_typical({0, 0, 0}, p, 0.5));
    CHECK_FALSE(is_typical({0, 1, 0}, p, 0.5));
}

TEST_CASE("typical index: size 14 at n=4 for a fair coin") {
    TypicalSetIndex idx = build_typical_index(Pmf::bernoulli(0.5), 4, 0.5);
    CHECK(idx.count() == 14);
    CHECK(oracle_count(Pmf::bernoulli(0.5), 4, 0.5) == 14);
    // lexicographically first typical sequence is 0001
    CHECK(idx.sequence(1) == Sequence{0, 0, 0, 1});
    // roundtrip on every typical sequence
    for (MessageId m = 1; m <= idx.count(); ++m) {
        Sequence s = idx.sequence(m);
        CHECK(idx.find(s) == m);
        CHECK(ts_decode(m, idx) == s);
    }
    CHECK_THROWS_AS(ts_decode(0, idx), std::out_of_range);
    CHECK_THROWS_AS(ts_decode(15, idx), std::out_of_range);
}

TEST_CASE("typical index matches brute force and rate bounds") {
    Pmf p = Pmf::bernoulli(0.3);
    for (auto [n, eps] : std::vector<std::pair<unsigned, double>>{
             {10, 0.2}, {10, 0.3}, {8, 0.4}, {12, 0.25}}) {
        TypicalSetIndex idx = build_typical_index(p, n, eps);
        CHECK(idx.count() == oracle_count(p, n, eps));
        double h = shannon_entropy(p);
        double delta = atypicality_probability_exact(p, n, eps);
        CHECK(idx.rate() <= (1.0 + eps) * h + 1e-12);
        if (delta < 1.0)
            CHECK(idx.rate() >=
                  (1.0 - eps) * h + std::log2(1.0 - delta) / n - 1e-12);
    }
    // point mass: only the constant sequence
    TypicalSetIndex point = build_typical_index(Pmf::point_mass(2, 1), 6, 0.3);
    CHECK(point.count() == 1);
    CHECK(point.rate() == doctest::Approx(0.0));
    CHECK(point.sequence(1) == Sequence(6, 1));
}

TEST_CASE("atypicality probability: exact vs enumeration vs bound") {
    Pmf p = Pmf::bernoulli(0.3);
    for (unsigned n : {4u, 8u, 12u, 16u}) {
        double eps = 0.3;
        double exact = atypicality_probability_exact(p, n, eps);
        // enumeration oracle
        double typical_mass = 0.0;
        for (std::uint64_t r = 0; r < (1ULL << n); ++r)
            if (oracle_typical(r, p, n, eps)) {
                double prob = 1.0;
                std::uint64_t v = r;
                for (unsigned i = 0; i < n; ++i) {
                    prob *= p[v & 1];
                    v >>= 1;
                }
                typical_mass += prob;
            }
        CHECK(exact == doctest::Approx(1.0 - typical_mass).epsilon(1e-12));
        CHECK(exact <= atypicality_probability_bound(p, n, eps) + 1e-12);
    }
    // ternary source goes through the multinomial path
    Pmf q({0.5, 0.3, 0.2});
    double exact3 = atypicality_probability_exact(q, 6, 0.4);
    double mass = 0.0;
    for (std::uint64_t r = 0; r < 729; ++r)
        if (oracle_typical(r, q, 6, 0.4)) {
            double prob = 1.0;
            std::uint64_t v = r;
            for (unsigned i = 0; i < 6; ++i) {
                prob *= q[v % 3];
                v /= 3;
            }
            mass += prob;
        }
    CHECK(exact3 == doctest::Approx(1.0 - mass).epsilon(1e-12));
}

TEST_CASE("ts_encode: typical inputs ignore the seed, atypical are reproducible") {
    TypicalSetIndex idx = build_typical_index(Pmf::bernoulli(0.5), 4, 0.5);
    Sequence typical{0, 0, 1, 1};
    BitSource s1 = BitSource::from_stream(SplitMix64(1));
    BitSource s2 = BitSource::from_stream(SplitMix64(999));
    CHECK(ts_encode(typical, idx, s1) == ts_encode(typical, idx, s2));
    CHECK(s1.consumed() == 0);

    Sequence atypical{1, 1, 1, 1};
    BitSource a1 = BitSource::from_stream(SplitMix64(42));
    BitSource a2 = BitSource::from_stream(SplitMix64(42));
    MessageId m1 = ts_encode(atypical, idx, a1);
    CHECK(m1 == ts_encode(atypical, idx, a2));
    CHECK(a1.consumed() > 0);
    CHECK(ts_decode(m1, idx) != atypical);
    CHECK(ts_encode_deterministic(atypical, idx) == 1);

    // a finite seed string that runs dry raises an error
    BitSource tiny = BitSource::from_bits({true});
    CHECK_THROWS_AS(ts_encode(atypical, idx, tiny), std::runtime_error);
}

TEST_CASE("rejection sampling on the fallback draw is uniform") {
    TypicalSetIndex idx = build_typical_index(Pmf::bernoulli(0.5), 4, 0.5);
    BitSource src = BitSource::from_stream(SplitMix64(7));
    Sequence atypical{0, 0, 0, 0};
    const int trials = 140000;
    std::vector<int> hist(idx.count(), 0);
    for (int t = 0; t < trials; ++t) ++hist[ts_encode(atypical, idx, src) - 1];
    double expect = static_cast<double>(trials) / idx.count();
    double sigma = std::sqrt(expect * (1.0 - 1.0 / idx.count()));
    for (int h : hist) CHECK(std::abs(h - expect) <= 5.0 * sigma);
    // rejection consumes 4-bit chunks, more than 4 bits per draw on average
    CHECK(src.consumed() >= 4ull * trials);
}

TEST_CASE("ts_encode pushforward obeys the min-entropy bound") {
    Pmf p = Pmf::bernoulli(0.3);
    for (unsigned n : {10u, 12u}) {
        double eps = 0.3;
        TypicalSetIndex idx = build_typical_index(p, n, eps);
        Pmf out = ts_output_pmf_seeded(idx, p);
        // oracle: full pushforward over all inputs with an ideal uniform
        // fallback draw
        std::vector<double> oracle(idx.count(), 0.0);
        double atyp = 0.0;
        for (std::uint64_t r = 0; r < (1ULL << n); ++r) {
            Sequence x = sequence_from_rank(r, 2, n);
            double prob = sequence_probability(x, p);
            MessageId m = idx.find(x);
            if (m != 0)
                oracle[m - 1] += prob;
            else
                atyp += prob;
        }
        for (auto& v : oracle) v += atyp / static_cast<double>(idx.count());
        for (std::uint64_t m = 0; m < idx.count(); ++m)
            CHECK(out[m] == doctest::Approx(oracle[m]).epsilon(1e-12));

        double delta = atypicality_probability_exact(p, n, eps);
        double h = shannon_entropy(p);
        double bound = std::exp2(-static_cast<double>(n) * (1.0 - eps) * h) / (1.0 - delta);
        CHECK(out.max_prob() <= bound + 1e-15);
        CHECK(min_entropy(out) >=
              n * (1.0 - eps) * h + std::log2(1.0 - delta) - 1e-12);
    }
}

TEST_CASE("blockwise code splits and meters its seed use") {
    Pmf half = Pmf::bernoulli(0.5);
    TypicalSetIndex block = build_typical_index(half, 4, 0.5);
    // all sub-blocks of exact type: no seed consumed
    Sequence x{0, 1, 0, 1, 1, 0, 1, 0, 0, 0, 1, 1, 1, 1, 0, 0};
    BitSource src = BitSource::from_stream(SplitMix64(3));
    auto ms = blockwise_ts_code(x, 4, 4, block, src);
    CHECK(ms.size() == 4);
    CHECK(src.consumed() == 0);
    for (unsigned b = 0; b < 4; ++b) {
        Sequence piece(x.begin() + 4 * b, x.begin() + 4 * (b + 1));
        CHECK(ts_decode(ms[b], block) == piece);
    }
    CHECK_THROWS_AS(blockwise_ts_code(x, 4, 3, block, src), std::invalid_argument);

    // expected seed use: b * P[atypical] * (bits per draw); the length-4
    // index for Bern(0.3), eps=0.4 has exactly 4 entries, so each fallback
    // draw costs exactly 2 bits
    Pmf p3 = Pmf::bernoulli(0.3);
    TypicalSetIndex b3 = build_typical_index(p3, 4, 0.4);
    CHECK(b3.count() == 4);
    double p_atyp = atypicality_probability_exact(p3, 4, 0.4);
    SplitMix64 gen(99);
    BitSource meter = BitSource::from_stream(SplitMix64(100));
    const int trials = 4000;
    for (int t = 0; t < trials; ++t) {
        Sequence xx(16);
        for (auto& s : xx) s = gen.next_double() < 0.3 ? 1 : 0;
        blockwise_ts_code(xx, 4, 4, b3, meter);
    }
    double per_input = static_cast<double>(meter.consumed()) / trials;
    double expect = 4.0 * p_atyp * 2.0;
    double se = std::sqrt(4.0 * p_atyp * (1.0 - p_atyp) * 4.0 / trials);
    CHECK(std::abs(per_input - expect) <= 3.0 * se);
}

TEST_CASE("typical index cache file roundtrip") {
    Pmf p({0.6, 0.3, 0.1});
    TypicalSetIndex idx = build_typical_index(p, 6, 0.35);
    std::stringstream buf;
    idx.save(buf);
    TypicalSetIndex back = TypicalSetIndex::load(buf);
    REQUIRE(back.count() == idx.count());
    CHECK(back.n() == idx.n());
    CHECK(back.eps() == idx.eps());
    for (std::size_t a = 0; a < p.size(); ++a) CHECK(back.pmf()[a] == idx.pmf()[a]);
    for (MessageId m = 1; m <= idx.count(); ++m)
        CHECK(back.sequence(m) == idx.sequence(m));

    std::stringstream bad("XXXX not an index");
    CHECK_THROWS_AS(TypicalSetIndex::load(bad), std::runtime_error);
}

TEST_CASE("enumeration guard rejects oversized requests") {
    CHECK_THROWS_AS(build_typical_index(Pmf::uniform(4), 16, 0.3), std::length_error);
}
