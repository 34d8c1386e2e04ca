#include <doctest.h>

#include <cmath>
#include <sstream>

#include "secrecy/info.hpp"
#include "secrecy/wiretap.hpp"

using namespace secrecy;

namespace {

// y = x, z = x noiselessly
WiretapChannel noiseless_channel() {
    std::vector<double> kernel(8, 0.0);
    kernel[(0 * 2 + 0) * 2 + 0] = 1.0;
    kernel[(1 * 2 + 1) * 2 + 1] = 1.0;
    return WiretapChannel(2, 2, 2, std::move(kernel));
}

// main BSC(q), eavesdropper output independent uniform
WiretapChannel z_independent_channel(double q) {
    std::vector<double> kernel(8, 0.0);
    for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y)
            for (std::size_t z = 0; z < 2; ++z)
                kernel[(x * 2 + y) * 2 + z] = ((y == x) ? 1.0 - q : q) * 0.5;
    return WiretapChannel(2, 2, 2, std::move(kernel));
}

// largest H_c for which some H_p makes the checker feasible
double max_feasible_hc(const WiretapChannel& ch, unsigned grid) {
    double lo = 0.0, hi = 1.5;
    for (int it = 0; it < 30; ++it) {
        double mid = 0.5 * (lo + hi);
        bool ok = false;
        for (int k = 1; k <= 128 && !ok; ++k) {
            double hp = k / 128.0;
            ok = region_feasible(mid, hp, ch, grid).feasible;
        }
        (ok ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

TEST_CASE("channel presets and kernel files") {
    WiretapChannel bsc = WiretapChannel::bsc_pair(0.05, 0.2);
    CHECK(bsc.main(1, 0) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(bsc.eaves(1, 0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(bsc.eaves(0, 1) == doctest::Approx(0.2).epsilon(1e-12));

    WiretapChannel bec = WiretapChannel::bec_pair(0.1, 0.3);
    CHECK(bec.main(2, 0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(bec.eaves(2, 1) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(bec.eaves(1, 1) == doctest::Approx(0.7).epsilon(1e-12));

    std::stringstream file("2 2 2  1 0 0 0  0 0 0 1");
    WiretapChannel noiseless = WiretapChannel::from_kernel_file(file);
    CHECK(noiseless.main(0, 0) == 1.0);
    CHECK(noiseless.eaves(1, 1) == 1.0);
    std::stringstream bad("2 2");
    CHECK_THROWS_AS(WiretapChannel::from_kernel_file(bad), std::runtime_error);
    CHECK_THROWS_AS(WiretapChannel::bsc_pair(0.3, 0.1), std::invalid_argument);
}

TEST_CASE("mutual informations") {
    Pmf uniform = Pmf::uniform(2);
    auto [iy0, iz0] = mutual_informations(uniform, z_independent_channel(0.1));
    CHECK(iz0 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(iy0 == doctest::Approx(1.0 - binary_entropy(0.1)).epsilon(1e-12));

    auto [iy1, iz1] = mutual_informations(uniform, noiseless_channel());
    CHECK(iy1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(iz1 == doctest::Approx(1.0).epsilon(1e-12));

    auto [iy2, iz2] = mutual_informations(uniform, WiretapChannel::bsc_pair(0.05, 0.2));
    CHECK(iy2 == doctest::Approx(1.0 - binary_entropy(0.05)).epsilon(1e-12));
    CHECK(iz2 == doctest::Approx(1.0 - binary_entropy(0.2)).epsilon(1e-12));
}

TEST_CASE("region feasibility checker") {
    SUBCASE("eavesdropper independent of the input") {
        WiretapChannel ch = z_independent_channel(0.0);  // noiseless main, I max = 1
        FeasibilityResult r = region_feasible(0.5, 0.4, ch);
        CHECK(r.feasible);
        REQUIRE(!r.q_weights.empty());
        CHECK(r.q_weights.size() <= 3);
        // slacks recomputed from the witness agree with the constraints
        double iy = 0.0, iz = 0.0;
        for (std::size_t k = 0; k < r.q_weights.size(); ++k) {
            auto [a, b] = mutual_informations(r.x_given_q[k], ch);
            iy += r.q_weights[k] * a;
            iz += r.q_weights[k] * b;
        }
        CHECK(r.slacks[0] == doctest::Approx(iy - 0.9).epsilon(1e-9));
        CHECK(r.slacks[1] == doctest::Approx(iy - iz - 0.5).epsilon(1e-9));
        CHECK(r.slacks[2] == doctest::Approx(0.4 - iz).epsilon(1e-9));
        // sum constraint violated: infeasible
        CHECK_FALSE(region_feasible(0.7, 0.5, ch).feasible);
        // H_c above the best main-channel information: infeasible
        CHECK_FALSE(region_feasible(1.2, 0.4, ch).feasible);
    }
    SUBCASE("monotone in H_c and grid refinement") {
        WiretapChannel ch = WiretapChannel::bsc_pair(0.05, 0.2);
        double hp = 0.4;
        for (double hc : {0.1, 0.2, 0.3}) {
            FeasibilityResult r64 = region_feasible(hc, hp, ch, 64);
            if (r64.feasible) {
                CHECK(region_feasible(hc - 0.05, hp, ch, 64).feasible);
                CHECK(region_feasible(hc, hp, ch, 128).feasible);
            }
        }
    }
    SUBCASE("degraded BSC: best H_c approaches the closed form from below") {
        WiretapChannel ch = WiretapChannel::bsc_pair(0.05, 0.2);
        double target = binary_entropy(0.2) - binary_entropy(0.05);
        double hc16 = max_feasible_hc(ch, 16);
        double hc64 = max_feasible_hc(ch, 64);
        CHECK(hc16 <= hc64 + 1e-9);
        CHECK(hc64 <= target + 1e-6);
        CHECK(hc64 >= target - 0.02);
    }
}

TEST_CASE("codebook construction") {
    Pmf q({1.0});
    std::vector<Pmf> pxq = {Pmf::uniform(2)};
    SUBCASE("rate zero gives a single cloud center") {
        WiretapCodebook cb = build_codebook(q, pxq, 6, 0.0, 0.5, 0.5, 42);
        CHECK(cb.n0 == 1);
        CHECK(cb.nc == 8);  // ceil(2^3)
        CHECK(cb.np == 8);
    }
    SUBCASE("fixed seed reproduces the codebook") {
        WiretapCodebook a = build_codebook_counts(q, pxq, 6, 1, 4, 4, 7);
        WiretapCodebook b = build_codebook_counts(q, pxq, 6, 1, 4, 4, 7);
        CHECK(a.x_words == b.x_words);
        WiretapCodebook c = build_codebook_counts(q, pxq, 6, 1, 4, 4, 8);
        CHECK(a.x_words != c.x_words);
    }
    SUBCASE("codeword symbol frequencies match the input law") {
        Pmf px({0.3, 0.7});
        WiretapCodebook cb = build_codebook_counts(q, {px}, 6, 1, 8, 8, 3);
        double ones = 0.0;
        for (std::uint8_t s : cb.x_words) ones += s;
        double total = static_cast<double>(cb.x_words.size());
        double se = std::sqrt(0.3 * 0.7 / total);
        CHECK(std::abs(ones / total - 0.7) <= 3.0 * se);
    }
    SUBCASE("scale guard") {
        CHECK_THROWS_AS(build_codebook_counts(q, pxq, 16, 1, 1 << 12, 1 << 12, 1),
                        std::length_error);
    }
}

TEST_CASE("bob decoder on a noiseless channel") {
    WiretapChannel ch = noiseless_channel();
    Pmf q({1.0});
    std::vector<Pmf> pxq = {Pmf::uniform(2)};
    // find a seed whose 8 codewords are all distinct
    std::uint64_t seed = 1;
    WiretapCodebook cb = build_codebook_counts(q, pxq, 6, 1, 2, 4, seed);
    auto distinct = [&]() {
        for (std::uint64_t a = 0; a < 8; ++a)
            for (std::uint64_t b = a + 1; b < 8; ++b)
                if (cb.x_word(1, a / 4 + 1, a % 4 + 1) == cb.x_word(1, b / 4 + 1, b % 4 + 1))
                    return false;
        return true;
    };
    while (!distinct()) cb = build_codebook_counts(q, pxq, 6, 1, 2, 4, ++seed);

    BobDecoder bob(cb, q, pxq, ch, 1.0);
    for (std::uint64_t j = 1; j <= 2; ++j)
        for (std::uint64_t s = 1; s <= 4; ++s) {
            Sequence y = wiretap_encode(1, j, s, cb);
            BobResult r = bob.decode(y);
            REQUIRE(r.status == DecodeStatus::ok);
            CHECK(r.i == 1);
            CHECK(r.j == j);
            CHECK(r.s == s);
        }

    // two identical cloud centers make stage 1 ambiguous
    WiretapCodebook twin = build_codebook_counts(q, pxq, 6, 2, 1, 1, 5);
    BobDecoder bob2(twin, q, pxq, ch, 1.0);
    Sequence y = wiretap_encode(1, 1, 1, twin);
    CHECK(bob2.decode(y).status == DecodeStatus::ambiguous);
}

TEST_CASE("bob decode error rate: monte carlo matches exact enumeration") {
    WiretapChannel ch = WiretapChannel::bsc_pair(0.05, 0.2);
    Pmf q({1.0});
    std::vector<Pmf> pxq = {Pmf::uniform(2)};
    WiretapCodebook cb = build_codebook_counts(q, pxq, 5, 1, 2, 2, 9);
    BobDecoder bob(cb, q, pxq, ch, 0.6);

    // exact average error over uniform (j, s) by enumerating all y^5
    double exact_err = 0.0;
    for (std::uint64_t j = 1; j <= 2; ++j)
        for (std::uint64_t s = 1; s <= 2; ++s) {
            Sequence x = cb.x_word(1, j, s);
            for (std::uint64_t yr = 0; yr < 32; ++yr) {
                Sequence y(5);
                double py = 0.25;  // uniform message pair
                for (unsigned pos = 0; pos < 5; ++pos) {
                    y[pos] = (yr >> pos) & 1;
                    py *= ch.main(y[pos], x[pos]);
                }
                if (py == 0.0) continue;
                BobResult r = bob.decode(y);
                if (r.status != DecodeStatus::ok || r.j != j || r.s != s) exact_err += py;
            }
        }

    SplitMix64 gen(31337);
    const int trials = 4000;
    int errs = 0;
    for (int t = 0; t < trials; ++t) {
        std::uint64_t j = 1 + gen.next_below(2);
        std::uint64_t s = 1 + gen.next_below(2);
        Sequence x = cb.x_word(1, j, s);
        Sequence y(5);
        for (unsigned pos = 0; pos < 5; ++pos) y[pos] = ch.sample(x[pos], gen).first;
        BobResult r = bob.decode(y);
        if (r.status != DecodeStatus::ok || r.j != j || r.s != s) ++errs;
    }
    double mc = static_cast<double>(errs) / trials;
    double se = std::sqrt(exact_err * (1.0 - exact_err) / trials);
    CHECK(std::abs(mc - exact_err) <= 3.0 * se + 1e-9);
}

TEST_CASE("exact leakage") {
    Pmf q({1.0});
    SUBCASE("codewords identical across confidential messages leak nothing") {
        std::vector<Pmf> pxq = {Pmf::uniform(2)};
        WiretapCodebook cb = build_codebook_counts(q, pxq, 4, 1, 2, 2, 6);
        // overwrite so message 2 reuses the words of message 1
        for (std::uint64_t s = 0; s < 2; ++s)
            for (unsigned pos = 0; pos < 4; ++pos)
                cb.x_words[((0 * 2 + 1) * 2 + s) * 4 + pos] =
                    cb.x_words[((0 * 2 + 0) * 2 + s) * 4 + pos];
        double leak = leakage_exact(cb, WiretapChannel::bsc_pair(0.05, 0.2),
                                    Pmf::uniform(2));
        CHECK(leak == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("independent eavesdropper output leaks nothing") {
        std::vector<Pmf> pxq = {Pmf::uniform(2)};
        WiretapCodebook cb = build_codebook_counts(q, pxq, 4, 1, 4, 2, 6);
        double leak = leakage_exact(cb, z_independent_channel(0.1), Pmf::uniform(2));
        CHECK(leak == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("n=1 noiseless with distinct codewords leaks everything") {
        std::vector<Pmf> pxq = {Pmf::uniform(2)};
        WiretapCodebook cb = build_codebook_counts(q, pxq, 1, 1, 2, 1, 6);
        cb.x_words = {0, 1};  // m=1 -> symbol 0, m=2 -> symbol 1
        double leak = leakage_exact(cb, noiseless_channel(), Pmf::uniform(1));
        // oracle: V(point mass at 0, (1/2, 1/2)) = 1
        CHECK(leak == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("more public randomization lowers the mean leakage") {
        std::vector<Pmf> pxq = {Pmf::uniform(2)};
        WiretapChannel ch = WiretapChannel::bsc_pair(0.05, 0.2);
        double mean_big = 0.0, mean_small = 0.0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            WiretapCodebook big = build_codebook_counts(q, pxq, 6, 1, 2, 16, seed);
            WiretapCodebook small = build_codebook_counts(q, pxq, 6, 1, 2, 2, seed);
            mean_big += leakage_exact(big, ch, Pmf::uniform(16)) / 5.0;
            mean_small += leakage_exact(small, ch, Pmf::uniform(2)) / 5.0;
        }
        CHECK(mean_big < mean_small);
        CHECK(mean_big >= 0.0);
        CHECK(mean_small <= 2.0);
    }
}

TEST_CASE("source-level leakage decomposition bound") {
    // with the deterministic confidential encoder, the source-level metric
    // max_{v_c} V(p_{Z|v_c}, p_Z) never exceeds the per-message
    // decomposition sum_m p(m|v_c) V(p_{Z|m}, p_Z)
    Pmf pc = Pmf::bernoulli(0.3);
    unsigned n = 4;
    TypicalSetIndex index_c = build_typical_index(pc, n, 0.5);
    Pmf q({1.0});
    std::vector<Pmf> pxq = {Pmf::uniform(2)};
    WiretapCodebook cb =
        build_codebook_counts(q, pxq, n, 1, index_c.count(), 4, 12);
    Pmf p_mc = ts_output_pmf_deterministic(index_c, pc);
    std::vector<double> per_m = leakage_per_message(
        cb, WiretapChannel::bsc_pair(0.05, 0.2), Pmf::uniform(4), p_mc);
    double worst_source = 0.0;
    for (std::uint64_t r = 0; r < (1ULL << n); ++r) {
        Sequence vc = sequence_from_rank(r, 2, n);
        MessageId m = ts_encode_deterministic(vc, index_c);
        // deterministic map: the conditional law of Z given v_c equals the
        // law given m, so both sides coincide per input
        worst_source = std::max(worst_source, per_m[m - 1]);
    }
    double worst_message = *std::max_element(per_m.begin(), per_m.end());
    CHECK(worst_source <= worst_message + 1e-12);
}

TEST_CASE("mux architecture A") {
    SUBCASE("deterministic sources over a noiseless channel never err") {
        MuxConfig cfg;
        cfg.arch = MuxArchitecture::A;
        cfg.source_c = {Pmf::point_mass(2, 0), "const0"};
        cfg.source_p = {Pmf::point_mass(2, 1), "const1"};
        cfg.channel = noiseless_channel();
        cfg.n = 6;
        cfg.eps_source = 0.5;
        cfg.eps_decoder = 1.0;
        MuxReport r = mux_a_run(cfg, 500, 99);
        CHECK(r.pe == 0.0);
        CHECK(r.leakage_mode == "exact");
    }
    SUBCASE("fixed master seed reproduces the report bit for bit") {
        MuxConfig cfg;
        cfg.n = 6;
        cfg.eps_source = 0.4;
        MuxReport a = mux_a_run(cfg, 400, 123);
        MuxReport b = mux_a_run(cfg, 400, 123);
        CHECK(mux_report_json(a) == mux_report_json(b));
        MuxReport c = mux_a_run(cfg, 400, 124);
        CHECK(mux_report_json(a) != mux_report_json(c));
    }
    SUBCASE("report json carries the contract keys") {
        MuxConfig cfg;
        cfg.n = 5;
        cfg.eps_source = 0.5;
        std::string j = mux_report_json(mux_a_run(cfg, 200, 7));
        for (const char* key :
             {"\"arch\"", "\"n\"", "\"rates\"", "\"pe\"", "\"leakage\"",
              "\"leakage_mode\"", "\"ue_public\"", "\"h2_public_per_n\"",
              "\"seed_bits\"", "\"master_seed\""})
            CHECK(j.find(key) != std::string::npos);
    }
}

TEST_CASE("mux architecture B") {
    SUBCASE("budget fields and triangle-inequality check") {
        MuxConfig cfg;
        cfg.arch = MuxArchitecture::B;
        cfg.n = 6;
        cfg.eps_source = 0.4;
        cfg.ucc_rate = 1.0;
        cfg.ucc_seed_len = 4;
        MuxReport r = mux_b_run(cfg, 500, 55);
        CHECK(r.arch == "B");
        CHECK(r.budget_strict_ok);  // rigorous 2V budget must always hold
        CHECK(r.leakage <= 2.0);
        CHECK(r.ue_public == r.v_public_uniform);
        CHECK(r.seed_bits == 500 * 4);
        std::string j = mux_report_json(r);
        CHECK(j.find("\"budget\"") != std::string::npos);
        CHECK(j.find("\"budget_ok\"") != std::string::npos);
    }
    SUBCASE("uniform public source with identity compressor matches arch A") {
        // with a loose typicality parameter the arch-A public code is the
        // identity map too, so both systems are the same wiretap run
        MuxConfig base;
        base.source_p = {Pmf::bernoulli(0.5), "uniform"};
        base.n = 5;
        base.eps_source = 10.0;
        base.eps_decoder = 0.5;
        base.codebook_seed = 3;

        MuxConfig cfg_a = base;
        cfg_a.arch = MuxArchitecture::A;
        MuxReport ra = mux_a_run(cfg_a, 4000, 11);

        MuxConfig cfg_b = base;
        cfg_b.arch = MuxArchitecture::B;
        cfg_b.ucc_identity = true;
        MuxReport rb = mux_b_run(cfg_b, 4000, 12);

        CHECK(rb.rp == doctest::Approx(ra.rp).epsilon(1e-12));
        CHECK(rb.ue_public == doctest::Approx(ra.ue_public).epsilon(1e-9));
        CHECK(rb.leakage == doctest::Approx(ra.leakage).epsilon(1e-9));
        double se = std::sqrt(std::max(ra.pe * (1 - ra.pe), 1e-6) / 4000.0);
        CHECK(std::abs(ra.pe - rb.pe) <= 3.0 * std::sqrt(2.0) * se + 1e-9);
    }
    SUBCASE("seed mismatch scrambles the public reconstruction") {
        Pmf p = Pmf::bernoulli(0.3);
        unsigned n = 6, d = 4;
        TypicalSetIndex index = build_typical_index(p, n, 0.4);
        BinningCode code = rb_build(p, make_uc_params(n, 1.0, d), 0.4, 21);
        SplitMix64 gen(77);
        int fails = 0;
        const int trials = 3000;
        for (int t = 0; t < trials; ++t) {
            Sequence x(n);
            do {
                for (auto& s : x) s = gen.next_double() < 0.3 ? 1 : 0;
            } while (!is_typical(x, p, 0.4));  // isolate the seed effect
            std::uint64_t u_enc = gen.next_below(16);
            std::uint64_t u_dec = gen.next_below(16);
            MessageId m = code.encode(x, u_enc);
            RbDecodeResult dec = rb_decode(m, u_dec, code, index);
            if (dec.status != DecodeStatus::ok || dec.sequence != x) ++fails;
        }
        double rate = static_cast<double>(fails) / trials;
        // about 1 - 2^-4, minus the cross-seed collision slack
        CHECK(rate >= 0.85);
        CHECK(rate <= 0.99);
    }
}
