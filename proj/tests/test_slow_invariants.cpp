#include <doctest.h>

#include <cmath>

#include "secrecy/info.hpp"
#include "secrecy/uniform_compression.hpp"

using namespace secrecy;

// Exact-evaluation trends across blocklengths; these enumerate up to
// 2^32 (x, u) pairs per seed and run for a couple of minutes.

TEST_CASE("blocklength trend: exact pe and ue fall as n grows" *
          doctest::timeout(1200)) {
    Pmf p = Pmf::bernoulli(0.3);
    double h = shannon_entropy(p);
    const double eps1 = 0.5;
    const int seeds = 10;
    struct Row {
        double pe_mean, ue_mean, pe_sd, ue_sd;
    };
    std::vector<Row> rows;
    for (unsigned n : {8u, 12u, 16u}) {
        unsigned d = static_cast<unsigned>(std::ceil(4.0 * std::sqrt(n)));
        TypicalSetIndex index = build_typical_index(p, n, eps1);
        double spe = 0, sue = 0, spe2 = 0, sue2 = 0;
        for (int seed = 1; seed <= seeds; ++seed) {
            BinningCode code = rb_build(p, make_uc_params(n, h + 0.2, d), eps1, seed);
            UcReport r = evaluate_exact(code, index);
            spe += r.pe;
            sue += r.ue;
            spe2 += r.pe * r.pe;
            sue2 += r.ue * r.ue;
        }
        Row row;
        row.pe_mean = spe / seeds;
        row.ue_mean = sue / seeds;
        row.pe_sd = std::sqrt(std::max(0.0, spe2 / seeds - row.pe_mean * row.pe_mean));
        row.ue_sd = std::sqrt(std::max(0.0, sue2 / seeds - row.ue_mean * row.ue_mean));
        rows.push_back(row);
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double pe_slack = 2.0 * (rows[i].pe_sd + rows[i - 1].pe_sd);
        double ue_slack = 2.0 * (rows[i].ue_sd + rows[i - 1].ue_sd);
        CHECK(rows[i].pe_mean <= rows[i - 1].pe_mean + pe_slack);
        CHECK(rows[i].ue_mean <= rows[i - 1].ue_mean + ue_slack);
    }
    // frozen from the exact evaluation (seeds 1..10)
    CHECK(rows[0].pe_mean == doctest::Approx(0.552254).epsilon(1e-4));
    CHECK(rows[2].ue_mean == doctest::Approx(0.016029).epsilon(1e-3));
}

TEST_CASE("seed effect: a ceil(4 sqrt n) seed beats no seed at n = 12" *
          doctest::timeout(600)) {
    Pmf p = Pmf::bernoulli(0.3);
    double h = shannon_entropy(p);
    TypicalSetIndex index = build_typical_index(p, 12, 0.5);
    double ue0 = 0.0, ue14 = 0.0;
    for (int seed = 1; seed <= 10; ++seed) {
        BinningCode c0 = rb_build(p, make_uc_params(12, h + 0.2, 0), 0.5, seed);
        BinningCode c14 = rb_build(p, make_uc_params(12, h + 0.2, 14), 0.5, seed);
        ue0 += evaluate_exact(c0, index).ue / 10.0;
        ue14 += evaluate_exact(c14, index).ue / 10.0;
    }
    CHECK(ue14 < ue0);
    CHECK(ue0 == doctest::Approx(1.454816).epsilon(1e-4));
    CHECK(ue14 == doctest::Approx(0.021228).epsilon(1e-4));
}
