#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "secrecy/pmf.hpp"
#include "secrecy/rng.hpp"
#include "secrecy/typicality.hpp"
#include "secrecy/uniform_compression.hpp"

namespace secrecy {

// Broadcast kernel p_{YZ|X} over finite alphabets with derived marginals.
class WiretapChannel {
public:
    WiretapChannel(std::size_t x_size, std::size_t y_size, std::size_t z_size,
                   std::vector<double> kernel);  // kernel[(x*y+y_i)*z+z_i]

    // physically degraded pairs
    static WiretapChannel bsc_pair(double p1, double p2);
    static WiretapChannel bec_pair(double e1, double e2);  // erasure symbol = 2
    // plain text: "x y z" sizes header then row-major probabilities
    static WiretapChannel from_kernel_file(std::istream& is);

    std::size_t x_size() const { return x_size_; }
    std::size_t y_size() const { return y_size_; }
    std::size_t z_size() const { return z_size_; }

    double joint(std::size_t x, std::size_t y, std::size_t z) const;
    double main(std::size_t y, std::size_t x) const;    // p_{Y|X}
    double eaves(std::size_t z, std::size_t x) const;   // p_{Z|X}

    // inverse-CDF sample of (y, z) given x
    std::pair<std::uint8_t, std::uint8_t> sample(std::size_t x, SplitMix64& gen) const;

private:
    std::size_t x_size_, y_size_, z_size_;
    std::vector<double> kernel_;
    std::vector<double> main_;   // y-major per x
    std::vector<double> eaves_;  // z-major per x
};

// exact (I(X;Y), I(X;Z)) in bits under input distribution p_x
std::pair<double, double> mutual_informations(const Pmf& p_x, const WiretapChannel& ch);

// One-sided achievability check of the rate region over a grid of
// conditionals p_{X|Q} mixed by a time-sharing Q with at most 3 atoms.
struct FeasibilityResult {
    bool feasible = false;
    std::vector<double> q_weights;  // present iff feasible, <= 3 atoms
    std::vector<Pmf> x_given_q;
    // margins of the strict constraints, evaluated at the best point found:
    // { I(X;Y|Q) - (H_c + H_p), (I(X;Y|Q) - I(X;Z|Q)) - H_c, H_p - I(X;Z|Q) }
    std::array<double, 3> slacks{0.0, 0.0, 0.0};
};

FeasibilityResult region_feasible(double h_c, double h_p, const WiretapChannel& ch,
                                  unsigned grid = 64);

// Nested random codebook: n0 cloud centers from p_Q, and n0*nc*np codewords
// from p_{X|Q} conditioned per position on the center.
struct WiretapCodebook {
    unsigned n = 0;
    double r0 = 0.0, rc = 0.0, rp = 0.0;  // realized rates (1/n) log2 count
    std::uint64_t n0 = 0, nc = 0, np = 0;
    std::size_t q_alphabet = 0, x_alphabet = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint8_t> q_words;  // n0 x n
    std::vector<std::uint8_t> x_words;  // n0 x nc x np x n

    Sequence q_word(std::uint64_t i) const;
    Sequence x_word(std::uint64_t i, std::uint64_t j, std::uint64_t s) const;
};

// message-set sizes rounded up from the target rates
WiretapCodebook build_codebook(const Pmf& p_q, const std::vector<Pmf>& p_x_given_q,
                               unsigned n, double r0, double rc, double rp,
                               std::uint64_t seed);
WiretapCodebook build_codebook_counts(const Pmf& p_q, const std::vector<Pmf>& p_x_given_q,
                                      unsigned n, std::uint64_t n0, std::uint64_t nc,
                                      std::uint64_t np, std::uint64_t seed);

Sequence wiretap_encode(std::uint64_t i, std::uint64_t j, std::uint64_t s,
                        const WiretapCodebook& cb);

struct BobResult {
    DecodeStatus status = DecodeStatus::no_candidate;
    std::uint64_t i = 0, j = 0, s = 0;
};

// Two-stage joint-typicality decoder: the unique cloud center i with
// (q^n(i), y^n) typical, then the unique (j, s) with (q^n(i), x^n(i,j,s),
// y^n) typical. Zero or multiple candidates at either stage is an error.
class BobDecoder {
public:
    BobDecoder(const WiretapCodebook& cb, const Pmf& p_q,
               const std::vector<Pmf>& p_x_given_q, const WiretapChannel& ch,
               double eps);
    BobResult decode(const Sequence& y) const;

private:
    const WiretapCodebook* cb_;
    Pmf p_qy_flat_;
    Pmf p_qxy_flat_;
    double eps_;
    std::size_t y_size_, x_size_;
};

// Exact secrecy metric max_m V(p_{Z^n | M_c = m}, p_{Z^n}) where the public
// index s is drawn from p_mp, the cloud index uniformly, and the
// unconditional law mixes messages by p_mc (uniform by default; the mux
// runners pass the exact pushforward of the confidential source code).
std::vector<double> leakage_per_message(const WiretapCodebook& cb,
                                        const WiretapChannel& ch, const Pmf& p_mp,
                                        const std::optional<Pmf>& p_mc = std::nullopt);
double leakage_exact(const WiretapCodebook& cb, const WiretapChannel& ch,
                     const Pmf& p_mp, const std::optional<Pmf>& p_mc = std::nullopt);

enum class MuxArchitecture { A, B };

// End-to-end multiplexing system at a common source/channel blocklength.
// Architecture A randomizes the wiretap code with the (non-uniform) output
// of a seeded typical-sequence code; architecture B compresses the public
// source with a uniform compression code whose seed is shared with the
// decoder.
struct MuxConfig {
    MuxArchitecture arch = MuxArchitecture::A;
    Dms source_c{Pmf::bernoulli(0.3), "confidential"};
    Dms source_p{Pmf::bernoulli(0.3), "public"};
    WiretapChannel channel = WiretapChannel::bsc_pair(0.05, 0.2);
    unsigned n = 6;
    double eps_source = 0.3;
    double eps_decoder = 0.3;
    Pmf input_dist = Pmf::uniform(2);  // codeword distribution (|Q| = 1)
    double ucc_rate = 1.1;             // arch B public compressor rate
    unsigned ucc_seed_len = 4;         // arch B shared seed bits per block
    bool ucc_identity = false;  // arch B: lossless identity map instead of
                                // random binning (seedless; for uniform
                                // public sources this reduces the system to
                                // a uniform-randomization wiretap run)
    std::uint64_t codebook_seed = 1;
};

struct MuxReport {
    std::string arch;
    unsigned n = 0;
    double r0 = 0.0, rc = 0.0, rp = 0.0;
    double pe = 0.0;
    std::uint64_t trials = 0;
    double leakage = 0.0;
    std::string leakage_mode;  // "exact" or "mc"
    double ue_public = 0.0;
    double h2_public_per_n = 0.0;
    double i_xz = 0.0;  // I(X;Z|Q) of the configured input distribution
    std::uint64_t seed_bits = 0;
    std::uint64_t master_seed = 0;
    // architecture B triangle-inequality budget: measured leakage against
    // the uniform-randomization leakage plus the public nonuniformity
    double leakage_uniform = 0.0;
    double v_public_uniform = 0.0;
    bool budget_ok = false;       // leakage <= leakage_uniform + V + 1e-9
    bool budget_strict_ok = false;  // leakage <= leakage_uniform + 2V + 1e-9
};

MuxReport mux_a_run(const MuxConfig& cfg, std::uint64_t trials, std::uint64_t master_seed);
MuxReport mux_b_run(const MuxConfig& cfg, std::uint64_t trials, std::uint64_t master_seed);

std::string mux_report_json(const MuxReport& r);

}  // namespace secrecy
