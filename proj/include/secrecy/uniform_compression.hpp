#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "secrecy/extractor.hpp"
#include "secrecy/pmf.hpp"
#include "secrecy/rng.hpp"
#include "secrecy/typicality.hpp"

namespace secrecy {

// Parameters of a (2^{nR}, n, 2^{d_n}) uniform compression code.
struct UcParams {
    unsigned n;
    double rate;
    std::uint64_t message_count;  // M_n = round(2^{nR})
    unsigned seed_len;            // d_n in bits
};

// M_n = round(2^{nR}); realized rates are reported as (1/n) log2 M_n.
UcParams make_uc_params(unsigned n, double rate, unsigned seed_len);

struct UcReport {
    unsigned n = 0;
    double rate = 0.0;
    std::uint64_t message_count = 0;
    unsigned seed_len = 0;
    double pe = 0.0;
    double ue = 0.0;
    double ue_kl = 0.0;
    std::string method;  // "exact" or "monte-carlo"
    std::uint64_t trials = 0;  // 0 when exact
    std::uint64_t seed = 0;
    std::string note;
};

// JSON with fixed keys {n, rate, M_n, d_n, pe, ue, ue_kl, method, trials,
// seed, note}.
std::string uc_report_json(const UcReport& r);

// Random binning: every (x^n, u) pair is assigned independently and
// uniformly to a message in 1..M_n. The assignment is a keyed hash of the
// pair, so codes are reproducible from the recorded seed and need no
// storage; an explicit map is materialized under the storage guard.
class BinningCode {
public:
    BinningCode(Pmf source, UcParams params, double eps1, std::uint64_t randomization_seed);

    const UcParams& params() const { return params_; }
    const Pmf& source() const { return source_; }
    double eps1() const { return eps1_; }
    std::uint64_t randomization_seed() const { return seed_; }
    std::uint64_t domain_size() const { return domain_; }
    std::uint64_t seed_space() const { return 1ULL << params_.seed_len; }

    // 1-based message for (sequence rank, seed value)
    MessageId bin(std::uint64_t x_rank, std::uint64_t u) const;
    MessageId encode(const Sequence& x, std::uint64_t u) const;

    // explicit map when alphabet^n * 2^{d_n} is under the storage guard
    const std::vector<std::uint32_t>* explicit_map() const;

    void save(std::ostream& os) const;
    static BinningCode load(std::istream& is);

private:
    MessageId bin_hash(std::uint64_t x_rank, std::uint64_t u) const;

    Pmf source_;
    UcParams params_;
    double eps1_;
    std::uint64_t seed_;
    std::uint64_t domain_;
    std::vector<std::uint32_t> map_;  // empty when above the storage guard
};

BinningCode rb_build(const Pmf& p, const UcParams& params, double eps1,
                     std::uint64_t randomization_seed);

enum class DecodeStatus { ok, no_candidate, ambiguous };

struct RbDecodeResult {
    DecodeStatus status;
    Sequence sequence;  // valid when status == ok
};

// Returns the unique eps1-typical sequence in bin (m, u), or an error that
// counts toward P_e.
RbDecodeResult rb_decode(MessageId m, std::uint64_t u, const BinningCode& code,
                         const TypicalSetIndex& index);

// Exact pushforward of (X^n, U) through the encoder and exact P_e by
// decoding every pair. Time guard: alphabet^n * 2^{d_n} <= 2^32.
UcReport evaluate_exact(const BinningCode& code, const TypicalSetIndex& index);
Pmf rb_exact_output_pmf(const BinningCode& code);
double rb_exact_pe(const BinningCode& code, const TypicalSetIndex& index);

// Monte Carlo estimate; deterministic for a fixed master seed (trials are
// partitioned into fixed chunks whose partial results merge in order).
// U_e and its KL variant are plug-in estimates from the empirical message
// histogram and carry a bias note.
UcReport evaluate_mc(const BinningCode& code, const TypicalSetIndex& index,
                     std::uint64_t trials, std::uint64_t master_seed);

// i.i.d. product pmf over sequence ranks; the exact output law of the
// identity encoder (M_n = alphabet^n, d_n = 0).
Pmf iid_sequence_pmf(const Pmf& p, unsigned n);

// Distribution of log2 p(X^n) as (value, probability) classes: binomial
// classes for binary sources, bucketed dynamic programming (1e-9 buckets)
// otherwise.
std::vector<std::pair<double, double>> logprob_classes(const Pmf& p, unsigned n);

// P[p_{X^n}(X^n) > threshold] from the classes above.
double iid_logprob_tail(const Pmf& p, unsigned n, double threshold_log2);

// Lemma 4 lower bound: 2 (P[p_{X^n}(X^n) > 2^{d_n} / gamma_n] - gamma_n / M_n).
double ue_lower_bound(const Pmf& p, unsigned n, unsigned d_n, std::uint64_t m_n,
                      double gamma_n);

// universal Berry-Esseen constant (Shevtsova); the paper leaves the
// constant unspecified
inline constexpr double kBerryEsseenAlpha = 0.4748;

struct BerryEsseenWindow {
    double exact_window;     // P[X^n in T_n(a,b)], exact
    double gaussian_window;  // Phi(-b) - Phi(-a)
    double eta_bound;        // 2 alpha rho / (sigma^3 sqrt(n))
    double sigma;
    double rho;
};

// Window T_n(a,b) = { 2^{-nH - a sigma sqrt(n)} < p(x^n) <= 2^{-nH - b sigma sqrt(n)} }.
// a may be +infinity; requires a > b >= 0 and sigma > 0 (throws
// std::domain_error for dyadic-flat sources such as Bern(0.5)).
// Throws std::logic_error if |exact - gaussian| exceeds the bound.
BerryEsseenWindow berry_esseen_window(const Pmf& p, unsigned n, double a, double b);

// Typical-sequence source code followed by an invertible extractor on its
// index bits. Message space is {0,1}^w with w = ceil(log2 |T|); the
// extractor seed is the declared seed of the code; atypical fallbacks draw
// from the supplied bit source.
class ExtractorPipelineCode {
public:
    ExtractorPipelineCode(TypicalSetIndex index, std::shared_ptr<InvertibleExtractor> ext);

    unsigned width() const { return width_; }
    std::uint64_t message_count() const { return 1ULL << width_; }
    const TypicalSetIndex& index() const { return index_; }
    const InvertibleExtractor& extractor() const { return *ext_; }

    MessageId encode(const Sequence& x, std::uint64_t ext_seed, BitSource& fallback) const;
    Sequence decode(MessageId m, std::uint64_t ext_seed) const;

    // Exact output pmf over the 2^w messages, marginalized over the
    // extractor seed (and the ideal uniform atypical fallback). Full
    // enumeration under the guard; for extractors whose seed contains a
    // full-width uniform pad (the affine family) the output is exactly
    // uniform, which is used above the guard.
    Pmf exact_output_pmf() const;

    UcReport evaluate_exact() const;

private:
    TypicalSetIndex index_;
    std::shared_ptr<InvertibleExtractor> ext_;
    unsigned width_;
};

}  // namespace secrecy
