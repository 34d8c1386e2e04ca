#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "secrecy/pmf.hpp"
#include "secrecy/rng.hpp"

namespace secrecy {

using Sequence = std::vector<std::uint8_t>;
using MessageId = std::uint64_t;  // message indices are 1-based

// Discrete memoryless source.
struct Dms {
    Pmf pmf;
    std::string description;
};

// Letter typicality in the relative form: for every symbol a,
// |N(a|x^n)/n - p(a)| <= eps * p(a), and N(a) = 0 whenever p(a) = 0.
bool is_typical(const Sequence& x, const Pmf& p, double eps);

// product probability of a sequence under p
double sequence_probability(const Sequence& x, const Pmf& p);

// Enumeration guard for exact paths: alphabet^n must stay below this.
inline constexpr std::uint64_t kEnumerationGuard = 1ULL << 26;

// Ordered enumeration of the eps-letter-typical set of length n, with a
// bijection between messages 1..count and sequences in lexicographic order.
class TypicalSetIndex {
public:
    TypicalSetIndex(Pmf p, unsigned n, double eps);

    unsigned n() const { return n_; }
    double eps() const { return eps_; }
    const Pmf& pmf() const { return pmf_; }
    std::uint64_t count() const { return ranks_.size(); }
    double rate() const;  // R_n = (1/n) log2 count

    // message for a typical sequence, or 0 when x is not typical
    MessageId find(const Sequence& x) const;
    Sequence sequence(MessageId m) const;  // throws out_of_range for bad m

    void save(std::ostream& os) const;
    static TypicalSetIndex load(std::istream& is);

private:
    TypicalSetIndex() : pmf_({1.0}) {}

    Pmf pmf_;
    unsigned n_ = 0;
    double eps_ = 0.0;
    std::vector<std::uint64_t> ranks_;  // lexicographic ranks, sorted
};

TypicalSetIndex build_typical_index(const Pmf& p, unsigned n, double eps);

// Encoder of Lemma 1: a typical input maps to its index; an atypical input
// maps to a uniform message drawn from the seed bits (rejection sampling on
// fixed-width chunks; consumption is visible through the BitSource counter).
MessageId ts_encode(const Sequence& x, const TypicalSetIndex& index, BitSource& seed);

// Variant with a deterministic fallback (atypical -> message 1); used where
// the encoder has no seed. Always an error event for atypical inputs.
MessageId ts_encode_deterministic(const Sequence& x, const TypicalSetIndex& index);

Sequence ts_decode(MessageId m, const TypicalSetIndex& index);

// Independent per-sub-block encoding: x is split into b blocks of length a.
std::vector<MessageId> blockwise_ts_code(const Sequence& x, unsigned a, unsigned b,
                                         const TypicalSetIndex& block_index,
                                         BitSource& seed);

// Exact P[X^n not typical] by summation over type classes.
double atypicality_probability_exact(const Pmf& p, unsigned n, double eps);

// The bound 2 |V| exp(-n eps^2 mu_V) from the Lemma 1 proof (may exceed 1).
double atypicality_probability_bound(const Pmf& p, unsigned n, double eps);

// Exact output pmf of ts_encode over messages, modeling the atypical
// fallback as an ideal uniform draw.
Pmf ts_output_pmf_seeded(const TypicalSetIndex& index, const Pmf& p);

// Exact output pmf of ts_encode_deterministic.
Pmf ts_output_pmf_deterministic(const TypicalSetIndex& index, const Pmf& p);

// rank <-> sequence in lexicographic order (first symbol most significant)
std::uint64_t sequence_rank(const Sequence& x, std::size_t alphabet);
Sequence sequence_from_rank(std::uint64_t rank, std::size_t alphabet, unsigned n);

}  // namespace secrecy
