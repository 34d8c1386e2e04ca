#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "secrecy/pmf.hpp"
#include "secrecy/rng.hpp"

namespace secrecy {

// Source polarization transform a = x * G_N over GF(2), with G_N the pure
// Kronecker power of [[1,0],[1,1]] (no bit-reversal permutation). The
// transform is an involution. O(N log N) butterfly.
std::vector<std::uint8_t> polar_transform(std::vector<std::uint8_t> x);

// Same transform on bits packed into a word (bit i = position i), N <= 64.
std::uint64_t polar_transform_packed(std::uint64_t x, unsigned n_bits);

// delta_N = 2^{-N^beta}
double polar_threshold(unsigned n_bits, double beta);

// Exact H(A_i | A^{i-1}) in bits for a binary source, by full enumeration
// of the 2^N source sequences. N <= 16.
std::vector<double> cond_entropy_exact(const Pmf& p, unsigned n_bits);

struct McEntropyResult {
    std::vector<double> estimates;
    std::vector<double> std_errors;  // standard error of each estimate
};

// Monte Carlo estimates of H(A_i | A^{i-1}): for each sampled X^N the
// successive-cancellation recursion yields P(A_i = a_i | A^{i-1}) for all i
// in O(N log N); averaging -log2 of those is unbiased per index.
// Deterministic for a fixed master seed.
McEntropyResult cond_entropy_mc(const Pmf& p, unsigned n_bits, std::uint64_t samples,
                                std::uint64_t master_seed);

// Threshold rule: v_set = {i : H_i > 1 - delta_N}, h_set = {i : H_i > delta_N}.
// Indices are 0-based and ascending; v_set is always a subset of h_set.
struct PolarSets {
    std::vector<std::uint32_t> v_set;
    std::vector<std::uint32_t> h_set;
};
PolarSets construct_sets(const std::vector<double>& entropies, unsigned n_bits,
                         double beta);

struct PolarConstruction {
    unsigned n_bits = 0;  // N, a power of two
    Pmf source{std::vector<double>{1.0}};
    double beta = 0.0;
    double delta_n = 0.0;
    std::vector<double> cond_entropies;
    PolarSets sets;
    std::string method;  // "exact" or "monte-carlo"
    std::uint64_t mc_samples = 0;
    std::uint64_t master_seed = 0;
};

PolarConstruction build_polar_construction(const Pmf& p, unsigned n_bits, double beta,
                                           const std::string& method,
                                           std::uint64_t mc_samples,
                                           std::uint64_t master_seed);

// Successive-cancellation pass shared by the entropy estimator and the
// decoder. Bits with known_mask[i] != 0 take known_vals[i]; other bits are
// decided by maximum likelihood given the prefix (ties toward 0).
struct ScResult {
    std::vector<std::uint8_t> output;          // a^N, known or decided
    std::vector<std::uint8_t> realized_input;  // x^N consistent with output
    std::vector<double> prob_used;             // P(A_i = output_i | A^{i-1})
};
ScResult sc_pass(const Pmf& p, const std::vector<std::uint8_t>& known_mask,
                 const std::vector<std::uint8_t>& known_vals);

// Uniform compression code of the polar construction: the message is
// [A[v_set], A[h_set \ v_set] xor seed]; the padded block is exactly
// uniform. Message width |h_set| defines the operational rate.
class PolarUcCode {
public:
    explicit PolarUcCode(PolarConstruction construction);

    const PolarConstruction& construction() const { return construction_; }
    unsigned seed_len() const { return static_cast<unsigned>(pad_set_.size()); }
    unsigned message_len() const;
    const std::vector<std::uint32_t>& pad_set() const { return pad_set_; }

    std::vector<std::uint8_t> encode(const std::vector<std::uint8_t>& x,
                                     const std::vector<std::uint8_t>& seed_bits) const;
    std::vector<std::uint8_t> decode(const std::vector<std::uint8_t>& message,
                                     const std::vector<std::uint8_t>& seed_bits) const;

private:
    PolarConstruction construction_;
    std::vector<std::uint32_t> pad_set_;  // h_set \ v_set
};

// empirical roundtrip error rate over random source blocks and seeds
double polar_roundtrip_pe(const PolarUcCode& code, std::uint64_t trials,
                          std::uint64_t master_seed);

// Construction cache. The header records (N, beta, source as a reduced
// fraction, method, samples, master seed); load returns nothing on any
// header mismatch. Entropies are stored as 64-bit fixed point (2^62 scale).
void polar_cache_save(std::ostream& os, const PolarConstruction& c,
                      const std::string& p1_decimal);
std::optional<PolarConstruction> polar_cache_load(std::istream& is, unsigned n_bits,
                                                  double beta,
                                                  const std::string& p1_decimal,
                                                  const std::string& method,
                                                  std::uint64_t mc_samples,
                                                  std::uint64_t master_seed);

// "0.11" -> (11, 100), reduced
std::pair<std::uint64_t, std::uint64_t> decimal_to_fraction(const std::string& s);

}  // namespace secrecy
