#pragma once

#include <cstdint>
#include <utility>

#include "secrecy/pmf.hpp"
#include "secrecy/rng.hpp"

namespace secrecy {

// All entropies and divergences are in bits (log base 2).

double shannon_entropy(const Pmf& p);
double renyi2_entropy(const Pmf& p);
double min_entropy(const Pmf& p);

// binary entropy h(p) in bits
double binary_entropy(double p);

// Unnormalized L1 distance, range [0, 2].
double variational_distance(const Pmf& p, const Pmf& q);

// KL divergence in bits; +infinity when support(p) is not contained in
// support(q).
double kl_divergence(const Pmf& p, const Pmf& q);

// Minimum mismatch probability over couplings of (p, q); equals
// variational_distance / 2. The paper states P[E] = V for the optimal
// coupling, but the standard identity under its unnormalized V is V/2,
// which is what the overlap construction below realizes.
double optimal_coupling_mismatch(const Pmf& p, const Pmf& q);

// Samples pairs from the mismatch-optimal coupling: with probability
// sum(min(p,q)) both coordinates are drawn equal from the overlap, else
// each is drawn from its residual (residual supports are disjoint, so the
// pair always mismatches there).
class CouplingSampler {
public:
    CouplingSampler(const Pmf& p, const Pmf& q);
    std::pair<std::size_t, std::size_t> sample(SplitMix64& gen) const;
    double mismatch_probability() const { return mismatch_; }

private:
    std::vector<double> overlap_cdf_;
    std::vector<double> res_p_cdf_;
    std::vector<double> res_q_cdf_;
    double overlap_mass_ = 0.0;
    double mismatch_ = 0.0;
};

// Standard normal CDF.
double std_normal_cdf(double x);

// Near-uniform distribution with one light atom:
// P(1) = 2^-{n*alpha*rp}, remaining 2^{n*rp} - 1 symbols share the rest.
// Builds the explicit pmf; requires n*rp small enough to enumerate.
Pmf example_distribution(unsigned n, double alpha, double rp);

// (1/n) H2 of that distribution by direct two-class summation of sum p^2,
// valid for n*rp up to ~1000 without enumeration.
double example_distribution_h2_rate(unsigned n, double alpha, double rp);

// draw a symbol from p via inverse CDF on a single uniform double
std::size_t sample_pmf(const Pmf& p, SplitMix64& gen);

}  // namespace secrecy
