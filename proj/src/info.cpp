#include "secrecy/info.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace secrecy {

double shannon_entropy(const Pmf& p) {
    double h = 0.0;
    for (double v : p.probs())
        if (v > 0.0) h -= v * std::log2(v);
    return h;
}

double renyi2_entropy(const Pmf& p) {
    double collision = 0.0;
    for (double v : p.probs()) collision += v * v;
    return -std::log2(collision);
}

double min_entropy(const Pmf& p) {
    return -std::log2(p.max_prob());
}

double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy: p outside [0,1]");
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

double variational_distance(const Pmf& p, const Pmf& q) {
    if (p.size() != q.size()) throw std::invalid_argument("alphabet size mismatch");
    double v = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) v += std::abs(p[i] - q[i]);
    return v;
}

double kl_divergence(const Pmf& p, const Pmf& q) {
    if (p.size() != q.size()) throw std::invalid_argument("alphabet size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
        d += p[i] * std::log2(p[i] / q[i]);
    }
    return d;
}

double optimal_coupling_mismatch(const Pmf& p, const Pmf& q) {
    return 0.5 * variational_distance(p, q);
}

CouplingSampler::CouplingSampler(const Pmf& p, const Pmf& q) {
    if (p.size() != q.size()) throw std::invalid_argument("alphabet size mismatch");
    const std::size_t n = p.size();
    std::vector<double> overlap(n), res_p(n), res_q(n);
    for (std::size_t i = 0; i < n; ++i) {
        overlap[i] = std::min(p[i], q[i]);
        res_p[i] = p[i] - overlap[i];
        res_q[i] = q[i] - overlap[i];
        overlap_mass_ += overlap[i];
    }
    mismatch_ = 1.0 - overlap_mass_;
    auto cdf = [](const std::vector<double>& w) {
        std::vector<double> c(w.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            acc += w[i];
            c[i] = acc;
        }
        return c;
    };
    overlap_cdf_ = cdf(overlap);
    res_p_cdf_ = cdf(res_p);
    res_q_cdf_ = cdf(res_q);
}

namespace {

std::size_t draw_from_cdf(const std::vector<double>& cdf, double total, SplitMix64& gen) {
    double u = gen.next_double() * total;
    for (std::size_t i = 0; i < cdf.size(); ++i)
        if (u < cdf[i]) return i;
    // fall through on rounding at the top edge: last supported index
    for (std::size_t i = cdf.size(); i-- > 0;)
        if (cdf[i] > (i == 0 ? 0.0 : cdf[i - 1])) return i;
    return cdf.size() - 1;
}

}  // namespace

std::pair<std::size_t, std::size_t> CouplingSampler::sample(SplitMix64& gen) const {
    if (gen.next_double() < overlap_mass_) {
        std::size_t x = draw_from_cdf(overlap_cdf_, overlap_mass_, gen);
        return {x, x};
    }
    std::size_t x = draw_from_cdf(res_p_cdf_, mismatch_, gen);
    std::size_t y = draw_from_cdf(res_q_cdf_, mismatch_, gen);
    return {x, y};
}

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

Pmf example_distribution(unsigned n, double alpha, double rp) {
    double size_f = std::exp2(static_cast<double>(n) * rp);
    if (size_f > (1u << 26))
        throw std::invalid_argument("example_distribution: 2^{n rp} too large to enumerate");
    auto size = static_cast<std::size_t>(std::llround(size_f));
    double p1 = std::exp2(-static_cast<double>(n) * alpha * rp);
    std::vector<double> probs(size);
    probs[0] = p1;
    double rest = (1.0 - p1) / static_cast<double>(size - 1);
    for (std::size_t i = 1; i < size; ++i) probs[i] = rest;
    return Pmf(std::move(probs));
}

double example_distribution_h2_rate(unsigned n, double alpha, double rp) {
    // sum p^2 has exactly two weight classes: the light atom and the
    // 2^{n rp} - 1 equal ones.
    double nrp = static_cast<double>(n) * rp;
    if (nrp > 1000.0) throw std::invalid_argument("example_distribution_h2_rate: n*rp too large");
    double p1 = std::exp2(-static_cast<double>(n) * alpha * rp);
    double count_rest = std::exp2(nrp) - 1.0;
    double collision = p1 * p1 + (1.0 - p1) * (1.0 - p1) / count_rest;
    return -std::log2(collision) / static_cast<double>(n);
}

std::size_t sample_pmf(const Pmf& p, SplitMix64& gen) {
    double u = gen.next_double();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) return i;
    }
    // rounding at the top edge: return last supported symbol
    for (std::size_t i = p.size(); i-- > 0;)
        if (p[i] > 0.0) return i;
    return p.size() - 1;
}

}  // namespace secrecy
