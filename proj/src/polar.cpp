#include "secrecy/polar.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "secrecy/info.hpp"
#include "secrecy/parallel.hpp"

namespace secrecy {

namespace {

bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

void require_binary(const Pmf& p) {
    if (p.size() != 2) throw std::invalid_argument("polar module requires a binary source");
}

}  // namespace

std::vector<std::uint8_t> polar_transform(std::vector<std::uint8_t> x) {
    const std::size_t n = x.size();
    if (!is_power_of_two(n)) throw std::invalid_argument("length must be a power of two");
    for (std::size_t h = 1; h < n; h *= 2)
        for (std::size_t i = 0; i < n; i += 2 * h)
            for (std::size_t j = i; j < i + h; ++j) x[j] ^= x[j + h];
    return x;
}

std::uint64_t polar_transform_packed(std::uint64_t x, unsigned n_bits) {
    if (!is_power_of_two(n_bits) || n_bits > 64)
        throw std::invalid_argument("length must be a power of two <= 64");
    for (unsigned h = 1; h < n_bits; h *= 2) {
        std::uint64_t mask = 0;
        for (unsigned j = 0; j < n_bits; ++j)
            if ((j & h) == 0) mask |= 1ULL << j;
        x ^= (x >> h) & mask;
    }
    return x;
}

double polar_threshold(unsigned n_bits, double beta) {
    if (!(beta > 0.0) || !(beta < 0.5))
        throw std::invalid_argument("beta must lie in ]0, 1/2[");
    return std::exp2(-std::pow(static_cast<double>(n_bits), beta));
}

std::vector<double> cond_entropy_exact(const Pmf& p, unsigned n_bits) {
    require_binary(p);
    if (!is_power_of_two(n_bits) || n_bits > 16)
        throw std::length_error("exact construction limited to N <= 16");
    const std::uint64_t domain = 1ULL << n_bits;
    // pushforward through the transform; the transform is its own inverse,
    // so p_A(a) = p_X(transform(a))
    std::vector<double> cur(domain);
    for (std::uint64_t a = 0; a < domain; ++a) {
        std::uint64_t x = polar_transform_packed(a, n_bits);
        double prob = 1.0;
        for (unsigned i = 0; i < n_bits; ++i) prob *= p[(x >> i) & 1];
        cur[a] = prob;
    }
    auto level_entropy = [](const std::vector<double>& t) {
        double h = 0.0;
        for (double v : t)
            if (v > 0.0) h -= v * std::log2(v);
        return h;
    };
    std::vector<double> cond(n_bits);
    double h_upper = level_entropy(cur);
    for (unsigned i = n_bits; i >= 1; --i) {
        std::uint64_t half = 1ULL << (i - 1);
        std::vector<double> next(half);
        for (std::uint64_t j = 0; j < half; ++j) next[j] = cur[j] + cur[j | half];
        double h_lower = level_entropy(next);
        cond[i - 1] = h_upper - h_lower;
        cur.swap(next);
        h_upper = h_lower;
    }
    return cond;
}

namespace {

// Recursive successive-cancellation engine. A block of M independent input
// bits with priors pi splits as A_first = transform(W), A_second =
// transform(V_s) with W = V_f xor V_s; the first half is the same problem
// on the XOR-convolved priors, and after its realization is known the
// second half sees per-position conditional priors.
class ScEngine {
public:
    explicit ScEngine(unsigned n) : n_(n) {
        unsigned levels = 0;
        for (unsigned m = n; m > 1; m /= 2) ++levels;
        prior_scratch_.resize(levels);
        w_scratch_.resize(levels);
        for (unsigned d = 0, m = n / 2; d < levels; ++d, m /= 2) {
            prior_scratch_[d].resize(m);
            w_scratch_[d].resize(m);
        }
    }

    void run(const std::vector<double>& prior1, const std::uint8_t* known_mask,
             const std::uint8_t* known_vals, std::uint8_t* output,
             std::uint8_t* realized_input, double* prob_used) {
        known_mask_ = known_mask;
        known_vals_ = known_vals;
        output_ = output;
        prob_used_ = prob_used;
        node(0, 0, n_, prior1.data(), realized_input);
    }

private:
    void node(unsigned depth, unsigned off, unsigned len, const double* prior1,
              std::uint8_t* realized) {
        if (len == 1) {
            double p1 = prior1[0];
            std::uint8_t a;
            if (known_mask_[off]) {
                a = known_vals_[off];
            } else {
                a = (p1 > 1.0 - p1) ? 1 : 0;  // ties toward 0
            }
            output_[off] = a;
            realized[0] = a;
            prob_used_[off] = a ? p1 : 1.0 - p1;
            return;
        }
        const unsigned half = len / 2;
        double* child_prior = prior_scratch_[depth].data();
        std::uint8_t* w = w_scratch_[depth].data();

        for (unsigned j = 0; j < half; ++j) {
            double pf = prior1[j], ps = prior1[j + half];
            child_prior[j] = pf * (1.0 - ps) + (1.0 - pf) * ps;
        }
        node(depth + 1, off, half, child_prior, w);

        for (unsigned j = 0; j < half; ++j) {
            double pf = prior1[j], ps = prior1[j + half];
            double num, den;
            if (w[j]) {
                num = (1.0 - pf) * ps;
                den = (1.0 - pf) * ps + pf * (1.0 - ps);
            } else {
                num = pf * ps;
                den = pf * ps + (1.0 - pf) * (1.0 - ps);
            }
            child_prior[j] = den > 0.0 ? num / den : ps;
        }
        node(depth + 1, off + half, half, child_prior, realized + half);

        for (unsigned j = 0; j < half; ++j) realized[j] = w[j] ^ realized[half + j];
    }

    unsigned n_;
    std::vector<std::vector<double>> prior_scratch_;
    std::vector<std::vector<std::uint8_t>> w_scratch_;
    const std::uint8_t* known_mask_ = nullptr;
    const std::uint8_t* known_vals_ = nullptr;
    std::uint8_t* output_ = nullptr;
    double* prob_used_ = nullptr;
};

}  // namespace

ScResult sc_pass(const Pmf& p, const std::vector<std::uint8_t>& known_mask,
                 const std::vector<std::uint8_t>& known_vals) {
    require_binary(p);
    const unsigned n = static_cast<unsigned>(known_mask.size());
    if (!is_power_of_two(n) || known_vals.size() != n)
        throw std::invalid_argument("mask/values must have power-of-two length");
    ScResult res;
    res.output.resize(n);
    res.realized_input.resize(n);
    res.prob_used.resize(n);
    std::vector<double> prior1(n, p[1]);
    ScEngine engine(n);
    engine.run(prior1, known_mask.data(), known_vals.data(), res.output.data(),
               res.realized_input.data(), res.prob_used.data());
    return res;
}

McEntropyResult cond_entropy_mc(const Pmf& p, unsigned n_bits, std::uint64_t samples,
                                std::uint64_t master_seed) {
    require_binary(p);
    if (!is_power_of_two(n_bits)) throw std::invalid_argument("N must be a power of two");
    const std::size_t chunks = 16;
    std::vector<std::vector<double>> sum(chunks), sumsq(chunks);

    parallel_for_chunks(chunks, [&](std::size_t c) {
        std::uint64_t lo = samples * c / chunks;
        std::uint64_t hi = samples * (c + 1) / chunks;
        SplitMix64 gen = derive_stream(master_seed, "polar-mc-" + std::to_string(c));
        sum[c].assign(n_bits, 0.0);
        sumsq[c].assign(n_bits, 0.0);
        ScEngine engine(n_bits);
        std::vector<double> prior1(n_bits, p[1]);
        std::vector<std::uint8_t> x(n_bits), mask(n_bits, 1);
        std::vector<std::uint8_t> out(n_bits), realized(n_bits);
        std::vector<double> prob(n_bits);
        for (std::uint64_t t = lo; t < hi; ++t) {
            for (unsigned i = 0; i < n_bits; ++i)
                x[i] = gen.next_double() < p[1] ? 1 : 0;
            std::vector<std::uint8_t> a = polar_transform(x);
            engine.run(prior1, mask.data(), a.data(), out.data(), realized.data(),
                       prob.data());
            for (unsigned i = 0; i < n_bits; ++i) {
                double v = -std::log2(prob[i]);
                sum[c][i] += v;
                sumsq[c][i] += v * v;
            }
        }
    });

    McEntropyResult res;
    res.estimates.assign(n_bits, 0.0);
    res.std_errors.assign(n_bits, 0.0);
    for (std::size_t c = 0; c < chunks; ++c)
        for (unsigned i = 0; i < n_bits; ++i) {
            res.estimates[i] += sum[c][i];
            res.std_errors[i] += sumsq[c][i];
        }
    for (unsigned i = 0; i < n_bits; ++i) {
        double mean = res.estimates[i] / static_cast<double>(samples);
        double meansq = res.std_errors[i] / static_cast<double>(samples);
        res.estimates[i] = mean;
        double var = std::max(0.0, meansq - mean * mean);
        res.std_errors[i] = std::sqrt(var / static_cast<double>(samples));
    }
    return res;
}

PolarSets construct_sets(const std::vector<double>& entropies, unsigned n_bits,
                         double beta) {
    if (entropies.size() != n_bits) throw std::invalid_argument("entropy vector length");
    double delta = polar_threshold(n_bits, beta);
    PolarSets sets;
    for (unsigned i = 0; i < n_bits; ++i) {
        if (entropies[i] > 1.0 - delta) sets.v_set.push_back(i);
        if (entropies[i] > delta) sets.h_set.push_back(i);
    }
    return sets;
}

PolarConstruction build_polar_construction(const Pmf& p, unsigned n_bits, double beta,
                                           const std::string& method,
                                           std::uint64_t mc_samples,
                                           std::uint64_t master_seed) {
    PolarConstruction c;
    c.n_bits = n_bits;
    c.source = p;
    c.beta = beta;
    c.delta_n = polar_threshold(n_bits, beta);
    if (method == "exact") {
        c.cond_entropies = cond_entropy_exact(p, n_bits);
        c.mc_samples = 0;
        c.master_seed = 0;
    } else if (method == "monte-carlo") {
        c.cond_entropies = cond_entropy_mc(p, n_bits, mc_samples, master_seed).estimates;
        c.mc_samples = mc_samples;
        c.master_seed = master_seed;
    } else {
        throw std::invalid_argument("method must be exact or monte-carlo");
    }
    c.method = method;
    c.sets = construct_sets(c.cond_entropies, n_bits, beta);
    return c;
}

PolarUcCode::PolarUcCode(PolarConstruction construction)
    : construction_(std::move(construction)) {
    const auto& v = construction_.sets.v_set;
    const auto& h = construction_.sets.h_set;
    for (std::uint32_t i : h)
        if (!std::binary_search(v.begin(), v.end(), i)) pad_set_.push_back(i);
}

unsigned PolarUcCode::message_len() const {
    return static_cast<unsigned>(construction_.sets.h_set.size());
}

std::vector<std::uint8_t> PolarUcCode::encode(
    const std::vector<std::uint8_t>& x, const std::vector<std::uint8_t>& seed_bits) const {
    if (x.size() != construction_.n_bits) throw std::invalid_argument("block length");
    if (seed_bits.size() != pad_set_.size())
        throw std::invalid_argument("seed length must equal |h_set \\ v_set|");
    std::vector<std::uint8_t> a = polar_transform(x);
    std::vector<std::uint8_t> msg;
    msg.reserve(message_len());
    for (std::uint32_t i : construction_.sets.v_set) msg.push_back(a[i]);
    for (std::size_t k = 0; k < pad_set_.size(); ++k)
        msg.push_back(a[pad_set_[k]] ^ seed_bits[k]);
    return msg;
}

std::vector<std::uint8_t> PolarUcCode::decode(
    const std::vector<std::uint8_t>& message, const std::vector<std::uint8_t>& seed_bits) const {
    if (message.size() != message_len()) throw std::invalid_argument("message length");
    if (seed_bits.size() != pad_set_.size())
        throw std::invalid_argument("seed length must equal |h_set \\ v_set|");
    const unsigned n = construction_.n_bits;
    std::vector<std::uint8_t> mask(n, 0), vals(n, 0);
    const auto& v = construction_.sets.v_set;
    for (std::size_t k = 0; k < v.size(); ++k) {
        mask[v[k]] = 1;
        vals[v[k]] = message[k];
    }
    for (std::size_t k = 0; k < pad_set_.size(); ++k) {
        mask[pad_set_[k]] = 1;
        vals[pad_set_[k]] = message[v.size() + k] ^ seed_bits[k];
    }
    ScResult res = sc_pass(construction_.source, mask, vals);
    return res.realized_input;
}

double polar_roundtrip_pe(const PolarUcCode& code, std::uint64_t trials,
                          std::uint64_t master_seed) {
    const unsigned n = code.construction().n_bits;
    const double p1 = code.construction().source[1];
    const std::size_t chunks = 16;
    std::vector<std::uint64_t> errors(chunks, 0);
    parallel_for_chunks(chunks, [&](std::size_t c) {
        std::uint64_t lo = trials * c / chunks;
        std::uint64_t hi = trials * (c + 1) / chunks;
        SplitMix64 gen = derive_stream(master_seed, "polar-run-" + std::to_string(c));
        std::vector<std::uint8_t> x(n), seed(code.seed_len());
        for (std::uint64_t t = lo; t < hi; ++t) {
            for (unsigned i = 0; i < n; ++i) x[i] = gen.next_double() < p1 ? 1 : 0;
            for (auto& s : seed) s = static_cast<std::uint8_t>(gen.next() & 1);
            std::vector<std::uint8_t> msg = code.encode(x, seed);
            if (code.decode(msg, seed) != x) ++errors[c];
        }
    });
    std::uint64_t total = std::accumulate(errors.begin(), errors.end(), std::uint64_t{0});
    return static_cast<double>(total) / static_cast<double>(trials);
}

std::pair<std::uint64_t, std::uint64_t> decimal_to_fraction(const std::string& s) {
    std::size_t dot = s.find('.');
    std::string digits = dot == std::string::npos ? s : s.substr(0, dot) + s.substr(dot + 1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("not a plain decimal: " + s);
    std::uint64_t num = std::stoull(digits);
    std::uint64_t den = 1;
    if (dot != std::string::npos)
        for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    std::uint64_t g = std::gcd(num, den);
    if (g == 0) g = 1;
    return {num / g, den / g};
}

namespace {

constexpr char kCacheMagic[4] = {'P', 'L', 'R', 'C'};
constexpr std::uint32_t kCacheVersion = 1;
constexpr double kFixedScale = 4611686018427387904.0;  // 2^62

void write_u32le(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64le(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t read_u32le(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("truncated cache");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

std::uint64_t read_u64le(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error("truncated cache");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

void write_str(std::ostream& os, const std::string& s) {
    write_u32le(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_str(std::istream& is) {
    std::uint32_t len = read_u32le(is);
    std::string s(len, '\0');
    is.read(s.data(), len);
    if (!is) throw std::runtime_error("truncated cache");
    return s;
}

std::string beta_string(double beta) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", beta);
    return buf;
}

}  // namespace

void polar_cache_save(std::ostream& os, const PolarConstruction& c,
                      const std::string& p1_decimal) {
    auto [num, den] = decimal_to_fraction(p1_decimal);
    os.write(kCacheMagic, 4);
    write_u32le(os, kCacheVersion);
    write_u32le(os, c.n_bits);
    write_str(os, beta_string(c.beta));
    write_str(os, std::to_string(num));
    write_str(os, std::to_string(den));
    write_str(os, c.method);
    write_u64le(os, c.mc_samples);
    write_u64le(os, c.master_seed);
    for (double h : c.cond_entropies)
        write_u64le(os, static_cast<std::uint64_t>(std::llround(h * kFixedScale)));
}

std::optional<PolarConstruction> polar_cache_load(std::istream& is, unsigned n_bits,
                                                  double beta,
                                                  const std::string& p1_decimal,
                                                  const std::string& method,
                                                  std::uint64_t mc_samples,
                                                  std::uint64_t master_seed) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kCacheMagic, 4) != 0) return std::nullopt;
    try {
        if (read_u32le(is) != kCacheVersion) return std::nullopt;
        if (read_u32le(is) != n_bits) return std::nullopt;
        if (read_str(is) != beta_string(beta)) return std::nullopt;
        auto [num, den] = decimal_to_fraction(p1_decimal);
        if (read_str(is) != std::to_string(num)) return std::nullopt;
        if (read_str(is) != std::to_string(den)) return std::nullopt;
        if (read_str(is) != method) return std::nullopt;
        if (read_u64le(is) != mc_samples) return std::nullopt;
        if (read_u64le(is) != master_seed) return std::nullopt;
        PolarConstruction c;
        c.n_bits = n_bits;
        c.source = Pmf::bernoulli(static_cast<double>(num) / static_cast<double>(den));
        c.beta = beta;
        c.delta_n = polar_threshold(n_bits, beta);
        c.method = method;
        c.mc_samples = mc_samples;
        c.master_seed = master_seed;
        c.cond_entropies.resize(n_bits);
        for (auto& h : c.cond_entropies)
            h = static_cast<double>(read_u64le(is)) / kFixedScale;
        c.sets = construct_sets(c.cond_entropies, n_bits, beta);
        return c;
    } catch (const std::runtime_error&) {
        return std::nullopt;
    }
}

}  // namespace secrecy
