#include "secrecy/uniform_compression.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "secrecy/info.hpp"
#include "secrecy/parallel.hpp"

namespace secrecy {

namespace {

constexpr std::uint64_t kExplicitStorageGuard = 1ULL << 26;
constexpr std::uint64_t kExactTimeGuard = 1ULL << 32;
constexpr std::uint64_t kExactDomainGuard = 1ULL << 22;
constexpr double kLogProbBucket = 1e-9;

std::uint64_t pow_u64_checked(std::size_t base, unsigned exp, std::uint64_t limit) {
    std::uint64_t v = 1;
    for (unsigned i = 0; i < exp; ++i) {
        if (v > limit / base) throw std::length_error("alphabet^n exceeds guard");
        v *= base;
    }
    return v;
}

double uniformity_v(const std::vector<double>& pm, std::uint64_t m_n) {
    double q = 1.0 / static_cast<double>(m_n);
    double v = 0.0;
    for (double p : pm) v += std::abs(p - q);
    return v;
}

double uniformity_kl(const std::vector<double>& pm, std::uint64_t m_n) {
    double logm = std::log2(static_cast<double>(m_n));
    double d = 0.0;
    for (double p : pm)
        if (p > 0.0) d += p * std::log2(p);
    return d + logm;
}

}  // namespace

UcParams make_uc_params(unsigned n, double rate, unsigned seed_len) {
    if (n == 0) throw std::invalid_argument("blocklength must be positive");
    if (!(rate > 0.0)) throw std::invalid_argument("rate must be positive");
    double m = std::exp2(static_cast<double>(n) * rate);
    if (m > 9e18) throw std::invalid_argument("message count overflows");
    auto m_n = static_cast<std::uint64_t>(std::llround(m));
    if (m_n < 1) m_n = 1;
    return UcParams{n, rate, m_n, seed_len};
}

std::string uc_report_json(const UcReport& r) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["rate"] = r.rate;
    j["M_n"] = r.message_count;
    j["d_n"] = r.seed_len;
    j["pe"] = r.pe;
    j["ue"] = r.ue;
    j["ue_kl"] = r.ue_kl;
    j["method"] = r.method;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["note"] = r.note;
    return j.dump();
}

BinningCode::BinningCode(Pmf source, UcParams params, double eps1,
                         std::uint64_t randomization_seed)
    : source_(std::move(source)),
      params_(params),
      eps1_(eps1),
      seed_(randomization_seed) {
    if (eps1_ <= 0.0) throw std::invalid_argument("eps1 must be positive");
    domain_ = pow_u64_checked(source_.size(), params_.n, kExactTimeGuard);
    if (params_.seed_len >= 32) throw std::invalid_argument("seed length too large");
    std::uint64_t pairs_f = domain_;
    std::uint64_t seeds = 1ULL << params_.seed_len;
    if (pairs_f <= kExplicitStorageGuard / seeds &&
        params_.message_count <= std::numeric_limits<std::uint32_t>::max()) {
        map_.resize(domain_ * seeds);
        for (std::uint64_t x = 0; x < domain_; ++x)
            for (std::uint64_t u = 0; u < seeds; ++u)
                map_[x * seeds + u] = static_cast<std::uint32_t>(bin_hash(x, u));
    }
}

MessageId BinningCode::bin(std::uint64_t x_rank, std::uint64_t u) const {
    if (!map_.empty()) return map_[x_rank * seed_space() + u];
    return bin_hash(x_rank, u);
}

MessageId BinningCode::bin_hash(std::uint64_t x_rank, std::uint64_t u) const {
    std::uint64_t h = mix64(seed_ ^ (x_rank * 0x9e3779b97f4a7c15ULL) ^
                            (u * 0xc2b2ae3d27d4eb4fULL));
    std::uint64_t m = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(h) * params_.message_count) >> 64);
    return m + 1;
}

MessageId BinningCode::encode(const Sequence& x, std::uint64_t u) const {
    if (x.size() != params_.n) throw std::invalid_argument("sequence length mismatch");
    if (u >= seed_space()) throw std::invalid_argument("seed value out of range");
    return bin(sequence_rank(x, source_.size()), u);
}

const std::vector<std::uint32_t>* BinningCode::explicit_map() const {
    return map_.empty() ? nullptr : &map_;
}

BinningCode rb_build(const Pmf& p, const UcParams& params, double eps1,
                     std::uint64_t randomization_seed) {
    return BinningCode(p, params, eps1, randomization_seed);
}

RbDecodeResult rb_decode(MessageId m, std::uint64_t u, const BinningCode& code,
                         const TypicalSetIndex& index) {
    if (m == 0 || m > code.params().message_count)
        throw std::out_of_range("message out of range");
    if (u >= code.seed_space()) throw std::out_of_range("seed value out of range");
    const std::size_t alphabet = code.source().size();
    std::uint64_t found_rank = 0;
    unsigned candidates = 0;
    for (std::uint64_t i = 1; i <= index.count(); ++i) {
        Sequence s = index.sequence(i);
        std::uint64_t r = sequence_rank(s, alphabet);
        if (code.bin(r, u) == m) {
            if (++candidates > 1) return {DecodeStatus::ambiguous, {}};
            found_rank = r;
        }
    }
    if (candidates == 0) return {DecodeStatus::no_candidate, {}};
    return {DecodeStatus::ok,
            sequence_from_rank(found_rank, alphabet, code.params().n)};
}

namespace {

struct ExactEval {
    std::vector<double> output;  // p_M
    double pe;
};

ExactEval rb_exact_eval(const BinningCode& code, const TypicalSetIndex* index) {
    const std::uint64_t domain = code.domain_size();
    const std::uint64_t seeds = code.seed_space();
    if (domain > kExactDomainGuard || domain > kExactTimeGuard / seeds)
        throw std::length_error("exact evaluation exceeds scale guard");
    const std::uint64_t m_n = code.params().message_count;
    const std::size_t alphabet = code.source().size();
    const unsigned n = code.params().n;

    // per-rank source probabilities
    std::vector<double> px(domain);
    for (std::uint64_t r = 0; r < domain; ++r) {
        double prob = 1.0;
        std::uint64_t v = r;
        for (unsigned i = 0; i < n; ++i) {
            prob *= code.source()[v % alphabet];
            v /= alphabet;
        }
        px[r] = prob;
    }

    std::vector<std::uint64_t> typical_ranks;
    double atypical_mass = 0.0;
    if (index) {
        typical_ranks.reserve(index->count());
        double typical_mass = 0.0;
        for (std::uint64_t i = 1; i <= index->count(); ++i) {
            std::uint64_t r = sequence_rank(index->sequence(i), alphabet);
            typical_ranks.push_back(r);
            typical_mass += px[r];
        }
        atypical_mass = 1.0 - typical_mass;
    }

    // fixed chunk plan over the seed space keeps merges deterministic
    const std::size_t chunks = static_cast<std::size_t>(std::min<std::uint64_t>(seeds, 16));
    std::vector<std::vector<double>> hist(chunks);
    std::vector<double> err(chunks, 0.0);
    const double pu = 1.0 / static_cast<double>(seeds);

    parallel_for_chunks(chunks, [&](std::size_t c) {
        std::uint64_t lo = seeds * c / chunks;
        std::uint64_t hi = seeds * (c + 1) / chunks;
        std::vector<double>& h = hist[c];
        h.assign(m_n, 0.0);
        std::vector<std::uint32_t> bin_count;
        std::vector<std::uint64_t> touched;
        if (index) {
            bin_count.assign(m_n, 0);
            touched.reserve(typical_ranks.size());
        }
        for (std::uint64_t u = lo; u < hi; ++u) {
            for (std::uint64_t r = 0; r < domain; ++r)
                h[code.bin(r, u) - 1] += px[r] * pu;
            if (index) {
                touched.clear();
                for (std::uint64_t r : typical_ranks) {
                    std::uint64_t b = code.bin(r, u) - 1;
                    if (bin_count[b]++ == 0) touched.push_back(b);
                }
                double e = atypical_mass;
                for (std::uint64_t r : typical_ranks)
                    if (bin_count[code.bin(r, u) - 1] > 1) e += px[r];
                err[c] += e * pu;
                for (std::uint64_t b : touched) bin_count[b] = 0;
            }
        }
    });

    ExactEval out;
    out.output.assign(m_n, 0.0);
    for (std::size_t c = 0; c < chunks; ++c)
        for (std::uint64_t m = 0; m < m_n; ++m) out.output[m] += hist[c][m];
    out.pe = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) out.pe += err[c];
    return out;
}

}  // namespace

Pmf rb_exact_output_pmf(const BinningCode& code) {
    return Pmf(rb_exact_eval(code, nullptr).output);
}

double rb_exact_pe(const BinningCode& code, const TypicalSetIndex& index) {
    return rb_exact_eval(code, &index).pe;
}

UcReport evaluate_exact(const BinningCode& code, const TypicalSetIndex& index) {
    ExactEval ev = rb_exact_eval(code, &index);
    UcReport r;
    r.n = code.params().n;
    r.rate = code.params().rate;
    r.message_count = code.params().message_count;
    r.seed_len = code.params().seed_len;
    r.pe = ev.pe;
    r.ue = uniformity_v(ev.output, r.message_count);
    r.ue_kl = uniformity_kl(ev.output, r.message_count);
    r.method = "exact";
    r.trials = 0;
    r.seed = code.randomization_seed();
    return r;
}

UcReport evaluate_mc(const BinningCode& code, const TypicalSetIndex& index,
                     std::uint64_t trials, std::uint64_t master_seed) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    const std::uint64_t m_n = code.params().message_count;
    const unsigned n = code.params().n;
    const std::size_t chunks = 8;

    std::vector<std::vector<std::uint64_t>> hist(chunks);
    std::vector<std::uint64_t> errors(chunks, 0);

    parallel_for_chunks(chunks, [&](std::size_t c) {
        std::uint64_t lo = trials * c / chunks;
        std::uint64_t hi = trials * (c + 1) / chunks;
        SplitMix64 gen = derive_stream(master_seed, "ucmc-chunk-" + std::to_string(c));
        hist[c].assign(m_n, 0);
        Sequence x(n);
        for (std::uint64_t t = lo; t < hi; ++t) {
            for (unsigned i = 0; i < n; ++i)
                x[i] = static_cast<std::uint8_t>(sample_pmf(code.source(), gen));
            std::uint64_t u = code.seed_space() > 1 ? gen.next_below(code.seed_space()) : 0;
            MessageId m = code.encode(x, u);
            ++hist[c][m - 1];
            RbDecodeResult dec = rb_decode(m, u, code, index);
            if (dec.status != DecodeStatus::ok || dec.sequence != x) ++errors[c];
        }
    });

    std::vector<double> emp(m_n, 0.0);
    std::uint64_t total_err = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
        total_err += errors[c];
        for (std::uint64_t m = 0; m < m_n; ++m)
            emp[m] += static_cast<double>(hist[c][m]);
    }
    for (double& e : emp) e /= static_cast<double>(trials);

    UcReport r;
    r.n = n;
    r.rate = code.params().rate;
    r.message_count = m_n;
    r.seed_len = code.params().seed_len;
    r.pe = static_cast<double>(total_err) / static_cast<double>(trials);
    r.ue = uniformity_v(emp, m_n);
    r.ue_kl = uniformity_kl(emp, m_n);
    r.method = "monte-carlo";
    r.trials = trials;
    r.seed = master_seed;
    r.note = "ue and ue_kl are plug-in estimates from the empirical histogram "
             "and overestimate in expectation by at most sqrt(M_n/trials)";
    return r;
}

Pmf iid_sequence_pmf(const Pmf& p, unsigned n) {
    std::uint64_t domain = pow_u64_checked(p.size(), n, kExactDomainGuard);
    std::vector<double> out(domain);
    for (std::uint64_t r = 0; r < domain; ++r) {
        double prob = 1.0;
        std::uint64_t v = r;
        for (unsigned i = 0; i < n; ++i) {
            prob *= p[v % p.size()];
            v /= p.size();
        }
        out[r] = prob;
    }
    return Pmf(std::move(out));
}

std::vector<std::pair<double, double>> logprob_classes(const Pmf& p, unsigned n) {
    std::vector<std::size_t> support;
    for (std::size_t a = 0; a < p.size(); ++a)
        if (p[a] > 0.0) support.push_back(a);
    if (support.size() == 1) return {{0.0, 1.0}};
    if (support.size() == 2) {
        // exact binomial classes in the log domain
        double p1 = p[support[1]];
        double p0 = p[support[0]];
        std::vector<std::pair<double, double>> classes(n + 1);
        for (unsigned k = 0; k <= n; ++k) {
            double logc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                          std::lgamma(n - k + 1.0);
            double logprob_nats = logc + k * std::log(p1) + (n - k) * std::log(p0);
            classes[k] = {k * std::log2(p1) + (n - k) * std::log2(p0),
                          std::exp(logprob_nats)};
        }
        return classes;
    }
    // bucketed dynamic programming over log2-probability values
    std::map<std::int64_t, double> dist{{0, 1.0}};
    for (unsigned i = 0; i < n; ++i) {
        std::map<std::int64_t, double> next;
        for (const auto& [bucket, prob] : dist)
            for (std::size_t a : support) {
                auto shift = static_cast<std::int64_t>(
                    std::llround(std::log2(p[a]) / kLogProbBucket));
                next[bucket + shift] += prob * p[a];
            }
        dist.swap(next);
    }
    std::vector<std::pair<double, double>> classes;
    classes.reserve(dist.size());
    for (const auto& [bucket, prob] : dist)
        classes.emplace_back(static_cast<double>(bucket) * kLogProbBucket, prob);
    return classes;
}

double iid_logprob_tail(const Pmf& p, unsigned n, double threshold_log2) {
    double tail = 0.0;
    for (const auto& [logp, prob] : logprob_classes(p, n))
        if (logp > threshold_log2) tail += prob;
    return tail;
}

double ue_lower_bound(const Pmf& p, unsigned n, unsigned d_n, std::uint64_t m_n,
                      double gamma_n) {
    if (!(gamma_n > 0.0) || !(gamma_n < static_cast<double>(m_n)))
        throw std::invalid_argument("gamma_n must lie in ]0, M_n[");
    double threshold = static_cast<double>(d_n) - std::log2(gamma_n);
    double tail = iid_logprob_tail(p, n, threshold);
    return 2.0 * (tail - gamma_n / static_cast<double>(m_n));
}

BerryEsseenWindow berry_esseen_window(const Pmf& p, unsigned n, double a, double b) {
    if (!(b >= 0.0) || !(a > b)) throw std::invalid_argument("need a > b >= 0");
    double h = shannon_entropy(p);
    double sigma2 = 0.0, rho = 0.0;
    for (double v : p.probs()) {
        if (v == 0.0) continue;
        double dev = -std::log2(v) - h;
        sigma2 += v * dev * dev;
        rho += v * std::abs(dev) * std::abs(dev) * std::abs(dev);
    }
    if (sigma2 <= 0.0 || sigma2 < 1e-20)
        throw std::domain_error("sigma = 0: information spectrum is degenerate");
    double sigma = std::sqrt(sigma2);

    double sqn = std::sqrt(static_cast<double>(n));
    double upper = -static_cast<double>(n) * h - b * sigma * sqn;  // log2 p <= upper
    double lower = std::isinf(a)
                       ? -std::numeric_limits<double>::infinity()
                       : -static_cast<double>(n) * h - a * sigma * sqn;  // log2 p > lower
    double exact = 0.0;
    for (const auto& [logp, prob] : logprob_classes(p, n))
        if (logp > lower && logp <= upper) exact += prob;

    BerryEsseenWindow w;
    w.exact_window = exact;
    w.gaussian_window = std_normal_cdf(-b) - (std::isinf(a) ? 0.0 : std_normal_cdf(-a));
    w.eta_bound = 2.0 * kBerryEsseenAlpha * rho / (sigma2 * sigma * sqn);
    w.sigma = sigma;
    w.rho = rho;
    if (std::abs(w.exact_window - w.gaussian_window) > w.eta_bound + 1e-12)
        throw std::logic_error("Berry-Esseen bound violated");
    return w;
}

ExtractorPipelineCode::ExtractorPipelineCode(TypicalSetIndex index,
                                             std::shared_ptr<InvertibleExtractor> ext)
    : index_(std::move(index)), ext_(std::move(ext)) {
    width_ = 1;
    while ((1ULL << width_) < index_.count()) ++width_;
    if (ext_->width() != width_)
        throw std::invalid_argument("extractor width must match source-code width");
    verify_invertible(*ext_);
}

MessageId ExtractorPipelineCode::encode(const Sequence& x, std::uint64_t ext_seed,
                                        BitSource& fallback) const {
    MessageId s = ts_encode(x, index_, fallback);
    return ext_->apply(s - 1, ext_seed) + 1;
}

Sequence ExtractorPipelineCode::decode(MessageId m, std::uint64_t ext_seed) const {
    if (m == 0 || m > message_count()) throw std::out_of_range("message out of range");
    std::uint64_t s = ext_->invert(m - 1, ext_seed);
    return ts_decode(s + 1, index_);  // throws for s >= |T|
}

Pmf ExtractorPipelineCode::exact_output_pmf() const {
    const std::uint64_t msgs = message_count();
    // source-index law, embedded into {0,1}^w
    Pmf ps = ts_output_pmf_seeded(index_, index_.pmf());
    std::vector<double> embedded(msgs, 0.0);
    for (std::uint64_t s = 0; s < ps.size(); ++s) embedded[s] = ps[s];

    const unsigned sb = ext_->seed_bits();
    if (sb == 0) return Pmf(std::move(embedded));
    if (sb < 63 && (1ULL << sb) <= (kExplicitStorageGuard / msgs)) {
        std::uint64_t seeds = 1ULL << sb;
        std::vector<double> out(msgs, 0.0);
        double pu = 1.0 / static_cast<double>(seeds);
        for (std::uint64_t u = 0; u < seeds; ++u)
            for (std::uint64_t s = 0; s < msgs; ++s)
                out[ext_->apply(s, u)] += embedded[s] * pu;
        return Pmf(std::move(out));
    }
    if (ext_->seed_has_uniform_pad()) {
        // summing the pad over the full group makes every conditional
        // output law uniform, hence the average is exactly uniform
        return Pmf::uniform(msgs);
    }
    throw std::length_error("extractor seed space exceeds enumeration guard");
}

UcReport ExtractorPipelineCode::evaluate_exact() const {
    Pmf out = exact_output_pmf();
    double typical_mass = 0.0;
    for (std::uint64_t i = 1; i <= index_.count(); ++i)
        typical_mass += sequence_probability(index_.sequence(i), index_.pmf());

    UcReport r;
    r.n = index_.n();
    r.message_count = message_count();
    r.rate = std::log2(static_cast<double>(r.message_count)) / r.n;
    r.seed_len = ext_->seed_bits();
    r.pe = 1.0 - typical_mass;  // the extractor is a bijection, so errors
                                // come only from atypical inputs
    r.ue = uniformity_v(out.probs(), r.message_count);
    r.ue_kl = uniformity_kl(out.probs(), r.message_count);
    r.method = "exact";
    r.trials = 0;
    r.seed = 0;
    std::ostringstream note;
    note << "extractor " << ext_->name() << " uses seed length " << ext_->seed_bits()
         << " (pairwise-independent family); dedicated constructions achieve "
            "d = m - t + 2 log m + 2 log(1/eps) + O(1)";
    r.note = note.str();
    return r;
}

namespace {

constexpr char kBinMagic[4] = {'U', 'C', 'B', 'N'};
constexpr std::uint32_t kBinVersion = 1;

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
    if (!is) throw std::runtime_error("truncated code file");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

std::uint64_t read_u64le(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error("truncated code file");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

void write_f64le(std::ostream& os, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    write_u64le(os, bits);
}

double read_f64le(std::istream& is) {
    std::uint64_t bits = read_u64le(is);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

}  // namespace

void BinningCode::save(std::ostream& os) const {
    os.write(kBinMagic, 4);
    write_u32le(os, kBinVersion);
    write_u32le(os, params_.n);
    write_u32le(os, static_cast<std::uint32_t>(source_.size()));
    write_f64le(os, params_.rate);
    write_u64le(os, params_.message_count);
    write_u32le(os, params_.seed_len);
    write_f64le(os, eps1_);
    for (double p : source_.probs()) write_f64le(os, p);
    write_u64le(os, seed_);
}

BinningCode BinningCode::load(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kBinMagic, 4) != 0)
        throw std::runtime_error("not a binning-code file");
    if (read_u32le(is) != kBinVersion)
        throw std::runtime_error("unsupported binning-code version");
    UcParams params;
    params.n = read_u32le(is);
    std::uint32_t alphabet = read_u32le(is);
    params.rate = read_f64le(is);
    params.message_count = read_u64le(is);
    params.seed_len = read_u32le(is);
    double eps1 = read_f64le(is);
    std::vector<double> probs(alphabet);
    for (auto& p : probs) p = read_f64le(is);
    std::uint64_t seed = read_u64le(is);
    return BinningCode(Pmf(std::move(probs)), params, eps1, seed);
}

}  // namespace secrecy
