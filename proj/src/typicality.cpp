#include "secrecy/typicality.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "secrecy/info.hpp"

namespace secrecy {

namespace {

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("truncated index file");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

std::uint64_t read_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error("truncated index file");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

void write_string(std::ostream& os, const std::string& s) {
    write_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& is) {
    std::uint32_t len = read_u32(is);
    std::string s(len, '\0');
    is.read(s.data(), len);
    if (!is) throw std::runtime_error("truncated index file");
    return s;
}

void write_double(std::ostream& os, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    write_u64(os, bits);
}

double read_double(std::istream& is) {
    std::uint64_t bits = read_u64(is);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

unsigned bits_per_symbol(std::size_t alphabet) {
    unsigned w = 1;
    while ((1ULL << w) < alphabet) ++w;
    return w;
}

bool counts_typical(const std::vector<unsigned>& counts, const Pmf& p, unsigned n,
                    double eps) {
    for (std::size_t a = 0; a < p.size(); ++a) {
        double freq = static_cast<double>(counts[a]) / n;
        if (p[a] == 0.0) {
            if (counts[a] != 0) return false;
        } else if (std::abs(freq - p[a]) > eps * p[a]) {
            return false;
        }
    }
    return true;
}

constexpr char kMagic[4] = {'T', 'S', 'I', 'X'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

bool is_typical(const Sequence& x, const Pmf& p, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
    std::vector<unsigned> counts(p.size(), 0);
    for (std::uint8_t s : x) {
        if (s >= p.size()) throw std::out_of_range("symbol outside alphabet");
        ++counts[s];
    }
    return counts_typical(counts, p, static_cast<unsigned>(x.size()), eps);
}

double sequence_probability(const Sequence& x, const Pmf& p) {
    double prob = 1.0;
    for (std::uint8_t s : x) {
        if (s >= p.size()) throw std::out_of_range("symbol outside alphabet");
        prob *= p[s];
    }
    return prob;
}

std::uint64_t sequence_rank(const Sequence& x, std::size_t alphabet) {
    std::uint64_t r = 0;
    for (std::uint8_t s : x) r = r * alphabet + s;
    return r;
}

Sequence sequence_from_rank(std::uint64_t rank, std::size_t alphabet, unsigned n) {
    Sequence x(n);
    for (unsigned i = n; i-- > 0;) {
        x[i] = static_cast<std::uint8_t>(rank % alphabet);
        rank /= alphabet;
    }
    return x;
}

TypicalSetIndex::TypicalSetIndex(Pmf p, unsigned n, double eps)
    : pmf_(std::move(p)), n_(n), eps_(eps) {
    if (n_ == 0) throw std::invalid_argument("blocklength must be positive");
    if (eps_ <= 0.0) throw std::invalid_argument("eps must be positive");
    const std::size_t k = pmf_.size();
    double total = std::pow(static_cast<double>(k), static_cast<double>(n_));
    if (total > static_cast<double>(kEnumerationGuard))
        throw std::length_error("alphabet^n exceeds enumeration guard");

    // depth-first enumeration in lexicographic order, counts maintained
    // incrementally
    std::vector<unsigned> counts(k, 0);
    Sequence x(n_, 0);
    std::uint64_t rank = 0;
    unsigned depth = 0;
    // iterative DFS: descend with symbol 0, then advance
    for (;;) {
        while (depth < n_) {
            ++counts[x[depth]];
            ++depth;
        }
        if (counts_typical(counts, pmf_, n_, eps_)) ranks_.push_back(rank);
        ++rank;
        // backtrack and advance odometer
        for (;;) {
            if (depth == 0) goto done;
            --depth;
            --counts[x[depth]];
            if (x[depth] + 1u < k) {
                ++x[depth];
                break;
            }
            x[depth] = 0;
        }
    }
done:
    // |T| <= 2^{n(1+eps)H}: standard consequence of the letter-typical
    // definition; a violation indicates a broken enumeration.
    double h = shannon_entropy(pmf_);
    if (rate() > (1.0 + eps_) * h + 1e-9)
        throw std::logic_error("typical set larger than (1+eps)H bound");
}

double TypicalSetIndex::rate() const {
    return std::log2(static_cast<double>(count())) / n_;
}

MessageId TypicalSetIndex::find(const Sequence& x) const {
    if (x.size() != n_) throw std::invalid_argument("sequence length mismatch");
    if (!is_typical(x, pmf_, eps_)) return 0;
    std::uint64_t r = sequence_rank(x, pmf_.size());
    auto it = std::lower_bound(ranks_.begin(), ranks_.end(), r);
    return static_cast<MessageId>(it - ranks_.begin()) + 1;
}

Sequence TypicalSetIndex::sequence(MessageId m) const {
    if (m == 0 || m > count()) throw std::out_of_range("message outside index range");
    return sequence_from_rank(ranks_[m - 1], pmf_.size(), n_);
}

void TypicalSetIndex::save(std::ostream& os) const {
    os.write(kMagic, 4);
    write_u32(os, kVersion);
    write_u32(os, n_);
    write_u32(os, static_cast<std::uint32_t>(pmf_.size()));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", eps_);
    write_string(os, buf);
    for (double p : pmf_.probs()) write_double(os, p);
    write_u64(os, count());
    // packed sequence list, fixed bits per symbol, MSB first
    unsigned w = bits_per_symbol(pmf_.size());
    std::uint8_t acc = 0;
    unsigned used = 0;
    for (std::uint64_t r : ranks_) {
        Sequence x = sequence_from_rank(r, pmf_.size(), n_);
        for (std::uint8_t s : x)
            for (unsigned b = w; b-- > 0;) {
                acc = static_cast<std::uint8_t>((acc << 1) | ((s >> b) & 1));
                if (++used == 8) {
                    os.put(static_cast<char>(acc));
                    acc = 0;
                    used = 0;
                }
            }
    }
    if (used > 0) os.put(static_cast<char>(acc << (8 - used)));
}

TypicalSetIndex TypicalSetIndex::load(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a typical-set index file");
    if (read_u32(is) != kVersion) throw std::runtime_error("unsupported index version");
    TypicalSetIndex idx;
    idx.n_ = read_u32(is);
    std::uint32_t alphabet = read_u32(is);
    idx.eps_ = std::strtod(read_string(is).c_str(), nullptr);
    std::vector<double> probs(alphabet);
    for (auto& p : probs) p = read_double(is);
    idx.pmf_ = Pmf(std::move(probs));
    std::uint64_t cnt = read_u64(is);
    idx.ranks_.reserve(cnt);
    unsigned w = bits_per_symbol(alphabet);
    std::uint8_t acc = 0;
    unsigned avail = 0;
    for (std::uint64_t i = 0; i < cnt; ++i) {
        std::uint64_t rank = 0;
        for (unsigned pos = 0; pos < idx.n_; ++pos) {
            std::uint8_t s = 0;
            for (unsigned b = 0; b < w; ++b) {
                if (avail == 0) {
                    int c = is.get();
                    if (c == EOF) throw std::runtime_error("truncated index file");
                    acc = static_cast<std::uint8_t>(c);
                    avail = 8;
                }
                s = static_cast<std::uint8_t>((s << 1) | ((acc >> 7) & 1));
                acc = static_cast<std::uint8_t>(acc << 1);
                --avail;
            }
            if (s >= alphabet) throw std::runtime_error("corrupt packed sequence");
            rank = rank * alphabet + s;
        }
        idx.ranks_.push_back(rank);
    }
    if (!std::is_sorted(idx.ranks_.begin(), idx.ranks_.end()))
        throw std::runtime_error("corrupt index ordering");
    return idx;
}

TypicalSetIndex build_typical_index(const Pmf& p, unsigned n, double eps) {
    return TypicalSetIndex(p, n, eps);
}

MessageId ts_encode(const Sequence& x, const TypicalSetIndex& index, BitSource& seed) {
    MessageId m = index.find(x);
    if (m != 0) return m;
    return seed.next_below(index.count()) + 1;
}

MessageId ts_encode_deterministic(const Sequence& x, const TypicalSetIndex& index) {
    MessageId m = index.find(x);
    return m != 0 ? m : 1;
}

Sequence ts_decode(MessageId m, const TypicalSetIndex& index) {
    return index.sequence(m);
}

std::vector<MessageId> blockwise_ts_code(const Sequence& x, unsigned a, unsigned b,
                                         const TypicalSetIndex& block_index,
                                         BitSource& seed) {
    if (static_cast<std::size_t>(a) * b != x.size())
        throw std::invalid_argument("a*b must equal the input length");
    if (block_index.n() != a) throw std::invalid_argument("block index length mismatch");
    std::vector<MessageId> out(b);
    for (unsigned i = 0; i < b; ++i) {
        Sequence block(x.begin() + static_cast<std::ptrdiff_t>(i) * a,
                       x.begin() + static_cast<std::ptrdiff_t>(i + 1) * a);
        out[i] = ts_encode(block, block_index, seed);
    }
    return out;
}

namespace {

// exact doubles: all values under the enumeration guard stay below 2^53
double binomial(unsigned n, unsigned k) {
    double r = 1.0;
    for (unsigned i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return std::round(r);
}

// visit all type vectors (counts per symbol summing to n)
template <typename Fn>
void for_each_type(std::vector<unsigned>& counts, std::size_t pos, unsigned left,
                   const Fn& fn) {
    if (pos + 1 == counts.size()) {
        counts[pos] = left;
        fn(counts);
        return;
    }
    for (unsigned k = 0; k <= left; ++k) {
        counts[pos] = k;
        for_each_type(counts, pos + 1, left - k, fn);
    }
}

}  // namespace

double atypicality_probability_exact(const Pmf& p, unsigned n, double eps) {
    double typical_mass = 0.0;
    std::vector<unsigned> counts(p.size(), 0);
    for_each_type(counts, 0, n, [&](const std::vector<unsigned>& c) {
        if (!counts_typical(c, p, n, eps)) return;
        double ways = 1.0;
        unsigned left = n;
        double prob = 1.0;
        for (std::size_t a = 0; a < c.size(); ++a) {
            ways *= binomial(left, c[a]);
            left -= c[a];
            if (c[a] > 0) prob *= std::pow(p[a], static_cast<double>(c[a]));
        }
        typical_mass += ways * prob;
    });
    return 1.0 - typical_mass;
}

double atypicality_probability_bound(const Pmf& p, unsigned n, double eps) {
    double mu = p.min_supported_prob();
    return 2.0 * static_cast<double>(p.size()) *
           std::exp(-static_cast<double>(n) * eps * eps * mu);
}

Pmf ts_output_pmf_seeded(const TypicalSetIndex& index, const Pmf& p) {
    std::uint64_t m = index.count();
    std::vector<double> out(m, 0.0);
    double typical_mass = 0.0;
    for (std::uint64_t i = 0; i < m; ++i) {
        double prob = sequence_probability(index.sequence(i + 1), p);
        out[i] = prob;
        typical_mass += prob;
    }
    double fallback = (1.0 - typical_mass) / static_cast<double>(m);
    for (double& v : out) v += fallback;
    return Pmf(std::move(out));
}

Pmf ts_output_pmf_deterministic(const TypicalSetIndex& index, const Pmf& p) {
    std::uint64_t m = index.count();
    std::vector<double> out(m, 0.0);
    double typical_mass = 0.0;
    for (std::uint64_t i = 0; i < m; ++i) {
        double prob = sequence_probability(index.sequence(i + 1), p);
        out[i] = prob;
        typical_mass += prob;
    }
    out[0] += 1.0 - typical_mass;
    return Pmf(std::move(out));
}

}  // namespace secrecy
