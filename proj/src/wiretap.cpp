#include "secrecy/wiretap.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "secrecy/info.hpp"
#include "secrecy/parallel.hpp"

namespace secrecy {

namespace {

constexpr double kStrictMargin = 1e-9;

std::uint64_t pow_u64(std::size_t base, unsigned exp) {
    std::uint64_t v = 1;
    for (unsigned i = 0; i < exp; ++i) v *= base;
    return v;
}

}  // namespace

WiretapChannel::WiretapChannel(std::size_t x_size, std::size_t y_size, std::size_t z_size,
                               std::vector<double> kernel)
    : x_size_(x_size), y_size_(y_size), z_size_(z_size), kernel_(std::move(kernel)) {
    if (x_size_ == 0 || y_size_ == 0 || z_size_ == 0)
        throw std::invalid_argument("alphabet sizes must be positive");
    if (kernel_.size() != x_size_ * y_size_ * z_size_)
        throw std::invalid_argument("kernel table size mismatch");
    for (std::size_t x = 0; x < x_size_; ++x) {
        double row = 0.0;
        for (std::size_t i = 0; i < y_size_ * z_size_; ++i) {
            double v = kernel_[x * y_size_ * z_size_ + i];
            if (!(v >= 0.0)) throw std::invalid_argument("kernel entries must be nonnegative");
            row += v;
        }
        if (std::abs(row - 1.0) > kPmfTolerance)
            throw std::invalid_argument("kernel row does not sum to 1");
    }
    main_.assign(x_size_ * y_size_, 0.0);
    eaves_.assign(x_size_ * z_size_, 0.0);
    for (std::size_t x = 0; x < x_size_; ++x)
        for (std::size_t y = 0; y < y_size_; ++y)
            for (std::size_t z = 0; z < z_size_; ++z) {
                double v = joint(x, y, z);
                main_[x * y_size_ + y] += v;
                eaves_[x * z_size_ + z] += v;
            }
}

WiretapChannel WiretapChannel::bsc_pair(double p1, double p2) {
    if (!(p1 >= 0.0 && p1 < 0.5) || !(p2 >= p1 && p2 < 0.5))
        throw std::invalid_argument("need 0 <= p1 <= p2 < 1/2 for a degraded BSC pair");
    // Z is a further-degraded copy of Y, flipped with q so that the overall
    // crossover is p2
    double q = (p2 - p1) / (1.0 - 2.0 * p1);
    std::vector<double> kernel(2 * 2 * 2, 0.0);
    for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y)
            for (std::size_t z = 0; z < 2; ++z) {
                double py = (y == x) ? 1.0 - p1 : p1;
                double pz = (z == y) ? 1.0 - q : q;
                kernel[(x * 2 + y) * 2 + z] = py * pz;
            }
    return WiretapChannel(2, 2, 2, std::move(kernel));
}

WiretapChannel WiretapChannel::bec_pair(double e1, double e2) {
    if (!(e1 >= 0.0 && e1 <= 1.0) || !(e2 >= e1 && e2 <= 1.0))
        throw std::invalid_argument("need 0 <= e1 <= e2 <= 1 for a degraded BEC pair");
    double q = e1 < 1.0 ? (e2 - e1) / (1.0 - e1) : 0.0;
    // y, z over {0, 1, erasure = 2}
    std::vector<double> kernel(2 * 3 * 3, 0.0);
    for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 3; ++y) {
            double py = (y == x) ? 1.0 - e1 : (y == 2 ? e1 : 0.0);
            if (py == 0.0) continue;
            for (std::size_t z = 0; z < 3; ++z) {
                double pz;
                if (y == 2)
                    pz = (z == 2) ? 1.0 : 0.0;
                else
                    pz = (z == y) ? 1.0 - q : (z == 2 ? q : 0.0);
                kernel[(x * 3 + y) * 3 + z] = py * pz;
            }
        }
    return WiretapChannel(2, 3, 3, std::move(kernel));
}

WiretapChannel WiretapChannel::from_kernel_file(std::istream& is) {
    std::size_t x, y, z;
    if (!(is >> x >> y >> z)) throw std::runtime_error("kernel file: bad sizes header");
    std::vector<double> kernel(x * y * z);
    for (double& v : kernel)
        if (!(is >> v)) throw std::runtime_error("kernel file: missing probabilities");
    return WiretapChannel(x, y, z, std::move(kernel));
}

double WiretapChannel::joint(std::size_t x, std::size_t y, std::size_t z) const {
    return kernel_[(x * y_size_ + y) * z_size_ + z];
}

double WiretapChannel::main(std::size_t y, std::size_t x) const {
    return main_[x * y_size_ + y];
}

double WiretapChannel::eaves(std::size_t z, std::size_t x) const {
    return eaves_[x * z_size_ + z];
}

std::pair<std::uint8_t, std::uint8_t> WiretapChannel::sample(std::size_t x,
                                                             SplitMix64& gen) const {
    double u = gen.next_double();
    double acc = 0.0;
    const double* row = kernel_.data() + x * y_size_ * z_size_;
    std::size_t last = 0;
    for (std::size_t i = 0; i < y_size_ * z_size_; ++i) {
        if (row[i] == 0.0) continue;
        last = i;
        acc += row[i];
        if (u < acc) break;
    }
    return {static_cast<std::uint8_t>(last / z_size_),
            static_cast<std::uint8_t>(last % z_size_)};
}

namespace {

double mi_against(const std::vector<double>& px, std::size_t out_size,
                  const std::function<double(std::size_t, std::size_t)>& w) {
    std::vector<double> pout(out_size, 0.0);
    for (std::size_t x = 0; x < px.size(); ++x)
        for (std::size_t o = 0; o < out_size; ++o) pout[o] += px[x] * w(o, x);
    double mi = 0.0;
    for (std::size_t x = 0; x < px.size(); ++x) {
        if (px[x] == 0.0) continue;
        for (std::size_t o = 0; o < out_size; ++o) {
            double v = w(o, x);
            if (v > 0.0 && pout[o] > 0.0) mi += px[x] * v * std::log2(v / pout[o]);
        }
    }
    return mi;
}

}  // namespace

std::pair<double, double> mutual_informations(const Pmf& p_x, const WiretapChannel& ch) {
    if (p_x.size() != ch.x_size()) throw std::invalid_argument("input alphabet mismatch");
    double iy = mi_against(p_x.probs(), ch.y_size(),
                           [&](std::size_t y, std::size_t x) { return ch.main(y, x); });
    double iz = mi_against(p_x.probs(), ch.z_size(),
                           [&](std::size_t z, std::size_t x) { return ch.eaves(z, x); });
    return {iy, iz};
}

namespace {

struct RegionPoint {
    double iy, iz;
    std::vector<double> px;
};

void enumerate_simplex(std::size_t dims, unsigned grid, std::vector<unsigned>& parts,
                       std::size_t pos, unsigned left,
                       const std::function<void(const std::vector<unsigned>&)>& fn) {
    if (pos + 1 == dims) {
        parts[pos] = left;
        fn(parts);
        return;
    }
    for (unsigned k = 0; k <= left; ++k) {
        parts[pos] = k;
        enumerate_simplex(dims, grid, parts, pos + 1, left - k, fn);
    }
}

double cross(double ox, double oy, double ax, double ay, double bx, double by) {
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

// Andrew's monotone chain; returns indices into pts, counter-clockwise
std::vector<std::size_t> convex_hull(const std::vector<RegionPoint>& pts) {
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        if (pts[l].iy != pts[r].iy) return pts[l].iy < pts[r].iy;
        return pts[l].iz < pts[r].iz;
    });
    order.erase(std::unique(order.begin(), order.end(),
                            [&](std::size_t l, std::size_t r) {
                                return pts[l].iy == pts[r].iy && pts[l].iz == pts[r].iz;
                            }),
                order.end());
    if (order.size() <= 2) return order;
    std::vector<std::size_t> hull(2 * order.size());
    std::size_t k = 0;
    for (std::size_t idx : order) {
        while (k >= 2 && cross(pts[hull[k - 2]].iy, pts[hull[k - 2]].iz,
                               pts[hull[k - 1]].iy, pts[hull[k - 1]].iz, pts[idx].iy,
                               pts[idx].iz) <= 0)
            --k;
        hull[k++] = idx;
    }
    std::size_t lower = k + 1;
    for (std::size_t i = order.size() - 1; i-- > 0;) {
        std::size_t idx = order[i];
        while (k >= lower && cross(pts[hull[k - 2]].iy, pts[hull[k - 2]].iz,
                                   pts[hull[k - 1]].iy, pts[hull[k - 1]].iz, pts[idx].iy,
                                   pts[idx].iz) <= 0)
            --k;
        hull[k++] = idx;
    }
    hull.resize(k - 1);
    return hull;
}

}  // namespace

FeasibilityResult region_feasible(double h_c, double h_p, const WiretapChannel& ch,
                                  unsigned grid) {
    if (h_c < 0.0 || h_p < 0.0) throw std::invalid_argument("entropies must be nonnegative");
    if (grid == 0) throw std::invalid_argument("grid must be positive");

    std::vector<RegionPoint> pts;
    std::vector<unsigned> parts(ch.x_size(), 0);
    enumerate_simplex(ch.x_size(), grid, parts, 0, grid,
                      [&](const std::vector<unsigned>& k) {
                          std::vector<double> px(ch.x_size());
                          for (std::size_t i = 0; i < px.size(); ++i)
                              px[i] = static_cast<double>(k[i]) / grid;
                          auto [iy, iz] = mutual_informations(Pmf(px), ch);
                          pts.push_back({iy, iz, std::move(px)});
                      });

    std::vector<std::size_t> hull = convex_hull(pts);

    auto min_slack = [&](double a, double b) {
        return std::min({a - (h_c + h_p), (a - b) - h_c, h_p - b});
    };

    struct Candidate {
        double a, b;
    };
    std::vector<Candidate> cands;
    cands.reserve(pts.size() + 4 * hull.size() + 3);
    for (const auto& p : pts) cands.push_back({p.iy, p.iz});

    // candidate optima of the concave min-slack objective: polygon
    // vertices, crossings of slack tie-lines with edges, and interior
    // tie-tie crossings. tie lines as alpha*a + beta*b = gamma
    const double lines[3][3] = {{0.0, 1.0, h_p},
                                {1.0, 1.0, h_c + 2.0 * h_p},
                                {1.0, 0.0, h_c + h_p}};
    for (std::size_t e = 0; e + 1 <= hull.size() && hull.size() >= 2; ++e) {
        const RegionPoint& p1 = pts[hull[e]];
        const RegionPoint& p2 = pts[hull[(e + 1) % hull.size()]];
        double da = p2.iy - p1.iy, db = p2.iz - p1.iz;
        for (const auto& ln : lines) {
            double denom = ln[0] * da + ln[1] * db;
            if (std::abs(denom) < 1e-15) continue;
            double t = (ln[2] - ln[0] * p1.iy - ln[1] * p1.iz) / denom;
            if (t >= 0.0 && t <= 1.0) cands.push_back({p1.iy + t * da, p1.iz + t * db});
        }
    }
    if (hull.size() >= 3) {
        auto inside = [&](double a, double b) {
            for (std::size_t e = 0; e < hull.size(); ++e) {
                const RegionPoint& p1 = pts[hull[e]];
                const RegionPoint& p2 = pts[hull[(e + 1) % hull.size()]];
                if (cross(p1.iy, p1.iz, p2.iy, p2.iz, a, b) < -1e-12) return false;
            }
            return true;
        };
        for (int u = 0; u < 3; ++u)
            for (int v = u + 1; v < 3; ++v) {
                double det = lines[u][0] * lines[v][1] - lines[v][0] * lines[u][1];
                if (std::abs(det) < 1e-15) continue;
                double a = (lines[u][2] * lines[v][1] - lines[v][2] * lines[u][1]) / det;
                double b = (lines[u][0] * lines[v][2] - lines[v][0] * lines[u][2]) / det;
                if (inside(a, b)) cands.push_back({a, b});
            }
    }

    double best = -std::numeric_limits<double>::infinity();
    Candidate best_pt{0.0, 0.0};
    for (const auto& c : cands) {
        double s = min_slack(c.a, c.b);
        if (s > best) {
            best = s;
            best_pt = c;
        }
    }

    FeasibilityResult res;
    res.feasible = best > kStrictMargin;
    res.slacks = {best_pt.a - (h_c + h_p), (best_pt.a - best_pt.b) - h_c,
                  h_p - best_pt.b};
    if (!res.feasible) return res;

    // witness: express the best point as a mixture of at most 3 vertices
    std::vector<std::pair<double, std::size_t>> mixture;  // (weight, pts index)
    auto try_exact_point = [&]() {
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (std::abs(pts[i].iy - best_pt.a) < 1e-12 &&
                std::abs(pts[i].iz - best_pt.b) < 1e-12) {
                mixture = {{1.0, i}};
                return true;
            }
        return false;
    };
    if (!try_exact_point()) {
        if (hull.size() == 2) {
            const RegionPoint& p1 = pts[hull[0]];
            const RegionPoint& p2 = pts[hull[1]];
            double da = p2.iy - p1.iy, db = p2.iz - p1.iz;
            double t = std::abs(da) > std::abs(db) ? (best_pt.a - p1.iy) / da
                                                   : (best_pt.b - p1.iz) / db;
            t = std::clamp(t, 0.0, 1.0);
            mixture = {{1.0 - t, hull[0]}, {t, hull[1]}};
        } else {
            // fan triangulation from hull[0]
            for (std::size_t i = 1; i + 1 < hull.size(); ++i) {
                const RegionPoint& a = pts[hull[0]];
                const RegionPoint& b = pts[hull[i]];
                const RegionPoint& c = pts[hull[i + 1]];
                double det = (b.iy - a.iy) * (c.iz - a.iz) - (c.iy - a.iy) * (b.iz - a.iz);
                if (std::abs(det) < 1e-18) continue;
                double w1 = ((best_pt.a - a.iy) * (c.iz - a.iz) -
                             (c.iy - a.iy) * (best_pt.b - a.iz)) /
                            det;
                double w2 = ((b.iy - a.iy) * (best_pt.b - a.iz) -
                             (best_pt.a - a.iy) * (b.iz - a.iz)) /
                            det;
                double w0 = 1.0 - w1 - w2;
                if (w0 >= -1e-9 && w1 >= -1e-9 && w2 >= -1e-9) {
                    mixture = {{std::max(w0, 0.0), hull[0]},
                               {std::max(w1, 0.0), hull[i]},
                               {std::max(w2, 0.0), hull[i + 1]}};
                    break;
                }
            }
        }
    }
    if (mixture.empty()) {
        // should not happen; fall back to the best single grid point
        std::size_t bi = 0;
        double bs = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double s = min_slack(pts[i].iy, pts[i].iz);
            if (s > bs) {
                bs = s;
                bi = i;
            }
        }
        mixture = {{1.0, bi}};
    }
    double wsum = 0.0;
    for (auto& [w, idx] : mixture) wsum += w;
    double mix_iy = 0.0, mix_iz = 0.0;
    for (auto& [w, idx] : mixture) {
        w /= wsum;
        if (w < 1e-12) continue;
        res.q_weights.push_back(w);
        res.x_given_q.emplace_back(pts[idx].px);
        mix_iy += w * pts[idx].iy;
        mix_iz += w * pts[idx].iz;
    }
    res.slacks = {mix_iy - (h_c + h_p), (mix_iy - mix_iz) - h_c, h_p - mix_iz};
    res.feasible = std::min({res.slacks[0], res.slacks[1], res.slacks[2]}) > kStrictMargin;
    return res;
}

Sequence WiretapCodebook::q_word(std::uint64_t i) const {
    if (i == 0 || i > n0) throw std::out_of_range("cloud index");
    return Sequence(q_words.begin() + static_cast<std::ptrdiff_t>((i - 1) * n),
                    q_words.begin() + static_cast<std::ptrdiff_t>(i * n));
}

Sequence WiretapCodebook::x_word(std::uint64_t i, std::uint64_t j, std::uint64_t s) const {
    if (i == 0 || i > n0 || j == 0 || j > nc || s == 0 || s > np)
        throw std::out_of_range("codeword index");
    std::uint64_t flat = ((i - 1) * nc + (j - 1)) * np + (s - 1);
    return Sequence(x_words.begin() + static_cast<std::ptrdiff_t>(flat * n),
                    x_words.begin() + static_cast<std::ptrdiff_t>((flat + 1) * n));
}

WiretapCodebook build_codebook_counts(const Pmf& p_q, const std::vector<Pmf>& p_x_given_q,
                                      unsigned n, std::uint64_t n0, std::uint64_t nc,
                                      std::uint64_t np, std::uint64_t seed) {
    if (n == 0 || n0 == 0 || nc == 0 || np == 0)
        throw std::invalid_argument("counts must be positive");
    if (p_x_given_q.size() != p_q.size())
        throw std::invalid_argument("need one conditional per q symbol");
    std::uint64_t words = n0 + n0 * nc * np;
    if (words > (1ULL << 24) / n) throw std::length_error("codebook exceeds scale guard");

    WiretapCodebook cb;
    cb.n = n;
    cb.n0 = n0;
    cb.nc = nc;
    cb.np = np;
    cb.r0 = std::log2(static_cast<double>(n0)) / n;
    cb.rc = std::log2(static_cast<double>(nc)) / n;
    cb.rp = std::log2(static_cast<double>(np)) / n;
    cb.q_alphabet = p_q.size();
    cb.x_alphabet = p_x_given_q[0].size();
    cb.seed = seed;

    SplitMix64 gen(seed);
    cb.q_words.resize(n0 * n);
    for (auto& q : cb.q_words) q = static_cast<std::uint8_t>(sample_pmf(p_q, gen));
    cb.x_words.resize(n0 * nc * np * n);
    for (std::uint64_t i = 0; i < n0; ++i)
        for (std::uint64_t j = 0; j < nc; ++j)
            for (std::uint64_t s = 0; s < np; ++s)
                for (unsigned pos = 0; pos < n; ++pos) {
                    std::uint8_t q = cb.q_words[i * n + pos];
                    cb.x_words[(((i * nc + j) * np + s) * n) + pos] =
                        static_cast<std::uint8_t>(sample_pmf(p_x_given_q[q], gen));
                }
    return cb;
}

WiretapCodebook build_codebook(const Pmf& p_q, const std::vector<Pmf>& p_x_given_q,
                               unsigned n, double r0, double rc, double rp,
                               std::uint64_t seed) {
    auto count = [n](double r) {
        double v = std::exp2(static_cast<double>(n) * r);
        return static_cast<std::uint64_t>(std::ceil(v - 1e-9));
    };
    return build_codebook_counts(p_q, p_x_given_q, n, count(r0), count(rc), count(rp),
                                 seed);
}

Sequence wiretap_encode(std::uint64_t i, std::uint64_t j, std::uint64_t s,
                        const WiretapCodebook& cb) {
    return cb.x_word(i, j, s);
}

BobDecoder::BobDecoder(const WiretapCodebook& cb, const Pmf& p_q,
                       const std::vector<Pmf>& p_x_given_q, const WiretapChannel& ch,
                       double eps)
    : cb_(&cb), p_qy_flat_({1.0}), p_qxy_flat_({1.0}), eps_(eps),
      y_size_(ch.y_size()), x_size_(ch.x_size()) {
    if (p_q.size() * ch.x_size() * ch.y_size() > 255)
        throw std::invalid_argument("product alphabet too large for the decoder");
    std::vector<double> qy(p_q.size() * y_size_, 0.0);
    std::vector<double> qxy(p_q.size() * x_size_ * y_size_, 0.0);
    for (std::size_t q = 0; q < p_q.size(); ++q)
        for (std::size_t x = 0; x < x_size_; ++x)
            for (std::size_t y = 0; y < y_size_; ++y) {
                double v = p_q[q] * p_x_given_q[q][x] * ch.main(y, x);
                qy[q * y_size_ + y] += v;
                qxy[(q * x_size_ + x) * y_size_ + y] += v;
            }
    p_qy_flat_ = Pmf(std::move(qy));
    p_qxy_flat_ = Pmf(std::move(qxy));
}

BobResult BobDecoder::decode(const Sequence& y) const {
    if (y.size() != cb_->n) throw std::invalid_argument("output length mismatch");
    BobResult res;

    // stage 1: unique cloud center jointly typical with y
    std::uint64_t found_i = 0;
    for (std::uint64_t i = 1; i <= cb_->n0; ++i) {
        Sequence pair(cb_->n);
        for (unsigned pos = 0; pos < cb_->n; ++pos)
            pair[pos] = static_cast<std::uint8_t>(
                cb_->q_words[(i - 1) * cb_->n + pos] * y_size_ + y[pos]);
        if (is_typical(pair, p_qy_flat_, eps_)) {
            if (found_i != 0) {
                res.status = DecodeStatus::ambiguous;
                return res;
            }
            found_i = i;
        }
    }
    if (found_i == 0) {
        res.status = DecodeStatus::no_candidate;
        return res;
    }

    // stage 2: unique (j, s) jointly typical with (q, y)
    std::uint64_t found_j = 0, found_s = 0;
    for (std::uint64_t j = 1; j <= cb_->nc; ++j)
        for (std::uint64_t s = 1; s <= cb_->np; ++s) {
            Sequence triple(cb_->n);
            std::uint64_t flat = ((found_i - 1) * cb_->nc + (j - 1)) * cb_->np + (s - 1);
            for (unsigned pos = 0; pos < cb_->n; ++pos) {
                std::uint8_t q = cb_->q_words[(found_i - 1) * cb_->n + pos];
                std::uint8_t x = cb_->x_words[flat * cb_->n + pos];
                triple[pos] = static_cast<std::uint8_t>((q * x_size_ + x) * y_size_ + y[pos]);
            }
            if (is_typical(triple, p_qxy_flat_, eps_)) {
                if (found_j != 0) {
                    res.status = DecodeStatus::ambiguous;
                    return res;
                }
                found_j = j;
                found_s = s;
            }
        }
    if (found_j == 0) {
        res.status = DecodeStatus::no_candidate;
        return res;
    }
    res.status = DecodeStatus::ok;
    res.i = found_i;
    res.j = found_j;
    res.s = found_s;
    return res;
}

std::vector<double> leakage_per_message(const WiretapCodebook& cb,
                                        const WiretapChannel& ch, const Pmf& p_mp,
                                        const std::optional<Pmf>& p_mc) {
    if (p_mp.size() != cb.np) throw std::invalid_argument("p_mp size must equal np");
    Pmf mc = p_mc.value_or(Pmf::uniform(cb.nc));
    if (mc.size() != cb.nc) throw std::invalid_argument("p_mc size must equal nc");

    const std::uint64_t zn = pow_u64(ch.z_size(), cb.n);
    const std::uint64_t words = cb.n0 * cb.nc * cb.np;
    if (zn > (1ULL << 20) || zn * words > (1ULL << 26))
        throw std::length_error("leakage enumeration exceeds scale guard");

    // p_{Z^n | M_c = j} for all j, z
    std::vector<double> cond(cb.nc * zn, 0.0);
    const double ui = 1.0 / static_cast<double>(cb.n0);
    const std::size_t chunks = std::min<std::uint64_t>(zn, 16);
    parallel_for_chunks(chunks, [&](std::size_t c) {
        std::uint64_t lo = zn * c / chunks;
        std::uint64_t hi = zn * (c + 1) / chunks;
        Sequence z(cb.n);
        for (std::uint64_t zr = lo; zr < hi; ++zr) {
            std::uint64_t v = zr;
            for (unsigned pos = cb.n; pos-- > 0;) {
                z[pos] = static_cast<std::uint8_t>(v % ch.z_size());
                v /= ch.z_size();
            }
            for (std::uint64_t i = 0; i < cb.n0; ++i)
                for (std::uint64_t j = 0; j < cb.nc; ++j)
                    for (std::uint64_t s = 0; s < cb.np; ++s) {
                        double w = 1.0;
                        std::uint64_t flat = ((i * cb.nc + j) * cb.np + s) * cb.n;
                        for (unsigned pos = 0; pos < cb.n; ++pos)
                            w *= ch.eaves(z[pos], cb.x_words[flat + pos]);
                        cond[j * zn + zr] += ui * p_mp[s] * w;
                    }
        }
    });

    std::vector<double> pz(zn, 0.0);
    for (std::uint64_t j = 0; j < cb.nc; ++j)
        for (std::uint64_t zr = 0; zr < zn; ++zr) pz[zr] += mc[j] * cond[j * zn + zr];

    std::vector<double> dist(cb.nc, 0.0);
    for (std::uint64_t j = 0; j < cb.nc; ++j)
        for (std::uint64_t zr = 0; zr < zn; ++zr)
            dist[j] += std::abs(cond[j * zn + zr] - pz[zr]);
    return dist;
}

double leakage_exact(const WiretapCodebook& cb, const WiretapChannel& ch,
                     const Pmf& p_mp, const std::optional<Pmf>& p_mc) {
    std::vector<double> dist = leakage_per_message(cb, ch, p_mp, p_mc);
    return *std::max_element(dist.begin(), dist.end());
}

namespace {

Sequence sample_sequence(const Pmf& p, unsigned n, SplitMix64& gen) {
    Sequence x(n);
    for (unsigned i = 0; i < n; ++i)
        x[i] = static_cast<std::uint8_t>(sample_pmf(p, gen));
    return x;
}

// Monte Carlo leakage for instances beyond the exact guard: empirical
// conditional and unconditional eavesdropper histograms. Plug-in estimate.
double leakage_mc(const WiretapCodebook& cb, const WiretapChannel& ch, const Pmf& p_mp,
                  const Pmf& p_mc, std::uint64_t trials, std::uint64_t master_seed) {
    std::vector<std::unordered_map<std::uint64_t, double>> cond(cb.nc);
    std::unordered_map<std::uint64_t, double> uncond;
    SplitMix64 gen = derive_stream(master_seed, "leakage-mc");
    const double w = 1.0 / static_cast<double>(trials);
    for (std::uint64_t t = 0; t < trials; ++t) {
        std::uint64_t j = sample_pmf(p_mc, gen);
        std::uint64_t s = sample_pmf(p_mp, gen);
        std::uint64_t i = cb.n0 > 1 ? gen.next_below(cb.n0) : 0;
        std::uint64_t flat = ((i * cb.nc + j) * cb.np + s) * cb.n;
        std::uint64_t zr = 0;
        for (unsigned pos = 0; pos < cb.n; ++pos) {
            auto [y, z] = ch.sample(cb.x_words[flat + pos], gen);
            (void)y;
            zr = zr * ch.z_size() + z;
        }
        cond[j][zr] += w / p_mc[j];
        uncond[zr] += w;
    }
    double worst = 0.0;
    for (std::uint64_t j = 0; j < cb.nc; ++j) {
        double v = 0.0;
        for (const auto& [zr, pc] : cond[j]) {
            auto it = uncond.find(zr);
            double pu = it == uncond.end() ? 0.0 : it->second;
            v += std::abs(pc - pu);
        }
        for (const auto& [zr, pu] : uncond)
            if (cond[j].find(zr) == cond[j].end()) v += pu;
        worst = std::max(worst, v);
    }
    return worst;
}

struct TrialTally {
    std::uint64_t errors = 0;
    std::uint64_t seed_bits = 0;
};

}  // namespace

MuxReport mux_a_run(const MuxConfig& cfg, std::uint64_t trials, std::uint64_t master_seed) {
    TypicalSetIndex index_c = build_typical_index(cfg.source_c.pmf, cfg.n, cfg.eps_source);
    TypicalSetIndex index_p = build_typical_index(cfg.source_p.pmf, cfg.n, cfg.eps_source);
    const std::uint64_t nc = index_c.count();
    const std::uint64_t np = index_p.count();

    Pmf p_q({1.0});
    std::vector<Pmf> p_xq = {cfg.input_dist};
    WiretapCodebook cb =
        build_codebook_counts(p_q, p_xq, cfg.n, 1, nc, np, cfg.codebook_seed);
    BobDecoder bob(cb, p_q, p_xq, cfg.channel, cfg.eps_decoder);

    const std::size_t chunks = 8;
    std::vector<TrialTally> tally(chunks);
    parallel_for_chunks(chunks, [&](std::size_t c) {
        std::uint64_t lo = trials * c / chunks;
        std::uint64_t hi = trials * (c + 1) / chunks;
        SplitMix64 gen = derive_stream(master_seed, "mux-a-" + std::to_string(c));
        BitSource fallback =
            BitSource::from_stream(derive_stream(master_seed, "mux-a-seed-" + std::to_string(c)));
        for (std::uint64_t t = lo; t < hi; ++t) {
            Sequence vc = sample_sequence(cfg.source_c.pmf, cfg.n, gen);
            Sequence vp = sample_sequence(cfg.source_p.pmf, cfg.n, gen);
            MessageId mc = ts_encode_deterministic(vc, index_c);
            MessageId mp = ts_encode(vp, index_p, fallback);
            Sequence x = cb.x_word(1, mc, mp);
            Sequence y(cfg.n);
            for (unsigned pos = 0; pos < cfg.n; ++pos)
                y[pos] = cfg.channel.sample(x[pos], gen).first;
            BobResult dec = bob.decode(y);
            std::uint64_t jh = dec.status == DecodeStatus::ok ? dec.j : 1;
            std::uint64_t sh = dec.status == DecodeStatus::ok ? dec.s : 1;
            Sequence vch = ts_decode(jh, index_c);
            Sequence vph = ts_decode(sh, index_p);
            if (vch != vc || vph != vp) ++tally[c].errors;
        }
        tally[c].seed_bits = fallback.consumed();
    });

    Pmf p_mp = ts_output_pmf_seeded(index_p, cfg.source_p.pmf);
    Pmf p_mc = ts_output_pmf_deterministic(index_c, cfg.source_c.pmf);

    MuxReport r;
    r.arch = "A";
    r.n = cfg.n;
    r.r0 = cb.r0;
    r.rc = cb.rc;
    r.rp = cb.rp;
    std::uint64_t errors = 0;
    for (const auto& t : tally) {
        errors += t.errors;
        r.seed_bits += t.seed_bits;
    }
    r.pe = static_cast<double>(errors) / static_cast<double>(trials);
    r.trials = trials;
    try {
        r.leakage = leakage_exact(cb, cfg.channel, p_mp, p_mc);
        r.leakage_mode = "exact";
    } catch (const std::length_error&) {
        r.leakage = leakage_mc(cb, cfg.channel, p_mp, p_mc, trials, master_seed);
        r.leakage_mode = "mc";
    }
    r.ue_public = variational_distance(p_mp, Pmf::uniform(np));
    r.h2_public_per_n = renyi2_entropy(p_mp) / cfg.n;
    r.i_xz = mutual_informations(cfg.input_dist, cfg.channel).second;
    r.master_seed = master_seed;
    return r;
}

MuxReport mux_b_run(const MuxConfig& cfg, std::uint64_t trials, std::uint64_t master_seed) {
    TypicalSetIndex index_c = build_typical_index(cfg.source_c.pmf, cfg.n, cfg.eps_source);
    TypicalSetIndex index_p = build_typical_index(cfg.source_p.pmf, cfg.n, cfg.eps_source);
    const std::uint64_t nc = index_c.count();

    const std::size_t p_alpha = cfg.source_p.pmf.size();
    UcParams params =
        cfg.ucc_identity
            ? UcParams{cfg.n,
                       std::log2(static_cast<double>(p_alpha)),
                       pow_u64(p_alpha, cfg.n), 0}
            : make_uc_params(cfg.n, cfg.ucc_rate, cfg.ucc_seed_len);
    // binning code unused in identity mode but keeps one code path below
    BinningCode pub_code = rb_build(cfg.source_p.pmf,
                                    cfg.ucc_identity ? make_uc_params(cfg.n, 0.01, 0) : params,
                                    cfg.eps_source, mix64(cfg.codebook_seed ^ 0x9bULL));
    const std::uint64_t np = params.message_count;

    Pmf p_q({1.0});
    std::vector<Pmf> p_xq = {cfg.input_dist};
    WiretapCodebook cb =
        build_codebook_counts(p_q, p_xq, cfg.n, 1, nc, np, cfg.codebook_seed);
    BobDecoder bob(cb, p_q, p_xq, cfg.channel, cfg.eps_decoder);

    const std::size_t chunks = 8;
    std::vector<TrialTally> tally(chunks);
    parallel_for_chunks(chunks, [&](std::size_t c) {
        std::uint64_t lo = trials * c / chunks;
        std::uint64_t hi = trials * (c + 1) / chunks;
        SplitMix64 gen = derive_stream(master_seed, "mux-b-" + std::to_string(c));
        for (std::uint64_t t = lo; t < hi; ++t) {
            Sequence vc = sample_sequence(cfg.source_c.pmf, cfg.n, gen);
            Sequence vp = sample_sequence(cfg.source_p.pmf, cfg.n, gen);
            MessageId mc = ts_encode_deterministic(vc, index_c);
            std::uint64_t u = params.seed_len > 0 ? gen.next_below(1ULL << params.seed_len) : 0;
            tally[c].seed_bits += params.seed_len;
            MessageId mp = cfg.ucc_identity
                               ? sequence_rank(vp, cfg.source_p.pmf.size()) + 1
                               : pub_code.encode(vp, u);
            Sequence x = cb.x_word(1, mc, mp);
            Sequence y(cfg.n);
            for (unsigned pos = 0; pos < cfg.n; ++pos)
                y[pos] = cfg.channel.sample(x[pos], gen).first;
            BobResult dec = bob.decode(y);
            std::uint64_t jh = dec.status == DecodeStatus::ok ? dec.j : 1;
            std::uint64_t sh = dec.status == DecodeStatus::ok ? dec.s : 1;
            Sequence vch = ts_decode(jh, index_c);
            Sequence vph;
            if (cfg.ucc_identity) {
                vph = sequence_from_rank(sh - 1, cfg.source_p.pmf.size(), cfg.n);
            } else {
                // shared seed u enters the public decoder
                RbDecodeResult pdec = rb_decode(sh, u, pub_code, index_p);
                vph = pdec.status == DecodeStatus::ok ? pdec.sequence
                                                      : ts_decode(1, index_p);
            }
            if (vch != vc || vph != vp) ++tally[c].errors;
        }
    });

    Pmf p_mp = cfg.ucc_identity ? iid_sequence_pmf(cfg.source_p.pmf, cfg.n)
                                : rb_exact_output_pmf(pub_code);
    Pmf p_mc = ts_output_pmf_deterministic(index_c, cfg.source_c.pmf);
    Pmf uniform_np = Pmf::uniform(np);

    MuxReport r;
    r.arch = "B";
    r.n = cfg.n;
    r.r0 = cb.r0;
    r.rc = cb.rc;
    r.rp = cb.rp;
    std::uint64_t errors = 0;
    for (const auto& t : tally) {
        errors += t.errors;
        r.seed_bits += t.seed_bits;
    }
    r.pe = static_cast<double>(errors) / static_cast<double>(trials);
    r.trials = trials;
    try {
        r.leakage = leakage_exact(cb, cfg.channel, p_mp, p_mc);
        r.leakage_uniform = leakage_exact(cb, cfg.channel, uniform_np, p_mc);
        r.leakage_mode = "exact";
    } catch (const std::length_error&) {
        r.leakage = leakage_mc(cb, cfg.channel, p_mp, p_mc, trials, master_seed);
        r.leakage_uniform =
            leakage_mc(cb, cfg.channel, uniform_np, p_mc, trials, master_seed + 1);
        r.leakage_mode = "mc";
    }
    r.ue_public = variational_distance(p_mp, uniform_np);
    r.v_public_uniform = r.ue_public;
    r.budget_ok = r.leakage <= r.leakage_uniform + r.v_public_uniform + kStrictMargin;
    r.budget_strict_ok =
        r.leakage <= r.leakage_uniform + 2.0 * r.v_public_uniform + kStrictMargin;
    r.h2_public_per_n = renyi2_entropy(p_mp) / cfg.n;
    r.i_xz = mutual_informations(cfg.input_dist, cfg.channel).second;
    r.master_seed = master_seed;
    return r;
}

std::string mux_report_json(const MuxReport& r) {
    nlohmann::ordered_json j;
    j["arch"] = r.arch;
    j["n"] = r.n;
    j["rates"] = {{"r0", r.r0}, {"rc", r.rc}, {"rp", r.rp}};
    j["pe"] = r.pe;
    j["trials"] = r.trials;
    j["leakage"] = r.leakage;
    j["leakage_mode"] = r.leakage_mode;
    j["ue_public"] = r.ue_public;
    j["h2_public_per_n"] = r.h2_public_per_n;
    j["i_xz"] = r.i_xz;
    j["seed_bits"] = r.seed_bits;
    j["master_seed"] = r.master_seed;
    if (r.arch == "B") {
        j["budget"] = {{"leakage_uniform", r.leakage_uniform},
                       {"v_public_uniform", r.v_public_uniform},
                       {"budget_ok", r.budget_ok},
                       {"budget_strict_ok", r.budget_strict_ok}};
    }
    return j.dump();
}

}  // namespace secrecy
