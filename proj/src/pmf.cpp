#include "secrecy/pmf.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace secrecy {

namespace {

void check_and_renormalize(std::vector<double>& probs) {
    if (probs.empty()) throw std::invalid_argument("pmf must not be empty");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw std::invalid_argument("pmf entries must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kPmfTolerance)
        throw std::invalid_argument("pmf does not sum to 1");
    // drift within a few ulps counts as normalized, which keeps
    // renormalization idempotent (important for bit-exact cache roundtrips)
    if (std::abs(sum - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) {
        for (double& p : probs) p /= sum;
    }
}

}  // namespace

Pmf::Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
    check_and_renormalize(probs_);
}

Pmf Pmf::uniform(std::size_t size) {
    if (size == 0) throw std::invalid_argument("alphabet size must be positive");
    return Pmf(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

Pmf Pmf::point_mass(std::size_t size, std::size_t atom) {
    if (atom >= size) throw std::invalid_argument("atom outside alphabet");
    std::vector<double> p(size, 0.0);
    p[atom] = 1.0;
    return Pmf(std::move(p));
}

Pmf Pmf::bernoulli(double p1) {
    return Pmf({1.0 - p1, p1});
}

double Pmf::max_prob() const {
    double m = 0.0;
    for (double p : probs_) m = std::max(m, p);
    return m;
}

std::size_t Pmf::support_size() const {
    std::size_t c = 0;
    for (double p : probs_) c += (p > 0.0);
    return c;
}

double Pmf::min_supported_prob() const {
    double m = 1.0;
    for (double p : probs_)
        if (p > 0.0) m = std::min(m, p);
    return m;
}

JointPmf::JointPmf(std::vector<std::size_t> dims, std::vector<double> probs)
    : dims_(std::move(dims)), probs_(std::move(probs)) {
    if (dims_.empty()) throw std::invalid_argument("joint pmf needs at least one axis");
    std::size_t total = 1;
    for (std::size_t d : dims_) {
        if (d == 0) throw std::invalid_argument("axis size must be positive");
        total *= d;
    }
    if (total != probs_.size())
        throw std::invalid_argument("joint pmf table size mismatch");
    check_and_renormalize(probs_);
}

double JointPmf::at(const std::vector<std::size_t>& idx) const {
    if (idx.size() != dims_.size()) throw std::invalid_argument("index rank mismatch");
    std::size_t flat = 0;
    for (std::size_t a = 0; a < dims_.size(); ++a) {
        if (idx[a] >= dims_[a]) throw std::out_of_range("joint pmf index");
        flat = flat * dims_[a] + idx[a];
    }
    return probs_[flat];
}

Pmf JointPmf::marginal(std::size_t axis) const {
    if (axis >= dims_.size()) throw std::invalid_argument("axis out of range");
    std::size_t inner = 1;  // stride of the axis
    for (std::size_t a = axis + 1; a < dims_.size(); ++a) inner *= dims_[a];
    std::size_t outer = probs_.size() / (inner * dims_[axis]);
    std::vector<double> out(dims_[axis], 0.0);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t v = 0; v < dims_[axis]; ++v) {
            const double* base = probs_.data() + (o * dims_[axis] + v) * inner;
            double s = 0.0;
            for (std::size_t i = 0; i < inner; ++i) s += base[i];
            out[v] += s;
        }
    return Pmf(std::move(out));
}

Pmf JointPmf::flatten() const {
    return Pmf(probs_);
}

}  // namespace secrecy
