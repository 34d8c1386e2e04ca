#pragma once

#include <cstddef>
#include <vector>

namespace secrecy {

// Tolerance for pmf normalization. Constructors renormalize when the drift
// from 1 is below this, and reject otherwise.
inline constexpr double kPmfTolerance = 1e-12;

// Probability mass function over a finite alphabet {0, ..., size-1}.
// Immutable after construction.
class Pmf {
public:
    explicit Pmf(std::vector<double> probs);

    static Pmf uniform(std::size_t size);
    static Pmf point_mass(std::size_t size, std::size_t atom);
    static Pmf bernoulli(double p1);  // P(1) = p1 over {0, 1}

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    const std::vector<double>& probs() const { return probs_; }

    double max_prob() const;
    std::size_t support_size() const;
    // smallest nonzero probability
    double min_supported_prob() const;

private:
    std::vector<double> probs_;
};

// Dense joint pmf over a product of finite alphabets, row-major with the
// last axis fastest.
class JointPmf {
public:
    JointPmf(std::vector<std::size_t> dims, std::vector<double> probs);

    const std::vector<std::size_t>& dims() const { return dims_; }
    const std::vector<double>& probs() const { return probs_; }
    double at(const std::vector<std::size_t>& idx) const;

    Pmf marginal(std::size_t axis) const;
    // collapse to a Pmf over the product alphabet (same memory order)
    Pmf flatten() const;

private:
    std::vector<std::size_t> dims_;
    std::vector<double> probs_;
};

}  // namespace secrecy
