#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimq {

// Sign convention used throughout: zero counts as positive.
inline int sgn(long long x) { return x < 0 ? -1 : 1; }
inline int sgn(double x) { return x < 0.0 ? -1 : 1; }

// Sign-major order on the integers: positive values come first, small
// magnitudes before large ones, then negative values with large magnitudes
// before small ones.  E.g. 4, 10, 30, -30, -10, -4 is sorted descending.
// Returns >0 if a precedes b (a "greater"), 0 if equal, <0 otherwise.
inline int succ_compare(long long a, long long b) {
    if (a == b) return 0;
    const int sa = sgn(a), sb = sgn(b);
    if (sa != sb) return sa > sb ? 1 : -1;
    return a < b ? 1 : -1;
}

inline bool succ_greater(long long a, long long b) { return succ_compare(a, b) > 0; }
inline bool succ_geq(long long a, long long b) { return succ_compare(a, b) >= 0; }

// A pair of conditional distributions P(symbol | X=0) and P(symbol | X=1)
// over a finite alphabet whose canonical order is index order.
struct ConditionalPmf {
    std::vector<double> p0;
    std::vector<double> p1;

    ConditionalPmf() = default;
    ConditionalPmf(std::vector<double> a, std::vector<double> b)
        : p0(std::move(a)), p1(std::move(b)) {
        if (p0.size() != p1.size())
            throw std::invalid_argument("ConditionalPmf: conditionals differ in size");
    }

    std::size_t size() const { return p0.size(); }

    void validate(double tol = 1e-12) const {
        double s0 = 0.0, s1 = 0.0;
        for (std::size_t k = 0; k < p0.size(); ++k) {
            if (p0[k] < 0.0 || p1[k] < 0.0)
                throw std::invalid_argument("ConditionalPmf: negative mass at index " +
                                            std::to_string(k));
            s0 += p0[k];
            s1 += p1[k];
        }
        if (std::abs(s0 - 1.0) > tol || std::abs(s1 - 1.0) > tol)
            throw std::invalid_argument("ConditionalPmf: conditionals do not sum to 1");
    }

    // Mirror symmetry p0[k] == p1[size-1-k], the fingerprint of a symmetric
    // channel under the canonical LLR-descending order.
    bool symmetric(double tol = 1e-9) const {
        const std::size_t n = size();
        for (std::size_t k = 0; k < n; ++k)
            if (std::abs(p0[k] - p1[n - 1 - k]) > tol) return false;
        return true;
    }
};

namespace detail {
constexpr double kLogGuard = 1e-300;
inline double log2_guarded(double x) { return std::log2(x < kLogGuard ? kLogGuard : x); }
}  // namespace detail

// I(X;Z) in bits for the channel X -> Z described by `pmf`, with
// P(X=0) = prior.  Zero-probability outputs contribute nothing.
inline double mutual_information(const ConditionalPmf& pmf, double prior = 0.5) {
    const double q0 = prior, q1 = 1.0 - prior;
    double mi = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        const double m = q0 * pmf.p0[k] + q1 * pmf.p1[k];
        if (pmf.p0[k] > 0.0) mi += q0 * pmf.p0[k] * std::log2(pmf.p0[k] / m);
        if (pmf.p1[k] > 0.0) mi += q1 * pmf.p1[k] * std::log2(pmf.p1[k] / m);
    }
    return mi;
}

// Distinct signed integers kept in sign-major descending order.
struct SignedAlphabet {
    std::vector<long long> values;

    void validate() const {
        for (std::size_t k = 0; k + 1 < values.size(); ++k)
            if (!succ_greater(values[k], values[k + 1]))
                throw std::invalid_argument("SignedAlphabet: not strictly sign-major decreasing");
    }
};

}  // namespace mimq
