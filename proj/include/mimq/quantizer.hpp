#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mimq/pmf.hpp"
#include "mimq/simd_log.hpp"

namespace mimq {

enum class Ordering { plain, sign_major };

// Boundary values of a sequential deterministic quantizer: gammas[k] is the
// last alphabet value of group k, strictly decreasing under the declared order.
struct ThresholdSet {
    std::vector<long long> gammas;
    Ordering ordering = Ordering::plain;

    void validate() const {
        for (std::size_t k = 0; k + 1 < gammas.size(); ++k) {
            const bool ok = ordering == Ordering::plain
                                ? gammas[k] > gammas[k + 1]
                                : succ_greater(gammas[k], gammas[k + 1]);
            if (!ok) throw std::invalid_argument("ThresholdSet: not strictly decreasing");
        }
    }

    // Group index of x: 0 if x >= gamma_1, |gammas| if x below the last one.
    int quantize(long long x) const {
        const auto geq = [&](long long a, long long b) {
            return ordering == Ordering::plain ? a >= b : succ_geq(a, b);
        };
        int k = 0;
        while (k < static_cast<int>(gammas.size()) && !geq(x, gammas[k])) ++k;
        return k;
    }
};

struct SdqResult {
    // last_of_group[k] is the index of the final symbol in group k, for the
    // first (groups-1) groups; the last group ends at the alphabet end.
    std::vector<std::size_t> last_of_group;
    ConditionalPmf quantized;
    double mi = 0.0;
};

namespace detail {

struct SdqTable {
    const std::vector<double>* c0;
    const std::vector<double>* c1;

    // Partial mutual information of one group spanning symbols [i, j) under a
    // uniform prior on X.
    double group_mi(std::size_t i, std::size_t j) const {
        const double a0 = (*c0)[j] - (*c0)[i];
        const double a1 = (*c1)[j] - (*c1)[i];
        double v = 0.0;
        if (a0 > 0.0) v += 0.5 * a0 * std::log2(2.0 * a0 / std::max(a0 + a1, kLogGuard));
        if (a1 > 0.0) v += 0.5 * a1 * std::log2(2.0 * a1 / std::max(a0 + a1, kLogGuard));
        return v;
    }
};

// Leftmost maximizer of prev[i] + group_mi(i, j) over i in [ilo, ihi].
inline std::pair<double, std::size_t> sdq_argmax(const SdqTable& t,
                                                 const std::vector<double>& prev, std::size_t j,
                                                 std::size_t ilo, std::size_t ihi) {
    double b = -std::numeric_limits<double>::infinity();
    std::size_t arg = ilo;
#if MIMQ_HAVE_AVX512
    if (ihi - ilo >= 16) {
        const double cj0 = (*t.c0)[j], cj1 = (*t.c1)[j];
        const __m512d vcj0 = _mm512_set1_pd(cj0), vcj1 = _mm512_set1_pd(cj1);
        const __m512d vhalf = _mm512_set1_pd(0.5);
        __m512d vbest = _mm512_set1_pd(-std::numeric_limits<double>::infinity());
        __m512i varg = _mm512_setzero_si512();
        __m512i vi = _mm512_add_epi64(_mm512_set_epi64(7, 6, 5, 4, 3, 2, 1, 0),
                                      _mm512_set1_epi64(static_cast<long long>(ilo)));
        const __m512i vstep = _mm512_set1_epi64(8);
        std::size_t i = ilo;
        for (; i + 8 <= ihi + 1; i += 8) {
            const __m512d a0 = _mm512_sub_pd(vcj0, _mm512_loadu_pd(t.c0->data() + i));
            const __m512d a1 = _mm512_sub_pd(vcj1, _mm512_loadu_pd(t.c1->data() + i));
            const __m512d s = _mm512_add_pd(a0, a1);
            __m512d w = _mm512_add_pd(detail::v_xlog2x(a0), detail::v_xlog2x(a1));
            w = _mm512_sub_pd(w, detail::v_xlog2x(s));
            w = _mm512_fmadd_pd(_mm512_add_pd(w, s), vhalf, _mm512_loadu_pd(prev.data() + i));
            const __mmask8 better = _mm512_cmp_pd_mask(w, vbest, _CMP_GT_OQ);
            vbest = _mm512_mask_mov_pd(vbest, better, w);
            varg = _mm512_mask_mov_epi64(varg, better, vi);
            vi = _mm512_add_epi64(vi, vstep);
        }
        alignas(64) double lane_best[8];
        alignas(64) long long lane_arg[8];
        _mm512_store_pd(lane_best, vbest);
        _mm512_store_si512(reinterpret_cast<__m512i*>(lane_arg), varg);
        for (int k = 0; k < 8; ++k) {
            if (lane_best[k] > b || (lane_best[k] == b && static_cast<std::size_t>(lane_arg[k]) < arg)) {
                b = lane_best[k];
                arg = static_cast<std::size_t>(lane_arg[k]);
            }
        }
        for (; i <= ihi; ++i) {
            const double v = prev[i] + t.group_mi(i, j);
            if (v > b) {
                b = v;
                arg = i;
            }
        }
        return {b, arg};
    }
#endif
    for (std::size_t i = ilo; i <= ihi; ++i) {
        const double v = prev[i] + t.group_mi(i, j);
        if (v > b) {
            b = v;
            arg = i;
        }
    }
    return {b, arg};
}

// Divide-and-conquer fill of one DP layer, valid when the leftmost maximizer
// is monotone in j.  That holds when the alphabet is sorted by descending
// LLR (the group cost then satisfies the concave quadrangle inequality); it
// does NOT hold for arbitrary symbol orders.
inline void sdq_fill_dnc(const SdqTable& t, const std::vector<double>& prev,
                         std::vector<double>& best, std::vector<std::size_t>& parent,
                         std::size_t jlo, std::size_t jhi, std::size_t ilo, std::size_t ihi) {
    if (jlo > jhi) return;
    const std::size_t j = jlo + (jhi - jlo) / 2;
    const auto [b, arg] = sdq_argmax(t, prev, j, ilo, std::min(ihi, j - 1));
    best[j] = b;
    parent[j] = arg;
    if (j > jlo) sdq_fill_dnc(t, prev, best, parent, jlo, j - 1, ilo, arg);
    if (j < jhi) sdq_fill_dnc(t, prev, best, parent, j + 1, jhi, arg, ihi);
}

// Exhaustive fill of one DP layer; exact for any symbol order.  Candidate
// blocks are skipped via the subadditivity bound
//   prev[i] + w(i,j) <= dp_g[k] + w(k,j)   for every i < k <= j-1,
// (splitting a group never lowers total mutual information), with dp_g[k]
// already final for k < j in the ascending sweep.
inline void sdq_fill_plain(const SdqTable& t, const std::vector<double>& prev,
                           std::vector<double>& best, std::vector<std::size_t>& parent,
                           std::size_t jlo, std::size_t jhi, std::size_t ilo) {
    constexpr std::size_t kBlock = 64;
    for (std::size_t j = jlo; j <= jhi; ++j) {
        const std::size_t ihi = j - 1;
        double b = -std::numeric_limits<double>::infinity();
        std::size_t arg = ilo;
        const auto scan = [&](std::size_t lo, std::size_t hi) {
            const auto [sb, sa] = sdq_argmax(t, prev, j, lo, hi);
            if (sb > b || (sb == b && sa < arg)) {
                b = sb;
                arg = sa;
            }
        };
        const std::size_t last_lo = ihi - std::min(ihi - ilo, kBlock - 1);
        scan(last_lo, ihi);
        if (j > jlo && parent[j - 1] + kBlock <= last_lo) {
            const std::size_t hint = parent[j - 1];
            scan(hint, std::min(hint + kBlock - 1, last_lo - 1));
        }
        for (std::size_t lo = ilo; lo < last_lo; lo += kBlock) {
            const std::size_t hi = std::min(lo + kBlock - 1, last_lo - 1);
            const std::size_t k = hi + 1;  // checkpoint just past the block
            if (best[k] + t.group_mi(k, j) <= b) continue;
            scan(lo, hi);
        }
        best[j] = b;
        parent[j] = arg;
    }
}

// True when the likelihood ratio p0/p1 is non-increasing along the alphabet,
// skipping symbols that carry no appreciable mass under either hypothesis.
inline bool llr_sorted(const ConditionalPmf& pmf, double mass_floor = 1e-30) {
    double q0 = 0.0, q1 = 0.0;
    bool have_prev = false;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        const double a0 = pmf.p0[k], a1 = pmf.p1[k];
        if (a0 + a1 < mass_floor) continue;
        if (have_prev && q0 * a1 < a0 * q1) return false;
        q0 = a0;
        q1 = a1;
        have_prev = true;
    }
    return true;
}

}  // namespace detail

// Optimal 2^out_bits-level SDQ of a pmf over an alphabet already sorted in
// its canonical (LLR-descending) order.  All groups are contiguous and
// non-empty; among mutual-information ties on symmetric inputs the
// lexicographically smaller boundary vector is returned.
inline SdqResult optimal_sdq(const ConditionalPmf& pmf, int out_bits) {
    const std::size_t n = pmf.size();
    const std::size_t groups = std::size_t{1} << out_bits;
    if (n < groups) throw std::invalid_argument("optimal_sdq: alphabet too small");

    std::vector<double> c0(n + 1, 0.0), c1(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        c0[k + 1] = c0[k] + pmf.p0[k];
        c1[k + 1] = c1[k] + pmf.p1[k];
    }
    const detail::SdqTable table{&c0, &c1};
    const bool fast = detail::llr_sorted(pmf);

    // dp[g][j]: best total over the first j symbols split into g groups.
    std::vector<std::vector<double>> dp(groups + 1);
    std::vector<std::vector<std::size_t>> par(groups + 1);
    dp[1].assign(n + 1, -std::numeric_limits<double>::infinity());
    for (std::size_t j = 1; j <= n - (groups - 1); ++j) dp[1][j] = table.group_mi(0, j);
    for (std::size_t g = 2; g <= groups; ++g) {
        dp[g].assign(n + 1, -std::numeric_limits<double>::infinity());
        par[g].assign(n + 1, 0);
        const std::size_t jlo = g, jhi = n - (groups - g);
        if (fast)
            detail::sdq_fill_dnc(table, dp[g - 1], dp[g], par[g], jlo, jhi, g - 1, jhi - 1);
        else
            detail::sdq_fill_plain(table, dp[g - 1], dp[g], par[g], jlo, jhi, g - 1);
    }

    std::vector<std::size_t> ends(groups);  // exclusive end of each group
    ends[groups - 1] = n;
    for (std::size_t g = groups - 1; g >= 1; --g) ends[g - 1] = par[g + 1][ends[g]];

    const auto eval = [&](const std::vector<std::size_t>& e) {
        double v = 0.0;
        std::size_t prev = 0;
        for (std::size_t g = 0; g < groups; ++g) {
            v += table.group_mi(prev, e[g]);
            prev = e[g];
        }
        return v;
    };

    // A symmetric pmf admits an exactly mirror-equivalent optimum; pick the
    // lexicographically smaller boundary vector of the pair so designs are
    // reproducible across runs and platforms.
    if (pmf.symmetric(1e-12)) {
        std::vector<std::size_t> mir(groups);
        mir[groups - 1] = n;
        for (std::size_t g = 0; g + 1 < groups; ++g) mir[g] = n - ends[groups - 2 - g];
        if (mir < ends && eval(mir) >= eval(ends) - 1e-12) ends = mir;
    }

    SdqResult out;
    out.last_of_group.assign(ends.begin(), ends.end() - 1);
    for (auto& e : out.last_of_group) e -= 1;
    out.quantized.p0.resize(groups);
    out.quantized.p1.resize(groups);
    std::size_t prev = 0;
    for (std::size_t g = 0; g < groups; ++g) {
        out.quantized.p0[g] = c0[ends[g]] - c0[prev];
        out.quantized.p1[g] = c1[ends[g]] - c1[prev];
        prev = ends[g];
    }
    out.mi = eval(ends);
    return out;
}

}  // namespace mimq
