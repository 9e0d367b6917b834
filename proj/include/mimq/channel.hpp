#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mimq/pmf.hpp"
#include "mimq/quantizer.hpp"

namespace mimq {

// Quantized view of the BPSK-AWGN channel at the design noise level: the
// 2^qm-level output pmf plus the LLR-domain decision boundaries.
struct Dmc {
    ConditionalPmf pmf;
    std::vector<double> llr_thresholds;  // strictly decreasing, length 2^qm - 1
    double sigma = 0.0;

    void validate() const {
        pmf.validate();
        for (std::size_t k = 0; k + 1 < llr_thresholds.size(); ++k)
            if (!(llr_thresholds[k] > llr_thresholds[k + 1]))
                throw std::invalid_argument("Dmc: llr thresholds not strictly decreasing");
        if (!pmf.symmetric(1e-9))
            throw std::invalid_argument("Dmc: pmf not symmetric");
    }
};

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

// Inverse standard normal CDF: Acklam's rational approximation polished with
// one Halley step, good to ~1e-15 over (0,1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p outside (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= phigh) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

namespace detail {
// Bin edges for the fine channel discretization: the (1/bins) quantiles of
// the received value under X=0, mirrored about zero so the grid (and hence
// the resulting pmf) is exactly symmetric.
inline std::vector<double> awgn_grid_edges(double sigma, std::size_t bins) {
    std::vector<double> edges;
    edges.reserve(2 * bins);
    for (std::size_t i = 1; i < bins; ++i)
        edges.push_back(1.0 + sigma * normal_quantile(static_cast<double>(i) / bins));
    const std::size_t m = edges.size();
    edges.push_back(0.0);
    for (std::size_t i = 0; i < m; ++i) edges.push_back(-edges[i]);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double u, double v) { return std::abs(u - v) < 1e-13; }),
                edges.end());
    return edges;
}
}  // namespace detail

// Discretizes the BPSK-AWGN channel with noise level sigma into 2^qm levels
// by MIM quantization of a fine symmetric grid.  Output levels are indexed
// in LLR-descending order and the boundaries are reported in LLR units; the
// middle boundary is exactly zero.
inline Dmc quantize_awgn_channel(double sigma, int qm, std::size_t grid_bins = 2000) {
    if (!(sigma > 0.0)) throw std::invalid_argument("quantize_awgn_channel: sigma must be > 0");
    if (qm < 1 || qm > 8) throw std::invalid_argument("quantize_awgn_channel: qm outside 1..8");

    const std::vector<double> edges = detail::awgn_grid_edges(sigma, grid_bins);
    const std::size_t nbins = edges.size() + 1;

    // Bin masses under X=0 (transmit +1), ascending in y; the X=1 conditional
    // is the exact mirror.
    std::vector<double> asc(nbins);
    double prev_cdf = 0.0;
    for (std::size_t k = 0; k + 1 < nbins; ++k) {
        const double c = normal_cdf((edges[k] - 1.0) / sigma);
        asc[k] = c - prev_cdf;
        prev_cdf = c;
    }
    asc[nbins - 1] = 1.0 - prev_cdf;

    ConditionalPmf fine;
    fine.p0.resize(nbins);
    fine.p1.resize(nbins);
    for (std::size_t k = 0; k < nbins; ++k) {
        fine.p0[k] = asc[nbins - 1 - k];  // canonical order: descending y
        fine.p1[k] = asc[k];
    }

    // Drop outermost bins whose mass is negligible under both hypotheses.
    std::size_t lo = 0, hi = nbins;
    while (hi - lo > 2 && fine.p0[lo] < 1e-12 && fine.p1[lo] < 1e-12) ++lo;
    while (hi - lo > 2 && fine.p0[hi - 1] < 1e-12 && fine.p1[hi - 1] < 1e-12) --hi;
    if (lo > 0 || hi < nbins) {
        fine.p0 = std::vector<double>(fine.p0.begin() + lo, fine.p0.begin() + hi);
        fine.p1 = std::vector<double>(fine.p1.begin() + lo, fine.p1.begin() + hi);
    }

    const SdqResult sdq = optimal_sdq(fine, qm);

    Dmc dmc;
    dmc.sigma = sigma;
    dmc.pmf = sdq.quantized;
    dmc.llr_thresholds.reserve(sdq.last_of_group.size());
    const double scale = 2.0 / (sigma * sigma);
    for (const std::size_t last : sdq.last_of_group) {
        // Lower y-edge of the group's final (descending-order) bin.
        const std::size_t asc_bin = (nbins - 1) - (last + lo);
        dmc.llr_thresholds.push_back(asc_bin == 0 ? -std::numeric_limits<double>::infinity()
                                                  : scale * edges[asc_bin - 1]);
    }
    return dmc;
}

}  // namespace mimq
