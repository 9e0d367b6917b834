#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mimq/channel.hpp"
#include "mimq/code.hpp"
#include "mimq/pmf.hpp"
#include "mimq/quantizer.hpp"

namespace mimq {

enum class Family { qbp, qms, lqms };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::qbp: return "QBP";
        case Family::qms: return "QMS";
        default: return "LQMS";
    }
}

inline Family family_from_name(const std::string& s) {
    if (s == "QBP" || s == "qbp") return Family::qbp;
    if (s == "QMS" || s == "qms") return Family::qms;
    if (s == "LQMS" || s == "lqms") return Family::lqms;
    throw std::invalid_argument("unknown decoder family: " + s);
}

// Integer map from a 2^qm outer alphabet into a bounded signed range.
struct ReconstructionFn {
    std::vector<long long> table;
    long long bound = 0;  // magnitude budget the table was normalized to

    long long max_abs() const {
        long long m = 0;
        for (const long long v : table) m = std::max(m, std::llabs(v));
        return m;
    }
};

// One iteration's worth of lookup tables.  phi_c / gamma_c exist only for
// the BP-style check update.
struct IterationLuts {
    std::optional<ReconstructionFn> phi_c;
    std::optional<ThresholdSet> gamma_c;  // sign-major
    ReconstructionFn phi_v;
    ReconstructionFn phi_ch;
    ThresholdSet gamma_v;  // plain
    long long gamma_e = 0;
};

struct DecoderSpec {
    Family family = Family::qms;
    int qm = 0, qc = 0, qv = 0;
    double sigma_d = 0.0;
    Dmc channel;
    std::vector<IterationLuts> iterations;
    DegreeDistribution profile;

    void validate() const {
        const std::size_t levels = std::size_t{1} << qm;
        if (qm < 1) throw std::invalid_argument("DecoderSpec: qm < 1");
        if (family != Family::qbp && qc != qm)
            throw std::invalid_argument("DecoderSpec: qc must equal qm for the MS families");
        if (channel.pmf.size() != levels || channel.llr_thresholds.size() != levels - 1)
            throw std::invalid_argument("DecoderSpec: channel tables sized wrong");
        for (const auto& it : iterations) {
            if (it.phi_c.has_value() != (family == Family::qbp) ||
                it.gamma_c.has_value() != (family == Family::qbp))
                throw std::invalid_argument("DecoderSpec: CN tables inconsistent with family");
            if (it.phi_c && (it.phi_c->table.size() != levels ||
                             it.gamma_c->gammas.size() != levels - 1))
                throw std::invalid_argument("DecoderSpec: CN table lengths wrong");
            if (it.phi_v.table.size() != levels || it.phi_ch.table.size() != levels ||
                it.gamma_v.gammas.size() != levels - 1)
                throw std::invalid_argument("DecoderSpec: VN table lengths wrong");
            if (it.gamma_c) it.gamma_c->validate();
            it.gamma_v.validate();
        }
    }
};

namespace detail {

// The degree-mixed products amplify any normalization drift exponentially
// over iterations, so every evolved pmf is rescaled back to unit mass.
inline void renormalize(ConditionalPmf& pmf) {
    double s0 = 0.0, s1 = 0.0;
    for (const double v : pmf.p0) s0 += v;
    for (const double v : pmf.p1) s1 += v;
    if (s0 > 0.0)
        for (double& v : pmf.p0) v /= s0;
    if (s1 > 0.0)
        for (double& v : pmf.p1) v /= s1;
}

// Dense pmf pair over the signed range [-maxmag, maxmag]; the two tracks are
// the conditionals given X=0 and X=1 (or given running parity, at the CN).
struct DensePair {
    long long maxmag = 0;
    std::vector<double> a;  // given 0
    std::vector<double> b;  // given 1
    std::vector<char> reach;

    explicit DensePair(long long m)
        : maxmag(m), a(2 * m + 1, 0.0), b(2 * m + 1, 0.0), reach(2 * m + 1, 0) {}
    std::size_t idx(long long v) const { return static_cast<std::size_t>(v + maxmag); }
};

inline long long floor_budget(long long bound, int divisor) { return bound / divisor; }

}  // namespace detail

// Check-node reconstruction per the unreliability rule: small magnitudes mean
// reliable messages, the budget divides 2^(qc-1)-1 by the largest CN degree.
inline ReconstructionFn build_phi_c(const ConditionalPmf& pr, int qc, int dc_max) {
    const std::size_t n = pr.size();
    const long long bound = (1LL << (qc - 1)) - 1;
    const long long cap = detail::floor_budget(bound, dc_max);
    if (cap < 1) throw std::invalid_argument("build_phi_c: budget too small for dc_max");

    // g is the conditional soft bit (p0-p1)/(p0+p1); |log|g|| accumulates
    // additively under the check-node combining rule, which is what the
    // magnitude sum approximates.
    double alpha = 0.0;
    bool any = false;
    std::vector<double> g(n);
    for (std::size_t r = 0; r < n; ++r) {
        const double mass = pr.p0[r] + pr.p1[r];
        g[r] = mass > 0.0 ? (pr.p0[r] - pr.p1[r]) / mass : 0.0;
        if (g[r] != 0.0) {
            alpha = std::max(alpha, std::abs(std::log(std::abs(g[r]))));
            any = true;
        }
    }
    if (!any) throw std::invalid_argument("build_phi_c: degenerate pmf");

    ReconstructionFn fn;
    fn.bound = bound;
    fn.table.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        if (g[r] == 0.0) {
            fn.table[r] = cap;
        } else {
            const double ratio = alpha > 0.0 ? std::abs(std::log(std::abs(g[r]))) / alpha : 0.0;
            const long long mag =
                std::max<long long>(1, static_cast<long long>(std::floor(cap * ratio + 0.5)));
            fn.table[r] = sgn(g[r]) * mag;
        }
    }
    if (static_cast<long long>(dc_max) * fn.max_abs() > bound)
        throw std::logic_error("build_phi_c: normalization violated");
    return fn;
}

// Variable-node reconstructions: magnitudes follow the conditional LLRs of
// the C2V message and the channel output, jointly normalized so that
// |phi_ch| + dv_max*|phi_v| fits the qv budget.
inline std::pair<ReconstructionFn, ReconstructionFn> build_phi_v_ch(const ConditionalPmf& ps,
                                                                    const ConditionalPmf& pl,
                                                                    int qv, int dv_max) {
    const long long bound = (1LL << (qv - 1)) - 1;
    const long long cap = detail::floor_budget(bound, dv_max + 1);
    if (cap < 1) throw std::invalid_argument("build_phi_v_ch: budget too small for dv_max");

    const auto llrs = [](const ConditionalPmf& p) {
        std::vector<double> h(p.size());
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (p.p0[k] > 0.0 && p.p1[k] > 0.0)
                h[k] = std::log(p.p0[k] / p.p1[k]);
            else if (p.p0[k] > 0.0)
                h[k] = std::numeric_limits<double>::infinity();
            else if (p.p1[k] > 0.0)
                h[k] = -std::numeric_limits<double>::infinity();
            else
                h[k] = std::numeric_limits<double>::quiet_NaN();  // unreachable symbol
        }
        return h;
    };
    const std::vector<double> hs = llrs(ps), hl = llrs(pl);

    double beta = 0.0;
    bool any = false;
    for (const double h : hs)
        if (std::isfinite(h)) {
            beta = std::max(beta, std::abs(h));
            any = true;
        }
    for (const double h : hl)
        if (std::isfinite(h)) {
            beta = std::max(beta, std::abs(h));
            any = true;
        }
    if (!any) throw std::invalid_argument("build_phi_v_ch: degenerate pmfs");

    const auto build = [&](const std::vector<double>& h) {
        ReconstructionFn fn;
        fn.bound = bound;
        fn.table.resize(h.size());
        for (std::size_t k = 0; k < h.size(); ++k) {
            if (std::isnan(h[k])) {
                // Zero-probability symbol: pin to the extreme of its half.
                fn.table[k] = k < h.size() / 2 ? cap : -cap;
            } else if (std::isinf(h[k])) {
                fn.table[k] = h[k] > 0 ? cap : -cap;
            } else {
                const double ratio = beta > 0.0 ? std::abs(h[k]) / beta : 0.0;
                fn.table[k] = sgn(h[k]) * static_cast<long long>(std::floor(cap * ratio + 0.5));
            }
        }
        return fn;
    };
    ReconstructionFn phi_v = build(hs), phi_ch = build(hl);
    if (phi_ch.max_abs() + static_cast<long long>(dv_max) * phi_v.max_abs() > bound)
        throw std::logic_error("build_phi_v_ch: normalization violated");
    return {std::move(phi_v), std::move(phi_ch)};
}

struct CnBpEvolution {
    SignedAlphabet alphabet;
    ConditionalPmf inner;      // P(A | X)
    ThresholdSet gamma_c;      // sign-major
    ConditionalPmf quantized;  // P(S | X)
};

// Check-node density evolution for the BP-style update.  The running
// statistic is (sign product) x (magnitude sum); the checksum constraint is
// carried by evolving the statistic jointly with the running parity, one
// edge at a time.
inline CnBpEvolution cn_evolve_bp(const ConditionalPmf& pr, const ReconstructionFn& phi_c,
                                  const DegreeDistribution& dd, int qm) {
    const std::size_t n = pr.size();
    if (phi_c.table.size() != n) throw std::invalid_argument("cn_evolve_bp: table size mismatch");
    const int dc_max = dd.dc_max();
    const long long maxmag = static_cast<long long>(dc_max - 1) * phi_c.max_abs();
    if (maxmag > phi_c.bound) throw std::logic_error("cn_evolve_bp: magnitude budget exceeded");

    detail::DensePair now(maxmag);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t i = now.idx(phi_c.table[r]);
        now.a[i] += pr.p0[r];
        now.b[i] += pr.p1[r];
        now.reach[i] = 1;
    }

    detail::DensePair mixed(maxmag);
    double rho_used = 0.0;
    const auto harvest = [&](int degree) {
        const auto it = dd.rho.find(degree);
        if (it == dd.rho.end()) return;
        rho_used += it->second;
        for (std::size_t k = 0; k < now.a.size(); ++k) {
            mixed.a[k] += it->second * now.a[k];
            mixed.b[k] += it->second * now.b[k];
            if (now.reach[k]) mixed.reach[k] = 1;
        }
    };
    harvest(2);  // degree-2 CN forwards the single incoming message

    for (int edges = 2; edges < dc_max; ++edges) {
        detail::DensePair next(maxmag);
        for (long long v = -maxmag; v <= maxmag; ++v) {
            const std::size_t i = now.idx(v);
            if (!now.reach[i]) continue;
            const double e0 = now.a[i], e1 = now.b[i];
            for (std::size_t r = 0; r < n; ++r) {
                const long long f = phi_c.table[r];
                const long long c = sgn(v) * sgn(f) * (std::llabs(v) + std::llabs(f));
                const std::size_t j = next.idx(c);
                next.reach[j] = 1;
                // parity folds: even = even*even + odd*odd, odd = mixed terms
                next.a[j] += 0.5 * (e0 * pr.p0[r] + e1 * pr.p1[r]);
                next.b[j] += 0.5 * (e0 * pr.p1[r] + e1 * pr.p0[r]);
            }
        }
        now = std::move(next);
        harvest(edges + 1);
    }
    if (std::abs(rho_used - 1.0) > 1e-9)
        throw std::invalid_argument("cn_evolve_bp: rho fractions incomplete");

    CnBpEvolution out;
    const auto push = [&](long long v) {
        const std::size_t i = mixed.idx(v);
        if (!mixed.reach[i]) return;
        out.alphabet.values.push_back(v);
        out.inner.p0.push_back(mixed.a[i]);
        out.inner.p1.push_back(mixed.b[i]);
    };
    for (long long v = 1; v <= maxmag; ++v) push(v);
    for (long long v = -maxmag; v <= -1; ++v) push(v);
    out.alphabet.validate();
    detail::renormalize(out.inner);

    const SdqResult sdq = optimal_sdq(out.inner, qm);
    out.gamma_c.ordering = Ordering::sign_major;
    for (const std::size_t last : sdq.last_of_group)
        out.gamma_c.gammas.push_back(out.alphabet.values[last]);
    out.gamma_c.validate();
    out.quantized = sdq.quantized;
    return out;
}

// Outer-to-f-domain map for the min-sum check update; fixed by qm alone.
inline long long ms_f(int symbol, int qm) {
    const long long half = 1LL << (qm - 1);
    return symbol < half ? half - symbol : half - 1 - symbol;
}

inline int ms_f_inv(long long f, int qm) {
    const long long half = 1LL << (qm - 1);
    return static_cast<int>(f > 0 ? half - f : half - 1 - f);
}

// Check-node density evolution for the min-sum update: sign product times
// minimum magnitude over the f-mapped messages, evolved edge by edge with
// the same parity bookkeeping as the BP variant.  Outer alphabet size is
// preserved, so no quantizer is needed.
inline ConditionalPmf cn_evolve_ms(const ConditionalPmf& pr, const DegreeDistribution& dd, int qm) {
    const std::size_t n = pr.size();
    if (n != std::size_t{1} << qm) throw std::invalid_argument("cn_evolve_ms: pmf size != 2^qm");
    const long long half = 1LL << (qm - 1);

    detail::DensePair now(half);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t i = now.idx(ms_f(static_cast<int>(r), qm));
        now.a[i] += pr.p0[r];
        now.b[i] += pr.p1[r];
        now.reach[i] = 1;
    }

    detail::DensePair mixed(half);
    double rho_used = 0.0;
    const auto harvest = [&](int degree) {
        const auto it = dd.rho.find(degree);
        if (it == dd.rho.end()) return;
        rho_used += it->second;
        for (std::size_t k = 0; k < now.a.size(); ++k) {
            mixed.a[k] += it->second * now.a[k];
            mixed.b[k] += it->second * now.b[k];
        }
    };
    harvest(2);
    for (int edges = 2; edges < dd.dc_max(); ++edges) {
        detail::DensePair next(half);
        for (long long v = -half; v <= half; ++v) {
            if (v == 0) continue;
            const std::size_t i = now.idx(v);
            const double e0 = now.a[i], e1 = now.b[i];
            if (e0 == 0.0 && e1 == 0.0) continue;
            for (std::size_t r = 0; r < n; ++r) {
                const long long f = ms_f(static_cast<int>(r), qm);
                const long long c = sgn(v) * sgn(f) * std::min(std::llabs(v), std::llabs(f));
                const std::size_t j = next.idx(c);
                next.a[j] += 0.5 * (e0 * pr.p0[r] + e1 * pr.p1[r]);
                next.b[j] += 0.5 * (e0 * pr.p1[r] + e1 * pr.p0[r]);
            }
        }
        now = std::move(next);
        harvest(edges + 1);
    }
    if (std::abs(rho_used - 1.0) > 1e-9)
        throw std::invalid_argument("cn_evolve_ms: rho fractions incomplete");

    ConditionalPmf out;
    out.p0.resize(n);
    out.p1.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t i = mixed.idx(ms_f(static_cast<int>(s), qm));
        out.p0[s] = mixed.a[i];
        out.p1[s] = mixed.b[i];
    }
    detail::renormalize(out);
    return out;
}

enum class VnMode { message, decision };

struct VnEvolution {
    ConditionalPmf inner;              // P(B | X) over the listed values
    std::vector<long long> values;     // descending
    ThresholdSet gamma;                // 2^qm-1 thresholds (message mode)
    long long gamma_e = 0;             // single threshold (decision mode)
    ConditionalPmf quantized;          // P(R | X), message mode
    double error_prob = 0.0;           // decision mode
};

// Variable-node density evolution: convolve the channel reconstruction with
// j-1 (message) or j (decision) copies of the C2V reconstruction, mixed over
// the degree distribution, then quantize.
inline VnEvolution vn_evolve(const ConditionalPmf& ps, const ConditionalPmf& pl,
                             const ReconstructionFn& phi_v, const ReconstructionFn& phi_ch,
                             const DegreeDistribution& dd, int qm, VnMode mode) {
    const std::size_t ns = ps.size(), nl = pl.size();
    if (phi_v.table.size() != ns || phi_ch.table.size() != nl)
        throw std::invalid_argument("vn_evolve: table size mismatch");
    const int dv_max = dd.dv_max();
    const int copies_max = mode == VnMode::message ? dv_max - 1 : dv_max;
    const long long maxmag =
        phi_ch.max_abs() + static_cast<long long>(std::max(copies_max, 0)) * phi_v.max_abs();
    if (phi_ch.max_abs() + static_cast<long long>(dv_max) * phi_v.max_abs() > phi_v.bound)
        throw std::logic_error("vn_evolve: magnitude budget exceeded");

    detail::DensePair now(maxmag);
    for (std::size_t l = 0; l < nl; ++l) {
        const std::size_t i = now.idx(phi_ch.table[l]);
        now.a[i] += pl.p0[l];
        now.b[i] += pl.p1[l];
        now.reach[i] = 1;
    }

    detail::DensePair mixed(maxmag);
    double theta_used = 0.0;
    const auto harvest = [&](int copies) {
        const int degree = mode == VnMode::message ? copies + 1 : copies;
        const auto it = dd.theta.find(degree);
        if (it == dd.theta.end()) return;
        theta_used += it->second;
        for (std::size_t k = 0; k < now.a.size(); ++k) {
            mixed.a[k] += it->second * now.a[k];
            mixed.b[k] += it->second * now.b[k];
            if (now.reach[k]) mixed.reach[k] = 1;
        }
    };
    harvest(0);
    for (int copies = 1; copies <= copies_max; ++copies) {
        detail::DensePair next(maxmag);
        for (long long v = -maxmag; v <= maxmag; ++v) {
            const std::size_t i = now.idx(v);
            if (!now.reach[i]) continue;
            const double e0 = now.a[i], e1 = now.b[i];
            for (std::size_t s = 0; s < ns; ++s) {
                const long long c = v + phi_v.table[s];
                const std::size_t j = next.idx(c);
                next.reach[j] = 1;
                next.a[j] += e0 * ps.p0[s];
                next.b[j] += e1 * ps.p1[s];
            }
        }
        now = std::move(next);
        harvest(copies);
    }
    if (std::abs(theta_used - 1.0) > 1e-9)
        throw std::invalid_argument("vn_evolve: theta fractions incomplete");

    VnEvolution out;
    for (long long v = maxmag; v >= -maxmag; --v) {
        const std::size_t i = mixed.idx(v);
        if (!mixed.reach[i]) continue;
        out.values.push_back(v);
        out.inner.p0.push_back(mixed.a[i]);
        out.inner.p1.push_back(mixed.b[i]);
    }
    detail::renormalize(out.inner);

    if (mode == VnMode::message) {
        const SdqResult sdq = optimal_sdq(out.inner, qm);
        out.gamma.ordering = Ordering::plain;
        for (const std::size_t last : sdq.last_of_group)
            out.gamma.gammas.push_back(out.values[last]);
        out.gamma.validate();
        out.quantized = sdq.quantized;
    } else {
        const SdqResult sdq = optimal_sdq(out.inner, 1);
        out.gamma_e = out.values[sdq.last_of_group[0]];
        // P(decide 1 | X=0) and P(decide 0 | X=1), uniform prior.
        double p01 = 0.0, p10 = 0.0;
        for (std::size_t k = 0; k < out.values.size(); ++k) {
            if (out.values[k] >= out.gamma_e)
                p10 += out.inner.p1[k];
            else
                p01 += out.inner.p0[k];
        }
        out.error_prob = 0.5 * (p01 + p10);
    }
    return out;
}

struct DesignReport {
    DecoderSpec spec;
    std::vector<double> mi;    // I(X; R) after each iteration
    std::vector<double> perr;  // hard-decision error probability per iteration
};

struct DesignOptions {
    // Stop evolving once the hard-decision error probability drops below this
    // value; remaining iterations reuse the final tables' statistics.  Only
    // used by the threshold search, never when emitting a decoder spec.
    double stop_below = 0.0;
};

// Steps of the flooding design flow: evolve P(R|X) through the CN and VN
// updates once per iteration, recording the per-iteration tables.
inline DesignReport design_flooding(const DegreeDistribution& dd, double sigma_d, int qm, int qc,
                                    int qv, int i_max, Family family,
                                    const DesignOptions& opt = {}) {
    if (family == Family::lqms)
        throw std::invalid_argument("design_flooding: layered family handled separately");
    if (qc < qm || qv < qm) throw std::invalid_argument("design_flooding: qc and qv must be >= qm");
    if (i_max < 1) throw std::invalid_argument("design_flooding: i_max must be >= 1");
    dd.validate();

    DesignReport report;
    DecoderSpec& spec = report.spec;
    spec.family = family;
    spec.qm = qm;
    spec.qc = family == Family::qbp ? qc : qm;
    spec.qv = qv;
    spec.sigma_d = sigma_d;
    spec.profile = dd;
    spec.channel = quantize_awgn_channel(sigma_d, qm);

    const ConditionalPmf& pl = spec.channel.pmf;
    ConditionalPmf pr = pl;
    for (int t = 1; t <= i_max; ++t) {
        IterationLuts luts;
        ConditionalPmf psx;
        if (family == Family::qbp) {
            luts.phi_c = build_phi_c(pr, spec.qc, dd.dc_max());
            CnBpEvolution cn = cn_evolve_bp(pr, *luts.phi_c, dd, qm);
            luts.gamma_c = std::move(cn.gamma_c);
            psx = std::move(cn.quantized);
        } else {
            psx = cn_evolve_ms(pr, dd, qm);
        }
        auto [phi_v, phi_ch] = build_phi_v_ch(psx, pl, qv, dd.dv_max());
        luts.phi_v = std::move(phi_v);
        luts.phi_ch = std::move(phi_ch);

        VnEvolution msg = vn_evolve(psx, pl, luts.phi_v, luts.phi_ch, dd, qm, VnMode::message);
        luts.gamma_v = std::move(msg.gamma);
        VnEvolution dec = vn_evolve(psx, pl, luts.phi_v, luts.phi_ch, dd, qm, VnMode::decision);
        luts.gamma_e = dec.gamma_e;

        pr = std::move(msg.quantized);
        report.mi.push_back(mutual_information(pr));
        report.perr.push_back(dec.error_prob);
        spec.iterations.push_back(std::move(luts));
        if (opt.stop_below > 0.0 && dec.error_prob < opt.stop_below) break;
    }
    return report;
}

// Largest sigma for which the density evolution drives the hard-decision
// error probability below eps_conv within i_max iterations; plain bisection.
// The default eps_conv was calibrated against published designs for this
// decoder family.
struct SigmaSearch {
    double eps_conv = 3e-5;
    double lo = 0.3;
    double hi = 2.0;
    double tol = 1e-4;
};

inline double find_sigma_d(const DegreeDistribution& dd, int qm, int qc, int qv, int i_max,
                           Family family, const SigmaSearch& s = {},
                           std::vector<std::pair<double, bool>>* trace = nullptr) {
    const auto converges = [&](double sigma) {
        DesignOptions opt;
        opt.stop_below = s.eps_conv;
        const DesignReport r = design_flooding(dd, sigma, qm, qc, qv, i_max, family, opt);
        const bool ok = r.perr.back() < s.eps_conv;
        if (trace) trace->push_back({sigma, ok});
        return ok;
    };
    double lo = s.lo, hi = s.hi;
    if (!converges(lo) || converges(hi))
        throw std::runtime_error("find_sigma_d: bracket error, [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "] does not straddle the threshold");
    while (hi - lo > s.tol) {
        const double mid = 0.5 * (lo + hi);
        (converges(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace mimq
