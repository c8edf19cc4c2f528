#pragma once

// Bound envelopes: the explicit right-hand sides of the exponential-sum
// estimates, as sums of monomials
//
//     coeff * X^beta * max{1,Upsilon}^gamma * q^delta
//           * (log X)^lam * (log q)^lam_logq * (log log X)^lam_loglog
//
// with exact rational exponents, the exponent-schedule recurrence, the
// min-max optimizer for parameter selection, and the empirical |S|/envelope
// ratio harness.  Implied constants are not modeled; every coeff is 1 unless
// a caller scales it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "esum/arith.hpp"
#include "esum/diophantine.hpp"
#include "esum/expsum.hpp"
#include "esum/rational.hpp"

namespace esum {

struct EnvelopeTerm {
    Rat beta;         // exponent of X
    Rat gamma;        // exponent of max{1, Upsilon}
    Rat delta;        // exponent of q
    Rat lam;          // exponent of log X
    Rat lam_logq;     // exponent of log q
    Rat lam_loglog;   // exponent of log log X
    double coeff = 1.0;

    double eval(double X, double q, double upsilon) const {
        double v = coeff * std::pow(X, beta.to_double());
        const double u = std::max(1.0, upsilon);
        if (gamma.num != 0) v *= std::pow(u, gamma.to_double());
        if (delta.num != 0) v *= std::pow(q, delta.to_double());
        if (lam.num != 0) v *= std::pow(std::log(X), lam.to_double());
        if (lam_logq.num != 0) v *= std::pow(std::log(q), lam_logq.to_double());
        if (lam_loglog.num != 0)
            v *= std::pow(std::log(std::log(X)), lam_loglog.to_double());
        return v;
    }
};

enum class Regime {
    none,          // X >= 2 only
    q_le_X,        // stated for q <= X
    upsilon_le_1,  // stated for |alpha - a/q| <= 1/q^2
    upsilon_ge_1,  // stated for Upsilon >= 1
};

struct BoundEnvelope {
    std::string name;
    std::vector<EnvelopeTerm> terms;
    std::string validity;
    Regime regime = Regime::none;

    bool in_regime(double X, double q, double upsilon) const {
        if (X < 2.0) return false;
        switch (regime) {
            case Regime::none: return true;
            case Regime::q_le_X: return q <= X;
            case Regime::upsilon_le_1: return upsilon <= 1.0;
            case Regime::upsilon_ge_1: return upsilon >= 1.0;
        }
        return true;
    }
};

struct EnvelopeValue {
    double value;
    int dominant_term;
    bool in_regime;
};

// Sum of the terms, the argmax term index, and the regime flag.  Out-of-regime
// points still evaluate (sweeps cross regime boundaries deliberately).
inline EnvelopeValue evaluate(const BoundEnvelope& env, double X, double q,
                              double upsilon) {
    if (X < 2.0) throw std::invalid_argument("evaluate: X >= 2");
    if (q < 1.0) throw std::invalid_argument("evaluate: q >= 1");
    if (upsilon < 0.0) throw std::invalid_argument("evaluate: upsilon >= 0");
    double total = 0.0, best = -1.0;
    int arg = 0;
    for (std::size_t i = 0; i < env.terms.size(); ++i) {
        const double v = env.terms[i].eval(X, q, upsilon);
        total += v;
        if (v > best) {
            best = v;
            arg = static_cast<int>(i);
        }
    }
    return {total, arg, env.in_regime(X, q, upsilon)};
}

// Exponent triples of the compact three-term bound and their recurrence.
struct ExponentSchedule {
    int r;
    Rat beta[3];
    Rat gamma[3];
    Rat delta[3];

    static ExponentSchedule for_r(int r) {
        if (r < 1) throw std::invalid_argument("ExponentSchedule: r >= 1");
        ExponentSchedule s;
        s.r = r;
        s.beta[0] = Rat(1);
        s.beta[1] = Rat(2 + 2 * r, 3 + 2 * r);
        s.beta[2] = Rat(2 * r - 1, 2 * r);
        s.gamma[0] = Rat(1, 2 * r);
        s.gamma[1] = Rat(0);
        s.gamma[2] = Rat(0);
        s.delta[0] = Rat(-1, 2 * r);
        s.delta[1] = Rat(0);
        s.delta[2] = Rat(1, 2 * r);
        return s;
    }

    // beta_j(r+1) = (2 + 2 gamma_j - beta_j(r)) / (3 + 2 gamma_j - 2 beta_j(r))
    static Rat beta_step(Rat beta, Rat gamma) {
        return (Rat(2) + Rat(2) * gamma - beta) /
               (Rat(3) + Rat(2) * gamma - Rat(2) * beta);
    }
};

struct EnvelopeParams {
    int r = 0;              // fold count for r-parametric bounds
    Rat eta = Rat(0);       // growth exponent of the abstract weight class
    Rat epsilon = Rat(1, 50);  // concrete stand-in for "any eps > 0" exponents
    int k = 0;              // polynomial degree for the Weyl-type bounds
};

namespace detail {

inline EnvelopeTerm term(Rat beta, Rat gamma, Rat delta, Rat lam,
                         Rat lam_logq = Rat(0), Rat lam_loglog = Rat(0)) {
    EnvelopeTerm t;
    t.beta = beta;
    t.gamma = gamma;
    t.delta = delta;
    t.lam = lam;
    t.lam_logq = lam_logq;
    t.lam_loglog = lam_loglog;
    return t;
}

// The compact three-term family:
// X q^{-1/2r} max{1,U}^{1/2r} + X^{(2+2r)/(3+2r)} + X^{(2r-1)/2r} q^{1/2r},
// all carrying (log X)^lam; eps shifts the middle X-exponent.
inline std::vector<EnvelopeTerm> three_term_family(int r, Rat lam, Rat eps) {
    const auto s = ExponentSchedule::for_r(r);
    return {
        term(s.beta[0], s.gamma[0], s.delta[0], lam),
        term(s.beta[1] + eps, Rat(0), Rat(0), lam),
        term(s.beta[2], Rat(0), s.delta[2], lam),
    };
}

}  // namespace detail

// The bound families by their conventional ids:
//   1.1 (needs r), 1.2, 1.3, 1.4-S2, 1.4-S3, 1.5, 1.6, 1.7, 1.8, 1.9,
//   2.4 (needs r; eta enters the log power), 4.2 (needs r),
//   5.1 (needs k), 5.2, 5.3 (needs k >= 3), legacy-s3.
inline BoundEnvelope envelope_for(const std::string& id,
                                  EnvelopeParams p = {}) {
    using detail::term;
    BoundEnvelope env;
    env.name = id;
    const Rat e0 = Rat(0);

    auto need_r = [&] {
        if (p.r < 1)
            throw std::invalid_argument("envelope_for: theorem " + id +
                                        " needs r >= 1");
    };

    if (id == "1.1") {
        need_r();
        env.terms = detail::three_term_family(p.r, Rat(3), e0);
        env.validity = "X >= 2, q <= X, Upsilon > 0";
        env.regime = Regime::q_le_X;
    } else if (id == "1.2") {
        env.terms = {term(Rat(1), e0, Rat(-1, 2), Rat(3)),
                     term(Rat(4, 5), e0, e0, Rat(3)),
                     term(Rat(1, 2), e0, Rat(1, 2), Rat(3))};
        env.validity = "X >= 2, |alpha - a/q| <= 1/q^2";
        env.regime = Regime::upsilon_le_1;
    } else if (id == "1.3") {
        env.terms = {term(Rat(1), Rat(1), Rat(-1, 2), Rat(3)),
                     term(Rat(4, 5), Rat(1), e0, Rat(3)),
                     term(Rat(1, 2), Rat(1), Rat(1, 2), Rat(3))};
        env.validity = "X >= 2, Upsilon >= 1 (historical global prefactor)";
        env.regime = Regime::upsilon_ge_1;
    } else if (id == "1.4-S2") {
        env.terms = {term(Rat(1), Rat(1, 4), Rat(-1, 4), Rat(5, 2)),
                     term(Rat(6, 7), e0, e0, Rat(19, 7)),
                     term(Rat(3, 4), e0, Rat(1, 4), Rat(5, 2))};
        env.validity = "X >= 2, Upsilon > 0";
    } else if (id == "1.4-S3") {
        env.terms = {term(Rat(1), Rat(1, 6), Rat(-1, 6), Rat(7, 3)),
                     term(Rat(8, 9), e0, e0, Rat(23, 9)),
                     term(Rat(5, 6), e0, Rat(1, 6), Rat(7, 3))};
        env.validity = "X >= 2, Upsilon > 0";
    } else if (id == "1.5" || id == "1.6") {
        env.terms = {term(Rat(1), Rat(1, 4), Rat(-1, 4), Rat(5, 2)),
                     term(Rat(6, 7) + p.epsilon, e0, e0, e0),
                     term(Rat(3, 4), e0, Rat(1, 4), Rat(5, 2))};
        env.validity = "X >= 2, Upsilon > 0 (middle exponent carries eps)";
    } else if (id == "1.7") {
        env.terms = {term(Rat(1), Rat(1, 4), Rat(-1, 4), Rat(5, 2)),
                     term(Rat(6, 7), e0, e0, Rat(19, 7)),
                     term(Rat(3, 4), e0, Rat(1, 4), Rat(5, 2))};
        env.validity = "X >= 2, Upsilon > 0";
    } else if (id == "1.8") {
        env.terms = {term(Rat(1), e0, Rat(-1), Rat(1)),
                     term(Rat(8, 13), e0, e0, Rat(37, 13)),
                     term(Rat(0), e0, Rat(1), Rat(1))};
        env.validity = "X >= 2, |alpha - a/q| <= 1/q^2";
        env.regime = Regime::upsilon_le_1;
    } else if (id == "1.9") {
        env.terms = {term(Rat(1), e0, Rat(-1, 4), e0),
                     term(Rat(1, 2), e0, e0, Rat(1), Rat(1, 2)),
                     term(Rat(1, 2), e0, Rat(1, 4), e0, Rat(1, 4))};
        env.validity = "X >= 2, |alpha - a/q| <= 1/q^2 (quadratic phase)";
        env.regime = Regime::upsilon_le_1;
    } else if (id == "2.4") {
        need_r();
        env.terms = detail::three_term_family(p.r, Rat(3) + Rat(p.r) * p.eta, e0);
        env.validity = "X >= 2, Upsilon > 0 (abstract weight class, eta growth)";
    } else if (id == "4.2") {
        need_r();
        const Rat lam(std::max<std::int64_t>(std::int64_t{p.r} * p.r, 3));
        env.terms = detail::three_term_family(p.r, lam, p.epsilon);
        env.validity = "X >= 2, Upsilon > 0 (tau_r-bounded weights)";
    } else if (id == "5.1") {
        if (p.k < 1)
            throw std::invalid_argument("envelope_for: 5.1 needs degree k >= 1");
        // N^{1+eps} (max{1,U}/q + 1/N + 1/N^{k-1} + q/N^k)^{2^{1-k}},
        // monomialized by subadditivity of x -> x^sigma on sums.
        if (p.k > 60) throw std::invalid_argument("envelope_for: 5.1 k too large");
        const Rat sigma(1, std::int64_t{1} << (p.k - 1));
        const Rat one_eps = Rat(1) + p.epsilon;
        env.terms = {term(one_eps, sigma, -sigma, e0),
                     term(one_eps - sigma, e0, e0, e0),
                     term(one_eps - Rat(p.k - 1) * sigma, e0, e0, e0),
                     term(one_eps - Rat(p.k) * sigma, e0, sigma, e0)};
        env.validity = "X is the summation length N; Upsilon > 0";
    } else if (id == "5.2") {
        env.terms = {term(Rat(1), Rat(1, 2), Rat(-1, 2), e0),
                     term(Rat(1, 2), e0, e0, e0, Rat(1, 2)),
                     term(Rat(0), e0, Rat(1, 2), e0, Rat(1, 2))};
        env.validity = "X is the summation length N; Upsilon > 0";
    } else if (id == "5.3") {
        if (p.k < 3)
            throw std::invalid_argument("envelope_for: 5.3 needs degree k >= 3");
        if (p.k == 3) {
            env.terms = {term(Rat(1, 2) + p.epsilon, e0, Rat(1, 6), e0),
                         term(Rat(1) + p.epsilon, e0, Rat(-1, 4), e0)};
        } else {
            if (p.k > 60)
                throw std::invalid_argument("envelope_for: 5.3 k too large");
            const Rat s1(1, std::int64_t{1} << (p.k - 1));  // 2^{1-k}
            const Rat half(1, 2);
            env.terms = {term(half + Rat(2) * s1 + p.epsilon, e0, -s1, e0),
                         term(half + p.epsilon, e0, s1, e0)};
        }
        env.validity = "X >= 2, |alpha - a/q| <= 1/q^2 (polynomial phase)";
        env.regime = Regime::upsilon_le_1;
    } else if (id == "legacy-s3") {
        const Rat one(1);
        env.terms = {
            term(Rat(1, 2), one, Rat(1, 2), Rat(2)),
            term(Rat(1), one, Rat(-1, 18), Rat(19, 9)),
            term(Rat(52, 53), one, e0, Rat(111, 53)),
            term(Rat(25, 26), one, Rat(1, 26), Rat(27, 13)),
            term(Rat(1), one, Rat(-1, 6), Rat(7, 3), Rat(0), Rat(1)),
            term(Rat(7, 8), one, Rat(1, 8), Rat(9, 4), Rat(0), Rat(1)),
        };
        env.validity = "X >= 3, Upsilon >= 1 (comparison only)";
        env.regime = Regime::upsilon_ge_1;
    } else {
        throw std::invalid_argument("envelope_for: unknown theorem id " + id);
    }
    return env;
}

// min over x of max{F(x), G_0(x), ..., G_m(x)} for F strictly decreasing
// (inf -> 0) and each G_i increasing (0 -> inf): the minimum sits at
// x* = min_i U_i with F(U_i) = G_i(U_i).  Roots by bisection in log x with
// multiplicative bracketing; only monotonicity is assumed.
struct MinMaxResult {
    double x_star;
    double value;
    std::vector<double> roots;
    bool cap_binding;  // x* > x_cap: the constrained statement does not apply
};

inline MinMaxResult minmax_optimize(
    const std::function<double(double)>& F,
    const std::vector<std::function<double(double)>>& Gs, double x_cap) {
    if (Gs.empty()) throw std::invalid_argument("minmax_optimize: no G given");
    constexpr double kLo = 1e-12, kHi = 1e18;
    std::vector<double> roots;
    roots.reserve(Gs.size());
    for (const auto& G : Gs) {
        auto diff = [&](double x) { return F(x) - G(x); };
        double lo = 1.0, hi = 1.0;
        int guard = 0;
        while (diff(lo) <= 0.0) {
            lo /= 8.0;
            if (lo < kLo || ++guard > 64)
                throw std::runtime_error(
                    "minmax_optimize: no bracket below x = 1e-12");
        }
        guard = 0;
        while (diff(hi) >= 0.0) {
            hi *= 8.0;
            if (hi > kHi || ++guard > 64)
                throw std::runtime_error(
                    "minmax_optimize: no bracket above x = 1e18");
        }
        double llo = std::log(lo), lhi = std::log(hi);
        bool converged = false;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (llo + lhi);
            if (diff(std::exp(mid)) > 0.0)
                llo = mid;
            else
                lhi = mid;
            if (lhi - llo < 1e-14) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw std::runtime_error(
                "minmax_optimize: tolerance not reached in 200 bisection steps");
        roots.push_back(std::exp(0.5 * (llo + lhi)));
    }
    const double x_star = *std::min_element(roots.begin(), roots.end());
    return {x_star, F(x_star), roots, x_star > x_cap};
}

// Empirical |S|/envelope sweep.  Measures, never asserts: the implied
// constants of the estimates are unknowable, so callers look at the
// distribution of ratios.
struct WeightSpec {
    Fn kind = Fn::one_p;
    int fold = 1;
};

struct RatioSample {
    double alpha;
    double X;
    std::int64_t a, q;
    double upsilon;
    double s_abs;
    double env_value;
    double ratio;
    int dominant_term;
    bool in_regime;
};

struct RatioStats {
    std::vector<RatioSample> samples;
    double min_ratio = 0.0, max_ratio = 0.0, mean_ratio = 0.0, median_ratio = 0.0;
};

inline RatioStats empirical_ratio(
    WeightSpec w, const BoundEnvelope& env,
    const std::vector<std::pair<double, double>>& samples) {
    RatioStats out;
    out.samples.reserve(samples.size());
    std::map<std::uint64_t, ArithTable> tables;
    for (const auto& [alpha, Xd] : samples) {
        const auto X = static_cast<std::uint64_t>(Xd);
        auto it = tables.find(X);
        if (it == tables.end()) {
            auto t = sieve(w.kind, X);
            if (w.fold > 1) t = r_fold(t, w.fold);
            it = tables.emplace(X, std::move(t)).first;
        }
        const auto s = exp_sum_linear(it->second, alpha, X);
        const auto ra = best_approx(alpha, static_cast<std::int64_t>(X));
        const auto ev = evaluate(env, Xd, static_cast<double>(ra.q), ra.upsilon);
        RatioSample rec;
        rec.alpha = alpha;
        rec.X = Xd;
        rec.a = ra.a;
        rec.q = ra.q;
        rec.upsilon = ra.upsilon;
        rec.s_abs = std::abs(s.value);
        rec.env_value = ev.value;
        rec.ratio = rec.s_abs / ev.value;
        rec.dominant_term = ev.dominant_term;
        rec.in_regime = ev.in_regime;
        out.samples.push_back(rec);
    }
    if (!out.samples.empty()) {
        std::vector<double> rs;
        rs.reserve(out.samples.size());
        double sum = 0.0;
        for (const auto& s : out.samples) {
            rs.push_back(s.ratio);
            sum += s.ratio;
        }
        std::sort(rs.begin(), rs.end());
        out.min_ratio = rs.front();
        out.max_ratio = rs.back();
        out.mean_ratio = sum / rs.size();
        out.median_ratio = rs[rs.size() / 2];
    }
    return out;
}

}  // namespace esum
