#pragma once

// Best rational approximation by continued fractions, the quality
// certificate |alpha - a/q| <= upsilon/q^2, the alpha' = u*alpha transform,
// and the major/minor arc dissection of the circle.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace esum {

// Certifies |alpha - a/q| <= upsilon / q^2 with gcd(a, q) = 1.
struct RationalApprox {
    std::int64_t a = 0;
    std::int64_t q = 1;
    double upsilon = 0.0;
};

namespace detail {

using i128 = __int128;
using u128 = unsigned __int128;

inline i128 floor_div(i128 n, i128 d) {
    i128 q = n / d;
    if ((n % d != 0) && ((n < 0) != (d < 0))) --q;
    return q;
}

struct ExactFraction {
    i128 num;
    i128 den;  // den > 0
};

// Exact rational value of a finite double.  |alpha| >= 2^-57 keeps
// den <= 2^110 so every product below stays inside __int128.
inline ExactFraction decompose(double alpha) {
    int e = 0;
    const double f = std::frexp(alpha, &e);  // alpha = f * 2^e, |f| in [0.5, 1)
    const auto m = static_cast<i128>(std::ldexp(f, 53));  // 53-bit integer
    const int shift = e - 53;
    ExactFraction r{m, 1};
    if (shift >= 0)
        r.num <<= shift;
    else
        r.den <<= -shift;
    return r;
}

}  // namespace detail

// Rational approximation of num/den (den > 0) with denominator <= q_max:
// the final continued-fraction convergent that fits, i.e. the minimizer of
// the Dirichlet error |q*alpha - a| over q <= q_max.  The returned upsilon
// satisfies upsilon <= q/q_max; for rational alpha reached exactly it is 0.
inline RationalApprox best_approx_exact(detail::i128 num, detail::i128 den,
                                        std::int64_t q_max) {
    using namespace detail;
    if (q_max < 1) throw std::invalid_argument("best_approx: Q_max >= 1");
    if (den <= 0) throw std::invalid_argument("best_approx: den > 0");
    {
        const long double scale = static_cast<long double>(num < 0 ? -num : num) *
                                  static_cast<long double>(q_max);
        if (scale > 0x1p124L)
            throw std::invalid_argument("best_approx: alpha * Q_max out of range");
    }

    i128 n0 = num, d0 = den;
    std::int64_t h_prev = 1, k_prev = 0;
    const i128 a0 = floor_div(n0, d0);
    auto h = static_cast<std::int64_t>(a0);
    std::int64_t k = 1;
    i128 r = n0 - a0 * d0;
    n0 = d0;
    d0 = r;

    while (d0 != 0) {
        const i128 ai = n0 / d0;  // remainders are positive past the first step
        const i128 k_next = ai * k + k_prev;
        if (k_next > q_max) break;
        const auto h_next = static_cast<std::int64_t>(ai * h + h_prev);
        h_prev = h;
        k_prev = k;
        h = h_next;
        k = static_cast<std::int64_t>(k_next);
        r = n0 - ai * d0;
        n0 = d0;
        d0 = r;
    }

    // upsilon = |alpha - h/k| k^2 = |num*k - h*den| * k / den, all exact.
    i128 e = num * k - static_cast<i128>(h) * den;
    if (e < 0) e = -e;
    const long double ups = static_cast<long double>(e) *
                            static_cast<long double>(k) /
                            static_cast<long double>(den);
    return {h, k, static_cast<double>(ups)};
}

// Rational approximation of a double with denominator <= q_max.
inline RationalApprox best_approx(double alpha, std::int64_t q_max) {
    if (q_max < 1) throw std::invalid_argument("best_approx: Q_max >= 1");
    if (!std::isfinite(alpha))
        throw std::invalid_argument("best_approx: alpha must be finite");
    if (std::abs(alpha) < 0x1p-57) {
        // 0/1 already beats every a/q with a != 0, q <= Q_max at this scale.
        return {0, 1, std::abs(alpha)};
    }
    const auto fr = detail::decompose(alpha);
    return best_approx_exact(fr.num, fr.den, q_max);
}

inline RationalApprox best_approx(std::int64_t num, std::int64_t den,
                                  std::int64_t q_max) {
    if (den <= 0) throw std::invalid_argument("best_approx: den > 0");
    return best_approx_exact(num, den, q_max);
}

// Certificate for alpha' = u * alpha from the one for alpha:
// a' = u a/g, q' = q/g, upsilon' = upsilon u / g^2 with g = gcd(u, q).
inline RationalApprox transform_by_factor(const RationalApprox& r, std::uint64_t u) {
    if (u == 0) throw std::invalid_argument("transform_by_factor: u >= 1");
    const std::uint64_t g = std::gcd(u, static_cast<std::uint64_t>(r.q));
    RationalApprox out;
    out.a = static_cast<std::int64_t>(u / g) * r.a;
    out.q = r.q / static_cast<std::int64_t>(g);
    out.upsilon = r.upsilon * static_cast<double>(u) /
                  (static_cast<double>(g) * static_cast<double>(g));
    return out;
}

// Arc dissection of [-1/2, 1/2): Q = (log10 X)^A, delta_q = (log10 X)^A/(q X),
// major arcs are (a/q - delta_q, a/q + delta_q) for q <= Q, gcd(a,q) = 1.
//
// The asymptotic dissection is base-independent (changing the log base
// rescales Q and delta by constants); base 10 keeps the arcs nondegenerate
// at the desk scales the diagnostics run at.
struct ArcDissection {
    double X;
    double A;

    ArcDissection(double X_, double A_) : X(X_), A(A_) {
        if (X < 2.0) throw std::invalid_argument("ArcDissection: X >= 2");
        if (A <= 0.0) throw std::invalid_argument("ArcDissection: A > 0");
    }
    double Q() const { return std::pow(std::log10(X), A); }
    double delta(std::int64_t q) const {
        return std::pow(std::log10(X), A) / (static_cast<double>(q) * X);
    }
};

enum class ArcKind { principal_major, major, minor };

inline const char* arc_kind_name(ArcKind k) {
    switch (k) {
        case ArcKind::principal_major: return "principal_major";
        case ArcKind::major: return "major";
        case ArcKind::minor: return "minor";
    }
    return "?";
}

struct ArcClass {
    ArcKind kind = ArcKind::minor;
    std::int64_t a = 0;
    std::int64_t q = 0;  // 0 on minor arcs
    double delta_q = 0.0;
    // True when the point lies in more than one major arc at this (Q, delta);
    // the reported (a, q) is then the smallest-q match, never a silent pick.
    bool overlapping = false;
    int n_matches = 0;
};

// Classifies alpha in [-1/2, 1/2) against the dissection.  Membership is on
// the circle R/Z: the arc around a/q = 1/2 also covers points near -1/2.
inline ArcClass classify(double alpha, const ArcDissection& d) {
    if (alpha < -0.5 || alpha >= 0.5)
        throw std::invalid_argument("classify: alpha must lie in [-1/2, 1/2)");
    const auto Qmax = static_cast<std::int64_t>(std::floor(d.Q()));
    ArcClass out;
    for (std::int64_t q = 1; q <= Qmax; ++q) {
        const double dq = d.delta(q);
        const auto a_lo = static_cast<std::int64_t>(std::ceil((alpha - dq) * q));
        const auto a_hi = static_cast<std::int64_t>(std::floor((alpha + dq) * q));
        for (std::int64_t a = a_lo; a <= a_hi; ++a) {
            if (std::gcd(std::abs(a), q) != 1 && !(a == 0 && q == 1)) continue;
            if (std::abs(alpha - static_cast<double>(a) / q) >= dq) continue;
            ++out.n_matches;
            if (out.n_matches == 1) {
                // Canonical representative on the circle: a in (-q/2, q/2].
                std::int64_t ac = a % q;
                if (2 * ac > q) ac -= q;
                if (2 * ac <= -q) ac += q;
                out.a = ac;
                out.q = q;
                out.delta_q = dq;
                out.kind = (q == 1) ? ArcKind::principal_major : ArcKind::major;
            } else {
                out.overlapping = true;
            }
        }
    }
    if (out.n_matches == 0) out.kind = ArcKind::minor;
    return out;
}

}  // namespace esum
