#pragma once

// Sieved tables of classical arithmetic functions on [1, X], Dirichlet
// convolution, and the exact multiplicative identities used by the
// higher-level evaluators.
//
// Storage discipline: {-1,0,1}-valued and counting functions are exact
// int64 tables; von Mangoldt and log are double tables.  Identity checks
// run entirely in integer arithmetic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "esum/summation.hpp"

namespace esum {

enum class Fn {
    mu,
    mu_abs,
    lambda,
    one_p,
    one,
    log_n,
    tau_k,
    mu_prime,
    omega,
    custom,
};

inline const char* fn_name(Fn f) {
    switch (f) {
        case Fn::mu: return "mu";
        case Fn::mu_abs: return "mu_abs";
        case Fn::lambda: return "lambda";
        case Fn::one_p: return "one_p";
        case Fn::one: return "one";
        case Fn::log_n: return "log";
        case Fn::tau_k: return "tau_k";
        case Fn::mu_prime: return "mu_prime";
        case Fn::omega: return "omega";
        case Fn::custom: return "custom";
    }
    return "?";
}

inline Fn fn_from_name(const std::string& s) {
    if (s == "mu") return Fn::mu;
    if (s == "mu_abs") return Fn::mu_abs;
    if (s == "lambda") return Fn::lambda;
    if (s == "one_p") return Fn::one_p;
    if (s == "one") return Fn::one;
    if (s == "log") return Fn::log_n;
    if (s == "tau_k") return Fn::tau_k;
    if (s == "mu_prime") return Fn::mu_prime;
    if (s == "omega") return Fn::omega;
    throw std::invalid_argument("unsupported arithmetic function: " + s);
}

// Values of one arithmetic function on 1..limit.  Index 0 is unused padding
// so that t.i(n) addresses n directly.  Immutable after construction.
struct ArithTable {
    Fn kind = Fn::custom;
    int k = 0;  // tau_k order, when kind == tau_k
    std::uint64_t limit = 0;
    bool real_valued = false;
    std::vector<std::int64_t> ival;
    std::vector<double> rval;

    std::int64_t i(std::uint64_t n) const { return ival[n]; }
    double r(std::uint64_t n) const { return rval[n]; }
    double as_real(std::uint64_t n) const {
        return real_valued ? rval[n] : static_cast<double>(ival[n]);
    }

    // Sum of |values| over 1..X; the triangle-inequality budget for any
    // exponential sum with these weights.
    double abs_sum(std::uint64_t X) const {
        kahan_sum<double> s;
        for (std::uint64_t n = 1; n <= X; ++n) s.add(std::abs(as_real(n)));
        return s.value();
    }

    static ArithTable ints(Fn kind, std::uint64_t limit) {
        ArithTable t;
        t.kind = kind;
        t.limit = limit;
        t.real_valued = false;
        t.ival.assign(limit + 1, 0);
        return t;
    }
    static ArithTable reals(Fn kind, std::uint64_t limit) {
        ArithTable t;
        t.kind = kind;
        t.limit = limit;
        t.real_valued = true;
        t.rval.assign(limit + 1, 0.0);
        return t;
    }
};

// Primes up to limit by plain Eratosthenes; used as base primes everywhere.
inline std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
    std::vector<std::uint64_t> primes;
    if (limit < 2) return primes;
    std::vector<char> composite(limit + 1, 0);
    for (std::uint64_t i = 2; i * i <= limit; ++i)
        if (!composite[i])
            for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
    for (std::uint64_t i = 2; i <= limit; ++i)
        if (!composite[i]) primes.push_back(i);
    return primes;
}

namespace detail {

constexpr std::uint64_t kSegmentSize = std::uint64_t{1} << 20;

inline std::uint64_t isqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// One factoring pass over the segment [lo, hi]: calls
//   on_factor(idx, p, e)  once per prime p <= sqrt(limit) dividing n = lo+idx
//   on_big(idx, r)        when a single prime factor r > sqrt(limit) remains.
template <class OnFactor, class OnBig>
void factor_segment(std::uint64_t lo, std::uint64_t hi,
                    const std::vector<std::uint64_t>& base_primes,
                    OnFactor on_factor, OnBig on_big) {
    const std::uint64_t len = hi - lo + 1;
    std::vector<std::uint64_t> rem(len);
    for (std::uint64_t i = 0; i < len; ++i) rem[i] = lo + i;
    for (std::uint64_t p : base_primes) {
        if (p * p > hi) break;
        std::uint64_t start = ((lo + p - 1) / p) * p;
        for (std::uint64_t n = start; n >= lo && n <= hi; n += p) {
            const std::uint64_t idx = n - lo;
            int e = 0;
            while (rem[idx] % p == 0) {
                rem[idx] /= p;
                ++e;
            }
            on_factor(idx, p, e);
        }
    }
    for (std::uint64_t i = 0; i < len; ++i)
        if (rem[i] > 1) on_big(i, rem[i]);
}

}  // namespace detail

// Sieve one of the supported functions on [1, X].  The work is segmented
// (2^20 entries per segment) and segments are farmed out to workers; each
// segment writes a disjoint slice of the output.
inline ArithTable sieve(Fn kind, std::uint64_t X, int k = 0);

namespace detail {

inline void sieve_mu_into(std::uint64_t X, std::vector<std::int64_t>& out) {
    const auto base = primes_up_to(isqrt(X));
    const std::uint64_t n_segs = (X + kSegmentSize - 1) / kSegmentSize;
    parallel_chunks(n_segs, 1, [&](std::uint64_t, std::uint64_t s, std::uint64_t) {
        const std::uint64_t lo = std::max<std::uint64_t>(1, s * kSegmentSize + 1);
        const std::uint64_t hi = std::min(X, (s + 1) * kSegmentSize);
        if (lo > hi) return;
        std::vector<std::int64_t> mu(hi - lo + 1, 1);
        factor_segment(
            lo, hi, base,
            [&](std::uint64_t idx, std::uint64_t, int e) {
                mu[idx] = (e >= 2) ? 0 : -mu[idx];
            },
            [&](std::uint64_t idx, std::uint64_t) { mu[idx] = -mu[idx]; });
        std::copy(mu.begin(), mu.end(), out.begin() + lo);
    });
    out[1] = 1;
}

inline void sieve_one_p_into(std::uint64_t X, std::vector<std::int64_t>& out) {
    const auto base = primes_up_to(isqrt(X));
    const std::uint64_t n_segs = (X + kSegmentSize - 1) / kSegmentSize;
    parallel_chunks(n_segs, 1, [&](std::uint64_t, std::uint64_t s, std::uint64_t) {
        const std::uint64_t lo = std::max<std::uint64_t>(2, s * kSegmentSize + 1);
        const std::uint64_t hi = std::min(X, (s + 1) * kSegmentSize);
        if (lo > hi) return;
        std::vector<char> prime(hi - lo + 1, 1);
        for (std::uint64_t p : base) {
            if (p * p > hi) break;
            std::uint64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
            for (std::uint64_t n = start; n <= hi; n += p) prime[n - lo] = 0;
        }
        for (std::uint64_t n = lo; n <= hi; ++n) out[n] = prime[n - lo];
    });
}

inline void sieve_lambda_into(std::uint64_t X, std::vector<double>& out) {
    const auto base = primes_up_to(isqrt(X));
    const std::uint64_t n_segs = (X + kSegmentSize - 1) / kSegmentSize;
    parallel_chunks(n_segs, 1, [&](std::uint64_t, std::uint64_t s, std::uint64_t) {
        const std::uint64_t lo = std::max<std::uint64_t>(2, s * kSegmentSize + 1);
        const std::uint64_t hi = std::min(X, (s + 1) * kSegmentSize);
        if (lo > hi) return;
        std::vector<char> prime(hi - lo + 1, 1);
        for (std::uint64_t p : base) {
            if (p * p > hi) break;
            std::uint64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
            for (std::uint64_t n = start; n <= hi; n += p) prime[n - lo] = 0;
        }
        for (std::uint64_t n = lo; n <= hi; ++n)
            out[n] = prime[n - lo] ? std::log(static_cast<double>(n)) : 0.0;
    });
    // Proper prime powers p^e, e >= 2; none exceed sqrt(X)^2 for p > sqrt(X).
    for (std::uint64_t p : base) {
        const double lp = std::log(static_cast<double>(p));
        for (std::uint64_t q = p * p; q <= X; q *= p) {
            out[q] = lp;
            if (q > X / p) break;
        }
    }
}

inline void sieve_omega_into(std::uint64_t X, std::vector<std::int64_t>& out) {
    const auto base = primes_up_to(isqrt(X));
    const std::uint64_t n_segs = (X + kSegmentSize - 1) / kSegmentSize;
    parallel_chunks(n_segs, 1, [&](std::uint64_t, std::uint64_t s, std::uint64_t) {
        const std::uint64_t lo = std::max<std::uint64_t>(2, s * kSegmentSize + 1);
        const std::uint64_t hi = std::min(X, (s + 1) * kSegmentSize);
        if (lo > hi) return;
        std::vector<std::int64_t> w(hi - lo + 1, 0);
        factor_segment(
            lo, hi, base, [&](std::uint64_t idx, std::uint64_t, int) { ++w[idx]; },
            [&](std::uint64_t idx, std::uint64_t) { ++w[idx]; });
        std::copy(w.begin(), w.end(), out.begin() + lo);
    });
}

}  // namespace detail

inline ArithTable dirichlet_convolve(const ArithTable& f, const ArithTable& g);

inline ArithTable sieve(Fn kind, std::uint64_t X, int k) {
    if (X < 1) throw std::invalid_argument("sieve: X must be >= 1");
    switch (kind) {
        case Fn::mu: {
            auto t = ArithTable::ints(kind, X);
            detail::sieve_mu_into(X, t.ival);
            return t;
        }
        case Fn::mu_abs: {
            auto t = ArithTable::ints(kind, X);
            detail::sieve_mu_into(X, t.ival);
            for (std::uint64_t n = 1; n <= X; ++n) t.ival[n] = std::abs(t.ival[n]);
            return t;
        }
        case Fn::one_p: {
            auto t = ArithTable::ints(kind, X);
            detail::sieve_one_p_into(X, t.ival);
            return t;
        }
        case Fn::one: {
            auto t = ArithTable::ints(kind, X);
            std::fill(t.ival.begin() + 1, t.ival.end(), 1);
            return t;
        }
        case Fn::lambda: {
            auto t = ArithTable::reals(kind, X);
            detail::sieve_lambda_into(X, t.rval);
            return t;
        }
        case Fn::log_n: {
            auto t = ArithTable::reals(kind, X);
            for (std::uint64_t n = 1; n <= X; ++n)
                t.rval[n] = std::log(static_cast<double>(n));
            return t;
        }
        case Fn::omega: {
            auto t = ArithTable::ints(kind, X);
            detail::sieve_omega_into(X, t.ival);
            return t;
        }
        case Fn::tau_k: {
            if (k < 1) throw std::invalid_argument("sieve: tau_k needs k >= 1");
            const auto one = sieve(Fn::one, X);
            auto t = one;
            for (int j = 1; j < k; ++j) t = dirichlet_convolve(t, one);
            t.kind = Fn::tau_k;
            t.k = k;
            return t;
        }
        case Fn::mu_prime: {
            auto t = dirichlet_convolve(sieve(Fn::mu, X), sieve(Fn::one_p, X));
            t.kind = Fn::mu_prime;
            return t;
        }
        case Fn::custom:
            throw std::invalid_argument("sieve: custom tables are built by callers");
    }
    throw std::invalid_argument("sieve: unsupported kind");
}

// (f*g)[n] = sum_{d|n} f[d] g[n/d] by multiples iteration: for each d with
// f[d] != 0, scatter f[d]*g[m] into n = d*m.  O(X log X).
inline ArithTable dirichlet_convolve(const ArithTable& f, const ArithTable& g) {
    if (f.limit != g.limit)
        throw std::invalid_argument("dirichlet_convolve: mismatched limits");
    const std::uint64_t X = f.limit;
    if (!f.real_valued && !g.real_valued) {
        auto out = ArithTable::ints(Fn::custom, X);
        for (std::uint64_t d = 1; d <= X; ++d) {
            const std::int64_t fd = f.ival[d];
            if (fd == 0) continue;
            const std::uint64_t md = X / d;
            for (std::uint64_t m = 1; m <= md; ++m) out.ival[d * m] += fd * g.ival[m];
        }
        return out;
    }
    auto out = ArithTable::reals(Fn::custom, X);
    for (std::uint64_t d = 1; d <= X; ++d) {
        const double fd = f.as_real(d);
        if (fd == 0.0) continue;
        const std::uint64_t md = X / d;
        for (std::uint64_t m = 1; m <= md; ++m) out.rval[d * m] += fd * g.as_real(m);
    }
    return out;
}

// f convolved with itself r times (f^{*1} = f).
inline ArithTable r_fold(const ArithTable& f, int r) {
    if (r < 1) throw std::invalid_argument("r_fold: r must be >= 1");
    ArithTable acc = f;
    for (int j = 1; j < r; ++j) acc = dirichlet_convolve(acc, f);
    return acc;
}

// |mu(n)| == sum_{b^2 | n} mu(b) for every n <= X, checked exactly.
inline bool mu_squared_identity_check(std::uint64_t X) {
    const auto mu = sieve(Fn::mu, X);
    std::vector<std::int64_t> rhs(X + 1, 0);
    for (std::uint64_t b = 1; b * b <= X; ++b) {
        const std::int64_t mb = mu.ival[b];
        if (mb == 0) continue;
        for (std::uint64_t n = b * b; n <= X; n += b * b) rhs[n] += mb;
    }
    for (std::uint64_t n = 1; n <= X; ++n)
        if (rhs[n] != std::abs(mu.ival[n])) return false;
    return true;
}

// 1_P = sum_{j=1}^{k} (-1)^{j-1} C(k,j) mu_{<=V}^{*j} * 1^{*(j-1)} * omega
// on n <= x, valid when V >= x^{1/k}.  Checked exactly in int64.
inline bool heath_brown_identity_check(int k, std::uint64_t x, std::uint64_t V) {
    if (k < 1) throw std::invalid_argument("heath_brown_identity_check: k >= 1");
    // V >= x^{1/k} means V^k >= x; compare in integers.
    {
        unsigned __int128 pw = 1;
        bool reached = false;
        for (int j = 0; j < k && !reached; ++j) {
            pw *= V;
            if (pw >= x) reached = true;
        }
        if (!reached)
            throw std::invalid_argument(
                "heath_brown_identity_check: V < x^{1/k}, identity hypothesis violated");
    }
    const auto mu = sieve(Fn::mu, x);
    auto mu_le_v = mu;
    for (std::uint64_t n = V + 1; n <= x; ++n) mu_le_v.ival[n] = 0;
    const auto one = sieve(Fn::one, x);
    const auto omega = sieve(Fn::omega, x);
    const auto one_p = sieve(Fn::one_p, x);

    std::vector<std::int64_t> acc(x + 1, 0);
    // T_j = mu_{<=V}^{*j} * 1^{*(j-1)} * omega, built as T_j = T_{j-1} * mu * 1.
    ArithTable term = dirichlet_convolve(mu_le_v, omega);
    std::int64_t binom = k;  // C(k,1)
    for (int j = 1; j <= k; ++j) {
        const std::int64_t sign = (j % 2 == 1) ? 1 : -1;
        for (std::uint64_t n = 1; n <= x; ++n)
            acc[n] += sign * binom * term.ival[n];
        if (j == k) break;
        term = dirichlet_convolve(dirichlet_convolve(term, mu_le_v), one);
        binom = binom * (k - j) / (j + 1);
    }
    for (std::uint64_t n = 1; n <= x; ++n)
        if (acc[n] != one_p.ival[n]) return false;
    return true;
}

// Indicator of squares of squarefree numbers factors as g*h with g the
// square indicator and h supported on fourth powers, h(t^4) = mu(t).
// (Dirichlet series zeta(2s)/zeta(4s).)  Checked exactly for n <= X.
inline bool squares_of_squarefree_factorization_check(std::uint64_t X) {
    const auto mu = sieve(Fn::mu, std::max<std::uint64_t>(detail::isqrt(X), 1));
    std::vector<std::int64_t> lhs(X + 1, 0), rhs(X + 1, 0);
    for (std::uint64_t m = 1; m * m <= X; ++m)
        if (mu.ival[m] != 0) lhs[m * m] = 1;
    for (std::uint64_t a = 1; a * a <= X; ++a) {
        for (std::uint64_t b = 1;; ++b) {
            const std::uint64_t b4 = b * b * b * b;
            if (a * a > X / b4) break;
            rhs[a * a * b4] += mu.ival[b];
        }
    }
    for (std::uint64_t n = 1; n <= X; ++n)
        if (lhs[n] != rhs[n]) return false;
    return true;
}

inline std::uint64_t euler_phi(std::uint64_t q) {
    std::uint64_t result = q, m = q;
    for (std::uint64_t p = 2; p * p <= m; ++p) {
        if (m % p) continue;
        while (m % p == 0) m /= p;
        result -= result / p;
    }
    if (m > 1) result -= result / m;
    return result;
}

struct ApCount {
    double count;
    double main_term;
};

// Squarefree numbers <= X in the progression l mod q, against the main term
// X / (zeta(2) phi(q) prod_{p|q} (1 + 1/p)).
inline ApCount count_in_ap(const ArithTable& mu_abs, std::uint64_t q,
                           std::uint64_t l) {
    if (mu_abs.kind != Fn::mu_abs)
        throw std::invalid_argument("count_in_ap: needs a mu_abs table");
    if (q < 1) throw std::invalid_argument("count_in_ap: q >= 1");
    if (std::gcd(q, l) != 1)
        throw std::invalid_argument("count_in_ap: gcd(l, q) must be 1");
    const std::uint64_t X = mu_abs.limit;
    std::int64_t count = 0;
    std::uint64_t start = l % q;
    if (start == 0) start = q;
    for (std::uint64_t n = start; n <= X; n += q) count += mu_abs.ival[n];

    const double zeta2 = 3.14159265358979323846 * 3.14159265358979323846 / 6.0;
    double local = 1.0;
    std::uint64_t m = q;
    for (std::uint64_t p = 2; p * p <= m; ++p) {
        if (m % p) continue;
        while (m % p == 0) m /= p;
        local *= 1.0 + 1.0 / static_cast<double>(p);
    }
    if (m > 1) local *= 1.0 + 1.0 / static_cast<double>(m);
    const double main = static_cast<double>(X) /
                        (zeta2 * static_cast<double>(euler_phi(q)) * local);
    return {static_cast<double>(count), main};
}

inline ApCount count_in_ap(Fn kind, std::uint64_t X, std::uint64_t q,
                           std::uint64_t l) {
    if (kind != Fn::mu_abs)
        throw std::invalid_argument("count_in_ap: only mu_abs is supported");
    return count_in_ap(sieve(Fn::mu_abs, X), q, l);
}

}  // namespace esum
