#pragma once

// Twisted exponential sums  sum_{n<=X} w(n) e(alpha P(n)),  e(x) = exp(2 pi i x),
// with linear, quadratic and general polynomial phases, plus the four-piece
// hyperbola splitting of a convolution sum.
//
// Phase discipline: the product alpha*m is reduced mod 1 *before* any
// trigonometric call, via the exact two-product alpha*m = p + fma-residual.
// The reduced phase therefore carries no large-argument error even when
// alpha*m is ~2^50.  Accumulation is compensated and chunked with fixed
// chunk boundaries, so results are bit-identical across thread counts.

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "esum/arith.hpp"
#include "esum/summation.hpp"

namespace esum {

namespace detail {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// frac(a * m) computed from the exact two-product a*m = p + e.
inline double frac_prod(double a, double m) {
    const double p = a * m;
    const double e = std::fma(a, m, -p);
    double f = (p - std::floor(p)) + e;
    if (f >= 1.0) f -= 1.0;
    if (f < 0.0) f += 1.0;
    return f;
}

inline std::complex<double> unit_phase(double frac) {
    const double t = kTwoPi * frac;
    return {std::cos(t), std::sin(t)};
}

constexpr std::uint64_t kChunk = std::uint64_t{1} << 16;

}  // namespace detail

struct ExpSumResult {
    std::complex<double> value{0.0, 0.0};
    double X = 0.0;
    double alpha = 0.0;
    std::string kind;
    std::uint64_t n_terms = 0;
};

// sum_{n<=X} w(n) e(alpha n)
inline ExpSumResult exp_sum_linear(const ArithTable& w, double alpha,
                                   std::uint64_t X) {
    if (X > w.limit)
        throw std::invalid_argument("exp_sum_linear: X exceeds the weight table");
    const auto value = chunked_map_reduce<std::complex<double>>(
        X, detail::kChunk, {0.0, 0.0},
        [&](std::uint64_t lo, std::uint64_t hi) {
            kahan_complex acc;
            if (!w.real_valued) {
                for (std::uint64_t n = lo; n <= hi; ++n) {
                    const std::int64_t wv = w.ival[n];
                    if (wv == 0) continue;
                    acc.add(static_cast<double>(wv) *
                            detail::unit_phase(detail::frac_prod(alpha, static_cast<double>(n))));
                }
            } else {
                for (std::uint64_t n = lo; n <= hi; ++n) {
                    const double wv = w.rval[n];
                    if (wv == 0.0) continue;
                    acc.add(wv * detail::unit_phase(detail::frac_prod(alpha, static_cast<double>(n))));
                }
            }
            return acc.value();
        },
        [](std::complex<double> a, std::complex<double> b) { return a + b; });
    return {value, static_cast<double>(X), alpha,
            std::string("linear:") + fn_name(w.kind), X};
}

// S_r(alpha, X) = sum over ordered prime r-tuples with p_1...p_r <= X of
// e(alpha p_1...p_r); evaluated as the linear sum with weights 1_P^{*r}.
inline ExpSumResult exp_sum_primes_r(int r, double alpha, std::uint64_t X) {
    if (r < 1) throw std::invalid_argument("exp_sum_primes_r: r >= 1");
    if (X < 2) throw std::invalid_argument("exp_sum_primes_r: X >= 2");
    const auto weights = r_fold(sieve(Fn::one_p, X), r);
    auto res = exp_sum_linear(weights, alpha, X);
    res.kind = "primes_r:" + std::to_string(r);
    return res;
}

// sum_{n<=X} w(n) e(alpha n^2)
inline ExpSumResult exp_sum_quadratic(const ArithTable& w, double alpha,
                                      std::uint64_t X) {
    if (X > w.limit)
        throw std::invalid_argument("exp_sum_quadratic: X exceeds the weight table");
    const auto value = chunked_map_reduce<std::complex<double>>(
        X, detail::kChunk, {0.0, 0.0},
        [&](std::uint64_t lo, std::uint64_t hi) {
            kahan_complex acc;
            for (std::uint64_t n = lo; n <= hi; ++n) {
                const double wv = w.as_real(n);
                if (wv == 0.0) continue;
                const double nn = static_cast<double>(n) * static_cast<double>(n);
                acc.add(wv * detail::unit_phase(detail::frac_prod(alpha, nn)));
            }
            return acc.value();
        },
        [](std::complex<double> a, std::complex<double> b) { return a + b; });
    return {value, static_cast<double>(X), alpha,
            std::string("quadratic:") + fn_name(w.kind), X};
}

// sum_{n<=X} w(n) e(alpha P(n)) with P(n) = c_0 + c_1 n + ... + c_k n^k
// evaluated by Horner in double precision.
inline ExpSumResult exp_sum_poly(const ArithTable& w,
                                 std::span<const double> coeffs, double alpha,
                                 std::uint64_t X) {
    if (coeffs.size() < 2)
        throw std::invalid_argument("exp_sum_poly: polynomial degree must be >= 1");
    if (X > w.limit)
        throw std::invalid_argument("exp_sum_poly: X exceeds the weight table");
    const auto value = chunked_map_reduce<std::complex<double>>(
        X, detail::kChunk, {0.0, 0.0},
        [&](std::uint64_t lo, std::uint64_t hi) {
            kahan_complex acc;
            for (std::uint64_t n = lo; n <= hi; ++n) {
                const double wv = w.as_real(n);
                if (wv == 0.0) continue;
                const auto x = static_cast<double>(n);
                double p = coeffs[coeffs.size() - 1];
                for (std::size_t j = coeffs.size() - 1; j-- > 0;)
                    p = p * x + coeffs[j];
                acc.add(wv * detail::unit_phase(detail::frac_prod(alpha, p)));
            }
            return acc.value();
        },
        [](std::complex<double> a, std::complex<double> b) { return a + b; });
    return {value, static_cast<double>(X), alpha,
            "poly:deg" + std::to_string(coeffs.size() - 1) + ":" + fn_name(w.kind),
            X};
}

// The four pieces of sum_{mn<=X} f(m) g(n) e(alpha mn) cut at m = M, n = N:
// s1 over {m>M, n>N}, s2 over {n<=N}, s3 over {m<=M}, s4 over {m<=M, n<=N}.
// Recombination s1 + s2 + s3 - s4 equals the full convolution sum.
struct HyperbolaSplit {
    std::complex<double> s1, s2, s3, s4;
    std::complex<double> total() const { return s1 + s2 + s3 - s4; }
};

inline HyperbolaSplit hyperbola_split(const ArithTable& f, const ArithTable& g,
                                      double alpha, std::uint64_t X, double M,
                                      double N) {
    if (M < 1.0 || N < 1.0)
        throw std::invalid_argument("hyperbola_split: M, N >= 1");
    if (M * N > static_cast<double>(X))
        throw std::invalid_argument("hyperbola_split: need M*N <= X");
    if (X > f.limit || X > g.limit)
        throw std::invalid_argument("hyperbola_split: X exceeds a weight table");
    const auto Mi = static_cast<std::uint64_t>(std::floor(M));
    const auto Ni = static_cast<std::uint64_t>(std::floor(N));

    auto phase_mn = [&](std::uint64_t m, std::uint64_t n) {
        return detail::unit_phase(
            detail::frac_prod(alpha, static_cast<double>(m * n)));
    };

    kahan_complex s1, s2, s3, s4;
    for (std::uint64_t m = Mi + 1; m * (Ni + 1) <= X; ++m) {
        const double fm = f.as_real(m);
        if (fm == 0.0) continue;
        const std::uint64_t n_hi = X / m;
        for (std::uint64_t n = Ni + 1; n <= n_hi; ++n) {
            const double gn = g.as_real(n);
            if (gn == 0.0) continue;
            s1.add(fm * gn * phase_mn(m, n));
        }
    }
    for (std::uint64_t n = 1; n <= std::min(Ni, X); ++n) {
        const double gn = g.as_real(n);
        if (gn == 0.0) continue;
        const std::uint64_t m_hi = X / n;
        for (std::uint64_t m = 1; m <= m_hi; ++m) {
            const double fm = f.as_real(m);
            if (fm == 0.0) continue;
            s2.add(fm * gn * phase_mn(m, n));
        }
    }
    for (std::uint64_t m = 1; m <= std::min(Mi, X); ++m) {
        const double fm = f.as_real(m);
        if (fm == 0.0) continue;
        const std::uint64_t n_hi = X / m;
        for (std::uint64_t n = 1; n <= n_hi; ++n) {
            const double gn = g.as_real(n);
            if (gn == 0.0) continue;
            s3.add(fm * gn * phase_mn(m, n));
        }
    }
    for (std::uint64_t m = 1; m <= std::min(Mi, X); ++m) {
        const double fm = f.as_real(m);
        if (fm == 0.0) continue;
        const std::uint64_t n_hi = std::min(Ni, X / m);
        for (std::uint64_t n = 1; n <= n_hi; ++n) {
            const double gn = g.as_real(n);
            if (gn == 0.0) continue;
            s4.add(fm * gn * phase_mn(m, n));
        }
    }
    return {s1.value(), s2.value(), s3.value(), s4.value()};
}

}  // namespace esum
