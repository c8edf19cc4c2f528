#pragma once

// Complex special functions (zeta, gamma, digamma), ingestion of a table of
// nontrivial-zero ordinates, the residue coefficients at the trivial zeros,
// and the two sides of the explicit formula for the generating sum
//
//   Phi_1(X, theta, J, N)   truncated arithmetic double sum over |mu|
//   Phi_2(X, theta, T, N)   leading term + zero pairs + trivial-zero series
//
// zeta and its first two derivatives come from one Euler-Maclaurin kernel
// evaluated over second-order jets (forward-mode differentiation of every
// term), with functional-equation reflection for Re s < -2.

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "esum/arith.hpp"
#include "esum/summation.hpp"

namespace esum {

using cd = std::complex<double>;

// Second-order jet: value, first and second derivative with respect to s.
struct Jet {
    cd f{0.0}, d1{0.0}, d2{0.0};

    Jet() = default;
    Jet(double v) : f(v) {}
    Jet(cd v) : f(v) {}
    Jet(cd v, cd g, cd h) : f(v), d1(g), d2(h) {}
    static Jet var(cd v) { return {v, 1.0, 0.0}; }

    friend Jet operator+(Jet a, Jet b) {
        return {a.f + b.f, a.d1 + b.d1, a.d2 + b.d2};
    }
    friend Jet operator-(Jet a, Jet b) {
        return {a.f - b.f, a.d1 - b.d1, a.d2 - b.d2};
    }
    friend Jet operator-(Jet a) { return {-a.f, -a.d1, -a.d2}; }
    friend Jet operator*(Jet a, Jet b) {
        return {a.f * b.f, a.d1 * b.f + a.f * b.d1,
                a.d2 * b.f + 2.0 * a.d1 * b.d1 + a.f * b.d2};
    }
    friend Jet operator/(Jet a, Jet b) {
        const cd w = 1.0 / b.f;
        const cd h1 = -b.d1 * w * w;
        const cd h2 = (2.0 * b.d1 * b.d1 * w - b.d2) * w * w;
        const Jet inv{w, h1, h2};
        return a * inv;
    }
};

inline Jet exp(Jet a) {
    const cd e = std::exp(a.f);
    return {e, e * a.d1, e * (a.d2 + a.d1 * a.d1)};
}
inline Jet log(Jet a) {
    const cd w = 1.0 / a.f;
    return {std::log(a.f), a.d1 * w, a.d2 * w - a.d1 * a.d1 * w * w};
}
inline Jet sin(Jet a) {
    const cd s = std::sin(a.f), c = std::cos(a.f);
    return {s, c * a.d1, c * a.d2 - s * a.d1 * a.d1};
}

namespace detail {

inline cd value_of(cd z) { return z; }
inline cd value_of(const Jet& j) { return j.f; }

constexpr double kPi = 3.141592653589793238462643383279503;

// B_{2k} for k = 1..15.
inline const double* bernoulli_2k() {
    static const double b[15] = {
        1.0 / 6,           -1.0 / 30,          1.0 / 42,
        -1.0 / 30,         5.0 / 66,           -691.0 / 2730,
        7.0 / 6,           -3617.0 / 510,      43867.0 / 798,
        -174611.0 / 330,   854513.0 / 138,     -236364091.0 / 2730,
        8553103.0 / 6,     -23749461029.0 / 870,
        8615841276005.0 / 14322};
    return b;
}

// B_{2k} / (2k)! for k = 1..15.
inline const double* bernoulli_over_factorial() {
    static double v[15];
    static bool init = [] {
        long double fact = 1.0L;
        for (int k = 1; k <= 15; ++k) {
            fact *= (2.0L * k - 1.0L) * (2.0L * k);
            v[k - 1] = static_cast<double>(
                static_cast<long double>(bernoulli_2k()[k - 1]) / fact);
        }
        return true;
    }();
    (void)init;
    return v;
}

// log Gamma by the Stirling series with argument shift; requires
// Re(value) >= 0.5 (callers reflect first).
template <class T>
T log_gamma_positive(T s, cd sv) {
    T shift_log(0.0);
    T z = s;
    cd zv = sv;
    while (std::abs(zv) < 16.0) {
        shift_log = shift_log + log(z);
        z = z + T(1.0);
        zv += 1.0;
    }
    static const double stir[8] = {
        1.0 / 12,    -1.0 / 360,      1.0 / 1260, -1.0 / 1680,
        1.0 / 1188,  -691.0 / 360360, 1.0 / 156,  -3617.0 / 122400};
    const T lz = log(z);
    T out = (z - T(0.5)) * lz - z + T(0.5 * std::log(2.0 * kPi));
    const T z2 = z * z;
    T zpow = z;  // z^{2k-1}
    for (int k = 0; k < 8; ++k) {
        out = out + T(stir[k]) / zpow;
        zpow = zpow * z2;
    }
    return out - shift_log;
}

template <class T>
T gamma_any(T s, cd sv) {
    if (sv.imag() == 0.0 && sv.real() <= 0.0 &&
        sv.real() == std::floor(sv.real()))
        throw std::domain_error("gamma: pole at nonpositive integer");
    if (sv.real() < 0.5) {
        // Gamma(s) = pi / (sin(pi s) Gamma(1 - s))
        const T pis = T(kPi) * s;
        return T(kPi) / (sin(pis) * exp(log_gamma_positive(T(1.0) - s, 1.0 - sv)));
    }
    return exp(log_gamma_positive(s, sv));
}

// Euler-Maclaurin for Re s > -2 (with 14 Bernoulli corrections the truncation
// is far below double noise on the needed domain).
template <class T>
T zeta_em(T s, cd sv) {
    const double t = std::abs(sv.imag());
    const int N = std::max(25, static_cast<int>(std::ceil(1.3 * t)) + 10);
    constexpr int K = 14;
    T sum(0.0);
    for (int n = 1; n < N; ++n)
        sum = sum + exp(-s * T(std::log(static_cast<double>(n))));
    const T n_pow_ms = exp(-s * T(std::log(static_cast<double>(N))));  // N^{-s}
    sum = sum + n_pow_ms * T(static_cast<double>(N)) / (s - T(1.0));
    sum = sum + n_pow_ms * T(0.5);
    const double* bf = bernoulli_over_factorial();
    T poch = s;                                       // s(s+1)...(s+2k-2)
    T npow = n_pow_ms / T(static_cast<double>(N));    // N^{-s-2k+1}
    const T n2(static_cast<double>(N) * static_cast<double>(N));
    for (int k = 1; k <= K; ++k) {
        sum = sum + T(bf[k - 1]) * poch * npow;
        poch = poch * (s + T(2.0 * k - 1.0)) * (s + T(2.0 * k));
        npow = npow / n2;
    }
    return sum;
}

template <class T>
T zeta_any(T s, cd sv) {
    if (sv == cd(1.0, 0.0)) throw std::domain_error("zeta: pole at s = 1");
    // Reflect for Re s < 0: the direct sum cancels badly against the pole
    // term there, while the reflected factors are all O(1).
    if (sv.real() >= 0.0) return zeta_em(s, sv);
    // zeta(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s) zeta(1-s)
    const T one_minus = T(1.0) - s;
    const cd omv = 1.0 - sv;
    const T chi = exp(s * T(std::log(2.0))) *
                  exp((s - T(1.0)) * T(std::log(kPi))) * sin(T(kPi / 2) * s) *
                  gamma_any(one_minus, omv);
    return chi * zeta_em(one_minus, omv);
}

}  // namespace detail

// zeta(s) away from s = 1; Euler-Maclaurin with reflection below Re s = -2.
inline cd zeta_complex(cd s) { return detail::zeta_any(s, s); }

// zeta with first and second derivative at s, in one differentiated pass.
inline Jet zeta_jets(cd s) { return detail::zeta_any(Jet::var(s), s); }

inline cd zeta_derivative(cd s, int order) {
    if (order != 1 && order != 2)
        throw std::invalid_argument("zeta_derivative: order must be 1 or 2");
    const Jet j = zeta_jets(s);
    return order == 1 ? j.d1 : j.d2;
}

inline cd gamma_complex(cd s) { return detail::gamma_any(s, s); }

// chi(s) with zeta(s) = chi(s) zeta(1-s); the functional-equation factor.
inline cd zeta_functional_chi(cd s) {
    using detail::kPi;
    return std::exp(s * std::log(2.0)) * std::exp((s - 1.0) * std::log(kPi)) *
           std::sin(kPi / 2.0 * s) * gamma_complex(1.0 - s);
}

// Real digamma; asymptotic series after shifting the argument above 10.
inline double digamma(double x) {
    if (x <= 0.0 && x == std::floor(x))
        throw std::domain_error("digamma: pole at nonpositive integer");
    double out = 0.0;
    if (x < 0.0) {
        // psi(x) = psi(1-x) - pi cot(pi x)
        out -= detail::kPi / std::tan(detail::kPi * x);
        x = 1.0 - x;
    }
    while (x < 10.0) {
        out -= 1.0 / x;
        x += 1.0;
    }
    static const double c[7] = {1.0 / 12,  -1.0 / 120,    1.0 / 252, -1.0 / 240,
                                1.0 / 132, -691.0 / 32760, 1.0 / 12};
    out += std::log(x) - 0.5 / x;
    const double x2 = 1.0 / (x * x);
    double p = x2;
    for (int k = 0; k < 7; ++k) {
        out -= c[k] * p;
        p *= x2;
    }
    return out;
}

// Ordered positive ordinates t_k of zeros 1/2 + i t_k.
struct ZeroTable {
    std::vector<double> ordinates;
    std::string source;
};

// One decimal ordinate per line; '#' starts a comment.  The table must be
// strictly increasing and positive.
inline ZeroTable load_zeros(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_zeros: cannot open " + path);
    ZeroTable t;
    t.source = path;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double v;
        if (!(ls >> v)) {
            std::string rest;
            ls.clear();
            ls >> rest;
            if (!rest.empty())
                throw std::runtime_error("load_zeros: parse failure at line " +
                                         std::to_string(lineno));
            continue;  // blank or comment-only line
        }
        std::string tail;
        if (ls >> tail)
            throw std::runtime_error("load_zeros: trailing junk at line " +
                                     std::to_string(lineno));
        if (v <= 0.0)
            throw std::runtime_error("load_zeros: ordinates must be positive");
        if (!t.ordinates.empty() && v <= t.ordinates.back())
            throw std::runtime_error(
                "load_zeros: ordinates must be strictly increasing (line " +
                std::to_string(lineno) + ")");
        t.ordinates.push_back(v);
    }
    if (t.ordinates.empty())
        throw std::runtime_error("load_zeros: no ordinates in " + path);
    return t;
}

// Residue data at s = -n of Gamma(s) zeta(s+1) zeta(s)/zeta(2s) y^s:
// the residue is (c1(n) log y + c2(n)) y^{-n}.  At n >= 2 one of
// zeta(1-n), zeta(-n) vanishes and the formal bracket collapses to the
// limiting product zeta * (zeta'/zeta) -> zeta'; the expansion below is the
// epsilon-series of the integrand, so those limits are already built in.
inline std::pair<double, double> trivial_coeffs(int n) {
    if (n < 1) throw std::invalid_argument("trivial_coeffs: n >= 1");
    const Jet z2n = zeta_jets(cd(-2.0 * n, 0.0));
    const double zp = z2n.d1.real();   // zeta'(-2n)
    const double zpp = z2n.d2.real();  // zeta''(-2n)
    double fact = 1.0;
    for (int j = 2; j <= n; ++j) fact *= j;
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    const double pref = sign / (2.0 * fact * zp);

    const Jet ja = zeta_jets(cd(1.0 - n, 0.0));
    const Jet jb = zeta_jets(cd(-static_cast<double>(n), 0.0));
    // Trivial zeros are exact: zeta(1-n) = 0 for odd n >= 3, zeta(-n) = 0
    // for even n.
    const double A = (n >= 3 && n % 2 == 1) ? 0.0 : ja.f.real();
    const double B = (n % 2 == 0) ? 0.0 : jb.f.real();
    const double Ap = ja.d1.real();
    const double Bp = jb.d1.real();

    const double c1 = pref * A * B;
    const double bracket0 = digamma(n + 1.0) - zpp / zp;
    const double c2 = pref * (A * B * bracket0 + Ap * B + A * Bp);
    return {c1, c2};
}

namespace detail {

inline cd y_of(double X, double theta) {
    return cd(X, 0.0) / cd(1.0, -2.0 * kPi * X * theta);
}

}  // namespace detail

// Delta = (1 + 4 pi^2 X^2 theta^2)^{-1/2}; the formula needs X Delta^3 >= 1.
inline double x_delta_cubed(double X, double theta) {
    const double d2 = 1.0 + 4.0 * detail::kPi * detail::kPi * X * X * theta * theta;
    return X / (d2 * std::sqrt(d2));
}

// theta(X) with X Delta^3 = 1 exactly.
inline double theta_for_x(double X) {
    const double v = std::pow(X, -4.0 / 3.0) - std::pow(X, -2.0);
    return std::sqrt(std::max(0.0, v)) / (2.0 * detail::kPi);
}

// Leading term y + log(y / 2 pi), y = X / (1 - 2 pi i X theta).
inline cd phi20(double X, double theta) {
    const cd y = detail::y_of(X, theta);
    return y + std::log(y) - std::log(2.0 * detail::kPi);
}

// Evaluator caching the per-zero constants
//   C_k = Gamma(w/2) zeta(1+w/2) zeta(w/2) / (2 zeta'(w)),  w = 1/2 + i t_k;
// the conjugate zero contributes with conj(C_k) and y^{conj(w)/2}.
struct ExplicitFormula {
    ZeroTable zeros;
    std::vector<cd> zero_coeff;
    std::vector<std::pair<double, double>> trivial_cs;

    explicit ExplicitFormula(ZeroTable z, int max_trivial = 8)
        : zeros(std::move(z)) {
        zero_coeff.reserve(zeros.ordinates.size());
        for (const double t : zeros.ordinates) {
            const cd w(0.5, t);
            const cd num = gamma_complex(w / 2.0) * zeta_complex(1.0 + w / 2.0) *
                           zeta_complex(w / 2.0);
            zero_coeff.push_back(num / (2.0 * zeta_derivative(w, 1)));
        }
        trivial_cs.reserve(max_trivial);
        for (int n = 1; n <= max_trivial; ++n)
            trivial_cs.push_back(trivial_coeffs(n));
    }

    cd phi2(double X, double theta, int t_count, int n_trivial) const {
        if (t_count < 0 ||
            t_count > static_cast<int>(zeros.ordinates.size()))
            throw std::invalid_argument("phi2: zeros table too small");
        if (n_trivial < 0 || n_trivial > static_cast<int>(trivial_cs.size()))
            throw std::invalid_argument("phi2: trivial series too short");
        const cd y = detail::y_of(X, theta);
        const cd ly = std::log(y);
        kahan_complex acc;
        acc.add(y);
        acc.add(ly - std::log(2.0 * detail::kPi));
        for (int k = 0; k < t_count; ++k) {
            const cd w(0.5, zeros.ordinates[k]);
            acc.add(zero_coeff[k] * std::exp(w / 2.0 * ly));
            acc.add(std::conj(zero_coeff[k]) * std::exp(std::conj(w) / 2.0 * ly));
        }
        for (int n = 1; n <= n_trivial; ++n) {
            const auto [c1, c2] = trivial_cs[n - 1];
            acc.add((c1 * ly + c2) * std::exp(-static_cast<double>(n) * ly));
        }
        return acc.value();
    }
};

inline cd phi2_explicit(double X, double theta, int t_count, int n_trivial,
                        const ZeroTable& zeros) {
    return ExplicitFormula(zeros, std::max(1, n_trivial)).phi2(X, theta, t_count, n_trivial);
}

// Phi_1(X, theta, J, N) = sum_{j<=J} sum_{n<=N} |mu(n)|/j e^{-jn(1/X - 2 pi i theta)}.
inline cd phi1_arithmetic(double X, double theta, int J, int N,
                          const ArithTable& mu_abs) {
    if (N > static_cast<int>(mu_abs.limit))
        throw std::invalid_argument("phi1_arithmetic: N exceeds the mu table");
    if (J < 1 || N < 1) throw std::invalid_argument("phi1_arithmetic: J, N >= 1");
    const auto value = chunked_map_reduce<cd>(
        static_cast<std::uint64_t>(J), 16, cd(0.0, 0.0),
        [&](std::uint64_t lo, std::uint64_t hi) {
            kahan_complex acc;
            for (std::uint64_t j = lo; j <= hi; ++j) {
                const double jd = static_cast<double>(j);
                const cd wj = std::polar(std::exp(-jd / X),
                                         2.0 * detail::kPi * jd * theta);
                cd z(1.0, 0.0);
                kahan_complex inner;
                for (int n = 1; n <= N; ++n) {
                    z *= wj;
                    if (mu_abs.ival[n]) inner.add(z);
                }
                acc.add(inner.value() / jd);
            }
            return acc.value();
        },
        [](cd a, cd b) { return a + b; });
    return value;
}

// One evaluation of both sides of the formula at (X, theta), with the
// truncation parameters and the X Delta^3 >= 1 applicability flag.
struct ExplicitEval {
    double X = 0.0;
    double theta = 0.0;
    int J = 0;
    int N_arith = 0;
    int T_count = 0;
    int N_trivial = 0;
    cd phi1{0.0, 0.0};
    cd phi2{0.0, 0.0};
    cd phi20{0.0, 0.0};
    bool xdelta3_ok = false;
};

inline ExplicitEval explicit_eval(double X, double theta, int J, int N_arith,
                                  int t_count, int n_trivial,
                                  const ExplicitFormula& ef,
                                  const ArithTable& mu_abs) {
    ExplicitEval e;
    e.X = X;
    e.theta = theta;
    e.J = J;
    e.N_arith = N_arith;
    e.T_count = t_count;
    e.N_trivial = n_trivial;
    e.phi1 = phi1_arithmetic(X, theta, J, N_arith, mu_abs);
    e.phi2 = ef.phi2(X, theta, t_count, n_trivial);
    e.phi20 = phi20(X, theta);
    e.xdelta3_ok = x_delta_cubed(X, theta) >= 1.0 - 1e-12;
    return e;
}

}  // namespace esum
