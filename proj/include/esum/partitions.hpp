#pragma once

// Exact big-integer counts of partitions into squarefree parts (and into
// squares of squarefree parts), the generating sum Phi and its logarithmic
// derivatives, the saddle-point solver x = rho Phi'(rho), the asymptotic
// log-count, and arc-level diagnostics of |Phi(rho e(alpha))|.

#include <gmpxx.h>

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "esum/arith.hpp"
#include "esum/diophantine.hpp"
#include "esum/expsum.hpp"
#include "esum/summation.hpp"

namespace esum {

enum class PartKind { squarefree_parts, squares_of_squarefree_parts };

inline const char* part_kind_name(PartKind k) {
    return k == PartKind::squarefree_parts ? "squarefree" : "squares_of_squarefree";
}

struct PartitionSeries {
    PartKind kind;
    std::uint64_t n_max;
    std::vector<mpz_class> counts;  // counts[n] for n = 0..n_max
};

namespace detail {

constexpr double kPi_part = 3.141592653589793238462643383279503;

// Indicator of the allowed parts on [1, n_max].
inline std::vector<char> allowed_parts(PartKind kind, std::uint64_t n_max) {
    std::vector<char> allowed(n_max + 1, 0);
    if (n_max == 0) return allowed;
    if (kind == PartKind::squarefree_parts) {
        const auto mu = sieve(Fn::mu_abs, n_max);
        for (std::uint64_t d = 1; d <= n_max; ++d)
            allowed[d] = static_cast<char>(mu.ival[d]);
    } else {
        const auto mu = sieve(Fn::mu_abs, std::max<std::uint64_t>(1, isqrt(n_max)));
        for (std::uint64_t k = 1; k * k <= n_max; ++k)
            if (mu.ival[k]) allowed[k * k] = 1;
    }
    return allowed;
}

}  // namespace detail

// c(m) = sum_{d | m} d * w(d) with w the allowed-part indicator; the
// recurrence below is n p(n) = sum_{m=1}^{n} c(m) p(n-m).
inline std::vector<std::uint64_t> partition_weights(PartKind kind,
                                                    std::uint64_t n_max) {
    const auto allowed = detail::allowed_parts(kind, n_max);
    std::vector<std::uint64_t> c(n_max + 1, 0);
    for (std::uint64_t d = 1; d <= n_max; ++d) {
        if (!allowed[d]) continue;
        for (std::uint64_t m = d; m <= n_max; m += d) c[m] += d;
    }
    return c;
}

// Exact counts by the logarithmic-derivative recurrence.  n p(n) is
// accumulated first and the division by n is checked for exactness; a
// failed division means a corrupted recurrence, not a rounding issue.
inline PartitionSeries partition_counts(PartKind kind, std::uint64_t n_max) {
    PartitionSeries out{kind, n_max, {}};
    out.counts.resize(n_max + 1);
    out.counts[0] = 1;
    if (n_max == 0) return out;
    const auto c = partition_weights(kind, n_max);
    auto& p = out.counts;

    // A helper thread takes the upper m-range for large rows.  Integer
    // addition commutes exactly, so the split cannot change results.
    const bool with_helper = worker_count() >= 2 && n_max >= 8192;
    std::atomic<std::uint64_t> task_n{0};
    std::atomic<int> cmd{0};  // 0 idle, 1 row ready, 2 shut down
    mpz_class helper_acc;
    std::thread helper;
    if (with_helper) {
        helper = std::thread([&] {
            mpz_class local;
            for (;;) {
                const int k = cmd.load(std::memory_order_acquire);
                if (k == 0) {
                    std::this_thread::yield();
                    continue;
                }
                if (k == 2) return;
                const std::uint64_t n = task_n.load(std::memory_order_relaxed);
                const std::uint64_t split = (n * 37) / 100;
                local = 0;
                for (std::uint64_t m = split + 1; m <= n; ++m)
                    if (c[m])
                        mpz_addmul_ui(local.get_mpz_t(), p[n - m].get_mpz_t(),
                                      static_cast<unsigned long>(c[m]));
                helper_acc = local;
                cmd.store(0, std::memory_order_release);
            }
        });
    }

    mpz_class acc;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        acc = 0;
        if (with_helper && n >= 4096) {
            task_n.store(n, std::memory_order_relaxed);
            cmd.store(1, std::memory_order_release);
            const std::uint64_t split = (n * 37) / 100;
            for (std::uint64_t m = 1; m <= split; ++m)
                if (c[m])
                    mpz_addmul_ui(acc.get_mpz_t(), p[n - m].get_mpz_t(),
                                  static_cast<unsigned long>(c[m]));
            while (cmd.load(std::memory_order_acquire) != 0) {}
            acc += helper_acc;
        } else {
            for (std::uint64_t m = 1; m <= n; ++m)
                if (c[m])
                    mpz_addmul_ui(acc.get_mpz_t(), p[n - m].get_mpz_t(),
                                  static_cast<unsigned long>(c[m]));
        }
        if (!mpz_divisible_ui_p(acc.get_mpz_t(), static_cast<unsigned long>(n))) {
            if (with_helper) {
                cmd.store(2, std::memory_order_release);
                helper.join();
            }
            throw std::logic_error("partition_counts: n does not divide n*p(n)");
        }
        mpz_divexact_ui(p[n].get_mpz_t(), acc.get_mpz_t(),
                        static_cast<unsigned long>(n));
    }
    if (with_helper) {
        cmd.store(2, std::memory_order_release);
        helper.join();
    }
    return out;
}

inline double log_count(const mpz_class& v) {
    if (v <= 0) throw std::invalid_argument("log_count: positive counts only");
    long e = 0;
    const double m = mpz_get_d_2exp(&e, v.get_mpz_t());
    return std::log(m) + static_cast<double>(e) * 0.6931471805599453094172321;
}

struct TruncationInfo {
    std::uint64_t max_jn = 0;
    std::uint64_t j_max = 0;
};

namespace detail {

inline std::shared_ptr<const ArithTable> mu_abs_cache(std::uint64_t limit) {
    static std::mutex mtx;
    static std::shared_ptr<const ArithTable> cached;
    std::lock_guard<std::mutex> lock(mtx);
    if (!cached || cached->limit < limit) {
        std::uint64_t cap = 1024;
        while (cap < limit) cap *= 2;
        cached = std::make_shared<const ArithTable>(sieve(Fn::mu_abs, cap));
    }
    return cached;
}

// Sieve capacity for the double sums: generous upper bound on the largest
// jn with (jn)^m e^{-jn/X} above tol * (sum scale X^{m+1}).
inline std::uint64_t phi_sieve_bound(int m, double X, double tol) {
    const double sum_scale = std::max(1.0, std::pow(X, m + 1));
    const double L = std::log(sum_scale / tol) + 8.0 * (m + 1) + 16.0;
    return static_cast<std::uint64_t>(std::ceil(X * L)) + 16;
}

}  // namespace detail

// Phi_(m)(rho) = sum_{j,n} (jn)^m |mu(n)| rho^{jn} / j at rho = e^{-1/X}.
// The n-loop stops once jn/X > log(partial_sum / tol); the cut is recorded.
inline double phi_derivative(int m, double X_param, double tol,
                             TruncationInfo* info = nullptr) {
    if (m < 0 || m > 2) throw std::invalid_argument("phi_derivative: m in {0,1,2}");
    if (X_param <= 0.0) throw std::invalid_argument("phi_derivative: X > 0");
    if (tol <= 0.0 || tol >= 0.1)
        throw std::invalid_argument("phi_derivative: tol in (0, 0.1)");
    const std::uint64_t nmax = detail::phi_sieve_bound(m, X_param, tol);
    const auto tab = detail::mu_abs_cache(nmax);

    kahan_sum<double> total;
    TruncationInfo tr;
    for (std::uint64_t j = 1;; ++j) {
        if (j > 1) {
            const double cut = X_param * std::log(std::max(total.value(), 1e-300) / tol);
            if (static_cast<double>(j) > cut) break;
        }
        const double r = std::exp(-static_cast<double>(j) / X_param);
        const double inv_j = 1.0 / static_cast<double>(j);
        double z = 1.0;
        std::uint64_t n = 0;
        for (;;) {
            ++n;
            z *= r;
            if ((n & 4095) == 0)
                z = std::exp(-static_cast<double>(j * n) / X_param);
            if (n > tab->limit) break;  // below tol by construction
            const double jn = static_cast<double>(j) * static_cast<double>(n);
            if (tab->ival[n]) {
                double term = z * inv_j;
                if (m == 1) term *= jn;
                if (m == 2) term *= jn * jn;
                total.add(term);
            }
            const double cut = X_param * std::log(std::max(total.value(), 1e-300) / tol);
            if (jn > cut) break;
        }
        tr.max_jn = std::max<std::uint64_t>(tr.max_jn, j * n);
        tr.j_max = j;
    }
    if (info) *info = tr;
    return total.value();
}

// Phi(rho e(alpha)) by the same truncation rule, applied to term moduli.
inline std::complex<double> phi_on_circle(double alpha, double X_param,
                                          double tol) {
    if (X_param <= 0.0) throw std::invalid_argument("phi_on_circle: X > 0");
    if (tol <= 0.0 || tol >= 0.1)
        throw std::invalid_argument("phi_on_circle: tol in (0, 0.1)");
    const std::uint64_t nmax = detail::phi_sieve_bound(0, X_param, tol);
    const auto tab = detail::mu_abs_cache(nmax);

    kahan_complex value;
    kahan_sum<double> scale;  // running sum of |terms| driving the cutoff
    for (std::uint64_t j = 1;; ++j) {
        if (j > 1) {
            const double cut = X_param * std::log(std::max(scale.value(), 1e-300) / tol);
            if (static_cast<double>(j) > cut) break;
        }
        const double r = std::exp(-static_cast<double>(j) / X_param);
        const double inv_j = 1.0 / static_cast<double>(j);
        const std::complex<double> w = std::polar(
            r, detail::kTwoPi * detail::frac_prod(alpha, static_cast<double>(j)));
        std::complex<double> z(1.0, 0.0);
        std::uint64_t n = 0;
        for (;;) {
            ++n;
            z *= w;
            if ((n & 4095) == 0)
                z = std::polar(
                    std::exp(-static_cast<double>(j * n) / X_param),
                    detail::kTwoPi *
                        detail::frac_prod(alpha, static_cast<double>(j * n)));
            if (n > tab->limit) break;
            const double jn = static_cast<double>(j) * static_cast<double>(n);
            if (tab->ival[n]) {
                value.add(z * inv_j);
                scale.add(std::abs(z) * inv_j);
            }
            const double cut = X_param * std::log(std::max(scale.value(), 1e-300) / tol);
            if (jn > cut) break;
        }
    }
    return value.value();
}

struct SaddleState {
    double x = 0.0;        // target of x = rho Phi'(rho)
    double X_param = 0.0;  // rho = e^{-1/X}
    double rho = 0.0;
    double phi = 0.0;   // Phi(rho)
    double phi1 = 0.0;  // rho Phi'(rho)
    double phi2 = 0.0;  // (rho d/drho)^2 Phi(rho)
};

// Solves x = rho Phi'(rho) for X in [1, 4 sqrt(x)] by bisection; rho Phi' is
// strictly increasing in X.
inline SaddleState solve_saddle(double x) {
    if (x < 1.0) throw std::invalid_argument("solve_saddle: x >= 1");
    constexpr double tol = 1e-13;
    double lo = 1.0, hi = 4.0 * std::sqrt(x) + 4.0;
    const double f_lo = phi_derivative(1, lo, tol) - x;
    const double f_hi = phi_derivative(1, hi, tol) - x;
    if (f_lo > 0.0 || f_hi < 0.0)
        throw std::runtime_error(
            "solve_saddle: bracket failure on [" + std::to_string(lo) + ", " +
            std::to_string(hi) + "], residuals " + std::to_string(f_lo) + ", " +
            std::to_string(f_hi));
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * lo; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (phi_derivative(1, mid, tol) < x)
            lo = mid;
        else
            hi = mid;
    }
    SaddleState s;
    s.x = x;
    s.X_param = 0.5 * (lo + hi);
    s.rho = std::exp(-1.0 / s.X_param);
    s.phi = phi_derivative(0, s.X_param, tol);
    s.phi1 = phi_derivative(1, s.X_param, tol);
    s.phi2 = phi_derivative(2, s.X_param, tol);
    if (std::abs(s.phi1 - x) > 1e-9 * x)
        throw std::runtime_error("solve_saddle: residual above 1e-9 * x");
    return s;
}

struct AsymptoticCount {
    double log_estimate;
    SaddleState saddle;
};

// log of  rho^{-n} Psi(rho) / sqrt(2 pi Phi_(2)(rho))  at the saddle rho(n).
inline AsymptoticCount asymptotic_count(std::uint64_t n) {
    if (n < 2) throw std::invalid_argument("asymptotic_count: n >= 2");
    const auto s = solve_saddle(static_cast<double>(n));
    const double est = static_cast<double>(n) / s.X_param + s.phi -
                       0.5 * std::log(2.0 * detail::kPi_part * s.phi2);
    return {est, s};
}

struct ArcPointMax {
    double alpha = 0.0;
    double abs_phi = 0.0;
    std::int64_t a = 0;
    std::int64_t q = 0;
};

struct UCheck {
    std::int64_t q, l;
    double u_value;
    double main_term;
    double rel_gap;
};

struct ArcReport {
    double X_param = 0.0;
    double A = 0.0;
    int grid = 0;
    double phi_rho = 0.0;
    int n_principal = 0, n_major = 0, n_minor = 0, n_overlap = 0;
    ArcPointMax principal_max, major_max, minor_max;
    double three_quarter_threshold = 0.0;  // (3/4) Phi(rho)
    double minor_lemma_threshold = 0.0;    // X (log X)^{10 - A/4}
    double xq_at_major_argmax = 0.0;       // X/q at the non-principal argmax
    std::vector<UCheck> u_checks;
};

// U(gamma, l, q) = sum_{n = l mod q} |mu(n)| e^{-n gamma} against its main
// term 1 / (zeta(2) phi(q) prod_{p|q}(1+1/p) gamma).
inline UCheck u_main_term_check(double gamma, std::int64_t q, std::int64_t l) {
    const auto nmax =
        static_cast<std::uint64_t>(std::ceil(40.0 / gamma)) + 16;
    const auto tab = detail::mu_abs_cache(nmax);
    kahan_sum<double> u;
    for (std::uint64_t n = static_cast<std::uint64_t>(l); n <= nmax;
         n += static_cast<std::uint64_t>(q))
        if (tab->ival[n]) u.add(std::exp(-static_cast<double>(n) * gamma));
    const double zeta2 = detail::kPi_part * detail::kPi_part / 6.0;
    double local = 1.0;
    std::uint64_t mq = static_cast<std::uint64_t>(q);
    for (std::uint64_t p = 2; p * p <= mq; ++p) {
        if (mq % p) continue;
        while (mq % p == 0) mq /= p;
        local *= 1.0 + 1.0 / static_cast<double>(p);
    }
    if (mq > 1) local *= 1.0 + 1.0 / static_cast<double>(mq);
    const double main =
        1.0 / (zeta2 * static_cast<double>(euler_phi(q)) * local * gamma);
    return {q, l, u.value(), main, std::abs(u.value() - main) / main};
}

// Evaluates |Phi(rho e(alpha))| on a uniform grid of [-1/2, 1/2), classifies
// every point, and reports per-arc maxima next to the lemma-side thresholds.
// This measures; asserting against the thresholds is the caller's business.
inline ArcReport arc_diagnostics(double X_param, double A, int grid) {
    if (grid < 10) throw std::invalid_argument("arc_diagnostics: grid >= 10");
    const ArcDissection d(X_param, A);
    constexpr double tol = 1e-10;

    std::vector<double> abs_phi(grid);
    std::vector<ArcClass> cls(grid);
    detail::mu_abs_cache(detail::phi_sieve_bound(0, X_param, tol));  // warm once
    parallel_chunks(grid, 256, [&](std::uint64_t, std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i) {
            const double alpha =
                -0.5 + static_cast<double>(i) / static_cast<double>(grid);
            abs_phi[i] = std::abs(phi_on_circle(alpha, X_param, tol));
            cls[i] = classify(alpha, d);
        }
    });

    ArcReport rep;
    rep.X_param = X_param;
    rep.A = A;
    rep.grid = grid;
    rep.phi_rho = phi_derivative(0, X_param, tol);
    rep.three_quarter_threshold = 0.75 * rep.phi_rho;
    rep.minor_lemma_threshold =
        X_param * std::pow(std::log(X_param), 10.0 - A / 4.0);
    for (int i = 0; i < grid; ++i) {
        const double alpha =
            -0.5 + static_cast<double>(i) / static_cast<double>(grid);
        ArcPointMax* slot = nullptr;
        switch (cls[i].kind) {
            case ArcKind::principal_major:
                ++rep.n_principal;
                slot = &rep.principal_max;
                break;
            case ArcKind::major:
                ++rep.n_major;
                slot = &rep.major_max;
                break;
            case ArcKind::minor:
                ++rep.n_minor;
                slot = &rep.minor_max;
                break;
        }
        if (cls[i].overlapping) ++rep.n_overlap;
        if (abs_phi[i] > slot->abs_phi) {
            slot->abs_phi = abs_phi[i];
            slot->alpha = alpha;
            slot->a = cls[i].a;
            slot->q = cls[i].q;
        }
    }
    if (rep.major_max.q > 0)
        rep.xq_at_major_argmax = X_param / static_cast<double>(rep.major_max.q);
    const double gamma = 1.0 / X_param;
    for (const auto& [q, l] : std::vector<std::pair<std::int64_t, std::int64_t>>{
             {2, 1}, {3, 1}, {3, 2}, {4, 1}})
        rep.u_checks.push_back(u_main_term_check(gamma, q, l));
    return rep;
}

}  // namespace esum
