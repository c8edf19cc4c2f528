#pragma once

// Exact rational arithmetic on int64 (int128 intermediates), used for the
// exponent schedules and bound envelopes.  Denominators there never exceed a
// few hundred, so this never gets near overflow.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace esum {

struct Rat {
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr Rat() = default;
    constexpr Rat(std::int64_t n) : num(n), den(1) {}
    Rat(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw std::invalid_argument("Rat: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(std::abs(num), den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    static Rat from128(__int128 n, __int128 d) {
        if (d == 0) throw std::invalid_argument("Rat: zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 a = n < 0 ? -n : n, b = d;
        while (b) {
            const __int128 t = a % b;
            a = b;
            b = t;
        }
        if (a > 1) {
            n /= a;
            d /= a;
        }
        constexpr __int128 lim = INT64_MAX;
        if (n > lim || n < -lim || d > lim)
            throw std::overflow_error("Rat: exponent arithmetic overflow");
        return Rat{static_cast<std::int64_t>(n), static_cast<std::int64_t>(d), 0};
    }

    double to_double() const {
        return static_cast<double>(num) / static_cast<double>(den);
    }
    std::string str() const {
        return den == 1 ? std::to_string(num)
                        : std::to_string(num) + "/" + std::to_string(den);
    }

    friend Rat operator+(Rat a, Rat b) {
        return from128(static_cast<__int128>(a.num) * b.den +
                           static_cast<__int128>(b.num) * a.den,
                       static_cast<__int128>(a.den) * b.den);
    }
    friend Rat operator-(Rat a, Rat b) {
        return from128(static_cast<__int128>(a.num) * b.den -
                           static_cast<__int128>(b.num) * a.den,
                       static_cast<__int128>(a.den) * b.den);
    }
    friend Rat operator*(Rat a, Rat b) {
        return from128(static_cast<__int128>(a.num) * b.num,
                       static_cast<__int128>(a.den) * b.den);
    }
    friend Rat operator/(Rat a, Rat b) {
        if (b.num == 0) throw std::invalid_argument("Rat: division by zero");
        return from128(static_cast<__int128>(a.num) * b.den,
                       static_cast<__int128>(a.den) * b.num);
    }
    friend Rat operator-(Rat a) { return Rat{-a.num, a.den, 0}; }
    friend bool operator==(Rat a, Rat b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(Rat a, Rat b) { return !(a == b); }
    friend bool operator<(Rat a, Rat b) {
        return static_cast<__int128>(a.num) * b.den <
               static_cast<__int128>(b.num) * a.den;
    }
    friend bool operator<=(Rat a, Rat b) { return a == b || a < b; }

  private:
    constexpr Rat(std::int64_t n, std::int64_t d, int) : num(n), den(d) {}
};

}  // namespace esum
