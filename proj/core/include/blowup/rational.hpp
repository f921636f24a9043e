#pragma once

// Minimal exact fractions over int64, used to assemble model
// coefficients before a single outward rounding into an Interval.
// Intermediate products are checked through __int128.

#include <cstdint>
#include <numeric>

#include "blowup/interval.hpp"

namespace blowup {

struct Rat {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rat() = default;
    Rat(std::int64_t n) : num(n), den(1) {}
    Rat(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw DomainError("Rat: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    static std::int64_t checked(__int128 v) {
        if (v > INT64_MAX || v < INT64_MIN) throw DomainError("Rat: overflow");
        return static_cast<std::int64_t>(v);
    }

    friend Rat operator+(const Rat& a, const Rat& b) {
        __int128 n = static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den;
        __int128 d = static_cast<__int128>(a.den) * b.den;
        return reduced(n, d);
    }
    friend Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }
    friend Rat operator-(const Rat& a) {
        Rat r;
        r.num = -a.num;
        r.den = a.den;
        return r;
    }
    friend Rat operator*(const Rat& a, const Rat& b) {
        __int128 n = static_cast<__int128>(a.num) * b.num;
        __int128 d = static_cast<__int128>(a.den) * b.den;
        return reduced(n, d);
    }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.num == 0) throw DomainError("Rat: division by zero");
        __int128 n = static_cast<__int128>(a.num) * b.den;
        __int128 d = static_cast<__int128>(a.den) * b.num;
        return reduced(n, d);
    }
    friend bool operator==(const Rat& a, const Rat& b) {
        return a.num == b.num && a.den == b.den;
    }

    // gcd-reduce an __int128 fraction back into int64 range
    static Rat reduced(__int128 n, __int128 d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 an = n < 0 ? -n : n;
        __int128 g = gcd128(an, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        Rat r;
        r.num = checked(n);
        r.den = checked(d);
        return r;
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    // One outward rounding: a 1-ulp-per-endpoint enclosure of num/den.
    // Both parts must be exactly representable.
    Interval to_interval() const {
        constexpr std::int64_t exact = std::int64_t(1) << 53;
        if (num > exact || num < -exact || den > exact)
            throw DomainError("Rat: parts too large for exact conversion");
        return Interval(static_cast<double>(num)) / Interval(static_cast<double>(den));
    }
};

} // namespace blowup
