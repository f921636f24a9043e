#include "blowup/interval.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace blowup {

namespace {

// Binary exponentiation in interval arithmetic; base may be any sign.
Interval pow_iv(const Interval& base, int k) {
    Interval acc(1.0);
    Interval b = base;
    int e = k;
    while (e > 0) {
        if (e & 1) acc *= b;
        e >>= 1;
        if (e > 0) b *= b;
    }
    return acc;
}

} // namespace

Interval int_pow(const Interval& x, int k) {
    if (k < 0) throw DomainError("int_pow: negative exponent");
    if (k == 0) return Interval(1.0);
    if (k == 1) return x;
    if (k % 2 == 1) {
        // odd powers are increasing
        return Interval(pow_iv(Interval(x.lo()), k).lo(), pow_iv(Interval(x.hi()), k).hi());
    }
    if (x.lo() >= 0.0)
        return Interval(pow_iv(Interval(x.lo()), k).lo(), pow_iv(Interval(x.hi()), k).hi());
    if (x.hi() <= 0.0)
        return Interval(pow_iv(Interval(x.hi()), k).lo(), pow_iv(Interval(x.lo()), k).hi());
    double top = std::max(pow_iv(Interval(x.lo()), k).hi(), pow_iv(Interval(x.hi()), k).hi());
    return Interval(0.0, top);
}

Interval sqrt(const Interval& x) {
    if (x.lo() < 0.0) throw DomainError("sqrt: negative lower endpoint");
    return Interval(detail::sqrt_down(x.lo()), detail::sqrt_up(x.hi()));
}

std::string to_string(const Interval& x) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "[%.17g, %.17g]", x.lo(), x.hi());
    return buf;
}

Interval interval_from_string(const std::string& s) {
    const char* p = s.c_str();
    while (*p == ' ' || *p == '\t') ++p;
    if (*p == '[') {
        ++p;
        char* end = nullptr;
        double lo = std::strtod(p, &end);
        if (end == p) throw DomainError("interval_from_string: bad lower endpoint: " + s);
        p = end;
        while (*p == ' ' || *p == '\t') ++p;
        if (*p != ',') throw DomainError("interval_from_string: expected ',': " + s);
        ++p;
        double hi = std::strtod(p, &end);
        if (end == p) throw DomainError("interval_from_string: bad upper endpoint: " + s);
        p = end;
        while (*p == ' ' || *p == '\t') ++p;
        if (*p != ']') throw DomainError("interval_from_string: expected ']': " + s);
        return Interval(lo, hi);
    }
    char* end = nullptr;
    double v = std::strtod(p, &end);
    if (end == p) throw DomainError("interval_from_string: not a number: " + s);
    return Interval(v);
}

} // namespace blowup
