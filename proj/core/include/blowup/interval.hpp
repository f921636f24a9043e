#pragma once

// Outward-rounded interval arithmetic on binary64.
//
// Directed rounding is emulated in round-to-nearest via error-free
// transformations: for +,-,*,/ and sqrt the sign of the exact rounding
// error is recovered (TwoSum / fma residuals) and the affected endpoint
// is moved one ulp outward.  Results equal true directed rounding, so
// exact operations stay exact ([1,2]+[3,4] == [4,6]).  The scheme needs
// no fesetround and is safe under any thread scheduling; it requires
// -ffp-contract=off so the residual fmas are not re-fused.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "blowup/errors.hpp"

namespace blowup {

namespace detail {

inline double next_up(double x) {
    if (x == std::numeric_limits<double>::infinity()) return x;
    return std::nextafter(x, std::numeric_limits<double>::infinity());
}

inline double next_down(double x) {
    if (x == -std::numeric_limits<double>::infinity()) return x;
    return std::nextafter(x, -std::numeric_limits<double>::infinity());
}

// Endpoints after overflow: +inf as an upper bound is kept; +inf as a
// lower bound is relaxed to DBL_MAX (round-to-nearest overflows only
// past the largest finite double, so that bound is still valid).
inline double clamp_lo(double x) {
    if (x == std::numeric_limits<double>::infinity())
        return std::numeric_limits<double>::max();
    return x;
}

inline double clamp_hi(double x) {
    if (x == -std::numeric_limits<double>::infinity())
        return std::numeric_limits<double>::lowest();
    return x;
}

// The fma/TwoSum residual tests are unreliable once values reach the
// subnormal range; below this threshold we nudge unconditionally.
constexpr double kEftFloor = 1e-290;
constexpr double kEftCeil = 1e290;

inline bool eft_safe(double x) {
    double a = std::fabs(x);
    return a == 0.0 || (a > kEftFloor && a < kEftCeil);
}

// Directed sums: rounding error sign from TwoSum.
inline double add_down(double a, double b) {
    double s = a + b;
    if (!std::isfinite(s)) return clamp_lo(s == s ? s : throw DomainError("add: nan"));
    if (!eft_safe(s)) return next_down(s);
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return err < 0.0 ? next_down(s) : s;
}

inline double add_up(double a, double b) {
    double s = a + b;
    if (!std::isfinite(s)) return clamp_hi(s == s ? s : throw DomainError("add: nan"));
    if (!eft_safe(s)) return next_up(s);
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return err > 0.0 ? next_up(s) : s;
}

inline double sub_down(double a, double b) { return add_down(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }

// Directed products: p + fma(a,b,-p) is the exact product.  A product of
// nonzero factors that underflows all the way to zero keeps the sign of
// the exact value, so the bound away from zero is the first subnormal.
inline double mul_down(double a, double b) {
    double p = a * b;
    if (!std::isfinite(p)) {
        if (p == p) return clamp_lo(p);
        // 0 * inf corner of an unbounded set product contributes 0
        if (a == 0.0 || b == 0.0) return 0.0;
        throw DomainError("mul: nan");
    }
    if (p == 0.0 && a != 0.0 && b != 0.0)
        return std::signbit(p) ? next_down(p) : p;
    if (!eft_safe(p)) return next_down(p);
    double err = std::fma(a, b, -p);
    return err < 0.0 ? next_down(p) : p;
}

inline double mul_up(double a, double b) {
    double p = a * b;
    if (!std::isfinite(p)) {
        if (p == p) return clamp_hi(p);
        if (a == 0.0 || b == 0.0) return 0.0;
        throw DomainError("mul: nan");
    }
    if (p == 0.0 && a != 0.0 && b != 0.0)
        return std::signbit(p) ? p : next_up(p);
    if (!eft_safe(p)) return next_up(p);
    double err = std::fma(a, b, -p);
    return err > 0.0 ? next_up(p) : p;
}

// Directed quotients: sign(q - a/b) = sign(q*b - a) * sign(b).
inline double div_down(double a, double b) {
    double q = a / b;
    if (!std::isfinite(q)) return clamp_lo(q == q ? q : throw DomainError("div: nan"));
    if (!eft_safe(q) || !eft_safe(a)) return next_down(q);
    double res = std::fma(q, b, -a);
    bool high = (b > 0.0) ? (res > 0.0) : (res < 0.0);
    return high ? next_down(q) : q;
}

inline double div_up(double a, double b) {
    double q = a / b;
    if (!std::isfinite(q)) return clamp_hi(q == q ? q : throw DomainError("div: nan"));
    if (!eft_safe(q) || !eft_safe(a)) return next_up(q);
    double res = std::fma(q, b, -a);
    bool low = (b > 0.0) ? (res < 0.0) : (res > 0.0);
    return low ? next_up(q) : q;
}

// The guard is on x, not on sqrt(x): for subnormal x the residual
// r*r - x sits below the subnormal range and fma loses its sign.
inline double sqrt_down(double x) {
    double r = std::sqrt(x);
    if (!eft_safe(x)) return r == 0.0 ? 0.0 : next_down(r);
    double err = std::fma(r, r, -x);
    return err > 0.0 ? next_down(r) : r;
}

inline double sqrt_up(double x) {
    double r = std::sqrt(x);
    if (!eft_safe(x)) return r == 0.0 ? 0.0 : next_up(r);
    double err = std::fma(r, r, -x);
    return err < 0.0 ? next_up(r) : r;
}

} // namespace detail

class Interval {
  public:
    Interval() : lo_(0.0), hi_(0.0) {}

    Interval(double point) : lo_(point), hi_(point) {
        if (std::isnan(point)) throw DomainError("Interval: NaN endpoint");
    }

    Interval(double lo, double hi) : lo_(lo), hi_(hi) {
        if (std::isnan(lo) || std::isnan(hi)) throw DomainError("Interval: NaN endpoint");
        if (lo > hi) throw DomainError("Interval: lo > hi");
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }

    double mid() const {
        double m = 0.5 * (lo_ + hi_);
        if (std::isfinite(m)) return m;
        return 0.5 * lo_ + 0.5 * hi_;
    }

    // rad >= hi - mid and mid - lo in exact arithmetic.
    double rad() const {
        double m = mid();
        return std::max(detail::sub_up(hi_, m), detail::sub_up(m, lo_));
    }

    double width() const { return detail::sub_up(hi_, lo_); }

    // mignitude / magnitude
    double mig() const {
        if (contains(0.0)) return 0.0;
        return std::min(std::fabs(lo_), std::fabs(hi_));
    }
    double mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }

    bool contains(double x) const { return lo_ <= x && x <= hi_; }
    bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
    bool strictly_contains(const Interval& o) const { return lo_ < o.lo_ && o.hi_ < hi_; }
    bool intersects(const Interval& o) const { return lo_ <= o.hi_ && o.lo_ <= hi_; }
    bool is_point() const { return lo_ == hi_; }

    Interval operator-() const { return Interval(-hi_, -lo_, unchecked{}); }

    Interval operator+(const Interval& o) const {
        return Interval(detail::add_down(lo_, o.lo_), detail::add_up(hi_, o.hi_), unchecked{});
    }

    Interval operator-(const Interval& o) const {
        return Interval(detail::sub_down(lo_, o.hi_), detail::sub_up(hi_, o.lo_), unchecked{});
    }

    Interval operator*(const Interval& o) const {
        using namespace detail;
        double cand_lo = std::min(std::min(mul_down(lo_, o.lo_), mul_down(lo_, o.hi_)),
                                  std::min(mul_down(hi_, o.lo_), mul_down(hi_, o.hi_)));
        double cand_hi = std::max(std::max(mul_up(lo_, o.lo_), mul_up(lo_, o.hi_)),
                                  std::max(mul_up(hi_, o.lo_), mul_up(hi_, o.hi_)));
        return Interval(cand_lo, cand_hi, unchecked{});
    }

    Interval operator/(const Interval& o) const {
        using namespace detail;
        if (o.contains(0.0)) throw DomainError("Interval division by interval containing 0");
        double cand_lo = std::min(std::min(div_down(lo_, o.lo_), div_down(lo_, o.hi_)),
                                  std::min(div_down(hi_, o.lo_), div_down(hi_, o.hi_)));
        double cand_hi = std::max(std::max(div_up(lo_, o.lo_), div_up(lo_, o.hi_)),
                                  std::max(div_up(hi_, o.lo_), div_up(hi_, o.hi_)));
        return Interval(cand_lo, cand_hi, unchecked{});
    }

    Interval& operator+=(const Interval& o) { return *this = *this + o; }
    Interval& operator-=(const Interval& o) { return *this = *this - o; }
    Interval& operator*=(const Interval& o) { return *this = *this * o; }
    Interval& operator/=(const Interval& o) { return *this = *this / o; }

    bool operator==(const Interval& o) const { return lo_ == o.lo_ && hi_ == o.hi_; }

    // Hull of the absolute value.
    Interval abs() const {
        if (lo_ >= 0.0) return *this;
        if (hi_ <= 0.0) return -*this;
        return Interval(0.0, std::max(-lo_, hi_), unchecked{});
    }

    static Interval hull(const Interval& a, const Interval& b) {
        return Interval(std::min(a.lo_, b.lo_), std::max(a.hi_, b.hi_), unchecked{});
    }

    // Throws DomainError when the intersection is empty.
    static Interval intersect(const Interval& a, const Interval& b) {
        double lo = std::max(a.lo_, b.lo_);
        double hi = std::min(a.hi_, b.hi_);
        if (lo > hi) throw DomainError("Interval::intersect: empty");
        return Interval(lo, hi, unchecked{});
    }

    Interval widened(double delta) const {
        return Interval(detail::sub_down(lo_, delta), detail::add_up(hi_, delta), unchecked{});
    }

  private:
    struct unchecked {};
    Interval(double lo, double hi, unchecked) : lo_(lo), hi_(hi) {}

    double lo_;
    double hi_;

    friend Interval int_pow(const Interval&, int);
    friend Interval sqrt(const Interval&);
};

inline Interval operator+(double a, const Interval& b) { return Interval(a) + b; }
inline Interval operator-(double a, const Interval& b) { return Interval(a) - b; }
inline Interval operator*(double a, const Interval& b) { return Interval(a) * b; }
inline Interval operator/(double a, const Interval& b) { return Interval(a) / b; }
inline Interval operator+(const Interval& a, double b) { return a + Interval(b); }
inline Interval operator-(const Interval& a, double b) { return a - Interval(b); }
inline Interval operator*(const Interval& a, double b) { return a * Interval(b); }
inline Interval operator/(const Interval& a, double b) { return a / Interval(b); }

// x^k by monotonicity cases; even powers land in [0, inf) even when the
// base straddles zero.  k >= 0.
Interval int_pow(const Interval& x, int k);

// Requires x.lo >= 0.
Interval sqrt(const Interval& x);

// "[lo, hi]" with 17 significant digits (round-trip exact).
std::string to_string(const Interval& x);

// Parses the to_string format (and bare numbers as point intervals).
Interval interval_from_string(const std::string& s);

// Scalar interval Newton with midpoint expansion for f with interval
// extension f_iv and derivative df_iv.  Preconditions are verified in
// interval arithmetic: f(lo)*f(hi) < 0 and 0 not in df over the bracket.
// Iterates X <- (mid(X) - f(mid)/df(X)) \cap X until width <= tol;
// throws NoContraction after max_iter (default 100) stalls.
template <typename F, typename DF>
Interval interval_newton_scalar(F&& f_iv, DF&& df_iv, const Interval& bracket,
                                double tol, int max_iter = 100) {
    Interval flo = f_iv(Interval(bracket.lo()));
    Interval fhi = f_iv(Interval(bracket.hi()));
    Interval prod = flo * fhi;
    if (!(prod.hi() < 0.0))
        throw DomainError("interval_newton_scalar: no verified sign change on bracket");
    Interval dfb = df_iv(bracket);
    if (dfb.contains(0.0))
        throw DomainError("interval_newton_scalar: derivative contains 0 on bracket");

    Interval X = bracket;
    for (int it = 0; it < max_iter; ++it) {
        if (X.width() <= tol) return X;
        double m = X.mid();
        Interval fm = f_iv(Interval(m));
        Interval dX = df_iv(X);
        Interval N = Interval(m) - fm / dX;
        X = Interval::intersect(N, X); // nonempty: the zero is in both
    }
    if (X.width() <= tol) return X;
    throw NoContraction("interval_newton_scalar: width " + std::to_string(X.width()) +
                        " above tol after iteration cap");
}

} // namespace blowup
