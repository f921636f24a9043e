#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <random>

#include <mpfr.h>

#include "blowup/interval.hpp"

using namespace blowup;

namespace {

// Directed-rounding oracle in 53-bit mpfr with double exponent range
// and gradual underflow, so results equal true IEEE directed rounding.
struct MpfrEnv {
    MpfrEnv() {
        mpfr_set_emin(-1073);
        mpfr_set_emax(1024);
    }
};
const MpfrEnv mpfr_env;

enum class Op { Add, Sub, Mul, Div };

double oracle(double a, double b, Op op, mpfr_rnd_t rnd) {
    mpfr_t x, y, r;
    mpfr_inits2(53, x, y, r, (mpfr_ptr)0);
    mpfr_set_d(x, a, MPFR_RNDN);
    mpfr_set_d(y, b, MPFR_RNDN);
    int t = 0;
    switch (op) {
        case Op::Add: t = mpfr_add(r, x, y, rnd); break;
        case Op::Sub: t = mpfr_sub(r, x, y, rnd); break;
        case Op::Mul: t = mpfr_mul(r, x, y, rnd); break;
        case Op::Div: t = mpfr_div(r, x, y, rnd); break;
    }
    t = mpfr_check_range(r, t, rnd);
    mpfr_subnormalize(r, t, rnd);
    double out = mpfr_get_d(r, rnd);
    mpfr_clears(x, y, r, (mpfr_ptr)0);
    return out;
}

double oracle_sqrt(double a, mpfr_rnd_t rnd) {
    mpfr_t x, r;
    mpfr_inits2(53, x, r, (mpfr_ptr)0);
    mpfr_set_d(x, a, MPFR_RNDN);
    int t = mpfr_sqrt(r, x, rnd);
    t = mpfr_check_range(r, t, rnd);
    mpfr_subnormalize(r, t, rnd);
    double out = mpfr_get_d(r, rnd);
    mpfr_clears(x, r, (mpfr_ptr)0);
    return out;
}

double oracle_pow(double a, long k, mpfr_rnd_t rnd) {
    mpfr_t x, r;
    mpfr_inits2(53, x, r, (mpfr_ptr)0);
    mpfr_set_d(x, a, MPFR_RNDN);
    int t = mpfr_pow_si(r, x, k, rnd);
    t = mpfr_check_range(r, t, rnd);
    mpfr_subnormalize(r, t, rnd);
    double out = mpfr_get_d(r, rnd);
    mpfr_clears(x, r, (mpfr_ptr)0);
    return out;
}

// Optimal enclosure of { x^k : x in X }.
Interval oracle_pow_range(const Interval& X, int k) {
    if (k == 0) return Interval(1.0);
    double l = X.lo(), h = X.hi();
    if (k % 2 == 1 || l >= 0.0)
        return Interval(oracle_pow(l, k, MPFR_RNDD), oracle_pow(h, k, MPFR_RNDU));
    if (h <= 0.0)
        return Interval(oracle_pow(h, k, MPFR_RNDD), oracle_pow(l, k, MPFR_RNDU));
    return Interval(0.0, std::max(oracle_pow(l, k, MPFR_RNDU), oracle_pow(h, k, MPFR_RNDU)));
}

double step_down(double v, int n) {
    while (n-- > 0) v = std::nextafter(v, -std::numeric_limits<double>::infinity());
    return v;
}

double step_up(double v, int n) {
    while (n-- > 0) v = std::nextafter(v, std::numeric_limits<double>::infinity());
    return v;
}

// True directed interval endpoints for the four basic operations.
Interval oracle_op(const Interval& X, const Interval& Y, Op op) {
    if (op == Op::Add)
        return Interval(oracle(X.lo(), Y.lo(), op, MPFR_RNDD),
                        oracle(X.hi(), Y.hi(), op, MPFR_RNDU));
    if (op == Op::Sub)
        return Interval(oracle(X.lo(), Y.hi(), op, MPFR_RNDD),
                        oracle(X.hi(), Y.lo(), op, MPFR_RNDU));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double a : {X.lo(), X.hi()})
        for (double b : {Y.lo(), Y.hi()}) {
            lo = std::min(lo, oracle(a, b, op, MPFR_RNDD));
            hi = std::max(hi, oracle(a, b, op, MPFR_RNDU));
        }
    return Interval(lo, hi);
}

// ours must contain the optimal endpoints and overshoot by at most one ulp.
void check_endpoints(const Interval& ours, const Interval& best) {
    CHECK(ours.lo() <= best.lo());
    CHECK(ours.hi() >= best.hi());
    CHECK(ours.lo() >= std::nextafter(best.lo(), -std::numeric_limits<double>::infinity()));
    CHECK(ours.hi() <= std::nextafter(best.hi(), std::numeric_limits<double>::infinity()));
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}

    // moderate exponents, always finite
    double moderate() {
        std::uniform_real_distribution<double> mant(-1.0, 1.0);
        std::uniform_int_distribution<int> expo(-30, 30);
        return std::ldexp(mant(gen), expo(gen));
    }

    // raw bit patterns, rejecting nan/inf: exercises subnormal and huge
    // magnitudes
    double wild() {
        for (;;) {
            std::uint64_t bits = gen();
            double v;
            std::memcpy(&v, &bits, sizeof v);
            if (std::isfinite(v)) return v;
        }
    }

    Interval interval(bool wild_tail) {
        double a = wild_tail ? wild() : moderate();
        double b = wild_tail ? wild() : moderate();
        if (a > b) std::swap(a, b);
        return Interval(a, b);
    }
};

} // namespace

TEST_SUITE("interval") {

    TEST_CASE("exact operations stay exact") {
        CHECK(Interval(1.0, 2.0) + Interval(3.0, 4.0) == Interval(4.0, 6.0));
        CHECK(Interval(1.0, 2.0) - Interval(0.5, 1.0) == Interval(0.0, 1.5));
        CHECK(Interval(1.5, 2.5) * Interval(2.0) == Interval(3.0, 5.0));
        CHECK(Interval(3.0, 6.0) / Interval(2.0) == Interval(1.5, 3.0));
        CHECK(sqrt(Interval(4.0, 9.0)) == Interval(2.0, 3.0));
        CHECK(int_pow(Interval(-2.0, 3.0), 2) == Interval(0.0, 9.0));
        CHECK(int_pow(Interval(-2.0, 3.0), 3) == Interval(-8.0, 27.0));
    }

    TEST_CASE("endpoint arithmetic matches directed rounding") {
        Rng rng(0x1234abcd5678ef01ull);
        for (int it = 0; it < 20000; ++it) {
            const bool wild = (it % 4 == 3);
            Interval X = rng.interval(wild);
            Interval Y = rng.interval(wild);
            check_endpoints(X + Y, oracle_op(X, Y, Op::Add));
            check_endpoints(X - Y, oracle_op(X, Y, Op::Sub));
            check_endpoints(X * Y, oracle_op(X, Y, Op::Mul));
            if (!Y.contains(0.0)) check_endpoints(X / Y, oracle_op(X, Y, Op::Div));
        }
    }

    TEST_CASE("sqrt matches directed rounding") {
        Rng rng(0x9e3779b97f4a7c15ull);
        for (int it = 0; it < 20000; ++it) {
            double a = std::fabs(it % 3 == 0 ? rng.wild() : rng.moderate());
            double b = std::fabs(it % 3 == 0 ? rng.wild() : rng.moderate());
            if (a > b) std::swap(a, b);
            Interval r = sqrt(Interval(a, b));
            Interval best(oracle_sqrt(a, MPFR_RNDD), oracle_sqrt(b, MPFR_RNDU));
            check_endpoints(r, best);
        }
    }

    TEST_CASE("inclusion monotonicity under widening") {
        Rng rng(0xc0ffee1234567890ull);
        for (int it = 0; it < 10000; ++it) {
            Interval X = rng.interval(it % 5 == 4);
            Interval Y = rng.interval(it % 5 == 4);
            std::uniform_real_distribution<double> wid(0.0, 1.0);
            Interval Xw = X.widened(wid(rng.gen) * 1e-3 * (1.0 + X.mag()));
            Interval Yw = Y.widened(wid(rng.gen) * 1e-3 * (1.0 + Y.mag()));
            CHECK(Xw.contains(X));
            CHECK(Yw.contains(Y));
            CHECK((Xw + Yw).contains(X + Y));
            CHECK((Xw - Yw).contains(X - Y));
            CHECK((Xw * Yw).contains(X * Y));
            if (!Yw.contains(0.0)) CHECK((Xw / Yw).contains(X / Y));
            CHECK(Interval::hull(Xw, Yw).contains(Interval::hull(X, Y)));
        }
    }

    TEST_CASE("point samples stay inside") {
        Rng rng(0x5555333311117777ull);
        std::uniform_real_distribution<double> t01(0.0, 1.0);
        for (int it = 0; it < 10000; ++it) {
            Interval X = rng.interval(false);
            Interval Y = rng.interval(false);
            double x = X.lo() + t01(rng.gen) * (X.hi() - X.lo());
            double y = Y.lo() + t01(rng.gen) * (Y.hi() - Y.lo());
            if (!std::isfinite(x)) x = X.lo();
            if (!std::isfinite(y)) y = Y.lo();
            CHECK((X + Y).contains(oracle(x, y, Op::Add, MPFR_RNDN)));
            CHECK((X - Y).contains(oracle(x, y, Op::Sub, MPFR_RNDN)));
            CHECK((X * Y).contains(oracle(x, y, Op::Mul, MPFR_RNDN)));
            if (!Y.contains(0.0)) CHECK((X / Y).contains(oracle(x, y, Op::Div, MPFR_RNDN)));
        }
    }

    TEST_CASE("integer powers enclose the true range tightly") {
        Rng rng(0xfeedface12345678ull);
        for (int it = 0; it < 2000; ++it) {
            Interval X = rng.interval(it % 5 == 0);
            for (int k = 0; k <= 8; ++k) {
                Interval p = int_pow(X, k);
                Interval best = oracle_pow_range(X, k);
                CHECK(p.lo() <= best.lo());
                CHECK(p.hi() >= best.hi());
                // a handful of directed multiplications per endpoint
                CHECK(p.lo() >= step_down(best.lo(), 4 * k + 1));
                CHECK(p.hi() <= step_up(best.hi(), 4 * k + 1));
            }
        }
        CHECK(int_pow(Interval(-3.0, 2.0), 2) == Interval(0.0, 9.0));
        CHECK(int_pow(Interval(2.0), 10) == Interval(1024.0));
        CHECK(int_pow(Interval(0.0), 0) == Interval(1.0));
        CHECK_THROWS_AS(int_pow(Interval(1.0, 2.0), -1), DomainError);
    }

    TEST_CASE("midpoint radius magnitude mignitude") {
        Rng rng(0xabcdef0102030405ull);
        for (int it = 0; it < 5000; ++it) {
            Interval X = rng.interval(it % 7 == 0);
            double m = X.mid();
            CHECK(m >= X.lo());
            CHECK(m <= X.hi());
            CHECK(X.rad() >= 0.0);
            CHECK(m + X.rad() >= X.hi());
            CHECK(m - X.rad() <= X.lo());
            CHECK(X.mag() >= std::fabs(m));
            if (!X.contains(0.0)) CHECK(X.mig() > 0.0);
        }
    }

    TEST_CASE("invalid constructions throw") {
        CHECK_THROWS_AS(Interval(2.0, 1.0), DomainError);
        CHECK_THROWS_AS(Interval(std::nan("")), DomainError);
        CHECK_THROWS_AS(Interval(1.0, 2.0) / Interval(-1.0, 1.0), DomainError);
        CHECK_THROWS_AS(sqrt(Interval(-1.0, 1.0)), DomainError);
        CHECK_THROWS_AS(Interval::intersect(Interval(0.0, 1.0), Interval(2.0, 3.0)),
                        DomainError);
    }

    TEST_CASE("string round trip") {
        Rng rng(0x0102030405060708ull);
        for (int it = 0; it < 1000; ++it) {
            Interval X = rng.interval(it % 2 == 0);
            Interval Y = interval_from_string(to_string(X));
            CHECK(X == Y);
        }
        CHECK(interval_from_string("1.5") == Interval(1.5));
    }

    TEST_CASE("scalar interval newton finds sqrt2") {
        auto f = [](const Interval& x) { return x * x - Interval(2.0); };
        auto df = [](const Interval& x) { return Interval(2.0) * x; };
        Interval root = interval_newton_scalar(f, df, Interval(1.0, 2.0), 1e-14);
        CHECK(root.contains(std::sqrt(2.0)));
        CHECK(root.width() <= 1e-13);
    }
}
