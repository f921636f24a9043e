#include <doctest.h>

#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "blowup/series.hpp"

using namespace blowup;

namespace {

// dyadic coefficients keep every product and sum exact in binary64
Series random_dyadic(int m, int N, std::mt19937_64& gen) {
    Series s = Series::zero(m, N);
    std::uniform_int_distribution<int> num(-16, 16);
    for (auto& c : s.c) c = Interval(num(gen) / 8.0);
    return s;
}

// reference product by exponent matching
Series brute_product(const Series& a, const Series& b) {
    const MultiIndexTable& ta = mi_table(a.m, a.N);
    const MultiIndexTable& tb = mi_table(b.m, b.N);
    Series out = Series::zero(a.m, a.N + b.N);
    const MultiIndexTable& to = mi_table(a.m, a.N + b.N);
    for (std::size_t i = 0; i < a.c.size(); ++i)
        for (std::size_t j = 0; j < b.c.size(); ++j) {
            MultiIndex sum = ta.exponents(i);
            for (int v = 0; v < a.m; ++v) sum[v] += tb.exponents(j)[v];
            out.c[to.flat_index(sum)] += a.c[i] * b.c[j];
        }
    return out;
}

double mid_eval(const Series& a, const std::vector<double>& th) {
    const MultiIndexTable& tab = mi_table(a.m, a.N);
    double acc = 0.0;
    for (std::size_t t = 0; t < a.c.size(); ++t) {
        double term = a.c[t].mid();
        const MultiIndex& al = tab.exponents(t);
        for (int v = 0; v < a.m; ++v)
            for (int e = 0; e < al[v]; ++e) term *= th[v];
        acc += term;
    }
    return acc;
}

} // namespace

TEST_SUITE("series") {

    TEST_CASE("cauchy product matches brute force exactly") {
        std::mt19937_64 gen(71);
        for (int m = 1; m <= 2; ++m)
            for (int Na = 0; Na <= 5; ++Na)
                for (int Nb = 0; Nb <= 5; ++Nb) {
                    Series a = random_dyadic(m, Na, gen);
                    Series b = random_dyadic(m, Nb, gen);
                    Series p = cauchy_product(a, b);
                    Series ref = brute_product(a, b);
                    REQUIRE(p.N == ref.N);
                    for (std::size_t t = 0; t < ref.c.size(); ++t)
                        CHECK(p.c[t] == ref.c[t]);
                    CHECK(p.tail == Interval(0.0));
                }
    }

    TEST_CASE("product tails cover dropped members") {
        std::mt19937_64 gen(72);
        Series a = random_dyadic(2, 4, gen);
        Series b = random_dyadic(2, 3, gen);
        a.tail = Interval(0.0, 0.25);
        b.tail = Interval(0.0, 0.125);
        Series p = cauchy_product(a, b);
        CHECK(p.tail.hi() > 0.0);
        // the zero-remainder member evaluations stay inside
        std::vector<Interval> th{Interval(0.3), Interval(-0.7)};
        Interval pe = eval_enclosure(p, th);
        double ref = mid_eval(a, {0.3, -0.7}) * mid_eval(b, {0.3, -0.7});
        CHECK(pe.contains(ref));
    }

    TEST_CASE("series_pow equals iterated product") {
        std::mt19937_64 gen(73);
        Series a = random_dyadic(2, 3, gen);
        Series p1 = series_pow(a, 1);
        Series p2 = series_pow(a, 2);
        Series p3 = series_pow(a, 3);
        Series q2 = cauchy_product(a, a);
        Series q3 = cauchy_product(q2, a);
        for (std::size_t t = 0; t < p1.c.size(); ++t) CHECK(p1.c[t] == a.c[t]);
        for (std::size_t t = 0; t < q2.c.size(); ++t) CHECK(p2.c[t] == q2.c[t]);
        for (std::size_t t = 0; t < q3.c.size(); ++t) CHECK(p3.c[t].contains(q3.c[t]));
        Series p0 = series_pow(a, 0);
        CHECK(p0.c[0] == Interval(1.0));
    }

    TEST_CASE("evaluation of a known polynomial") {
        // (1 + t)^3 in one variable
        Series a = Series::zero(1, 3);
        a.c[0] = Interval(1.0);
        a.c[1] = Interval(3.0);
        a.c[2] = Interval(3.0);
        a.c[3] = Interval(1.0);
        Interval v = eval_enclosure(a, {Interval(0.5)});
        CHECK(v.contains(3.375));
        CHECK(v.width() < 1e-14);
        CHECK_THROWS_AS(eval_enclosure(a, {Interval(1.5)}), DomainError);
    }

    TEST_CASE("truncate folds mass into the tail") {
        std::mt19937_64 gen(74);
        Series a = random_dyadic(2, 5, gen);
        Series t = truncate(a, 2);
        CHECK(t.N == 2);
        std::vector<double> th{0.4, 0.5};
        std::vector<Interval> thi{Interval(0.4), Interval(0.5)};
        CHECK(eval_enclosure(t, thi).contains(mid_eval(a, th)));
        Interval na = ell1_norm(a);
        Interval nt = ell1_norm(t);
        CHECK(nt.hi() >= na.lo() - 1e-15);
    }

    TEST_CASE("derivative shifts exponents") {
        Series a = Series::zero(2, 3);
        const MultiIndexTable& tab = mi_table(2, 3);
        a.at({2, 1}) = Interval(5.0);
        a.at({0, 3}) = Interval(2.0);
        Series d0 = derivative(a, 0);
        Series d1 = derivative(a, 1);
        CHECK(d0.N == 2);
        CHECK(d0.at({1, 1}) == Interval(10.0));
        CHECK(d1.at({2, 0}) == Interval(5.0));
        CHECK(d1.at({0, 2}) == Interval(6.0));
        (void)tab;
        a.tail = Interval(0.0, 1e-3);
        CHECK_THROWS_AS(derivative(a, 0), DomainError);
    }

    TEST_CASE("order rescaling matches argument scaling") {
        std::mt19937_64 gen(75);
        Series a = random_dyadic(1, 6, gen);
        Series s = scale_by_order(a, Interval(0.5));
        std::vector<Interval> th{Interval(0.8)};
        CHECK(eval_enclosure(s, th).contains(mid_eval(a, {0.4})));
    }

    TEST_CASE("ell1 norm bounds all polydisc values") {
        std::mt19937_64 gen(76);
        for (int it = 0; it < 200; ++it) {
            Series a = random_dyadic(2, 4, gen);
            Interval norm = ell1_norm(a);
            std::uniform_real_distribution<double> t(-1.0, 1.0);
            std::vector<double> th{t(gen), t(gen)};
            CHECK(norm.hi() >= std::fabs(mid_eval(a, th)) - 1e-12);
        }
    }

    TEST_CASE("taylor coefficients json round trip") {
        std::mt19937_64 gen(77);
        TaylorCoeffs a = TaylorCoeffs::zero(3, 2, 4);
        for (auto& comp : a.comp) {
            comp = random_dyadic(2, 4, gen);
            comp.tail = Interval(0.0, 1e-9);
        }
        nlohmann::json j;
        to_json(j, a);
        TaylorCoeffs b;
        from_json(j, b);
        REQUIRE(b.n == a.n);
        REQUIRE(b.m == a.m);
        REQUIRE(b.N == a.N);
        for (int i = 0; i < a.n; ++i)
            for (std::size_t t = 0; t < a.comp[i].c.size(); ++t)
                CHECK(b.comp[i].c[t] == a.comp[i].c[t]);
        // serialized tail is the per-structure radius
        CHECK(b.tail_radius().hi() == a.tail_radius().hi());
    }
}
