#include <doctest.h>

#include <cstddef>
#include <functional>
#include <vector>

#include "blowup/multiindex.hpp"

using namespace blowup;

namespace {

// Independent enumeration by odometer walk, sorted the same way the
// table promises: degree ascending, first variable descending inside a
// degree.
std::vector<MultiIndex> brute_enumerate(int m, int N) {
    std::vector<MultiIndex> out;
    for (int d = 0; d <= N; ++d) {
        std::vector<MultiIndex> level;
        MultiIndex cur(m, 0);
        // enumerate all compositions of d into m parts
        std::function<void(int, int)> rec = [&](int var, int left) {
            if (var == m - 1) {
                cur[var] = left;
                level.push_back(cur);
                return;
            }
            for (int e = left; e >= 0; --e) {
                cur[var] = e;
                rec(var + 1, left - e);
            }
        };
        if (m > 0) rec(0, d);
        for (auto& mi : level) out.push_back(mi);
    }
    return out;
}

std::size_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::size_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (std::size_t)(n - k + i) / (std::size_t)i;
    return r;
}

} // namespace

TEST_SUITE("multiindex") {

    TEST_CASE("counts match binomials") {
        for (int m = 1; m <= 4; ++m)
            for (int N = 0; N <= 8; ++N)
                CHECK(mi_count_upto(m, N) == binomial(N + m, m));
        CHECK(mi_count_upto(1, 300) == 301u);
        CHECK(mi_count_upto(2, 60) == 1891u);
    }

    TEST_CASE("enumeration order and inverse lookup") {
        for (int m = 1; m <= 3; ++m) {
            const int N = m == 3 ? 6 : 9;
            const MultiIndexTable& tab = mi_table(m, N);
            auto ref = brute_enumerate(m, N);
            REQUIRE(tab.size() == ref.size());
            for (std::size_t t = 0; t < ref.size(); ++t) {
                CHECK(tab.exponents(t) == ref[t]);
                int d = 0;
                for (int e : ref[t]) d += e;
                CHECK(tab.degree(t) == d);
                CHECK(tab.flat_index(ref[t]) == t);
            }
        }
    }

    TEST_CASE("sum index matches componentwise addition") {
        for (int m = 1; m <= 3; ++m) {
            const int N = m == 3 ? 5 : 8;
            const MultiIndexTable& tab = mi_table(m, 2 * N);
            const std::size_t half = mi_count_upto(m, N);
            for (std::size_t i = 0; i < half; ++i)
                for (std::size_t j = 0; j < half; ++j) {
                    MultiIndex sum = tab.exponents(i);
                    const MultiIndex& b = tab.exponents(j);
                    for (int v = 0; v < m; ++v) sum[v] += b[v];
                    CHECK(tab.sum_index(i, j) == tab.flat_index(sum));
                }
        }
    }

    TEST_CASE("degree blocks partition the table") {
        const MultiIndexTable& tab = mi_table(2, 12);
        CHECK(tab.degree_begin(0) == 0u);
        for (int d = 0; d <= 12; ++d) {
            CHECK(tab.degree_end(d) - tab.degree_begin(d) == (std::size_t)(d + 1));
            for (std::size_t t = tab.degree_begin(d); t < tab.degree_end(d); ++t)
                CHECK(tab.degree(t) == d);
        }
        CHECK(tab.degree_end(12) == tab.size());
    }
}
