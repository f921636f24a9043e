#include "blowup/series.hpp"

#include <nlohmann/json.hpp>

namespace blowup {

namespace {

void check_same_shape(const Series& a, const Series& b) {
    if (a.m != b.m) throw ShapeError("Series: variable count mismatch");
}

Interval tail_of_product(const Series& a, const Series& b) {
    Interval na = ell1_norm_finite(a);
    Interval nb = ell1_norm_finite(b);
    return na * b.tail + a.tail * nb + a.tail * b.tail;
}

} // namespace

Series Series::zero(int m, int N) {
    Series s;
    s.m = m;
    s.N = N;
    s.c.assign(mi_count_upto(m, N), Interval(0.0));
    return s;
}

Series Series::constant(int m, int N, const Interval& v) {
    Series s = zero(m, N);
    s.c[0] = v;
    return s;
}

const Interval& Series::at(const MultiIndex& alpha) const {
    return c[mi_table(m, N).flat_index(alpha)];
}

Interval& Series::at(const MultiIndex& alpha) {
    return c[mi_table(m, N).flat_index(alpha)];
}

Series operator+(const Series& a, const Series& b) {
    check_same_shape(a, b);
    const Series& big = a.N >= b.N ? a : b;
    const Series& small = a.N >= b.N ? b : a;
    Series out = big;
    for (std::size_t i = 0; i < small.c.size(); ++i) out.c[i] += small.c[i];
    out.tail = a.tail + b.tail;
    return out;
}

Series operator-(const Series& a, const Series& b) {
    return a + (-b);
}

Series operator-(const Series& a) {
    Series out = a;
    for (auto& v : out.c) v = -v;
    return out;
}

Series operator*(const Interval& s, const Series& a) {
    Series out = a;
    for (auto& v : out.c) v = s * v;
    out.tail = a.tail * s.abs();
    return out;
}

Series cauchy_product(const Series& a, const Series& b) {
    check_same_shape(a, b);
    Series out = Series::zero(a.m, a.N + b.N);
    out.tail = tail_of_product(a, b);
    if (a.m == 1) {
        for (std::size_t i = 0; i < a.c.size(); ++i) {
            const Interval& ai = a.c[i];
            if (ai.lo() == 0.0 && ai.hi() == 0.0) continue;
            for (std::size_t j = 0; j < b.c.size(); ++j)
                out.c[i + j] += ai * b.c[j];
        }
        return out;
    }
    const MultiIndexTable& ta = mi_table(a.m, a.N);
    const MultiIndexTable& tb = mi_table(b.m, b.N);
    const MultiIndexTable& to = mi_table(out.m, out.N);
    if (a.m == 2) {
        // flat(alpha) = deg_begin(|alpha|) + alpha_2; compose from parts
        std::vector<int> adeg(a.c.size()), alast(a.c.size());
        for (std::size_t i = 0; i < a.c.size(); ++i) {
            adeg[i] = ta.degree(i);
            alast[i] = ta.exponents(i)[1];
        }
        std::vector<int> bdeg(b.c.size()), blast(b.c.size());
        for (std::size_t j = 0; j < b.c.size(); ++j) {
            bdeg[j] = tb.degree(j);
            blast[j] = tb.exponents(j)[1];
        }
        for (std::size_t i = 0; i < a.c.size(); ++i) {
            const Interval& ai = a.c[i];
            if (ai.lo() == 0.0 && ai.hi() == 0.0) continue;
            for (std::size_t j = 0; j < b.c.size(); ++j) {
                std::size_t k = to.degree_begin(adeg[i] + bdeg[j]) + alast[i] + blast[j];
                out.c[k] += ai * b.c[j];
            }
        }
        return out;
    }
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        const Interval& ai = a.c[i];
        if (ai.lo() == 0.0 && ai.hi() == 0.0) continue;
        MultiIndex s(a.m);
        for (std::size_t j = 0; j < b.c.size(); ++j) {
            const MultiIndex& ea = ta.exponents(i);
            const MultiIndex& eb = tb.exponents(j);
            for (int v = 0; v < a.m; ++v) s[v] = ea[v] + eb[v];
            out.c[to.flat_index(s)] += ai * b.c[j];
        }
    }
    return out;
}

Series cauchy_product_upto(const Series& a, const Series& b, int N) {
    check_same_shape(a, b);
    if (N < 0) throw DomainError("cauchy_product_upto: negative degree");
    if (N >= a.N + b.N) return truncate(cauchy_product(a, b), N);
    const MultiIndexTable& ta = mi_table(a.m, a.N);
    const MultiIndexTable& tb = mi_table(b.m, b.N);
    Series out = Series::zero(a.m, N);
    out.tail = tail_of_product(a, b);
    // |coeff| mass per total degree; the dropped cross terms are bounded
    // degreewise so the cutoff loop never has to visit them.
    std::vector<Interval> am(a.N + 1, Interval(0.0)), bm(b.N + 1, Interval(0.0));
    for (std::size_t i = 0; i < a.c.size(); ++i) am[ta.degree(i)] += a.c[i].abs();
    for (std::size_t j = 0; j < b.c.size(); ++j) bm[tb.degree(j)] += b.c[j].abs();
    Interval dropped(0.0);
    for (int da = 0; da <= a.N; ++da)
        for (int db = std::max(0, N - da + 1); db <= b.N; ++db) dropped += am[da] * bm[db];
    out.tail += dropped;
    if (a.m == 1) {
        const int ia_max = std::min(a.N, N);
        for (int i = 0; i <= ia_max; ++i) {
            const Interval& ai = a.c[i];
            if (ai.lo() == 0.0 && ai.hi() == 0.0) continue;
            const int jb_max = std::min(b.N, N - i);
            for (int j = 0; j <= jb_max; ++j) out.c[i + j] += ai * b.c[j];
        }
        return out;
    }
    const MultiIndexTable& to = mi_table(out.m, out.N);
    if (a.m == 2) {
        for (std::size_t i = 0; i < a.c.size(); ++i) {
            const Interval& ai = a.c[i];
            if (ai.lo() == 0.0 && ai.hi() == 0.0) continue;
            const int di = ta.degree(i);
            if (di > N) break;
            const int li = ta.exponents(i)[1];
            for (std::size_t j = 0; j < b.c.size(); ++j) {
                const int dj = tb.degree(j);
                if (di + dj > N) break;
                out.c[to.degree_begin(di + dj) + li + tb.exponents(j)[1]] += ai * b.c[j];
            }
        }
        return out;
    }
    MultiIndex s(a.m);
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        const Interval& ai = a.c[i];
        if (ai.lo() == 0.0 && ai.hi() == 0.0) continue;
        const int di = ta.degree(i);
        if (di > N) break;
        const MultiIndex& ea = ta.exponents(i);
        for (std::size_t j = 0; j < b.c.size(); ++j) {
            if (di + tb.degree(j) > N) break;
            const MultiIndex& eb = tb.exponents(j);
            for (int v = 0; v < a.m; ++v) s[v] = ea[v] + eb[v];
            out.c[to.flat_index(s)] += ai * b.c[j];
        }
    }
    return out;
}

Series series_pow(const Series& a, int k) {
    if (k < 0) throw DomainError("series_pow: negative exponent");
    Series acc = Series::constant(a.m, 0, Interval(1.0));
    if (k == 0) return acc;
    Series base = a;
    int e = k;
    while (e > 0) {
        if (e & 1) acc = cauchy_product(acc, base);
        e >>= 1;
        if (e > 0) base = cauchy_product(base, base);
    }
    return acc;
}

Series truncate(const Series& a, int N) {
    if (N >= a.N) {
        Series out = Series::zero(a.m, N);
        for (std::size_t i = 0; i < a.c.size(); ++i) out.c[i] = a.c[i];
        out.tail = a.tail;
        return out;
    }
    Series out = Series::zero(a.m, N);
    std::size_t keep = mi_count_upto(a.m, N);
    for (std::size_t i = 0; i < keep; ++i) out.c[i] = a.c[i];
    Interval dropped(0.0);
    for (std::size_t i = keep; i < a.c.size(); ++i) dropped += a.c[i].abs();
    out.tail = a.tail + dropped;
    return out;
}

Interval ell1_norm_finite(const Series& a) {
    Interval s(0.0);
    for (const auto& v : a.c) s += v.abs();
    return s;
}

Interval ell1_norm(const Series& a) {
    return ell1_norm_finite(a) + a.tail;
}

namespace {

void check_polydisc(const Series& a, const std::vector<Interval>& theta) {
    if (static_cast<int>(theta.size()) != a.m)
        throw ShapeError("eval_enclosure: theta arity mismatch");
    for (const auto& t : theta)
        if (t.lo() < -1.0 || t.hi() > 1.0)
            throw DomainError("eval_enclosure: theta outside closed unit polydisc");
}

} // namespace

Interval eval_enclosure(const Series& a, const std::vector<Interval>& theta) {
    check_polydisc(a, theta);
    Interval val(0.0);
    if (a.m == 1) {
        const Interval& t = theta[0];
        Interval acc = a.c.back();
        for (std::size_t k = a.c.size() - 1; k-- > 0;) acc = acc * t + a.c[k];
        val = acc;
    } else if (a.m == 2) {
        const MultiIndexTable& tab = mi_table(a.m, a.N);
        const Interval& t1 = theta[0];
        const Interval& t2 = theta[1];
        Interval acc(0.0);
        for (int a1 = a.N; a1 >= 0; --a1) {
            Interval inner(0.0);
            for (int a2 = a.N - a1; a2 >= 0; --a2) {
                std::size_t idx = tab.degree_begin(a1 + a2) + a2;
                inner = inner * t2 + a.c[idx];
            }
            acc = acc * t1 + inner;
        }
        val = acc;
    } else {
        const MultiIndexTable& tab = mi_table(a.m, a.N);
        for (std::size_t i = 0; i < a.c.size(); ++i) {
            Interval mono(1.0);
            const MultiIndex& e = tab.exponents(i);
            for (int v = 0; v < a.m; ++v) mono *= int_pow(theta[v], e[v]);
            val += a.c[i] * mono;
        }
    }
    if (!(a.tail.lo() == 0.0 && a.tail.hi() == 0.0))
        val += Interval(-1.0, 1.0) * a.tail;
    return val;
}

Series derivative(const Series& a, int var) {
    if (var < 0 || var >= a.m) throw ShapeError("derivative: bad variable");
    if (a.tail.hi() > 0.0)
        throw DomainError("derivative: tail bound is not differentiable");
    if (a.N == 0) return Series::zero(a.m, 0);
    Series out = Series::zero(a.m, a.N - 1);
    const MultiIndexTable& tab = mi_table(a.m, a.N);
    const MultiIndexTable& tout = mi_table(a.m, a.N - 1);
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        const MultiIndex& e = tab.exponents(i);
        if (e[var] == 0) continue;
        MultiIndex d = e;
        d[var] -= 1;
        out.c[tout.flat_index(d)] += Interval(static_cast<double>(e[var])) * a.c[i];
    }
    return out;
}

Series scale_by_order(const Series& a, const Interval& s) {
    if (s.abs().hi() > 1.0 && a.tail.hi() > 0.0)
        throw DomainError("scale_by_order: |s| > 1 would invalidate the tail bound");
    Series out = a;
    const MultiIndexTable& tab = mi_table(a.m, a.N);
    std::vector<Interval> pow(a.N + 1, Interval(1.0));
    for (int d = 1; d <= a.N; ++d) pow[d] = pow[d - 1] * s;
    for (std::size_t i = 0; i < a.c.size(); ++i) out.c[i] = a.c[i] * pow[tab.degree(i)];
    return out;
}

TaylorCoeffs TaylorCoeffs::zero(int n, int m, int N) {
    TaylorCoeffs t;
    t.n = n;
    t.m = m;
    t.N = N;
    t.comp.assign(n, Series::zero(m, N));
    return t;
}

Interval TaylorCoeffs::tail_radius() const {
    Interval r(0.0);
    for (const auto& s : comp)
        if (s.tail.hi() > r.hi()) r = s.tail;
    return r;
}

std::vector<Interval> eval_enclosure(const TaylorCoeffs& a, const std::vector<Interval>& theta) {
    std::vector<Interval> out;
    out.reserve(a.n);
    for (const auto& s : a.comp) out.push_back(eval_enclosure(s, theta));
    return out;
}

void to_json(nlohmann::json& j, const TaylorCoeffs& a) {
    j = nlohmann::json::object();
    j["n"] = a.n;
    j["m"] = a.m;
    j["N"] = a.N;
    Interval tr = a.tail_radius();
    j["tail_radius"] = {tr.lo(), tr.hi()};
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& s : a.comp) {
        nlohmann::json coeffs = nlohmann::json::array();
        for (const auto& v : s.c) coeffs.push_back({v.lo(), v.hi()});
        comps.push_back(std::move(coeffs));
    }
    j["coeffs"] = std::move(comps);
}

void from_json(const nlohmann::json& j, TaylorCoeffs& a) {
    a.n = j.at("n").get<int>();
    a.m = j.at("m").get<int>();
    a.N = j.at("N").get<int>();
    auto tr = j.at("tail_radius");
    Interval tail(tr.at(0).get<double>(), tr.at(1).get<double>());
    const auto& comps = j.at("coeffs");
    if (static_cast<int>(comps.size()) != a.n)
        throw ShapeError("TaylorCoeffs json: component count mismatch");
    a.comp.clear();
    std::size_t want = mi_count_upto(a.m, a.N);
    for (const auto& cj : comps) {
        Series s = Series::zero(a.m, a.N);
        if (cj.size() != want) throw ShapeError("TaylorCoeffs json: coefficient count mismatch");
        for (std::size_t i = 0; i < want; ++i)
            s.c[i] = Interval(cj.at(i).at(0).get<double>(), cj.at(i).at(1).get<double>());
        s.tail = tail;
        a.comp.push_back(std::move(s));
    }
}

} // namespace blowup
