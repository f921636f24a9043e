#include "blowup/field.hpp"

namespace blowup {

int PolyField::max_degree() const {
    int d = 0;
    for (const auto& g : comp)
        for (const auto& mono : g) d = std::max(d, mono.degree());
    return d;
}

void PolyField::validate() const {
    if (n < 1) throw ShapeError("PolyField: n < 1");
    if (static_cast<int>(comp.size()) != n) throw ShapeError("PolyField: component count");
    for (const auto& g : comp)
        for (const auto& mono : g)
            if (static_cast<int>(mono.exps.size()) != n)
                throw ShapeError("PolyField: monomial arity mismatch");
    for (const auto* tf : {&timefactor.num, &timefactor.den})
        for (const auto& mono : *tf)
            if (static_cast<int>(mono.exps.size()) != n)
                throw ShapeError("PolyField: timefactor arity mismatch");
    cspec.validate();
    if (cspec.n != n) throw ShapeError("PolyField: compactification arity mismatch");
}

Interval eval(const MonomialSum& g, const std::vector<Interval>& x) {
    Interval acc(0.0);
    for (const auto& mono : g) {
        Interval term = mono.coeff;
        for (std::size_t v = 0; v < x.size(); ++v)
            if (mono.exps[v] != 0) term *= int_pow(x[v], mono.exps[v]);
        acc += term;
    }
    return acc;
}

std::vector<Interval> eval(const PolyField& f, const std::vector<Interval>& x) {
    if (static_cast<int>(x.size()) != f.n) throw ShapeError("eval: point arity mismatch");
    std::vector<Interval> out;
    out.reserve(f.n);
    for (const auto& g : f.comp) out.push_back(eval(g, x));
    return out;
}

MonomialSum derivative(const MonomialSum& g, int var) {
    MonomialSum out;
    for (const auto& mono : g) {
        if (mono.exps[var] == 0) continue;
        Monomial d;
        d.coeff = mono.coeff * Interval(static_cast<double>(mono.exps[var]));
        d.exps = mono.exps;
        d.exps[var] -= 1;
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<std::vector<Interval>> jacobian(const PolyField& f, const std::vector<Interval>& x) {
    std::vector<std::vector<Interval>> J(f.n, std::vector<Interval>(f.n, Interval(0.0)));
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.n; ++j) J[i][j] = eval(derivative(f.comp[i], j), x);
    return J;
}

std::vector<std::vector<std::vector<Interval>>> hessian(const PolyField& f,
                                                        const std::vector<Interval>& x) {
    std::vector<std::vector<std::vector<Interval>>> H(
        f.n, std::vector<std::vector<Interval>>(f.n, std::vector<Interval>(f.n, Interval(0.0))));
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.n; ++j) {
            MonomialSum dj = derivative(f.comp[i], j);
            for (int k = j; k < f.n; ++k) {
                Interval v = eval(derivative(dj, k), x);
                H[i][j][k] = v;
                H[i][k][j] = v;
            }
        }
    return H;
}

namespace {

// Power cache so x1^3*x2^2 style monomials reuse series powers.
// cap < 0 means full-degree products, otherwise every product is
// truncated to degree cap.
struct PowCache {
    const TaylorCoeffs* a;
    int cap;
    std::vector<std::vector<Series>> pows; // pows[v][e]

    PowCache(const TaylorCoeffs& t, int cap_) : a(&t), cap(cap_) {
        pows.assign(t.n, {});
        for (int v = 0; v < t.n; ++v)
            pows[v].push_back(Series::constant(t.m, 0, Interval(1.0)));
    }

    Series mul(const Series& x, const Series& y) const {
        return cap < 0 ? cauchy_product(x, y) : cauchy_product_upto(x, y, cap);
    }

    const Series& get(int v, int e) {
        auto& vec = pows[v];
        while (static_cast<int>(vec.size()) <= e) {
            if (vec.size() == 1) {
                vec.push_back(cap < 0 ? a->comp[v] : truncate(a->comp[v], std::min(cap, a->comp[v].N)));
            } else {
                vec.push_back(mul(vec.back(), a->comp[v]));
            }
        }
        return vec[e];
    }
};

Series monomial_series(const Monomial& mono, PowCache& cache, int m) {
    Series acc = Series::constant(m, 0, mono.coeff);
    for (std::size_t v = 0; v < mono.exps.size(); ++v) {
        if (mono.exps[v] == 0) continue;
        acc = cache.mul(acc, cache.get(static_cast<int>(v), mono.exps[v]));
    }
    return acc;
}

} // namespace

Series apply_to_series(const MonomialSum& g, const TaylorCoeffs& a) {
    PowCache cache(a, -1);
    Series acc = Series::zero(a.m, 0);
    for (const auto& mono : g) acc = acc + monomial_series(mono, cache, a.m);
    return acc;
}

Series apply_to_series_upto(const MonomialSum& g, const TaylorCoeffs& a, int N) {
    PowCache cache(a, N);
    Series acc = Series::zero(a.m, N);
    for (const auto& mono : g) acc = acc + monomial_series(mono, cache, a.m);
    return acc;
}

TaylorCoeffs apply_to_series(const PolyField& f, const TaylorCoeffs& a) {
    if (f.n != a.n) throw ShapeError("apply_to_series: arity mismatch");
    PowCache cache(a, -1);
    TaylorCoeffs out;
    out.n = f.n;
    out.m = a.m;
    out.N = 0;
    for (int i = 0; i < f.n; ++i) {
        Series acc = Series::zero(a.m, 0);
        for (const auto& mono : f.comp[i]) acc = acc + monomial_series(mono, cache, a.m);
        out.N = std::max(out.N, acc.N);
        out.comp.push_back(std::move(acc));
    }
    for (auto& s : out.comp)
        if (s.N < out.N) s = truncate(s, out.N);
    return out;
}

TaylorCoeffs apply_to_series_upto(const PolyField& f, const TaylorCoeffs& a, int N) {
    if (f.n != a.n) throw ShapeError("apply_to_series_upto: arity mismatch");
    PowCache cache(a, N);
    TaylorCoeffs out;
    out.n = f.n;
    out.m = a.m;
    out.N = N;
    for (int i = 0; i < f.n; ++i) {
        Series acc = Series::zero(a.m, N);
        for (const auto& mono : f.comp[i]) acc = acc + monomial_series(mono, cache, a.m);
        out.comp.push_back(std::move(acc));
    }
    return out;
}

Interval norm_bound(const MonomialSum& g, const std::vector<Interval>& comp_norms) {
    Interval acc(0.0);
    for (const auto& mono : g) {
        Interval term = mono.coeff.abs();
        for (std::size_t v = 0; v < comp_norms.size(); ++v)
            if (mono.exps[v] != 0) term *= int_pow(comp_norms[v], mono.exps[v]);
        acc += term;
    }
    return acc;
}

Interval time_factor_value(const PolyField& f, const std::vector<Interval>& x) {
    Interval num = eval(f.timefactor.num, x);
    if (!f.timefactor.is_rational()) return num;
    Interval den = eval(f.timefactor.den, x);
    return num / den;
}

} // namespace blowup
