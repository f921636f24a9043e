#include "blowup/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "blowup/linalg.hpp"

namespace blowup {

namespace {

// Flat dense coefficient blocks over a shared multi-index table with a
// per-value degree cap.  Three coefficient types are instantiated:
// double midpoints for the numeric solve, intervals for exact capped
// heads, nonnegative double majorants for tail sums.
template <class T>
struct Flat {
    const MultiIndexTable* tab = nullptr;
    int cap = 0;
    std::vector<T> c;
};

inline bool is_zero_coeff(double v) { return v == 0.0; }
inline bool is_zero_coeff(const Interval& v) { return v.lo() == 0.0 && v.hi() == 0.0; }

template <class T>
Flat<T> make_flat(const MultiIndexTable& tab, int cap) {
    Flat<T> f;
    f.tab = &tab;
    f.cap = cap;
    f.c.assign(tab.degree_end(cap), T{});
    return f;
}

// out += a*b truncated to out.cap.
template <class T>
void conv_into(Flat<T>& out, const Flat<T>& a, const Flat<T>& b) {
    const MultiIndexTable& tab = *out.tab;
    const std::size_t na = a.c.size();
    const std::size_t nb = b.c.size();
    for (std::size_t i = 0; i < na; ++i) {
        if (is_zero_coeff(a.c[i])) continue;
        const int rem = out.cap - tab.degree(i);
        if (rem < 0) break;
        const std::size_t jend = std::min(nb, tab.degree_end(rem));
        const T ai = a.c[i];
        for (std::size_t j = 0; j < jend; ++j) {
            if (is_zero_coeff(b.c[j])) continue;
            out.c[tab.sum_index(i, j)] += ai * b.c[j];
        }
    }
}

template <class T>
Flat<T> flat_mul(const Flat<T>& a, const Flat<T>& b, int cap) {
    Flat<T> out = make_flat<T>(*a.tab, cap);
    conv_into(out, a, b);
    return out;
}

template <class T>
struct EngineMono {
    const MultiIndex* exps;
    T coeff;
};

// Composition sum(coeff * x^exps) at x = comp, Horner in each variable:
// group by the exponent of the current variable and multiply the
// accumulator by comp[var] between groups.
template <class T>
Flat<T> horner_groups(std::vector<EngineMono<T>>&& monos, std::size_t var,
                      const std::vector<Flat<T>>& comp, const MultiIndexTable& tab, int cap) {
    if (monos.empty()) return make_flat<T>(tab, cap);
    if (var == comp.size()) {
        Flat<T> out = make_flat<T>(tab, cap);
        T sum{};
        for (const auto& mo : monos) sum += mo.coeff;
        out.c[0] = sum;
        return out;
    }
    std::map<int, std::vector<EngineMono<T>>, std::greater<int>> groups;
    for (auto& mo : monos) groups[(*mo.exps)[var]].push_back(mo);
    Flat<T> acc;
    bool started = false;
    int prev = 0;
    for (auto& [e, group] : groups) {
        if (!started) {
            acc = horner_groups(std::move(group), var + 1, comp, tab, cap);
            started = true;
        } else {
            for (int t = prev; t > e; --t) acc = flat_mul(acc, comp[var], cap);
            Flat<T> g = horner_groups(std::move(group), var + 1, comp, tab, cap);
            for (std::size_t i = 0; i < acc.c.size(); ++i) acc.c[i] += g.c[i];
        }
        prev = e;
    }
    for (int t = prev; t > 0; --t) acc = flat_mul(acc, comp[var], cap);
    return acc;
}

struct MidCoeff {
    double operator()(const Interval& v) const { return v.mid(); }
};
struct IvalCoeff {
    Interval operator()(const Interval& v) const { return v; }
};
struct MagCoeff {
    double operator()(const Interval& v) const { return v.mag(); }
};

template <class T, class Convert>
Flat<T> apply_monomials(const MonomialSum& g, Convert convert, const std::vector<Flat<T>>& comp,
                        const MultiIndexTable& tab, int cap) {
    std::vector<EngineMono<T>> monos;
    monos.reserve(g.size());
    for (const auto& mo : g) {
        T c = convert(mo.coeff);
        if (!is_zero_coeff(c)) monos.push_back(EngineMono<T>{&mo.exps, c});
    }
    return horner_groups(std::move(monos), 0, comp, tab, cap);
}

std::vector<Flat<Interval>> interval_components(const TaylorCoeffs& a,
                                                const MultiIndexTable& tab) {
    std::vector<Flat<Interval>> comp(a.n);
    for (int i = 0; i < a.n; ++i) {
        comp[i] = make_flat<Interval>(tab, a.N);
        const std::size_t k = std::min(comp[i].c.size(), a.comp[i].c.size());
        for (std::size_t t = 0; t < k; ++t) comp[i].c[t] = a.comp[i].c[t];
    }
    return comp;
}

std::vector<Flat<double>> mag_components(const TaylorCoeffs& a, const MultiIndexTable& tab) {
    std::vector<Flat<double>> comp(a.n);
    for (int i = 0; i < a.n; ++i) {
        comp[i] = make_flat<double>(tab, a.N);
        const std::size_t k = std::min(comp[i].c.size(), a.comp[i].c.size());
        for (std::size_t t = 0; t < k; ++t) comp[i].c[t] = a.comp[i].c[t].mag();
    }
    return comp;
}

// Majorant sums run in plain round-to-nearest doubles; the relative
// slack covers accumulation DAGs up to 2e8 operations deep, the
// absolute term covers underflow.
Interval mag_slack(double v) {
    if (!std::isfinite(v)) throw VerificationFailed("majorant sum overflowed");
    return Interval(v) * Interval(1.000000025) + Interval(1e-280);
}

// alpha . Lambda for every flat index up to cap.
std::vector<Interval> eigen_dots(const ChartSkeleton& s, const MultiIndexTable& tab, int cap) {
    std::vector<Interval> dots(tab.degree_end(cap), Interval(0.0));
    for (std::size_t t = 0; t < dots.size(); ++t) {
        const MultiIndex& al = tab.exponents(t);
        Interval d(0.0);
        for (int k = 0; k < s.m; ++k)
            if (al[k] != 0) d += Interval((double)al[k]) * s.Lambda[k];
        dots[t] = d;
    }
    return dots;
}

double min_mig(const std::vector<Interval>& lam) {
    double mm = std::numeric_limits<double>::infinity();
    for (const auto& l : lam) mm = std::min(mm, l.mig());
    return mm;
}

// Orders 0 and 1 are the skeleton midpoints; each higher order solves
// the n x n system (alpha.Lambda I - Dg(x0)) a_alpha = (g(a^{<d}))_alpha.
std::vector<Flat<double>> recursion_flats(const PolyField& f, const ChartSkeleton& s) {
    const int n = s.n;
    const int N = s.N;
    const MultiIndexTable& tab = mi_table(s.m, N);
    std::vector<Flat<double>> a(n);
    for (int i = 0; i < n; ++i) a[i] = make_flat<double>(tab, N);
    for (int i = 0; i < n; ++i) a[i].c[0] = s.x0[i].mid();
    for (int k = 0; k < s.m; ++k) {
        MultiIndex ek(s.m, 0);
        ek[k] = 1;
        const std::size_t t = tab.flat_index(ek);
        for (int i = 0; i < n; ++i) a[i].c[t] = s.xi[k][i].mid();
    }
    Eigen::MatrixXd Dg0(n, n);
    {
        std::vector<Interval> x0(n);
        for (int i = 0; i < n; ++i) x0[i] = Interval(s.x0[i].mid());
        auto J = jacobian(f, x0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) Dg0(i, j) = J[i][j].mid();
    }
    Eigen::VectorXd lam(s.m);
    for (int k = 0; k < s.m; ++k) lam(k) = s.Lambda[k].mid();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd rhs(n);
    for (int d = 2; d <= N; ++d) {
        std::vector<Flat<double>> g(n);
        for (int i = 0; i < n; ++i) g[i] = apply_monomials(f.comp[i], MidCoeff{}, a, tab, d);
        for (std::size_t t = tab.degree_begin(d); t < tab.degree_end(d); ++t) {
            const MultiIndex& al = tab.exponents(t);
            double dot = 0.0;
            for (int k = 0; k < s.m; ++k) dot += al[k] * lam(k);
            Eigen::MatrixXd B = dot * id - Dg0;
            for (int i = 0; i < n; ++i) rhs(i) = g[i].c[t];
            Eigen::VectorXd sol = B.partialPivLu().solve(rhs);
            for (int i = 0; i < n; ++i) a[i].c[t] = sol(i);
        }
    }
    return a;
}

double residual_max(const PolyField& f, const ChartSkeleton& s, const std::vector<Flat<double>>& a,
                    const MultiIndexTable& tab, const Eigen::VectorXd& lam) {
    const int n = s.n;
    double worst = 0.0;
    std::vector<Flat<double>> g(n);
    for (int i = 0; i < n; ++i) g[i] = apply_monomials(f.comp[i], MidCoeff{}, a, tab, s.N);
    for (std::size_t t = tab.degree_begin(2); t < tab.degree_end(s.N); ++t) {
        const MultiIndex& al = tab.exponents(t);
        double dot = 0.0;
        for (int k = 0; k < s.m; ++k) dot += al[k] * lam(k);
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::fabs(dot * a[i].c[t] - g[i].c[t]));
    }
    return worst;
}

// One forward-substitution Newton step: the projected Jacobian is block
// lower triangular by total degree with diagonal blocks
// (alpha.Lambda I - Dg(a_0)), so DF delta = -F solves level by level.
void refine_once(const PolyField& f, const ChartSkeleton& s, std::vector<Flat<double>>& a,
                 const MultiIndexTable& tab, const Eigen::VectorXd& lam) {
    const int n = s.n;
    const int N = s.N;
    std::vector<Flat<double>> g(n), dg((std::size_t)n * n), delta(n);
    for (int i = 0; i < n; ++i) g[i] = apply_monomials(f.comp[i], MidCoeff{}, a, tab, N);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            dg[(std::size_t)i * n + j] =
                apply_monomials(derivative(f.comp[i], j), MidCoeff{}, a, tab, N);
    for (int i = 0; i < n; ++i) delta[i] = make_flat<double>(tab, N);

    Eigen::MatrixXd Dg0(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Dg0(i, j) = dg[(std::size_t)i * n + j].c[0];
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd rhs(n);
    for (int d = 2; d <= N; ++d) {
        const std::size_t lvl0 = tab.degree_begin(d);
        std::vector<std::vector<double>> couple(
            n, std::vector<double>(tab.degree_end(d) - lvl0, 0.0));
        for (int j = 0; j < n; ++j) {
            for (int dgam = 1; dgam <= d - 2; ++dgam) {
                for (std::size_t gf = tab.degree_begin(dgam); gf < tab.degree_end(dgam); ++gf) {
                    for (std::size_t bf = tab.degree_begin(d - dgam);
                         bf < tab.degree_end(d - dgam); ++bf) {
                        if (delta[j].c[bf] == 0.0) continue;
                        const std::size_t t = tab.sum_index(gf, bf);
                        for (int i = 0; i < n; ++i)
                            couple[i][t - lvl0] +=
                                dg[(std::size_t)i * n + j].c[gf] * delta[j].c[bf];
                    }
                }
            }
        }
        for (std::size_t t = lvl0; t < tab.degree_end(d); ++t) {
            const MultiIndex& al = tab.exponents(t);
            double dot = 0.0;
            for (int k = 0; k < s.m; ++k) dot += al[k] * lam(k);
            Eigen::MatrixXd B = dot * id - Dg0;
            for (int i = 0; i < n; ++i) {
                const double Fi = dot * a[i].c[t] - g[i].c[t];
                rhs(i) = -Fi + couple[i][t - lvl0];
            }
            Eigen::VectorXd sol = B.partialPivLu().solve(rhs);
            for (int i = 0; i < n; ++i) delta[i].c[t] = sol(i);
        }
    }
    for (int i = 0; i < n; ++i)
        for (std::size_t t = 0; t < a[i].c.size(); ++t) a[i].c[t] += delta[i].c[t];
}

TaylorCoeffs flats_to_coeffs(const ChartSkeleton& s, const std::vector<Flat<double>>& a) {
    TaylorCoeffs out = TaylorCoeffs::zero(s.n, s.m, s.N);
    for (int i = 0; i < s.n; ++i)
        for (std::size_t t = 0; t < a[i].c.size(); ++t) out.comp[i].c[t] = Interval(a[i].c[t]);
    return out;
}

// Columns [c0, c1) of the degree-N projected Jacobian.  Rows of total
// degree <= 1 are identity rows (those orders are frozen); higher rows
// hold alpha.Lambda delta_{alpha beta} delta_{ij} - Dg_ij[alpha-beta].
void fill_df_cols(const std::vector<std::vector<Series>>& Dg, const std::vector<Interval>& dots,
                  const MultiIndexTable& tab, int n, int N, std::size_t c0, std::size_t c1,
                  bool want_rad, Eigen::MatrixXd& mid, Eigen::MatrixXd& rad) {
    for (std::size_t c = c0; c < c1; ++c) {
        const std::size_t bf = c / (std::size_t)n;
        const int j = (int)(c % (std::size_t)n);
        const int db = tab.degree(bf);
        const Eigen::Index lc = (Eigen::Index)(c - c0);
        const std::size_t gend = tab.degree_end(N - db);
        for (std::size_t gf = 0; gf < gend; ++gf) {
            const std::size_t af = tab.sum_index(bf, gf);
            if (tab.degree(af) <= 1) {
                if (gf == 0) mid((Eigen::Index)(af * (std::size_t)n + j), lc) = 1.0;
                continue;
            }
            for (int i = 0; i < n; ++i) {
                Interval e = -Dg[i][j].c[gf];
                if (gf == 0 && i == j) e += dots[af];
                const Eigen::Index r = (Eigen::Index)(af * (std::size_t)n + i);
                mid(r, lc) = e.mid();
                if (want_rad) rad(r, lc) = e.rad();
            }
        }
    }
}

// Heuristic ordering aid: a stable eigenvector at an on-horizon
// equilibrium is horizon-tangent when the directional derivative of
// p^{2c} along it vanishes (for the directional chart, when its
// s-component vanishes).
bool is_horizon_tangent(const PolyField& f, const VerifiedEquilibrium& eq, int k) {
    const int n = f.n;
    double vnorm = 0.0;
    for (int i = 0; i < n; ++i)
        vnorm = std::max(vnorm, std::fabs(eq.eigenvectors[k][i].mid()));
    if (f.cspec.kind == CompactKind::Directional) {
        const double dot = std::fabs(eq.eigenvectors[k][f.cspec.dir_index].mid());
        return dot < 1e-8 * std::max(vnorm, 1e-30);
    }
    double dot = 0.0, gnorm = 0.0;
    for (int i = 0; i < n; ++i) {
        const int b = f.cspec.beta[i];
        const double gi = 2.0 * b * std::pow(eq.location[i].mid(), 2 * b - 1);
        gnorm = std::max(gnorm, std::fabs(gi));
        dot += gi * eq.eigenvectors[k][i].mid();
    }
    return std::fabs(dot) < 1e-8 * std::max(gnorm * vnorm, 1e-30);
}

} // namespace

ChartSkeleton make_skeleton(const PolyField& f, const VerifiedEquilibrium& eq, double sigma,
                            int N) {
    if (!(sigma > 0.0)) throw DomainError("make_skeleton: sigma must be positive");
    if (N < 2) throw DomainError("make_skeleton: order must be at least 2");
    std::vector<int> sel;
    for (std::size_t k = 0; k < eq.eigenvalues.size(); ++k)
        if (eq.eigenvalues[k].hi() < 0.0) sel.push_back((int)k);
    if (sel.empty()) throw NonHyperbolic("make_skeleton: no certified stable direction");

    if ((int)sel.size() >= 2 && eq.on_horizon) {
        std::vector<int> transv, tang;
        for (int k : sel) (is_horizon_tangent(f, eq, k) ? tang : transv).push_back(k);
        sel.clear();
        sel.insert(sel.end(), transv.begin(), transv.end());
        sel.insert(sel.end(), tang.begin(), tang.end());
    }

    ChartSkeleton s;
    s.n = f.n;
    s.m = (int)sel.size();
    s.N = N;
    s.x0 = eq.location;
    for (int k : sel) {
        s.Lambda.push_back(eq.eigenvalues[k]);
        IVec v(f.n);
        for (int i = 0; i < f.n; ++i) v[i] = Interval(sigma) * eq.eigenvectors[k][i];
        s.xi.push_back(std::move(v));
    }
    return s;
}

TaylorCoeffs solve_recursion(const PolyField& f, const ChartSkeleton& s) {
    return flats_to_coeffs(s, recursion_flats(f, s));
}

TaylorCoeffs newton_solve_projection(const PolyField& f, const ChartSkeleton& s) {
    const MultiIndexTable& tab = mi_table(s.m, s.N);
    auto a = recursion_flats(f, s);
    Eigen::VectorXd lam(s.m);
    for (int k = 0; k < s.m; ++k) lam(k) = s.Lambda[k].mid();
    double r = residual_max(f, s, a, tab, lam);
    for (int pass = 0; pass < 4 && r > 1e-15; ++pass) {
        refine_once(f, s, a, tab, lam);
        const double r2 = residual_max(f, s, a, tab, lam);
        if (!(r2 < 0.5 * r)) break;
        r = r2;
    }
    return flats_to_coeffs(s, a);
}

TaylorCoeffs interval_lift(const ChartSkeleton& s, const TaylorCoeffs& sol) {
    if (sol.n != s.n || sol.m != s.m || sol.N != s.N)
        throw ShapeError("interval_lift: skeleton and solution disagree");
    TaylorCoeffs out = sol;
    const MultiIndexTable& tab = mi_table(s.m, s.N);
    for (int i = 0; i < s.n; ++i) {
        out.comp[i].c[0] = s.x0[i];
        out.comp[i].tail = Interval(0.0);
    }
    for (int k = 0; k < s.m; ++k) {
        MultiIndex ek(s.m, 0);
        ek[k] = 1;
        const std::size_t t = tab.flat_index(ek);
        for (int i = 0; i < s.n; ++i) out.comp[i].c[t] = s.xi[k][i];
    }
    return out;
}

TaylorCoeffs assemble_F(const PolyField& f, const ChartSkeleton& s, const TaylorCoeffs& a) {
    if (a.n != s.n || a.m != s.m) throw ShapeError("assemble_F: shape mismatch");
    const int dN = std::max(f.max_degree() * a.N, a.N);
    TaylorCoeffs G = apply_to_series(f, a);
    TaylorCoeffs F = TaylorCoeffs::zero(s.n, s.m, dN);
    const MultiIndexTable& tab = mi_table(s.m, dN);
    for (int i = 0; i < s.n; ++i) {
        for (std::size_t t = tab.degree_begin(2); t < tab.degree_end(dN); ++t) {
            const MultiIndex& al = tab.exponents(t);
            Interval dot(0.0);
            for (int k = 0; k < s.m; ++k)
                if (al[k] != 0) dot += Interval((double)al[k]) * s.Lambda[k];
            const Interval ga =
                (t < G.comp[i].c.size()) ? G.comp[i].c[t] : Interval(0.0);
            const Interval av =
                (t < a.comp[i].c.size()) ? a.comp[i].c[t] : Interval(0.0);
            F.comp[i].c[t] = dot * av - ga;
        }
        F.comp[i].tail = G.comp[i].tail;
    }
    return F;
}

ProjectionBlocks build_projection_blocks(const PolyField& f, const ChartSkeleton& s,
                                         const TaylorCoeffs& abar) {
    const int n = s.n;
    const int N = s.N;
    const MultiIndexTable& tab = mi_table(s.m, N);
    const std::size_t M = tab.degree_end(N);
    const std::size_t nM = (std::size_t)n * M;

    ProjectionBlocks out;
    out.n = n;
    out.m = s.m;
    out.N = N;
    out.Dg.assign(n, std::vector<Series>(n, Series::zero(s.m, N)));
    auto comps = interval_components(abar, tab);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Flat<Interval> d =
                apply_monomials(derivative(f.comp[i], j), IvalCoeff{}, comps, tab, N);
            out.Dg[i][j].c = std::move(d.c);
        }

    const std::vector<Interval> dots = eigen_dots(s, tab, N);
    {
        Eigen::MatrixXd Mm = Eigen::MatrixXd::Zero((Eigen::Index)nM, (Eigen::Index)nM);
        Eigen::MatrixXd unused;
        fill_df_cols(out.Dg, dots, tab, n, N, 0, nM, false, Mm, unused);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(Mm);
        Mm.resize(0, 0);
        out.A = lu.inverse();
    }
    if (!out.A.allFinite())
        throw VerificationFailed("projected Jacobian inverse is not finite");

    out.block_norm.assign(n, std::vector<double>(n, 0.0));
    std::vector<Interval> acc(n);
    for (std::size_t c = 0; c < nM; ++c) {
        for (int i = 0; i < n; ++i) acc[i] = Interval(0.0);
        for (std::size_t r = 0; r < nM; ++r)
            acc[(int)(r % (std::size_t)n)] +=
                Interval(std::fabs(out.A((Eigen::Index)r, (Eigen::Index)c)));
        const int j = (int)(c % (std::size_t)n);
        for (int i = 0; i < n; ++i)
            out.block_norm[i][j] = std::max(out.block_norm[i][j], acc[i].hi());
    }
    return out;
}

Interval compute_Y0(const PolyField& f, const ChartSkeleton& s, const TaylorCoeffs& abar,
                    const ProjectionBlocks& blocks) {
    const int n = s.n;
    const int N = s.N;
    const MultiIndexTable& tabN = mi_table(s.m, N);
    const std::size_t M = tabN.degree_end(N);
    const std::size_t nM = (std::size_t)n * M;
    const std::vector<Interval> dots = eigen_dots(s, tabN, N);

    // exact finite-head residual, then |A F| summed per component
    auto comps = interval_components(abar, tabN);
    std::vector<Interval> Fh(nM, Interval(0.0));
    for (int i = 0; i < n; ++i) {
        Flat<Interval> g = apply_monomials(f.comp[i], IvalCoeff{}, comps, tabN, N);
        for (std::size_t t = tabN.degree_begin(2); t < M; ++t)
            Fh[t * (std::size_t)n + i] = dots[t] * abar.comp[i].c[t] - g.c[t];
    }
    std::vector<Interval> head(n, Interval(0.0));
    for (std::size_t r = 0; r < nM; ++r) {
        Interval av(0.0);
        for (std::size_t c = 0; c < nM; ++c) {
            if (is_zero_coeff(Fh[c])) continue;
            av += Interval(blocks.A((Eigen::Index)r, (Eigen::Index)c)) * Fh[c];
        }
        head[(int)(r % (std::size_t)n)] += av.abs();
    }

    const double mm = min_mig(s.Lambda);
    if (!(mm > 0.0)) throw VerificationFailed("stable eigenvalue enclosure touches zero");
    const int capT = std::max(1, f.max_degree()) * N;
    Interval Y(0.0);
    if (capT > N) {
        const MultiIndexTable& tabT = mi_table(s.m, capT);
        auto mags = mag_components(abar, tabT);
        for (int i = 0; i < n; ++i) {
            Flat<double> gm = apply_monomials(f.comp[i], MagCoeff{}, mags, tabT, capT);
            Interval tail(0.0);
            for (int dd = N + 1; dd <= capT; ++dd) {
                double sum = 0.0;
                for (std::size_t t = tabT.degree_begin(dd); t < tabT.degree_end(dd); ++t)
                    sum += gm.c[t];
                if (sum != 0.0) tail += mag_slack(sum) / (Interval((double)dd) * Interval(mm));
            }
            const Interval yi = head[i] + tail;
            if (yi.hi() > Y.hi()) Y = yi;
        }
    } else {
        for (int i = 0; i < n; ++i)
            if (head[i].hi() > Y.hi()) Y = head[i];
    }
    return Y;
}

Interval compute_Z0(const PolyField& f, const ChartSkeleton& s, const TaylorCoeffs& abar,
                    const ProjectionBlocks& blocks) {
    (void)f;
    (void)abar;
    const int n = s.n;
    const int N = s.N;
    const MultiIndexTable& tab = mi_table(s.m, N);
    const std::size_t M = tab.degree_end(N);
    const std::size_t nM = (std::size_t)n * M;
    const std::vector<Interval> dots = eigen_dots(s, tab, N);

    const Eigen::MatrixXd& A = blocks.A;
    const Eigen::MatrixXd Aabs = A.cwiseAbs();

    // fl(A*M) error: gamma_k |A||M| entrywise, k the inner dimension
    const Interval u(std::ldexp(1.0, -53));
    const Interval kI((double)nM + 2.0);
    const Interval gamma = (kI * u) / (Interval(1.0) - kI * u);
    const Interval inflate = Interval(1.0) + Interval(2.0) * gamma;

    std::vector<std::vector<double>> worst(n, std::vector<double>(n, 0.0));
    const std::size_t W = 256;
    Eigen::MatrixXd Mb, Rb, Cb, P1, P2;
    std::vector<Interval> acc(n);
    for (std::size_t c0 = 0; c0 < nM; c0 += W) {
        const std::size_t c1 = std::min(nM, c0 + W);
        const Eigen::Index w = (Eigen::Index)(c1 - c0);
        Mb = Eigen::MatrixXd::Zero((Eigen::Index)nM, w);
        Rb = Eigen::MatrixXd::Zero((Eigen::Index)nM, w);
        fill_df_cols(blocks.Dg, dots, tab, n, N, c0, c1, true, Mb, Rb);
        Cb.noalias() = A * Mb;
        P1.noalias() = Aabs * Mb.cwiseAbs();
        P2.noalias() = Aabs * Rb;
        for (Eigen::Index lc = 0; lc < w; ++lc) {
            const std::size_t c = c0 + (std::size_t)lc;
            for (int i = 0; i < n; ++i) acc[i] = Interval(0.0);
            for (std::size_t r = 0; r < nM; ++r) {
                const double delta = (r == c) ? 1.0 : 0.0;
                Interval e = (Interval(delta) - Interval(Cb((Eigen::Index)r, lc))).abs();
                e += gamma * Interval(P1((Eigen::Index)r, lc)) * inflate;
                e += Interval(P2((Eigen::Index)r, lc)) * inflate;
                e += Interval(1e-280);
                acc[(int)(r % (std::size_t)n)] += e;
            }
            const int j = (int)(c % (std::size_t)n);
            for (int i = 0; i < n; ++i) worst[i][j] = std::max(worst[i][j], acc[i].hi());
        }
    }
    Interval Z(0.0);
    for (int i = 0; i < n; ++i) {
        Interval row(0.0);
        for (int j = 0; j < n; ++j) row += Interval(worst[i][j]);
        if (row.hi() > Z.hi()) Z = row;
    }
    return Z;
}

Interval compute_Z1(const PolyField& f, const ChartSkeleton& s, const TaylorCoeffs& abar,
                    const ProjectionBlocks& blocks) {
    const int n = s.n;
    const int N = s.N;
    const double mm = min_mig(s.Lambda);
    if (!(mm > 0.0)) throw VerificationFailed("stable eigenvalue enclosure touches zero");
    const Interval lamN = Interval((double)(N + 1)) * Interval(mm);

    const int capD = std::max(N, (std::max(1, f.max_degree()) - 1) * N);
    const MultiIndexTable& tabD = mi_table(s.m, capD);
    auto mags = mag_components(abar, tabD);

    Interval Z(0.0);
    for (int i = 0; i < n; ++i) {
        Interval row(0.0);
        for (int j = 0; j < n; ++j) {
            row += ell1_norm_finite(blocks.Dg[i][j]) / lamN;
            if (capD > N) {
                Flat<double> gm =
                    apply_monomials(derivative(f.comp[i], j), MagCoeff{}, mags, tabD, capD);
                for (int dd = N + 1; dd <= capD; ++dd) {
                    double sum = 0.0;
                    for (std::size_t t = tabD.degree_begin(dd); t < tabD.degree_end(dd); ++t)
                        sum += gm.c[t];
                    if (sum != 0.0)
                        row += mag_slack(sum) / (Interval((double)dd) * Interval(mm));
                }
            }
        }
        if (row.hi() > Z.hi()) Z = row;
    }
    return Z;
}

Interval compute_Z2(const PolyField& f, const ChartSkeleton& s, const TaylorCoeffs& abar,
                    const ProjectionBlocks& blocks, double r_star) {
    const int n = s.n;
    const double mm = min_mig(s.Lambda);
    if (!(mm > 0.0)) throw VerificationFailed("stable eigenvalue enclosure touches zero");
    const Interval lamN = Interval((double)(s.N + 1)) * Interval(mm);
    const Interval invTail = Interval(1.0) / lamN;

    std::vector<Interval> rho(n);
    for (int k = 0; k < n; ++k) rho[k] = ell1_norm(abar.comp[k]) + Interval(r_star);

    std::vector<Interval> hess_sum(n, Interval(0.0));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const MonomialSum dk = derivative(f.comp[j], k);
            for (int l = 0; l < n; ++l) hess_sum[j] += norm_bound(derivative(dk, l), rho);
        }

    Interval Z(0.0);
    for (int i = 0; i < n; ++i) {
        Interval row(0.0);
        for (int j = 0; j < n; ++j) {
            double anorm = blocks.block_norm[i][j];
            if (i == j) anorm = std::max(anorm, invTail.hi());
            row += Interval(anorm) * hess_sum[j];
        }
        if (row.hi() > Z.hi()) Z = row;
    }
    return Z;
}

RadiiCertificate radii_verify(const Interval& Y0, const Interval& Z0, const Interval& Z1,
                              const Interval& Z2, double r_star, int N) {
    RadiiCertificate cert;
    cert.Y0 = Y0;
    cert.Z0 = Z0;
    cert.Z1 = Z1;
    cert.Z2 = Z2;
    cert.r_star = r_star;
    cert.N = N;
    cert.r0 = Interval(0.0);
    const Interval denom = Interval(1.0) - Z0 - Z1;
    if (!(denom.lo() > 0.0))
        throw VerificationFailed("radii polynomial: Z0 + Z1 = " + to_string(Z0 + Z1) +
                                 " reaches 1");
    double r0 = (Interval(2.0) * Y0 / denom).hi();
    if (r0 < 1e-300) r0 = 1e-300;
    if (r0 > r_star)
        throw VerificationFailed("radii polynomial: candidate radius " + std::to_string(r0) +
                                 " exceeds r_star " + std::to_string(r_star));
    const Interval rI(r0);
    const Interval p = Z2 * rI * rI - denom * rI + Y0;
    if (!(p.hi() < 0.0))
        throw VerificationFailed("radii polynomial not negative at candidate radius: p = " +
                                 to_string(p));
    cert.r0 = rI;
    return cert;
}

double choose_sigma(const PolyField& f, const VerifiedEquilibrium& eq, int N, double target) {
    const int Np = std::min(N, 24);
    if (Np < 4) return 1.0;
    const ChartSkeleton s = make_skeleton(f, eq, 1.0, Np);
    const auto a = recursion_flats(f, s);
    const MultiIndexTable& tab = mi_table(s.m, Np);
    std::vector<double> lev((std::size_t)Np + 1, 0.0);
    for (int d = 2; d <= Np; ++d) {
        double best = 0.0;
        for (int i = 0; i < s.n; ++i) {
            double sum = 0.0;
            for (std::size_t t = tab.degree_begin(d); t < tab.degree_end(d); ++t)
                sum += std::fabs(a[i].c[t]);
            best = std::max(best, sum);
        }
        lev[d] = best;
    }
    int last = Np;
    while (last >= 2 && !(std::isfinite(lev[last]) && lev[last] > 0.0)) --last;
    if (last < 3) return 1.0;
    const int first = std::max(2, last - 6);
    int cnt = 0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int d = first; d <= last; ++d) {
        if (!(lev[d] > 0.0) || !std::isfinite(lev[d])) continue;
        const double x = d, y = std::log(lev[d]);
        ++cnt;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    if (cnt < 2) return 1.0;
    const double det = cnt * sxx - sx * sx;
    if (det == 0.0) return 1.0;
    const double slope = (cnt * sxy - sx * sy) / det;
    const double level = (sy - slope * sx) / cnt;
    const double sig = std::exp((std::log(target) - (level + slope * N)) / N);
    if (!std::isfinite(sig)) return 1.0;
    return std::clamp(sig, 1e-8, 1e6);
}

ManifoldChart build_chart(const PolyField& f, const VerifiedEquilibrium& eq, double sigma_eig,
                          int N, double r_star, const std::string& eq_name,
                          const std::string& model_name) {
    std::vector<Interval> stab;
    for (const auto& l : eq.eigenvalues)
        if (l.hi() < 0.0) stab.push_back(l);
    if (stab.empty()) throw NonHyperbolic("build_chart: no certified stable direction");
    require_nonresonance(stab);

    const double sigma = sigma_eig > 0.0 ? sigma_eig : choose_sigma(f, eq, N);
    const ChartSkeleton s = make_skeleton(f, eq, sigma, N);
    const TaylorCoeffs sol = newton_solve_projection(f, s);
    const TaylorCoeffs abar = interval_lift(s, sol);
    const ProjectionBlocks blocks = build_projection_blocks(f, s, abar);
    const Interval Y0 = compute_Y0(f, s, abar, blocks);
    const Interval Z1 = compute_Z1(f, s, abar, blocks);
    const Interval Z2 = compute_Z2(f, s, abar, blocks, r_star);
    const Interval Z0 = compute_Z0(f, s, abar, blocks);
    const RadiiCertificate cert = radii_verify(Y0, Z0, Z1, Z2, r_star, N);

    ManifoldChart chart;
    chart.field = f;
    chart.equilibrium = eq;
    chart.model_name = model_name;
    chart.eq_name = eq_name;
    chart.m = s.m;
    chart.N = N;
    chart.sigma = sigma;
    chart.Lambda = s.Lambda;
    chart.eigvecs = s.xi;
    chart.coeffs = abar;
    for (auto& comp : chart.coeffs.comp) comp.tail = cert.r0;
    chart.cert = cert;
    return chart;
}

IVec ManifoldChart::eval(const std::vector<Interval>& theta) const {
    return eval_enclosure(coeffs, theta);
}

} // namespace blowup
