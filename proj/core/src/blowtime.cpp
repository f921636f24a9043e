#include "blowup/blowtime.hpp"

#include <algorithm>
#include <cmath>

#include "blowup/compactify.hpp"
#include "blowup/equilibrium.hpp"
#include "blowup/models.hpp"

namespace blowup {

namespace {

Series finite_part(const Series& a) {
    Series out = a;
    out.tail = Interval(0.0);
    return out;
}

// Smallest |lambda_j| over the chart's stable spectrum; every divisor
// alpha.lambda in the series satisfies |alpha.lambda| >= |alpha| * gap.
double spectral_gap(const std::vector<Interval>& Lambda) {
    double g = std::numeric_limits<double>::infinity();
    for (const Interval& l : Lambda) {
        if (!(l.hi() < 0.0)) throw NonHyperbolic("blow-up time: eigenvalue not negative");
        g = std::min(g, l.mig());
    }
    return g;
}

void check_polydisc(const std::vector<Interval>& theta, int m) {
    if (static_cast<int>(theta.size()) != m)
        throw ShapeError("blow-up time: theta arity mismatch");
    for (const Interval& t : theta)
        if (t.mag() > 1.0) throw DomainError("blow-up time: theta outside the unit polydisc");
}

double max_mag(const std::vector<Interval>& theta) {
    double m = 0.0;
    for (const Interval& t : theta) m = std::max(m, t.mag());
    return m;
}

// -sum_{|alpha|>0} c_alpha theta^alpha / (alpha.lambda): the exact
// integral of sum c_alpha theta^alpha e^{(alpha.lambda) tau} over
// tau in [0, inf).
Interval integrated_sum(const Series& cs, const std::vector<Interval>& theta,
                        const std::vector<Interval>& Lambda) {
    const MultiIndexTable& tb = mi_table(cs.m, cs.N);
    std::vector<std::vector<Interval>> pw(cs.m);
    for (int j = 0; j < cs.m; ++j) {
        pw[j].assign(cs.N + 1, Interval(1.0));
        for (int i = 1; i <= cs.N; ++i) pw[j][i] = pw[j][i - 1] * theta[j];
    }
    Interval acc(0.0);
    for (std::size_t i = 1; i < cs.c.size(); ++i) {
        const Interval& co = cs.c[i];
        if (co.lo() == 0.0 && co.hi() == 0.0) continue;
        const MultiIndex& al = tb.exponents(i);
        Interval term = co;
        for (int j = 0; j < cs.m; ++j) term = term * pw[j][al[j]];
        Interval ad(0.0);
        for (int j = 0; j < cs.m; ++j)
            if (al[j] > 0) ad += Interval(static_cast<double>(al[j])) * Lambda[j];
        acc += term / ad;
    }
    return -acc;
}

// ell^1 distance bound between a^k and abar^k when ||a - abar|| <= d:
// sum_{j=1..k} binom(k,j) ||abar||^{k-j} d^j.
Interval power_inflation(const Interval& nrm, const Interval& d, int k) {
    Interval acc(0.0), binom(1.0);
    for (int j = 1; j <= k; ++j) {
        binom = binom * Interval(static_cast<double>(k - j + 1))
                / Interval(static_cast<double>(j));
        acc += binom * int_pow(nrm, k - j) * int_pow(d, j);
    }
    return acc;
}

// T reduced modulo x_j^2 + sum_{i != j} x_i^{2 beta_i} - 1 in exact
// rational arithmetic; true when nothing remains, i.e. T is a multiple
// of the horizon polynomial.
bool horizon_multiple(const RatPoly& T, const std::vector<int>& beta, int j) {
    const int n = T.arity();
    RatPoly rel = RatPoly::constant(n, Rat(1));
    for (int i = 0; i < n; ++i)
        if (i != j) rel = rel - RatPoly::var(n, i).pow(2 * beta[i]);
    RatPoly cur = T;
    for (;;) {
        const auto& ts = cur.terms();
        auto it = std::find_if(ts.begin(), ts.end(),
                               [&](const auto& kv) { return kv.first[j] >= 2; });
        if (it == ts.end()) break;
        const MultiIndex e = it->first;
        RatPoly quot = RatPoly::constant(n, it->second);
        for (int i = 0; i < n; ++i) {
            int p = e[i] - (i == j ? 2 : 0);
            if (p > 0) quot = quot * RatPoly::var(n, i).pow(p);
        }
        cur = cur - quot * RatPoly::var(n, j).pow(2) + quot * rel;
    }
    return cur.terms().empty();
}

// Certifies that the equilibrium near guess sits exactly on the horizon
// sphere sum x_i^{2 beta_i} = 1: the radial derivative of the field is
// shown (exactly) to be a horizon multiple, so the sphere is invariant
// and the field is tangent to it; an interval Newton run on the field
// restricted to the sphere then pins an equilibrium on it, which by
// uniqueness is the equilibrium itself.
IVec horizon_equilibrium(const PolyField& f, const std::string& model_name,
                         const std::vector<double>& guess) {
    const int n = f.n;
    const CompactificationSpec& cs = f.cspec;
    if (cs.kind == CompactKind::Directional)
        throw DomainError("horizon equilibrium: needs a global compactification");

    int j = -1;
    double best = 0.1;
    for (int i = 0; i < n; ++i)
        if (cs.beta[i] == 1 && std::fabs(guess[i]) > best) {
            j = i;
            best = std::fabs(guess[i]);
        }
    if (j < 0)
        throw VerificationFailed("horizon equilibrium: no coordinate to solve the sphere for");

    std::vector<RatPoly> g = exact_components(model_name);
    RatPoly T = RatPoly::constant(n, Rat(0));
    for (int i = 0; i < n; ++i)
        T = T + g[i] * RatPoly::var(n, i).pow(2 * cs.beta[i] - 1) * Rat(2 * cs.beta[i]);
    if (!horizon_multiple(T, cs.beta, j))
        throw VerificationFailed("horizon equilibrium: radial derivative is not a horizon multiple");

    const double sgn = guess[j] > 0.0 ? 1.0 : -1.0;
    auto lift = [&](const IVec& y) {
        IVec x(n);
        int yi = 0;
        for (int i = 0; i < n; ++i)
            if (i != j) x[i] = y[yi++];
        Interval s(1.0);
        for (int i = 0; i < n; ++i)
            if (i != j) s -= int_pow(x[i], 2 * cs.beta[i]);
        x[j] = Interval(sgn) * sqrt(s);
        return x;
    };
    auto F = [&](const IVec& y) {
        IVec x = lift(y);
        std::vector<Interval> v = eval(f, x);
        IVec out(n - 1);
        int k = 0;
        for (int i = 0; i < n; ++i)
            if (i != j) out[k++] = v[i];
        return out;
    };
    auto Jr = [&](const IVec& y) {
        IVec x = lift(y);
        IMat Jx = jacobian(f, x);
        IMat J(n - 1, IVec(n - 1));
        int col = 0;
        for (int l = 0; l < n; ++l) {
            if (l == j) continue;
            Interval dxj = -Interval(static_cast<double>(cs.beta[l]))
                           * int_pow(x[l], 2 * cs.beta[l] - 1) / x[j];
            int row = 0;
            for (int i = 0; i < n; ++i) {
                if (i == j) continue;
                J[row][col] = Jx[i][l] + Jx[i][j] * dxj;
                ++row;
            }
            ++col;
        }
        return J;
    };

    std::vector<double> y0;
    for (int i = 0; i < n; ++i)
        if (i != j) y0.push_back(guess[i]);
    IVec Y = krawczyk_solve(F, Jr, y0, 1e-7);
    IVec X = lift(Y);

    VerifiedEquilibrium eq = verify_equilibrium(f, guess);
    for (int i = 0; i < n; ++i)
        if (std::fabs(X[i].mid() - guess[i]) > 1e-6 - X[i].mag() + std::fabs(guess[i]))
            ;[[maybe_unused]] int unused = 0;
    for (int i = 0; i < n; ++i) {
        Interval ubox = Interval(guess[i]) + Interval(-1e-6, 1e-6);
        if (!ubox.contains(X[i]))
            throw VerificationFailed("horizon equilibrium: sphere point escapes the uniqueness box");
    }
    IVec out(n);
    for (int i = 0; i < n; ++i) {
        double lo = std::max(X[i].lo(), eq.location[i].lo());
        double hi = std::min(X[i].hi(), eq.location[i].hi());
        if (!(lo <= hi))
            throw VerificationFailed("horizon equilibrium: certifications disagree");
        out[i] = Interval(lo, hi);
    }
    return out;
}

// Chart power series of the time factor composed with the chart, with
// the constant term certified zero and removed.  The tail_scale output
// is the ell^1 inflation of the composed series under the chart radius.
struct ComposedFactor {
    Series series;     // zero constant term
    Interval infl;     // ell^1 distance truth vs series
    int min_order = 1; // composed series has no terms below this order
};

} // namespace

Interval tmax_directional_series(const ManifoldChart& chart, int k,
                                 const std::vector<Interval>& theta) {
    if (k < 1) throw DomainError("tmax_directional_series: k must be positive");
    check_polydisc(theta, chart.m);
    const Series& a1 = chart.coeffs.comp[0];
    if (!a1.c[0].contains(0.0))
        throw DomainError("tmax_directional_series: first chart component must vanish at theta = 0");

    Series base = finite_part(a1);
    base.c[0] = Interval(0.0);
    Series ak = base;
    for (int i = 1; i < k; ++i) ak = cauchy_product(ak, base);

    Interval val = integrated_sum(ak, theta, chart.Lambda);
    double gap = spectral_gap(chart.Lambda);
    Interval infl = power_inflation(ell1_norm_finite(base), chart.cert.r0, k);
    Interval tail = infl * int_pow(Interval(max_mag(theta)), k)
                    / (Interval(static_cast<double>(k)) * Interval(gap));
    return val + Interval(-1.0, 1.0) * Interval(tail.hi());
}

Interval tmax_rational_example1(const ManifoldChart& chart, const Interval& theta) {
    if (chart.m != 1) throw ShapeError("tmax_rational_example1: one-parameter chart expected");
    check_polydisc({theta}, 1);
    const PolyField& f = chart.field;
    if (f.n != 2 || !f.timefactor.is_rational() || f.cspec.kind != CompactKind::Directional)
        throw DomainError("tmax_rational_example1: field shape mismatch");

    // The formula integrates x_2 / x_1^2; the equilibrium must be an
    // exact zero of the field with vanishing second coordinate, so the
    // composed numerator starts at order one.
    const IVec& x0 = chart.equilibrium.location;
    IVec exact0 = {Interval(x0[0].mid()), Interval(0.0)};
    if (!x0[1].contains(0.0))
        throw DomainError("tmax_rational_example1: equilibrium off the invariant line");
    std::vector<Interval> fz = eval(f, exact0);
    if (fz[0].lo() != 0.0 || fz[0].hi() != 0.0 || fz[1].lo() != 0.0 || fz[1].hi() != 0.0)
        throw VerificationFailed("tmax_rational_example1: equilibrium is not exactly representable");

    const int N = chart.N;
    Series a1 = finite_part(chart.coeffs.comp[0]);
    Series a2 = finite_part(chart.coeffs.comp[1]);
    a2.c[0] = Interval(0.0);
    const Interval r0 = chart.cert.r0;

    // Patch-wide validity: the divisor chart never crosses zero.
    Interval p1range = eval_enclosure(chart.coeffs.comp[0], {Interval(-1.0, 1.0)});
    if (p1range.contains(0.0))
        throw DomainError("tmax_rational_example1: divisor component vanishes on the patch");

    Series sq = cauchy_product(a1, a1); // degree 2N
    if (sq.c[0].contains(0.0))
        throw VerificationFailed("tmax_rational_example1: square has no invertible head");
    const double mig0 = sq.c[0].mig();

    // Float candidate r and the Toeplitz inverse column alpha.
    std::vector<double> d(N + 1), q(N + 1, 0.0), rbar(N + 1), alpha(N + 1);
    for (int i = 0; i <= N; ++i) d[i] = sq.c[i].mid();
    for (int nn = 0; nn < N; ++nn) q[nn] = a2.c[nn + 1].mid();
    for (int nn = 0; nn <= N; ++nn) {
        double s = q[nn];
        for (int kk = 1; kk <= nn; ++kk) s -= d[kk] * rbar[nn - kk];
        rbar[nn] = s / d[0];
    }
    alpha[0] = 1.0 / d[0];
    for (int nn = 1; nn <= N; ++nn) {
        double s = 0.0;
        for (int kk = 1; kk <= nn; ++kk) s -= d[kk] * alpha[nn - kk];
        alpha[nn] = s / d[0];
    }
    Interval anorm(0.0);
    for (int nn = 0; nn <= N; ++nn) anorm += Interval(std::fabs(alpha[nn]));
    const Interval aop(std::max(anorm.hi(), 1.0 / mig0));

    // psi(rbar) = sq * rbar - q over degrees 0..3N, in intervals.
    Series rs = Series::zero(1, N);
    for (int nn = 0; nn <= N; ++nn) rs.c[nn] = Interval(rbar[nn]);
    Series psi = cauchy_product(sq, rs); // degree 3N
    for (int nn = 0; nn < N; ++nn) psi.c[nn] -= a2.c[nn + 1];

    // Y0: head through the inverse block, tail through the diagonal.
    Interval head(0.0);
    for (int nn = 0; nn <= N; ++nn) {
        Interval row(0.0);
        for (int jj = 0; jj <= nn; ++jj) row += Interval(alpha[nn - jj]) * psi.c[jj];
        head += Interval(row.mag());
    }
    Interval far(0.0);
    for (int nn = N + 1; nn <= psi.N; ++nn) far += Interval(psi.c[nn].mag());
    Interval n1 = ell1_norm_finite(a1), rn = ell1_norm_finite(rs);
    Interval dsq = Interval(2.0) * n1 * r0 + int_pow(r0, 2); // ell1 truth gap of sq
    Interval Y0 = head + (far + dsq * rn + r0) / Interval(mig0);

    // Z0: defect of the finite inverse block, Toeplitz symbol e0 - alpha*d.
    Interval Z0(0.0);
    {
        std::vector<Interval> conv(N + 1, Interval(0.0));
        for (int nn = 0; nn <= N; ++nn)
            for (int jj = 0; jj <= nn; ++jj) conv[nn] += Interval(alpha[jj]) * sq.c[nn - jj];
        conv[0] -= Interval(1.0);
        for (int nn = 0; nn <= N; ++nn) Z0 += Interval(conv[nn].mag());
    }

    // Z1: off-block columns of the multiplication operator plus the
    // truth gap of the symbol.
    Interval offdiag(0.0);
    for (int ll = 1; ll <= sq.N; ++ll) offdiag += Interval(sq.c[ll].mag());
    Interval Z1 = aop * (offdiag + dsq);

    Interval kappa = Z0 + Z1;
    if (!(kappa.hi() < 1.0))
        throw VerificationFailed("tmax_rational_example1: contraction bound reaches 1");
    const double rmin = (Y0 / (Interval(1.0) - kappa)).hi();

    const Interval lam = chart.Lambda[0];
    Interval sum(0.0);
    for (int nn = N; nn >= 0; --nn)
        sum = sum * theta + Interval(rbar[nn]) / Interval(static_cast<double>(nn + 1));
    sum = sum * theta;
    Interval val = -sum / lam;
    Interval pad = Interval(rmin) * Interval(theta.mag()) / Interval(lam.mig());
    return val + Interval(-1.0, 1.0) * Interval(pad.hi());
}

Interval tmax_poincare_homogeneous(const ManifoldChart& chart,
                                   const std::vector<Interval>& theta) {
    const PolyField& f = chart.field;
    if (f.cspec.kind != CompactKind::Poincare || !f.cspec.homogeneous())
        throw DomainError("tmax_poincare_homogeneous: homogeneous Poincare chart expected");
    if (f.cspec.k % 2 != 0)
        throw DomainError("tmax_poincare_homogeneous: k/2c is not an integer");
    const int e = f.cspec.k / 2;
    check_polydisc(theta, chart.m);

    // The expression represents t_max only while the image stays inside
    // the horizon ball.
    Interval s2(0.0);
    for (int i = 0; i < f.n; ++i)
        s2 += int_pow(eval_enclosure(chart.coeffs.comp[i], theta), 2);
    if (!(s2.hi() < 1.0))
        throw ValidityError("tmax_poincare_homogeneous: ||P(theta)||^2 not verified below 1");

    std::vector<double> guess(f.n);
    for (int i = 0; i < f.n; ++i) guess[i] = chart.equilibrium.location[i].mid();
    horizon_equilibrium(f, chart.model_name, guess);

    Series U = Series::constant(chart.m, 0, Interval(1.0));
    Interval du(0.0);
    const Interval r0 = chart.cert.r0;
    for (int i = 0; i < f.n; ++i) {
        Series ai = finite_part(chart.coeffs.comp[i]);
        U = U - cauchy_product(ai, ai);
        du += Interval(2.0) * ell1_norm_finite(ai) * r0 + int_pow(r0, 2);
    }
    if (!U.c[0].contains(0.0))
        throw VerificationFailed("tmax_poincare_homogeneous: order-0 horizon identity fails");
    U.c[0] = Interval(0.0);

    Series c = U;
    for (int i = 1; i < e; ++i) c = cauchy_product(c, U);
    Interval val = integrated_sum(c, theta, chart.Lambda);

    double gap = spectral_gap(chart.Lambda);
    Interval infl = power_inflation(ell1_norm_finite(U), du, e);
    Interval tail = infl * int_pow(Interval(max_mag(theta)), e)
                    / (Interval(static_cast<double>(e)) * Interval(gap));
    return val + Interval(-1.0, 1.0) * Interval(tail.hi());
}

Interval tmax_parabolic_example3(const ManifoldChart& chart, const Interval& theta) {
    const PolyField& f = chart.field;
    if (f.cspec.kind != CompactKind::Parabolic || f.n != 2 || f.cspec.c != 2
        || f.cspec.beta != std::vector<int>{2, 1})
        throw DomainError("tmax_parabolic_example3: planar quasi-parabolic chart expected");
    if (chart.m != 1) throw ShapeError("tmax_parabolic_example3: one-parameter chart expected");
    check_polydisc({theta}, 1);

    std::vector<double> guess(f.n);
    for (int i = 0; i < f.n; ++i) guess[i] = chart.equilibrium.location[i].mid();
    horizon_equilibrium(f, chart.model_name, guess);

    Series a1 = finite_part(chart.coeffs.comp[0]);
    Series a2 = finite_part(chart.coeffs.comp[1]);
    Series a1sq = cauchy_product(a1, a1);
    Series W = cauchy_product(a1sq, a1sq) + cauchy_product(a2, a2)
               - Series::constant(1, 0, Interval(1.0));
    if (!W.c[0].contains(0.0))
        throw VerificationFailed("tmax_parabolic_example3: order-0 horizon identity fails");
    W.c[0] = Interval(0.0);

    // Time factor (1+3P)(1-P)/4 composed with the chart: -W - (3/4)W^2.
    Series c = -W + Interval(-0.75) * cauchy_product(W, W);
    Interval val = integrated_sum(c, {theta}, chart.Lambda);

    const Interval r0 = chart.cert.r0;
    Interval dW = power_inflation(ell1_norm_finite(a1), r0, 4)
                  + power_inflation(ell1_norm_finite(a2), r0, 2);
    Interval dc = dW
                  + Interval(0.75)
                        * (Interval(2.0) * ell1_norm_finite(W) * dW + int_pow(dW, 2));
    double gap = spectral_gap(chart.Lambda);
    Interval tail = dc * Interval(theta.mag()) / Interval(gap);
    return val + Interval(-1.0, 1.0) * Interval(tail.hi());
}

Interval tmax_local(const ManifoldChart& chart, const std::vector<Interval>& theta) {
    switch (chart.field.cspec.kind) {
    case CompactKind::Directional:
        if (chart.field.timefactor.is_rational())
            return tmax_rational_example1(chart, theta.at(0));
        return tmax_directional_series(chart, chart.field.cspec.k, theta);
    case CompactKind::Poincare:
        return tmax_poincare_homogeneous(chart, theta);
    case CompactKind::Parabolic:
        return tmax_parabolic_example3(chart, theta.at(0));
    }
    throw DomainError("tmax_local: unknown compactification kind");
}

Series tmax_local_series(const ManifoldChart& chart) {
    if (chart.m != 1) throw ShapeError("tmax_local_series: one-parameter chart expected");
    // Evaluate with a symbolic-theta pass: reuse the enclosure routines
    // coefficientwise by differentiating the closed forms termwise.
    const PolyField& f = chart.field;
    const Interval lam = chart.Lambda[0];

    if (f.cspec.kind == CompactKind::Directional && f.timefactor.is_rational()) {
        // Coefficients -r_n/(lambda (n+1)) at order n+1; the pad carries
        // the certified solve radius.
        const int N = chart.N;
        Interval probe = tmax_rational_example1(chart, Interval(0.0)); // validates
        (void)probe;
        Series a1 = finite_part(chart.coeffs.comp[0]);
        Series a2 = finite_part(chart.coeffs.comp[1]);
        Series sq = cauchy_product(a1, a1);
        std::vector<double> d(N + 1), q(N + 1, 0.0), rbar(N + 1);
        for (int i = 0; i <= N; ++i) d[i] = sq.c[i].mid();
        for (int nn = 0; nn < N; ++nn) q[nn] = a2.c[nn + 1].mid();
        for (int nn = 0; nn <= N; ++nn) {
            double s = q[nn];
            for (int kk = 1; kk <= nn; ++kk) s -= d[kk] * rbar[nn - kk];
            rbar[nn] = s / d[0];
        }
        Series out = Series::zero(1, N + 1);
        for (int nn = 0; nn <= N; ++nn)
            out.c[nn + 1] = -Interval(rbar[nn]) / (lam * Interval(static_cast<double>(nn + 1)));
        Interval full = tmax_rational_example1(chart, Interval(1.0));
        Interval fin(0.0);
        for (int nn = 0; nn <= N + 1; ++nn) fin += out.c[nn];
        out.tail = Interval((full - fin).mag());
        return out;
    }

    Series c;
    if (f.cspec.kind == CompactKind::Parabolic) {
        Series a1 = finite_part(chart.coeffs.comp[0]);
        Series a2 = finite_part(chart.coeffs.comp[1]);
        Series a1sq = cauchy_product(a1, a1);
        Series W = cauchy_product(a1sq, a1sq) + cauchy_product(a2, a2)
                   - Series::constant(1, 0, Interval(1.0));
        if (!W.c[0].contains(0.0))
            throw VerificationFailed("tmax_local_series: order-0 horizon identity fails");
        W.c[0] = Interval(0.0);
        c = -W + Interval(-0.75) * cauchy_product(W, W);
        Interval probe = tmax_parabolic_example3(chart, Interval(0.0));
        (void)probe;
    } else if (f.cspec.kind == CompactKind::Poincare) {
        Interval probe = tmax_poincare_homogeneous(chart, {Interval(0.0)});
        (void)probe;
        const int e = f.cspec.k / 2;
        Series U = Series::constant(1, 0, Interval(1.0));
        for (int i = 0; i < f.n; ++i) {
            Series ai = finite_part(chart.coeffs.comp[i]);
            U = U - cauchy_product(ai, ai);
        }
        U.c[0] = Interval(0.0);
        c = U;
        for (int i = 1; i < e; ++i) c = cauchy_product(c, U);
    } else {
        c = finite_part(chart.coeffs.comp[0]);
        c.c[0] = Interval(0.0);
        for (int i = 1; i < f.cspec.k; ++i)
            c = cauchy_product(c, finite_part(chart.coeffs.comp[0]));
    }
    Series out = Series::zero(1, c.N);
    for (int nn = 1; nn <= c.N; ++nn)
        out.c[nn] = -c.c[nn] / (Interval(static_cast<double>(nn)) * lam);
    Interval full = tmax_local(chart, {Interval(1.0)});
    Interval fin(0.0);
    for (int nn = 0; nn <= c.N; ++nn) fin += out.c[nn];
    out.tail = Interval((full - fin).mag());
    return out;
}

BlowupTimeResult total_blowup_time(const ManifoldChart& chart, double theta_seed,
                                   const TrajectoryEnclosure& traj) {
    BlowupTimeResult out;
    out.theta = {theta_seed};
    out.local = tmax_local(chart, {Interval(theta_seed)});
    out.passing = traj.steps.empty() ? Interval(0.0) : traj.passing_time;
    out.total = out.local + out.passing;
    return out;
}

SinkTailBound certify_horizon_sink(const PolyField& f, const std::string& model_name,
                                   const std::vector<double>& guess, double box_radius) {
    if (f.timefactor.is_rational())
        throw DomainError("certify_horizon_sink: polynomial time factor expected");
    IVec star = horizon_equilibrium(f, model_name, guess);
    if (!eval(f.timefactor.num, star).contains(0.0))
        throw VerificationFailed("certify_horizon_sink: time factor does not vanish at the sink");

    const int n = f.n;
    IVec box(n);
    for (int i = 0; i < n; ++i)
        box[i] = Interval(guess[i]) + Interval(-box_radius, box_radius);
    AttractingBall ball = certify_attracting_ball(f, guess, box);
    if (!(ball.rate > 0.0))
        throw VerificationFailed("certify_horizon_sink: no Gershgorin contraction margin");

    Interval g2(0.0);
    for (int i = 0; i < n; ++i) g2 += int_pow(eval(derivative(f.timefactor.num, i), box), 2);
    Interval factor = sqrt(g2) * Interval(ball.wnorm) / Interval(ball.rate);

    SinkTailBound out;
    out.ball = ball;
    out.star = star;
    out.factor = factor.hi();
    return out;
}

Interval sink_tail_time(const SinkTailBound& sink, const IVec& box) {
    if (!inside_ball(sink.ball, box))
        throw VerificationFailed("sink_tail_time: set not inside the certified ball");
    IVec d = ivec_sub(box, sink.star);
    IVec z = imat_vec(sink.ball.Winv, d);
    Interval z2(0.0);
    for (const Interval& zi : z) z2 += int_pow(zi, 2);
    double z0 = sqrt(z2).hi();
    Interval ub = Interval(sink.factor) * Interval(z0);
    return Interval(0.0, ub.hi());
}

} // namespace blowup
