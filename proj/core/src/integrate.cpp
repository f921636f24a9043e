#include "blowup/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "blowup/equilibrium.hpp"

namespace blowup {

namespace {

bool subset(const IVec& inner, const IVec& outer) {
    for (std::size_t i = 0; i < inner.size(); ++i)
        if (inner[i].lo() < outer[i].lo() || inner[i].hi() > outer[i].hi()) return false;
    return true;
}

bool subset(const IMat& inner, const IMat& outer) {
    for (std::size_t i = 0; i < inner.size(); ++i)
        if (!subset(inner[i], outer[i])) return false;
    return true;
}

// Levels 0..p of the solution series through seed.  Products never move
// mass to lower degrees, so level k is final once written.
TaylorCoeffs solution_series(const PolyField& f, const IVec& seed, int p) {
    TaylorCoeffs a = TaylorCoeffs::zero(f.n, 1, p);
    for (int i = 0; i < f.n; ++i) a.comp[i].c[0] = seed[i];
    for (int k = 0; k + 1 <= p; ++k) {
        TaylorCoeffs g = apply_to_series_upto(f, a, k);
        for (int i = 0; i < f.n; ++i)
            a.comp[i].c[k + 1] = g.comp[i].c[k] / Interval(static_cast<double>(k + 1));
    }
    return a;
}

// dser[i][j] = series of (Df)_{ij} along a, needed through degree p-1.
std::vector<std::vector<Series>> jacobian_series(const PolyField& f, const TaylorCoeffs& a,
                                                 int p) {
    std::vector<std::vector<Series>> out(f.n);
    for (int i = 0; i < f.n; ++i) {
        out[i].reserve(f.n);
        for (int j = 0; j < f.n; ++j)
            out[i].push_back(apply_to_series_upto(derivative(f.comp[i], j), a, p - 1));
    }
    return out;
}

// Degree-k coefficient of the univariate product a*b.
Interval conv_at(const Series& a, const Series& b, int k) {
    Interval s(0.0);
    for (int d = 0; d <= k; ++d) s += a.c[d] * b.c[k - d];
    return s;
}

// V' = Df(x(u)) V with V(0) = V0, levels 0..p.
std::vector<std::vector<Series>> variational_series(const std::vector<std::vector<Series>>& dser,
                                                    const IMat& V0, int p) {
    const int n = static_cast<int>(V0.size());
    std::vector<std::vector<Series>> V(n, std::vector<Series>(n, Series::zero(1, p)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) V[i][j].c[0] = V0[i][j];
    for (int k = 0; k + 1 <= p; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Interval s(0.0);
                for (int l = 0; l < n; ++l) s += conv_at(dser[i][l], V[l][j], k);
                V[i][j].c[k + 1] = s / Interval(static_cast<double>(k + 1));
            }
    return V;
}

// Picard tube over [0, h] for every starting point in X.
bool find_tube(const PolyField& f, const IVec& X, double h, double inflate, IVec& B_out) {
    const Interval span(0.0, h);
    IVec fx = eval(f, X);
    IVec B(f.n);
    for (int i = 0; i < f.n; ++i) B[i] = Interval::hull(X[i], X[i] + span * fx[i]);
    double grow = inflate;
    for (int attempt = 0; attempt < 10; ++attempt) {
        IVec Bw(f.n);
        for (int i = 0; i < f.n; ++i) {
            if (B[i].mag() > 1e50) return false; // runaway candidate, shrink h instead
            Bw[i] = B[i].widened(grow * (1e-12 + B[i].mag()));
        }
        IVec fB = eval(f, Bw);
        IVec P(f.n);
        for (int i = 0; i < f.n; ++i) P[i] = X[i] + span * fB[i];
        if (subset(P, Bw)) {
            // another pass through the contraction tightens the tube
            IVec fP = eval(f, P);
            IVec P2(f.n);
            for (int i = 0; i < f.n; ++i) P2[i] = X[i] + span * fP[i];
            B_out = subset(P2, P) ? P2 : P;
            return true;
        }
        for (int i = 0; i < f.n; ++i) B[i] = Interval::hull(B[i], P[i]);
        grow *= 2.0;
    }
    return false;
}

// Tube for the variational flow: BV with I + [0,h] Df(B) BV inside BV.
bool find_vtube(const IMat& DfB, double h, double inflate, IMat& BV_out) {
    const int n = static_cast<int>(DfB.size());
    const Interval span(0.0, h);
    IMat BV = imat_identity(n);
    double grow = inflate;
    for (int attempt = 0; attempt < 10; ++attempt) {
        IMat BVw = BV;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (BV[i][j].mag() > 1e50) return false;
                BVw[i][j] = BV[i][j].widened(grow * (1e-12 + BV[i][j].mag()));
            }
        IMat M = imat_mul(DfB, BVw);
        IMat P = imat_identity(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) P[i][j] = P[i][j] + span * M[i][j];
        if (subset(P, BVw)) {
            BV_out = P;
            return true;
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) BV[i][j] = Interval::hull(BV[i][j], P[i][j]);
        grow *= 2.0;
    }
    return false;
}

} // namespace

IVec FlowSet::box() const {
    const int n = static_cast<int>(c.size());
    IVec out(n);
    for (int i = 0; i < n; ++i) {
        Interval v(c[i]);
        for (int j = 0; j < n; ++j) v += Interval(A(i, j)) * r[j];
        out[i] = v;
    }
    return out;
}

FlowSet FlowSet::from_box(const IVec& X) {
    const int n = static_cast<int>(X.size());
    FlowSet s;
    s.c = Eigen::VectorXd(n);
    s.A = Eigen::MatrixXd::Identity(n, n);
    s.r = IVec(n);
    for (int i = 0; i < n; ++i) {
        s.c[i] = X[i].mid();
        s.r[i] = X[i] - Interval(s.c[i]);
    }
    return s;
}

FlowSet FlowSet::from_point(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    FlowSet s;
    s.c = Eigen::VectorXd(n);
    s.A = Eigen::MatrixXd::Identity(n, n);
    s.r = IVec(n, Interval(0.0));
    for (int i = 0; i < n; ++i) s.c[i] = x[i];
    return s;
}

StepResult rigorous_step(const PolyField& f, const FlowSet& X, double h_try,
                         const IntegratorOptions& opts) {
    const int n = f.n;
    const int p = opts.order;
    if (p < 2) throw DomainError("rigorous_step: order must be >= 2");
    IVec Xb = X.box();
    for (double h = std::min(h_try, opts.h_max); h >= opts.h_min; h *= 0.5) {
        IVec B;
        if (!find_tube(f, Xb, h, opts.tube_inflate, B)) continue;
        IMat BV;
        if (!find_vtube(jacobian(f, B), h, opts.tube_inflate, BV)) continue;

        TaylorCoeffs xs = solution_series(f, Xb, p);
        TaylorCoeffs xt = solution_series(f, B, p);

        std::vector<Interval> hk(p + 1);
        hk[0] = Interval(1.0);
        for (int k = 1; k <= p; ++k) hk[k] = hk[k - 1] * Interval(h);

        double relrem = 0.0;
        for (int i = 0; i < n; ++i)
            relrem = std::max(relrem, (hk[p] * xt.comp[i].c[p]).mag() / (1.0 + Xb[i].mag()));
        if (relrem > opts.tol) continue;

        IVec cseed(n);
        for (int i = 0; i < n; ++i) cseed[i] = Interval(X.c[i]);
        TaylorCoeffs xc = solution_series(f, cseed, p);

        auto Vs = variational_series(jacobian_series(f, xs, p), imat_identity(n), p);
        auto Vt = variational_series(jacobian_series(f, xt, p), BV, p);

        IVec chat(n);
        for (int i = 0; i < n; ++i) {
            Interval v(0.0);
            for (int k = 0; k < p; ++k) v += xc.comp[i].c[k] * hk[k];
            chat[i] = v + xt.comp[i].c[p] * hk[p];
        }
        IMat J = imat_zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Interval v(0.0);
                for (int k = 0; k < p; ++k) v += Vs[i][j].c[k] * hk[k];
                J[i][j] = v + Vt[i][j].c[p] * hk[p];
            }

        FlowSet nxt;
        nxt.c = Eigen::VectorXd(n);
        IVec cerr(n);
        for (int i = 0; i < n; ++i) {
            nxt.c[i] = chat[i].mid();
            cerr[i] = chat[i] - Interval(nxt.c[i]);
        }
        IMat M = imat_mul(J, dmat_to_imat(X.A));

        // Lohner re-basing: QR of the propagated basis with columns
        // ordered by their contribution to the set.
        Eigen::MatrixXd Mm = imat_mid(M);
        std::vector<int> perm(n);
        for (int j = 0; j < n; ++j) perm[j] = j;
        std::vector<double> weight(n);
        for (int j = 0; j < n; ++j) weight[j] = Mm.col(j).norm() * X.r[j].rad();
        std::sort(perm.begin(), perm.end(), [&](int a, int b) { return weight[a] > weight[b]; });
        Eigen::MatrixXd Ms(n, n);
        for (int j = 0; j < n; ++j) Ms.col(j) = Mm.col(perm[j]);
        Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(Ms).householderQ();
        if (!Q.allFinite()) Q = Eigen::MatrixXd::Identity(n, n);
        nxt.A = Q;
        // r' = (Q^-1 M) r + Q^-1 cerr: the basis product is formed first
        // so the box is wrapped once, not twice.
        IMat Qi = imat_inverse_small(dmat_to_imat(Q));
        nxt.r = ivec_add(imat_vec(imat_mul(Qi, M), X.r), imat_vec(Qi, cerr));

        StepResult out;
        out.h = h;
        out.next = nxt;
        out.tube = B;
        out.model.reserve(n);
        for (int i = 0; i < n; ++i) {
            Series s = Series::zero(1, p);
            for (int k = 0; k < p; ++k) s.c[k] = xs.comp[i].c[k] * hk[k];
            s.c[p] = xt.comp[i].c[p] * hk[p];
            out.model.push_back(std::move(s));
        }
        return out;
    }
    throw NoEnclosure("rigorous_step: no admissible step size above h_min");
}

// Reciprocal of a univariate series on the unit disc, validated by the
// defect: for a candidate R, 1/d = R + R e + R e^2 + ... with
// e = 1 - d R, so |1/d - R| <= ||R|| ||e|| / (1 - ||e||) whenever
// ||e|| < 1 in the sup norm over |u| <= 1.  Returns false when the
// constant term straddles zero or the defect is too large.
static bool unit_reciprocal(const Series& d, Series& out) {
    if (d.m != 1) throw ShapeError("unit_reciprocal: univariate input expected");
    if (d.c[0].contains(0.0)) return false;
    int N = d.N;
    Series R = Series::zero(1, N);
    double d0 = d.c[0].mid();
    std::vector<double> r(N + 1, 0.0);
    r[0] = 1.0 / d0;
    for (int k = 1; k <= N; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += d.c[j].mid() * r[k - j];
        r[k] = -s / d0;
    }
    for (int k = 0; k <= N; ++k) R.c[k] = Interval(r[k]);
    Series e = Series::constant(1, 0, Interval(1.0)) - cauchy_product(d, R);
    double en = ell1_norm(e).hi();
    if (!(en < 1.0)) return false;
    double rn = ell1_norm(R).hi();
    Interval pad = (Interval(rn) * Interval(en)) / (Interval(1.0) - Interval(en));
    R.tail += Interval(pad.hi());
    out = std::move(R);
    return true;
}

// Time-factor value along the step as a univariate series in u; false
// when a rational factor cannot be inverted on the step.
static bool step_time_series(const PolyField& f, const std::vector<Series>& model, Series& out) {
    TaylorCoeffs a;
    a.n = static_cast<int>(model.size());
    a.m = 1;
    a.N = model.front().N;
    a.comp = model;
    Series q = apply_to_series_upto(f.timefactor.num, a, a.N);
    if (f.timefactor.is_rational()) {
        Series den = apply_to_series_upto(f.timefactor.den, a, a.N);
        Series rec;
        if (!unit_reciprocal(den, rec)) return false;
        q = cauchy_product_upto(q, rec, a.N);
    }
    out = std::move(q);
    return true;
}

Interval step_time_integral(const PolyField& f, const StepResult& step) {
    Series q;
    if (!step_time_series(f, step.model, q))
        return Interval(step.h) * time_factor_value(f, step.tube);
    Interval I(0.0);
    for (int k = 0; k <= q.N; ++k) I += q.c[k] / Interval(static_cast<double>(k + 1));
    I += q.tail * Interval(-1.0, 1.0);
    return Interval(step.h) * I;
}

Interval partial_step_time(const PolyField& f, const TrajStep& step, const Interval& u) {
    if (u.lo() < 0.0 || u.hi() > 1.0) throw DomainError("partial_step_time: u outside [0, 1]");
    Series q;
    if (!step_time_series(f, step.model, q)) {
        Interval frac(u.lo(), u.hi());
        return Interval(step.h) * time_factor_value(f, step.box) * frac;
    }
    Interval I(0.0);
    for (int k = 0; k <= q.N; ++k)
        I += q.c[k] * int_pow(u, k + 1) / Interval(static_cast<double>(k + 1));
    I += q.tail * Interval(-1.0, 1.0) * Interval(u.mag());
    return Interval(step.h) * I;
}

FlowOutcome integrate_until(const PolyField& f, const FlowSet& start,
                            const std::function<bool(const IVec&)>& stop, double s_max,
                            bool with_time, const IntegratorOptions& opts,
                            const std::function<void(double, const StepResult&)>& observer) {
    FlowOutcome out;
    out.set = start;
    out.elapsed = Interval(0.0);
    if (stop && stop(start.box())) {
        out.reason = StopReason::Predicate;
        return out;
    }
    FlowSet cur = start;
    double s = 0.0;
    double h = opts.h_init;
    for (int k = 0; k < opts.max_steps; ++k) {
        if (s >= s_max) {
            out.reason = StopReason::TimeLimit;
            out.set = cur;
            out.s_end = s;
            return out;
        }
        StepResult st;
        try {
            st = rigorous_step(f, cur, std::min(h, s_max - s), opts);
        } catch (const NoEnclosure&) {
            out.reason = StopReason::StepFailed;
            out.set = cur;
            out.s_end = s;
            return out;
        }
        s += st.h;
        cur = st.next;
        out.steps = k + 1;
        if (with_time) out.elapsed += step_time_integral(f, st);
        if (observer) observer(s, st);
        if (stop && stop(cur.box())) {
            out.reason = StopReason::Predicate;
            out.set = cur;
            out.s_end = s;
            return out;
        }
        h = std::min(opts.h_max, st.h * 1.5);
    }
    out.reason = StopReason::StepLimit;
    out.set = cur;
    out.s_end = s;
    return out;
}

PolyField reverse_time(const PolyField& f) {
    PolyField g = f;
    for (auto& comp : g.comp)
        for (auto& mono : comp) mono.coeff = -mono.coeff;
    return g;
}

AttractingBall certify_attracting_ball(const PolyField& f, const std::vector<double>& guess,
                                       const IVec& box) {
    const int n = f.n;
    VerifiedEquilibrium eq = verify_equilibrium(f, guess);
    if (!subset(eq.location, box))
        throw VerificationFailed("attracting ball: equilibrium enclosure escapes the box");

    // Real block eigenbasis of the midpoint Jacobian; in z coordinates
    // with x = c + W z the symmetric part is close to diag(Re lambda).
    IVec mid(n);
    for (int i = 0; i < n; ++i) mid[i] = Interval(eq.location[i].mid());
    Eigen::MatrixXd Jm = imat_mid(jacobian(f, mid));
    Eigen::EigenSolver<Eigen::MatrixXd> es(Jm);
    Eigen::MatrixXd W = es.pseudoEigenvectors();
    if (!W.allFinite()) W = Eigen::MatrixXd::Identity(n, n);
    for (int j = 0; j < n; ++j) W.col(j).normalize();
    IMat Wi = imat_inverse_small(dmat_to_imat(W));

    IMat S = imat_symmetrize(imat_mul(imat_mul(Wi, jacobian(f, box)), dmat_to_imat(W)));
    if (!is_negative_definite_sym(S))
        throw VerificationFailed(
            "attracting ball: symmetrized Jacobian not negative definite on the box");

    // Largest z-ball whose ellipsoid stays inside the box.
    double rho = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        double left = (Interval(eq.location[i].lo()) - Interval(box[i].lo())).lo();
        double right = (Interval(box[i].hi()) - Interval(eq.location[i].hi())).lo();
        double d = std::min(left, right);
        Interval row2(0.0);
        for (int j = 0; j < n; ++j) row2 += int_pow(Interval(W(i, j)), 2);
        rho = std::min(rho, (Interval(d) / sqrt(row2)).lo());
    }
    if (!(rho > 0.0))
        throw VerificationFailed("attracting ball: equilibrium sits on the box boundary");

    // Gershgorin margin of the symmetrized matrix: an upper bound on its
    // largest eigenvalue, hence on d/dtau log ||z||.
    double lam_hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        Interval row = S[i][i];
        for (int j = 0; j < n; ++j)
            if (j != i) row += Interval(S[i][j].mag());
        lam_hi = std::max(lam_hi, row.hi());
    }
    double rate = lam_hi < 0.0 ? -lam_hi : 0.0;
    Interval fr(0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) fr += int_pow(Interval(W(i, j)), 2);
    return AttractingBall{eq.location, Wi, rho, rate, sqrt(fr).hi()};
}

bool inside_ball(const AttractingBall& ball, const IVec& box) {
    if (box.size() != ball.center.size()) throw ShapeError("inside_ball: arity mismatch");
    IVec d = ivec_sub(box, ball.center);
    IVec z = imat_vec(ball.Winv, d);
    Interval d2(0.0);
    for (const Interval& zi : z) d2 += int_pow(zi, 2);
    return sqrt(d2).hi() < ball.radius;
}

TrajectoryEnclosure extend_manifold(const ManifoldChart& chart, double theta_seed,
                                    double total_tau, const IntegratorOptions& opts) {
    if (chart.m != 1) throw ShapeError("extend_manifold: needs a one-parameter chart");
    if (!(std::fabs(theta_seed) <= 1.0))
        throw DomainError("extend_manifold: theta_seed outside [-1, 1]");
    if (!(total_tau > 0.0)) throw DomainError("extend_manifold: total_tau must be positive");

    PolyField rev = reverse_time(chart.field);
    const CompactificationSpec& cs = chart.field.cspec;
    bool global = cs.kind != CompactKind::Directional;

    TrajectoryEnclosure out;
    out.direction = FlowDirection::Backward;
    out.passing_time = Interval(0.0);
    out.end = FlowSet::from_box(chart.eval({Interval(theta_seed)}));
    out.field = rev;

    auto off_horizon = [&](const IVec& box) {
        return !global || horizon_p2c(box, cs).hi() <= 1.0 - 1e-12;
    };
    if (!off_horizon(out.end.box())) throw DomainExit("extend_manifold: seed touches the horizon");

    double s = 0.0;
    double h_try = std::min(opts.h_init, total_tau);
    while (s < total_tau) {
        if (static_cast<int>(out.steps.size()) >= opts.max_steps)
            throw NoEnclosure("extend_manifold: step limit exhausted");
        StepResult sr = rigorous_step(rev, out.end, std::min(h_try, total_tau - s), opts);
        if (!off_horizon(sr.tube))
            throw DomainExit("extend_manifold: tube reaches the horizon");
        TrajStep ts;
        ts.tau = Interval(s) + Interval(0.0, sr.h);
        ts.h = sr.h;
        ts.box = sr.tube;
        ts.model = sr.model;
        ts.dt = step_time_integral(rev, sr);
        out.passing_time += ts.dt;
        out.steps.push_back(std::move(ts));
        out.end = sr.next;
        s += sr.h;
        h_try = std::clamp(sr.h * 2.0, opts.h_min, opts.h_max);
    }
    return out;
}

bool connect_to_source(const PolyField& f, const TrajectoryEnclosure& traj,
                       const std::vector<double>& source, double basin_radius) {
    PolyField rev = reverse_time(f);
    int n = f.n;
    IVec box(n);
    for (int i = 0; i < n; ++i)
        box[i] = Interval(source[i]) + Interval(-basin_radius, basin_radius);
    AttractingBall ball = certify_attracting_ball(rev, source, box);
    return inside_ball(ball, traj.end.box());
}

} // namespace blowup
