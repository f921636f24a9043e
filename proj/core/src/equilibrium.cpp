#include "blowup/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "blowup/compactify.hpp"

namespace blowup {

IVec krawczyk_solve(const std::function<IVec(const IVec&)>& F,
                    const std::function<IMat(const IVec&)>& J, const std::vector<double>& z0,
                    double radius, const KrawczykOptions& opts) {
    const int n = static_cast<int>(z0.size());
    IVec X(n);
    for (int i = 0; i < n; ++i) X[i] = Interval(z0[i]).widened(radius);

    bool certified = false;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        IVec m(n);
        for (int i = 0; i < n; ++i) m[i] = Interval(X[i].mid());

        IMat JX = J(X);
        Eigen::MatrixXd Jm = imat_mid(JX);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(Jm);
        Eigen::MatrixXd A = lu.inverse();
        if (!A.allFinite()) throw NoContraction("krawczyk: midpoint Jacobian is singular");

        IVec Fm = F(m);
        IMat ImAJ = imat_sub(imat_identity(n), dmat_imat_mul(A, JX));
        IVec dx(n);
        for (int i = 0; i < n; ++i) dx[i] = X[i] - m[i];
        IVec K = ivec_add(ivec_sub(m, dmat_ivec_mul(A, Fm)), imat_vec(ImAJ, dx));

        bool interior = true, disjoint = false;
        for (int i = 0; i < n; ++i) {
            if (!(K[i].lo() > X[i].lo() && K[i].hi() < X[i].hi())) interior = false;
            if (!K[i].intersects(X[i])) disjoint = true;
        }
        if (disjoint) throw NoContraction("krawczyk: image left the box, no zero inside");
        certified = certified || interior;

        double before = 0.0, after = 0.0;
        for (int i = 0; i < n; ++i) {
            before = std::max(before, X[i].rad());
            X[i] = Interval::intersect(K[i], X[i]);
            after = std::max(after, X[i].rad());
        }
        if (certified && (after <= opts.tol || after > 0.9 * before)) break;
    }
    if (!certified) throw NoContraction("krawczyk: no strict contraction within iteration cap");
    return X;
}

std::vector<double> newton_refine(const PolyField& f, const std::vector<double>& guess,
                                  int max_iter, double tol) {
    const int n = f.n;
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = guess[i];
    for (int iter = 0; iter < max_iter; ++iter) {
        IVec xi(n);
        for (int i = 0; i < n; ++i) xi[i] = Interval(x(i));
        Eigen::VectorXd gx = ivec_mid(eval(f, xi));
        if (gx.lpNorm<Eigen::Infinity>() <= tol) {
            std::vector<double> out(n);
            for (int i = 0; i < n; ++i) out[i] = x(i);
            return out;
        }
        Eigen::MatrixXd Jm = imat_mid(jacobian(f, xi));
        Eigen::VectorXd step = Jm.partialPivLu().solve(gx);
        if (!step.allFinite()) break;
        x -= step;
    }
    throw NewtonDiverged("newton_refine: residual did not reach tolerance");
}

namespace {

// F and Jacobian of the bordered system (g(x), Dg(x)v - lambda v, v_j - 1)
// with unknowns z = (x, v, lambda).
IVec bordered_F(const PolyField& f, int pin, const IVec& z) {
    const int n = f.n;
    IVec x(z.begin(), z.begin() + n);
    IVec v(z.begin() + n, z.begin() + 2 * n);
    Interval lam = z[2 * n];
    IVec out(2 * n + 1, Interval(0.0));
    IVec gx = eval(f, x);
    IMat Dg = jacobian(f, x);
    for (int i = 0; i < n; ++i) out[i] = gx[i];
    for (int i = 0; i < n; ++i) {
        Interval acc(0.0);
        for (int j = 0; j < n; ++j) acc += Dg[i][j] * v[j];
        out[n + i] = acc - lam * v[i];
    }
    out[2 * n] = v[pin] - 1.0;
    return out;
}

IMat bordered_J(const PolyField& f, int pin, const IVec& z) {
    const int n = f.n;
    IVec x(z.begin(), z.begin() + n);
    IVec v(z.begin() + n, z.begin() + 2 * n);
    Interval lam = z[2 * n];
    IMat Dg = jacobian(f, x);
    auto H = hessian(f, x);
    IMat J = imat_zero(2 * n + 1, 2 * n + 1);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) J[i][k] = Dg[i][k];
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            Interval acc(0.0);
            for (int l = 0; l < n; ++l) acc += H[i][k][l] * v[l];
            J[n + i][k] = acc;
        }
        for (int j = 0; j < n; ++j) J[n + i][n + j] = Dg[i][j] - (i == j ? lam : Interval(0.0));
        J[n + i][2 * n] = -v[i];
    }
    J[2 * n][n + pin] = Interval(1.0);
    return J;
}

} // namespace

VerifiedEquilibrium verify_equilibrium(const PolyField& f, const std::vector<double>& guess,
                                       double box_radius) {
    const int n = f.n;
    std::vector<double> x0 = newton_refine(f, guess);

    VerifiedEquilibrium out;
    out.location = krawczyk_solve([&](const IVec& x) { return eval(f, x); },
                                  [&](const IVec& x) { return jacobian(f, x); }, x0, box_radius);

    IVec x0i(n);
    for (int i = 0; i < n; ++i) x0i[i] = Interval(x0[i]);
    Eigen::MatrixXd Jm = imat_mid(jacobian(f, x0i));
    Eigen::EigenSolver<Eigen::MatrixXd> es(Jm);
    if (es.info() != Eigen::Success) throw NewtonDiverged("verify_equilibrium: eigensolver failed");

    struct RealPair {
        double lam;
        Eigen::VectorXd v;
    };
    std::vector<RealPair> reals;
    const double scale = std::max(1.0, Jm.cwiseAbs().maxCoeff());
    for (int e = 0; e < n; ++e) {
        std::complex<double> lam = es.eigenvalues()(e);
        if (std::abs(lam.imag()) > 1e-10 * scale) {
            if (lam.imag() > 0.0) out.complex_pairs.push_back({lam.real(), lam.imag()});
            continue;
        }
        reals.push_back({lam.real(), es.eigenvectors().col(e).real()});
    }
    std::sort(reals.begin(), reals.end(),
              [](const RealPair& a, const RealPair& b) { return a.lam < b.lam; });

    for (const auto& rp : reals) {
        int pin = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(rp.v(i)) > std::abs(rp.v(pin))) pin = i;
        Eigen::VectorXd v = rp.v / rp.v(pin);

        std::vector<double> z0(2 * n + 1);
        for (int i = 0; i < n; ++i) z0[i] = x0[i];
        for (int i = 0; i < n; ++i) z0[n + i] = v(i);
        z0[2 * n] = rp.lam;

        IVec z = krawczyk_solve([&](const IVec& zz) { return bordered_F(f, pin, zz); },
                                [&](const IVec& zz) { return bordered_J(f, pin, zz); }, z0,
                                box_radius);
        Interval lam = z[2 * n];
        if (lam.contains(0.0))
            throw NonHyperbolic("verify_equilibrium: eigenvalue enclosure touches zero");
        out.eigenvalues.push_back(lam);
        out.eigenvectors.push_back(IVec(z.begin() + n, z.begin() + 2 * n));
        out.eigenvectors.back()[pin] = Interval(1.0);
        out.pinned.push_back(pin);
        if (lam.hi() < 0.0) ++out.stable_count;
    }

    if (f.cspec.kind == CompactKind::Directional) {
        out.on_horizon = out.location[f.cspec.dir_index].contains(0.0);
    } else {
        out.on_horizon = horizon_p2c(out.location, f.cspec).contains(1.0);
    }
    return out;
}

NonresonanceReport check_nonresonance(const std::vector<Interval>& lambdas, int min_order) {
    const int m = static_cast<int>(lambdas.size());
    if (m == 0) throw ShapeError("check_nonresonance: empty spectrum");
    double max_mag = 0.0, min_mig = HUGE_VAL;
    for (const auto& l : lambdas) {
        if (!(l.hi() < 0.0)) throw DomainError("check_nonresonance: eigenvalues must be negative");
        max_mag = std::max(max_mag, l.mag());
        min_mig = std::min(min_mig, l.mig());
    }

    NonresonanceReport rep;
    rep.cutoff = std::max(static_cast<int>(std::ceil(max_mag / min_mig)) + 1, min_order);
    rep.ok = true;
    rep.margin = HUGE_VAL;

    const auto& tab = mi_table(m, rep.cutoff);
    for (std::size_t idx = 0; idx < tab.size(); ++idx) {
        if (tab.degree(idx) < 2) continue;
        const MultiIndex& alpha = tab.exponents(idx);
        Interval dot(0.0);
        for (int i = 0; i < m; ++i) dot += static_cast<double>(alpha[i]) * lambdas[i];
        for (int j = 0; j < m; ++j) {
            Interval gap = dot - lambdas[j];
            if (gap.contains(0.0)) {
                rep.ok = false;
                rep.margin = 0.0;
                rep.worst_alpha = alpha;
                rep.worst_j = j;
                return rep;
            }
            if (gap.mig() < rep.margin) {
                rep.margin = gap.mig();
                rep.worst_alpha = alpha;
                rep.worst_j = j;
            }
        }
    }
    return rep;
}

void require_nonresonance(const std::vector<Interval>& lambdas) {
    NonresonanceReport rep = check_nonresonance(lambdas);
    if (!rep.ok) throw ResonancePossible("resonant eigenvalue combination detected");
}

} // namespace blowup
