#include "blowup/compactify.hpp"

#include <string>

namespace blowup {

void CompactificationSpec::validate() const {
    if (n < 1) throw ShapeError("CompactificationSpec: n < 1");
    if (static_cast<int>(alpha.size()) != n || static_cast<int>(beta.size()) != n)
        throw ShapeError("CompactificationSpec: alpha/beta arity mismatch");
    if (c < 1 || k < 1) throw ShapeError("CompactificationSpec: c and k must be >= 1");
    if (kind == CompactKind::Directional) {
        // beta is unused here; slots with alpha == 0 do not blow up.
        if (dir_index < 0 || dir_index >= n)
            throw ShapeError("CompactificationSpec: directional slot out of range");
        if (dir_sign != 1 && dir_sign != -1)
            throw ShapeError("CompactificationSpec: directional sign must be +-1");
        if (alpha[dir_index] < 1)
            throw ShapeError("CompactificationSpec: inverted slot needs alpha >= 1");
        for (int a : alpha)
            if (a < 0) throw ShapeError("CompactificationSpec: negative alpha");
        for (int b : beta)
            if (b < 0) throw ShapeError("CompactificationSpec: negative beta");
    } else {
        for (int i = 0; i < n; ++i) {
            if (alpha[i] < 1) throw ShapeError("CompactificationSpec: alpha entries must be >= 1");
            if (beta[i] < 1) throw ShapeError("CompactificationSpec: beta entries must be >= 1");
            if (alpha[i] * beta[i] != c)
                throw ShapeError("CompactificationSpec: alpha_i*beta_i != c at slot " +
                                 std::to_string(i));
        }
    }
}

bool CompactificationSpec::homogeneous() const {
    if (c != 1) return false;
    for (int i = 0; i < n; ++i)
        if (alpha[i] != 1 || beta[i] != 1) return false;
    return true;
}

namespace {

void check_arity(const std::vector<Interval>& y, const CompactificationSpec& spec,
                 const char* who) {
    if (static_cast<int>(y.size()) != spec.n)
        throw ShapeError(std::string(who) + ": point arity mismatch");
}

} // namespace

Interval horizon_p2c(const std::vector<Interval>& y, const CompactificationSpec& spec) {
    check_arity(y, spec, "horizon_p2c");
    Interval s(0.0);
    for (int i = 0; i < spec.n; ++i) s += int_pow(y[i], 2 * spec.beta[i]);
    return s;
}

std::vector<Interval> directional_forward(const std::vector<Interval>& y,
                                          const CompactificationSpec& spec) {
    check_arity(y, spec, "directional_forward");
    if (spec.kind != CompactKind::Directional)
        throw DomainError("directional_forward: spec is not directional");
    int i = spec.dir_index;
    if (spec.alpha[i] != 1)
        throw DomainError("directional_forward: only alpha_i == 1 charts are supported");
    Interval yi = spec.dir_sign > 0 ? y[i] : -y[i];
    if (!(yi.lo() > 0.0))
        throw DomainError("directional_forward: sign*y_i must be strictly positive");
    Interval s = Interval(1.0) / yi;
    std::vector<Interval> out(y.size());
    for (int j = 0; j < spec.n; ++j) {
        if (j == i) {
            out[j] = s;
        } else {
            out[j] = y[j] * int_pow(s, spec.alpha[j]);
        }
    }
    return out;
}

std::vector<Interval> directional_inverse(const std::vector<Interval>& x,
                                          const CompactificationSpec& spec) {
    check_arity(x, spec, "directional_inverse");
    if (spec.kind != CompactKind::Directional)
        throw DomainError("directional_inverse: spec is not directional");
    int i = spec.dir_index;
    const Interval& s = x[i];
    if (!(s.lo() > 0.0))
        throw DomainError("directional_inverse: s must be strictly positive");
    std::vector<Interval> out(x.size());
    for (int j = 0; j < spec.n; ++j) {
        if (j == i) {
            out[j] = Interval(static_cast<double>(spec.dir_sign)) / int_pow(s, spec.alpha[i]);
        } else {
            out[j] = x[j] / int_pow(s, spec.alpha[j]);
        }
    }
    return out;
}

std::vector<Interval> poincare_forward(const std::vector<Interval>& y,
                                       const CompactificationSpec& spec) {
    check_arity(y, spec, "poincare_forward");
    if (!spec.homogeneous())
        throw DomainError("poincare_forward: only the homogeneous case is supported");
    Interval norm2 = horizon_p2c(y, spec);
    Interval kappa = sqrt(Interval(1.0) + norm2);
    std::vector<Interval> out(y.size());
    for (int j = 0; j < spec.n; ++j) out[j] = y[j] / kappa;
    return out;
}

std::vector<Interval> poincare_inverse(const std::vector<Interval>& x,
                                       const CompactificationSpec& spec) {
    check_arity(x, spec, "poincare_inverse");
    if (!spec.homogeneous())
        throw DomainError("poincare_inverse: only the homogeneous case is supported");
    Interval norm2 = horizon_p2c(x, spec);
    if (!(norm2.hi() < 1.0))
        throw HorizonError("poincare_inverse: point not strictly inside the horizon");
    Interval denom = sqrt(Interval(1.0) - norm2);
    std::vector<Interval> out(x.size());
    for (int j = 0; j < spec.n; ++j) out[j] = x[j] / denom;
    return out;
}

namespace {

// F(kappa; r) = kappa^{2c} - kappa^{2c-1} - r, factored as
// kappa^{2c-1}(kappa - 1) - r so that evaluation stays tight near 1 and
// the derivative is verifiably positive on any bracket in [1, inf).
Interval kappa_poly(const Interval& kappa, double r, int c) {
    return int_pow(kappa, 2 * c - 1) * (kappa - Interval(1.0)) - Interval(r);
}

Interval kappa_poly_deriv(const Interval& kappa, int c) {
    double tc = 2.0 * c;
    return int_pow(kappa, 2 * c - 2) * (Interval(tc) * kappa - Interval(tc - 1.0));
}

// Root of F(.; r) in [1, inf) for a point r.
Interval kappa_at_point(double r, int c) {
    if (r < 0.0) throw DomainError("quasi_parabolic_kappa: negative R^{2c}");
    if (r == 0.0) return Interval(1.0);
    // For r > 0:  F(1+2r; r) = r*(2*(1+2r)^{2c-1} - 1) >= r > 0 and
    // F(1; r) = -r < 0, so the root lies in [1, 1+2r].  Near r ~ ulp(1)
    // the sign of F cannot be verified numerically and we return the
    // bracket itself.
    double hi = detail::add_up(1.0, detail::mul_up(2.0, r));
    Interval bracket(1.0, hi);
    Interval fhi = kappa_poly(Interval(hi), r, c);
    if (!(fhi.lo() > 0.0) || !(Interval(-r).hi() < 0.0)) return bracket;
    auto f = [&](const Interval& x) { return kappa_poly(x, r, c); };
    auto df = [&](const Interval& x) { return kappa_poly_deriv(x, c); };
    double tol = 1e-15 * hi;
    try {
        return interval_newton_scalar(f, df, bracket, tol, 100);
    } catch (const NoContraction&) {
        return bracket;
    }
}

} // namespace

Interval quasi_parabolic_kappa(const Interval& R2c, int c) {
    if (R2c.lo() < 0.0) throw DomainError("quasi_parabolic_kappa: R^{2c} must be >= 0");
    // kappa is increasing in r, so endpoint solves bracket the image.
    Interval lo = kappa_at_point(R2c.lo(), c);
    Interval hi = kappa_at_point(R2c.hi(), c);
    return Interval(lo.lo(), hi.hi());
}

std::vector<Interval> parabolic_forward(const std::vector<Interval>& y,
                                        const CompactificationSpec& spec) {
    check_arity(y, spec, "parabolic_forward");
    if (spec.kind != CompactKind::Parabolic)
        throw DomainError("parabolic_forward: spec is not parabolic");
    Interval r = horizon_p2c(y, spec);
    Interval kappa = quasi_parabolic_kappa(r, spec.c);
    std::vector<Interval> out(y.size());
    for (int j = 0; j < spec.n; ++j) out[j] = y[j] / int_pow(kappa, spec.alpha[j]);
    return out;
}

std::vector<Interval> parabolic_inverse(const std::vector<Interval>& x,
                                        const CompactificationSpec& spec) {
    check_arity(x, spec, "parabolic_inverse");
    if (spec.kind != CompactKind::Parabolic)
        throw DomainError("parabolic_inverse: spec is not parabolic");
    Interval p2c = horizon_p2c(x, spec);
    if (!(p2c.hi() < 1.0))
        throw HorizonError("parabolic_inverse: point not strictly inside the horizon");
    Interval denom = Interval(1.0) - p2c;
    std::vector<Interval> out(x.size());
    for (int j = 0; j < spec.n; ++j) out[j] = x[j] / int_pow(denom, spec.alpha[j]);
    return out;
}

} // namespace blowup
