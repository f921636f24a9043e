#pragma once

// Polynomial vector fields with interval coefficients, plus the
// time-scale factor that converts desingularized time back to the
// original one.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "blowup/compactify.hpp"
#include "blowup/interval.hpp"
#include "blowup/series.hpp"

namespace blowup {

struct Monomial {
    Interval coeff;
    MultiIndex exps; // length n

    int degree() const {
        int d = 0;
        for (int e : exps) d += e;
        return d;
    }
};

using MonomialSum = std::vector<Monomial>;

// dt/dtau written as num/den; den == {1} for polynomial factors.
struct TimeFactor {
    MonomialSum num;
    MonomialSum den; // empty means constant 1
    bool is_rational() const { return !den.empty(); }
};

// Starting data for equilibrium verification, bundled with the model.
struct EquilibriumGuess {
    std::vector<double> point;
    int default_N = 0;
    double default_sigma = 0.0;
    int stable_count = 0; // certified real stable directions used for charts
};

struct PolyField {
    int n = 0;
    std::string name;
    std::vector<MonomialSum> comp; // size n
    CompactificationSpec cspec;
    TimeFactor timefactor;
    std::map<std::string, EquilibriumGuess> equilibria;

    int max_degree() const;
    void validate() const;
};

// Pointwise interval evaluation.
std::vector<Interval> eval(const PolyField& f, const std::vector<Interval>& x);
Interval eval(const MonomialSum& g, const std::vector<Interval>& x);

// First and second symbolic derivatives (monomial lists are exact).
MonomialSum derivative(const MonomialSum& g, int var);
std::vector<std::vector<Interval>> jacobian(const PolyField& f, const std::vector<Interval>& x);
// hessian[i][j][k] = d^2 f_i / dx_j dx_k
std::vector<std::vector<std::vector<Interval>>> hessian(const PolyField& f,
                                                        const std::vector<Interval>& x);

// Composition with an R^n-valued series; exact up to degree
// max_degree * N with tails propagated through every product.
TaylorCoeffs apply_to_series(const PolyField& f, const TaylorCoeffs& a);
Series apply_to_series(const MonomialSum& g, const TaylorCoeffs& a);

// Same composition capped at degree N: coefficients through N are exact,
// higher-degree mass joins the tails.  Much cheaper when only a degree
// window is needed, as in stepwise Taylor recursions.
TaylorCoeffs apply_to_series_upto(const PolyField& f, const TaylorCoeffs& a, int N);
Series apply_to_series_upto(const MonomialSum& g, const TaylorCoeffs& a, int N);

// Upper bound for the ell^1 norm of g composed with any series whose
// component norms are bounded by the given values (triangle inequality
// monomial by monomial).
Interval norm_bound(const MonomialSum& g, const std::vector<Interval>& comp_norms);

// Value of the time factor at a point (DomainError when a rational
// denominator meets zero).
Interval time_factor_value(const PolyField& f, const std::vector<Interval>& x);

} // namespace blowup
