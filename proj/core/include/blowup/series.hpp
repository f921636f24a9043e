#pragma once

// Truncated multivariate Taylor series with interval coefficients and an
// explicit ell^1 tail bound.  A Series value represents the set of all
// analytic functions f on the closed unit polydisc with
//   f = sum_{|alpha| <= N} c_alpha theta^alpha + rho,  ||rho||_1 <= tail.

#include <vector>

#include "blowup/interval.hpp"
#include "blowup/multiindex.hpp"

#include <nlohmann/json_fwd.hpp>

namespace blowup {

struct Series {
    int m = 1;
    int N = 0;
    std::vector<Interval> c; // flat graded-lex, size mi_count_upto(m, N)
    Interval tail = Interval(0.0);

    static Series zero(int m, int N);
    static Series constant(int m, int N, const Interval& v);

    const Interval& at(const MultiIndex& alpha) const;
    Interval& at(const MultiIndex& alpha);
};

Series operator+(const Series& a, const Series& b);
Series operator-(const Series& a, const Series& b);
Series operator*(const Interval& s, const Series& a);
Series operator-(const Series& a);

// Full Cauchy product: result degree Na+Nb, tails propagated by
// ||a||*tb + ta*||b|| + ta*tb.
Series cauchy_product(const Series& a, const Series& b);

// Cauchy product truncated to degree N: coefficients through N are the
// exact product coefficients, all higher-degree mass joins the tail.
Series cauchy_product_upto(const Series& a, const Series& b, int N);

// a^k by binary exponentiation (k >= 0).
Series series_pow(const Series& a, int k);

// Truncation to degree N; the ell^1 mass of the dropped coefficients is
// folded into the tail.
Series truncate(const Series& a, int N);

// Upper-bounding interval for sum |c_alpha| + tail.
Interval ell1_norm(const Series& a);
// Same without the tail term.
Interval ell1_norm_finite(const Series& a);

// Interval evaluation at theta in the closed unit polydisc (Horner in
// each variable for m <= 2); adds tail*[-1,1].  DomainError outside.
Interval eval_enclosure(const Series& a, const std::vector<Interval>& theta);

// d/dtheta_var, degree drops by one.  Tail is not differentiable and
// must be zero.
Series derivative(const Series& a, int var);

// Coefficient rescaling a_alpha *= s^|alpha| (eigenvector rescaling
// covariance).  Tail is kept only when |s| <= 1.
Series scale_by_order(const Series& a, const Interval& s);

// R^n-valued series (one Series per component, shared m and N).
struct TaylorCoeffs {
    int n = 0;
    int m = 1;
    int N = 0;
    std::vector<Series> comp;

    static TaylorCoeffs zero(int n, int m, int N);
    Interval tail_radius() const; // max over components
};

std::vector<Interval> eval_enclosure(const TaylorCoeffs& a, const std::vector<Interval>& theta);

void to_json(nlohmann::json& j, const TaylorCoeffs& a);
void from_json(const nlohmann::json& j, TaylorCoeffs& a);

} // namespace blowup
