#pragma once

// Admissible global compactifications and the directional chart.  All
// horizon computations work with p(y)^{2c}; the 2c-th root is never
// taken.

#include <vector>

#include "blowup/interval.hpp"

namespace blowup {

enum class CompactKind { Directional, Poincare, Parabolic };

struct CompactificationSpec {
    int n = 0;                // phase-space dimension
    std::vector<int> alpha;   // type; entries >= 1 for global kinds
    std::vector<int> beta;    // dual exponents, alpha_i*beta_i == c
    int c = 1;
    int k = 1;                // order is k+1
    CompactKind kind = CompactKind::Poincare;
    int dir_index = 0;        // directional only: inverted slot
    int dir_sign = 1;         // directional only: +1 or -1

    void validate() const;
    bool homogeneous() const; // alpha == beta == (1,...,1), c == 1
};

// p(y)^{2c} = sum_i y_i^{2 beta_i}.
Interval horizon_p2c(const std::vector<Interval>& y, const CompactificationSpec& spec);

// Directional chart at slot i: s = 1/(sign*y_i) (alpha_i == 1 is
// required), other slots x_j = y_j * s^{alpha_j}.  The returned vector
// keeps the original slot order with s stored at slot i.
std::vector<Interval> directional_forward(const std::vector<Interval>& y,
                                          const CompactificationSpec& spec);
std::vector<Interval> directional_inverse(const std::vector<Interval>& x,
                                          const CompactificationSpec& spec);

// Poincare compactification; homogeneous specs only.
std::vector<Interval> poincare_forward(const std::vector<Interval>& y,
                                       const CompactificationSpec& spec);
std::vector<Interval> poincare_inverse(const std::vector<Interval>& x,
                                       const CompactificationSpec& spec);

// Scale factor kappa of the quasi-parabolic compactification: the
// unique root >= 1 of kappa^{2c} - kappa^{2c-1} = R^{2c}, increasing in
// R, equal to 1 at R = 0.  Input is an enclosure of R^{2c} >= 0.
Interval quasi_parabolic_kappa(const Interval& R2c, int c);

// Quasi-parabolic compactification x_i = y_i / kappa^{alpha_i} and its
// inverse y_i = x_i / (1 - p(x)^{2c})^{alpha_i}.
std::vector<Interval> parabolic_forward(const std::vector<Interval>& y,
                                        const CompactificationSpec& spec);
std::vector<Interval> parabolic_inverse(const std::vector<Interval>& x,
                                        const CompactificationSpec& spec);

} // namespace blowup
