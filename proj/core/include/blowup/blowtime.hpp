#pragma once

// Closed-form blow-up-time enclosures on certified stable-manifold
// charts, and total blow-up time along trajectories that connect a far
// point to a chart.  Every series below is integrated exactly against
// e^{(alpha.lambda) tau}, so the only error terms are the chart radius
// and truncation tails.

#include "blowup/integrate.hpp"
#include "blowup/manifold.hpp"

namespace blowup {

struct BlowupTimeResult {
    Interval local;   // from the chart point to blow-up
    Interval passing; // from the initial point to the chart point
    Interval total;   // local + passing
    std::vector<double> theta; // chart coordinate of the evaluation point
};

// Blow-up time on a directional chart whose first component vanishes at
// the equilibrium, for a pure monomial time factor x_1^k:
// -sum_{|alpha|>0} (a_1^k)_alpha theta^alpha / (alpha.lambda), with a
// tail that scales like |theta|^k.
Interval tmax_directional_series(const ManifoldChart& chart, int k,
                                 const std::vector<Interval>& theta);

// Blow-up time on the built-in cubic-with-parameter chart (time factor
// x_2 / x_1^2).  Solves a_1^2 * r = q with q_n = (a_2)_{n+1} by a
// certified linear solve in ell^1 and integrates r termwise.
Interval tmax_rational_example1(const ManifoldChart& chart, const Interval& theta);

// Blow-up time on a homogeneous Poincare chart with k = 2, c = 1:
// sum_{0<|alpha|<=2N} (sum_i (a_i*a_i)_alpha) theta^alpha/(alpha.lambda)
// plus the spectral-gap tail.  ValidityError unless ||P(theta)||^2 < 1
// is verified.
Interval tmax_poincare_homogeneous(const ManifoldChart& chart,
                                   const std::vector<Interval>& theta);

// Blow-up time on the built-in quasi-parabolic chart (time factor
// (1+3P)(1-P)/4 with P = x_1^4 + x_2^2), via the tail convolution of
// W = P o chart - 1.
Interval tmax_parabolic_example3(const ManifoldChart& chart, const Interval& theta);

// Chart-local blow-up time dispatched on the compactification kind.
Interval tmax_local(const ManifoldChart& chart, const std::vector<Interval>& theta);

// Finite coefficients of the local blow-up-time series t(theta) =
// sum_n t_n theta^n for one-parameter charts with a closed form; the
// tail carries the same bound as the corresponding enclosure at
// |theta| = 1.
Series tmax_local_series(const ManifoldChart& chart);

// Total blow-up time of the far end of a backward trajectory attached
// to the chart at theta_seed: passing time plus the chart-local value.
BlowupTimeResult total_blowup_time(const ManifoldChart& chart, double theta_seed,
                                   const TrajectoryEnclosure& traj);

// Certifies that the attracting equilibrium near guess lies exactly on
// the horizon of a planar quasi-parabolic field (beta_2 == 1), so the
// time factor vanishes there and the original-time tail of any orbit
// captured by the ball is finite.  Returns the certified ball together
// with a bound factor L such that the remaining original time after
// entering at distance-z z0 is in [0, L z0].
struct SinkTailBound {
    AttractingBall ball;
    double factor = 0.0; // sup |grad S| * ||W|| / rate over the ball box
};
SinkTailBound certify_horizon_sink(const PolyField& f, const std::string& model_name,
                                   const std::vector<double>& guess, double box_radius);

// Remaining original time for a set captured by the certified sink:
// [0, factor * z0] with z0 the entry distance in the ball metric.
// VerificationFailed unless the box is inside the ball.
Interval sink_tail_time(const SinkTailBound& sink, const IVec& box);

} // namespace blowup
