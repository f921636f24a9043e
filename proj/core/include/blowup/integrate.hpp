#pragma once

// Rigorous Taylor integration of the desingularized flows.  Sets are
// propagated in the parallelepiped form c + A r with QR re-basing each
// step; every accepted step also yields a set-valid Taylor model of the
// solution over the step, used for event tests and for accumulating the
// original-time integral of the time factor.

#include <functional>

#include <Eigen/Dense>

#include "blowup/field.hpp"
#include "blowup/linalg.hpp"
#include "blowup/manifold.hpp"
#include "blowup/series.hpp"

namespace blowup {

struct IntegratorOptions {
    int order = 15;        // Taylor order of each step
    double tol = 1e-12;    // relative size target for the remainder term
    double h_min = 1e-10;
    double h_max = 0.5;
    double h_init = 1e-2;
    int max_steps = 200000;
    double tube_inflate = 1e-2;
};

// Parallelepiped c + A r; box() is the axis-aligned projection seen by
// event predicates.
struct FlowSet {
    Eigen::VectorXd c;
    Eigen::MatrixXd A;
    IVec r;

    IVec box() const;
    static FlowSet from_box(const IVec& X);
    static FlowSet from_point(const std::vector<double>& x);
};

// One accepted step.  model[i] is a univariate Series in u with
// x_i(s0 + h u) enclosed for every starting point in the step's input
// set and every u in [0,1]; the truncation error sits in the top-order
// coefficient, so tails stay zero.
struct StepResult {
    double h = 0.0;
    FlowSet next;
    IVec tube; // encloses the orbit segment over [s0, s0+h]
    std::vector<Series> model;
};

// Single verified step of size at most h_try (the controller may accept
// a shorter one).  Throws NoEnclosure when no step above h_min admits
// an a priori tube.
StepResult rigorous_step(const PolyField& f, const FlowSet& X, double h_try,
                         const IntegratorOptions& opts = {});

enum class StopReason {
    Predicate, // stop(box) held after a step
    TimeLimit, // s reached s_max
    StepLimit, // max_steps exhausted
    StepFailed // step control gave up (tube or tolerance failure)
};

struct FlowOutcome {
    StopReason reason = StopReason::StepFailed;
    FlowSet set;      // enclosure at s_end
    double s_end = 0.0;
    Interval elapsed; // integral of the time factor over [0, s_end]
    int steps = 0;
};

// Integrates forward in desingularized time until the predicate holds on
// the post-step box, s exceeds s_max, or the step control fails.  The
// predicate is also tested on the initial box.  When with_time is set,
// elapsed accumulates the original-time integral along the enclosure.
// The observer, when given, sees every accepted step.
FlowOutcome integrate_until(const PolyField& f, const FlowSet& start,
                            const std::function<bool(const IVec&)>& stop, double s_max,
                            bool with_time, const IntegratorOptions& opts = {},
                            const std::function<void(double, const StepResult&)>& observer = {});

// Same field with the flow direction reversed (component signs flipped).
// The time factor is kept, so quadrature along a reversed run still
// yields the positive original-time length of the orbit segment.
PolyField reverse_time(const PolyField& f);

// Ellipsoid around a certified equilibrium, ||W^-1 (x - c)|| < radius in
// an approximate eigenbasis W of the Jacobian.  Negative definiteness of
// the symmetrized W^-1 J W over the ellipsoid makes it forward invariant
// with every entering trajectory converging to the equilibrium.  rate is
// a certified lower bound on the contraction speed of ||W^-1 (x - c)||
// (zero when only definiteness, not a Gershgorin margin, could be
// shown); wnorm bounds the spectral norm of W.
struct AttractingBall {
    IVec center;
    IMat Winv;     // rigorous enclosure of the basis inverse
    double radius = 0.0;
    double rate = 0.0;
    double wnorm = 0.0;
};

// Certifies an ellipsoid inside the given box around the equilibrium
// near guess.  Throws VerificationFailed when the Jacobian test fails.
AttractingBall certify_attracting_ball(const PolyField& f, const std::vector<double>& guess,
                                       const IVec& box);

// True only when every point of the box lies in the open ellipsoid.
bool inside_ball(const AttractingBall& ball, const IVec& box);

// Original-time length of one accepted step: integral of the time
// factor composed with the step's Taylor model (rational factors divide
// the composed series, falling back to a range bound over the tube when
// the denominator cannot be inverted on the step).
Interval step_time_integral(const PolyField& f, const StepResult& step);

// Same integral over the leading fraction u in [0, 1] of a kept step,
// for locating events in original time inside a step.
Interval partial_step_time(const PolyField& f, const TrajStep& step, const Interval& u);

enum class FlowDirection { Forward, Backward };

// One accepted step of an extended run, kept with its Taylor model so
// events can be located inside the step afterwards.  model[i] encloses
// x_i(s0 + h u) for u in [0, 1] in the direction the run was made; dt
// is the original-time integral over the step, always nonnegative.
struct TrajStep {
    Interval tau;
    double h = 0.0;
    IVec box;
    std::vector<Series> model;
    Interval dt;
};

struct TrajectoryEnclosure {
    FlowDirection direction = FlowDirection::Backward;
    std::vector<TrajStep> steps;
    Interval passing_time; // sum of dt over all steps
    FlowSet end;
    PolyField field; // field the steps were taken in (reversed for Backward)
};

// Continues a local-manifold arc beyond its chart: starting from the
// chart evaluation at theta_seed, flows the reversed field for total_tau
// units of desingularized time.  Every step's model and original-time
// integral are kept, so the passing time up to any event inside the run
// can be recovered afterwards.  Throws DomainExit when the tube can no
// longer be kept off the horizon of a global compactification, and
// NoEnclosure when step control fails before total_tau is reached.
TrajectoryEnclosure extend_manifold(const ManifoldChart& chart, double theta_seed,
                                    double total_tau, const IntegratorOptions& opts = {});

// True when the run's final set lies inside a certified attracting ball
// of the reversed field around source, so every enclosed orbit emanates
// from that equilibrium.
bool connect_to_source(const PolyField& f, const TrajectoryEnclosure& traj,
                       const std::vector<double>& source, double basin_radius);

} // namespace blowup
