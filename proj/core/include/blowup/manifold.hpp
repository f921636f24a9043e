#pragma once

// Parameterization method for local stable manifolds: solve the
// conjugacy coefficients to finite order, then certify an ell^1 error
// radius for the truncated chart through the radii polynomial.

#include <string>

#include "blowup/equilibrium.hpp"
#include "blowup/field.hpp"

namespace blowup {

// Frozen data of a chart under construction: equilibrium enclosure and
// selected sigma-scaled stable eigenpairs.
struct ChartSkeleton {
    int n = 0;
    int m = 0; // stable dimension
    int N = 0; // truncation degree
    IVec x0;
    std::vector<Interval> Lambda;
    std::vector<IVec> xi;
};

// Selects the certified stable eigenpairs. With two stable directions
// at an on-horizon equilibrium, the direction transversal to the
// horizon comes first so theta_2 spans the in-horizon sub-manifold.
ChartSkeleton make_skeleton(const PolyField& f, const VerifiedEquilibrium& eq, double sigma,
                            int N);

struct RadiiCertificate {
    Interval Y0, Z0, Z1, Z2;
    double r_star = 0.0;
    Interval r0;
    int N = 0;
};

struct ManifoldChart {
    PolyField field;
    VerifiedEquilibrium equilibrium;
    std::string model_name;
    std::string eq_name;
    int m = 0;
    int N = 0;
    double sigma = 0.0;
    std::vector<Interval> Lambda;
    std::vector<IVec> eigvecs; // sigma-scaled
    TaylorCoeffs coeffs;       // orders 0..N with tail = r0
    RadiiCertificate cert;

    IVec eval(const std::vector<Interval>& theta) const;
};

// Order-by-order triangular solve of the finite conjugacy projection in
// doubles; orders 0, 1 are the skeleton midpoints.
TaylorCoeffs solve_recursion(const PolyField& f, const ChartSkeleton& s);

// Recursion plus forward-substitution refinement of the projected
// Newton step until the residual reaches round-off scale.
TaylorCoeffs newton_solve_projection(const PolyField& f, const ChartSkeleton& s);

// Replaces orders 0 and 1 of a solved projection by the certified
// skeleton enclosures.
TaylorCoeffs interval_lift(const ChartSkeleton& s, const TaylorCoeffs& sol);

// Full interval residual: order-alpha entry (alpha.Lambda)a_alpha -
// (g(a))_alpha for 2 <= |alpha| <= d*N, zero rows at orders <= 1.
TaylorCoeffs assemble_F(const PolyField& f, const ChartSkeleton& s, const TaylorCoeffs& a);

// Finite-projection linear data shared by the bounds: the approximate
// inverse A of the midpoint projected Jacobian, rigorous per-block
// column norms of A, and the capped derivative series of g at abar.
struct ProjectionBlocks {
    int n = 0, m = 0, N = 0;
    Eigen::MatrixXd A;
    std::vector<std::vector<double>> block_norm; // [i][j], finite part
    std::vector<std::vector<Series>> Dg;         // [i][j], orders <= N at abar
};

ProjectionBlocks build_projection_blocks(const PolyField& f, const ChartSkeleton& s,
                                         const TaylorCoeffs& abar);

Interval compute_Y0(const PolyField& f, const ChartSkeleton& s, const TaylorCoeffs& abar,
                    const ProjectionBlocks& blocks);
Interval compute_Z0(const PolyField& f, const ChartSkeleton& s, const TaylorCoeffs& abar,
                    const ProjectionBlocks& blocks);
Interval compute_Z1(const PolyField& f, const ChartSkeleton& s, const TaylorCoeffs& abar,
                    const ProjectionBlocks& blocks);
Interval compute_Z2(const PolyField& f, const ChartSkeleton& s, const TaylorCoeffs& abar,
                    const ProjectionBlocks& blocks, double r_star);

// Checks p(r0) < 0 at the candidate r0 = 2 Y0 / (1 - Z0 - Z1).
RadiiCertificate radii_verify(const Interval& Y0, const Interval& Z0, const Interval& Z1,
                              const Interval& Z2, double r_star, int N);

// Growth-rate heuristic: eigenvector scale for which the order-N
// coefficient norms reach the target.
double choose_sigma(const PolyField& f, const VerifiedEquilibrium& eq, int N,
                    double target = 1e-16);

ManifoldChart build_chart(const PolyField& f, const VerifiedEquilibrium& eq, double sigma_eig,
                          int N, double r_star = 1e-4, const std::string& eq_name = "",
                          const std::string& model_name = "");

} // namespace blowup
