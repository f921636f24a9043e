#pragma once

// Certified equilibria and real eigenstructure through Krawczyk
// enclosures on the field and on bordered eigenpair systems.

#include <functional>

#include "blowup/field.hpp"
#include "blowup/linalg.hpp"

namespace blowup {

// Detected but not certified (only real eigenpairs are enclosed).
struct ComplexPairInfo {
    double re = 0.0;
    double im = 0.0;
};

struct VerifiedEquilibrium {
    IVec location;
    bool on_horizon = false;
    std::vector<Interval> eigenvalues; // certified real, sorted ascending by midpoint
    std::vector<IVec> eigenvectors;    // pinned component is exactly 1
    std::vector<int> pinned;
    std::vector<ComplexPairInfo> complex_pairs;
    int stable_count = 0; // certified real eigenvalues < 0
};

struct KrawczykOptions {
    int max_iter = 50;
    double tol = 0.0; // stop early once every radius is below this
};

// Returns a box proven to contain a unique zero of F near z0.
// Certification is the strict inclusion K(X) in the interior of X.
IVec krawczyk_solve(const std::function<IVec(const IVec&)>& F,
                    const std::function<IMat(const IVec&)>& J, const std::vector<double>& z0,
                    double radius, const KrawczykOptions& opts = {});

// Float Newton polish of an approximate zero (throws NewtonDiverged).
std::vector<double> newton_refine(const PolyField& f, const std::vector<double>& guess,
                                  int max_iter = 100, double tol = 1e-13);

VerifiedEquilibrium verify_equilibrium(const PolyField& f, const std::vector<double>& guess,
                                       double box_radius = 1e-6);

struct NonresonanceReport {
    bool ok = false;
    double margin = 0.0; // smallest |alpha.lambda - lambda_j| among checked pairs
    int cutoff = 0;      // orders beyond this cannot resonate
    MultiIndex worst_alpha;
    int worst_j = -1;
};

// Verifies alpha.lambda != lambda_j for all |alpha| >= 2 over negative
// lambdas; only finitely many orders need checking since |alpha.lambda|
// grows past max|lambda|. min_order extends the checked range.
NonresonanceReport check_nonresonance(const std::vector<Interval>& lambdas, int min_order = 0);
void require_nonresonance(const std::vector<Interval>& lambdas);

} // namespace blowup
