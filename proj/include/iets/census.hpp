#pragma once

// Argument-principle zero counting in rectangles: the winding number of f
// along the contour, computed by adaptive trapezoid quadrature of f'/f with
// integer snapping and rectangle subdivision.

#include <functional>
#include <optional>
#include <vector>

#include "iets/parallel.hpp"
#include "iets/system.hpp"
#include "iets/tower.hpp"

namespace iets {

struct CountRegion {
    Complex lo;                    // corner with smaller Re and Im
    Complex hi;                    // opposite corner
    int subdivisionDepth = 6;
    int contourSamplesPerEdge = 64;
};

// One-dimensional analytic function with derivative; nullopt marks a point
// where the value is not float-representable (tower overflow).
struct AnalyticFn {
    std::function<std::optional<std::pair<Complex, Complex>>(Complex)> evalWithDeriv;
};

AnalyticFn towerFn(const ExpTower& t);
// k = 0 case: a plain univariate polynomial.
AnalyticFn polyFn(const MultiPoly& univariate);
// Residual e^z - f_1(z) of a one-equation system.
AnalyticFn systemResidualFn(const MasserSystem& s);

struct CountPiece {
    Complex lo, hi;
    int count = 0;
};

struct CountResult {
    int count = 0;
    std::vector<CountPiece> pieces; // leaf rectangles of the subdivision
    bool nudged = false;            // outer contour was moved off a near-root
};

// Throws RegionError when the contour is not representable (overflow) or the
// quadrature stays inconclusive at full subdivision depth.
CountResult countZeros(const AnalyticFn& f, const CountRegion& region, Exec exec = Exec::Parallel);

} // namespace iets
