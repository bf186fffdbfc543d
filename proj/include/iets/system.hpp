#pragma once

// Masser systems e^{x_i} = f_i(x) with polynomial, rational or
// algebraic-branch right-hand sides, and the transformations between them:
// tower reduction, rational-to-integral doubling and relation-exclusion
// augmentation.

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "iets/poly.hpp"
#include "iets/tower.hpp"

namespace iets {

struct PolyRhs {
    MultiPoly P; // nonzero
};

struct RationalRhs {
    MultiPoly num;
    MultiPoly den; // nonzero
};

// Value of an algebraic branch u(x) with defining(x, u) = 0, tracked by
// nearest-root continuation from the last returned value.
struct BranchRhs {
    MultiPoly defining;    // n+1 variables, u last; degree >= 1 in u
    Rational branchDegree{0};
    std::optional<Complex> branchState;
};

using Rhs = std::variant<PolyRhs, RationalRhs, BranchRhs>;

struct BranchValue {
    Complex value;
    bool ambiguous = false; // another root within 1e-9 of the chosen one
};

// Rational linear form sum_i coeffs[i] * x_i over the system variables.
struct LinearForm {
    std::vector<Rational> coeffs;
    bool isZero() const;
    Complex eval(std::span<const Complex> x) const;
    MultiPoly toPoly(int nvars, CoeffMode mode) const;
    std::string toString() const;
    bool operator==(const LinearForm& o) const { return coeffs == o.coeffs; }
};

struct Provenance {
    std::optional<int> towerK;                // set when reduced from a tower
    std::vector<LinearForm> excludedForms;    // relation exclusions, in order added
    std::vector<std::string> notes;
};

class MasserSystem {
public:
    MasserSystem() = default;
    explicit MasserSystem(std::vector<Rhs> rhs, Provenance prov = {});

    int n() const { return static_cast<int>(rhs_.size()); }
    const std::vector<Rhs>& rhs() const { return rhs_; }
    std::vector<Rhs>& rhs() { return rhs_; }
    const Provenance& provenance() const { return prov_; }
    Provenance& provenance() { return prov_; }

    bool hasRational() const;
    bool hasBranch() const;
    CoeffMode mode() const; // mode of the first RHS polynomial

private:
    std::vector<Rhs> rhs_;
    Provenance prov_;
};

// Chain reduction of a tower: e^{x_j} = x_{j+1} for j < k-1 and
// e^{x_{k-1}} = branch of p(x_0, ..., x_{k-1}, u). Throws
// DegenerateTowerError (with witness) on degenerate input.
MasserSystem fromTower(const ExpTower& t);

// Doubling of rational right-hand sides: e^{x_i} = g_i(x-y),
// e^{y_i} = h_i(x-y); a solution (a, b) recovers a - b for the original
// system. All-polynomial systems pass through unchanged.
MasserSystem rationalToIntegral(const MasserSystem& s);

// Branch evaluation at a point; updates r.branchState.
BranchValue branchEval(BranchRhs& r, std::span<const Complex> x);

// One fresh variable and equation e^{u_j} = l_j(x) per relation; since
// exp never vanishes, any solution has l_j(x) != 0.
MasserSystem augmentExcludeRelations(const MasserSystem& s, const std::vector<LinearForm>& forms);

// |l_j(x)| for every excluded form recorded in provenance, evaluated on the
// first `chain` coordinates of a solution.
std::vector<double> exclusionMargins(const MasserSystem& s, std::span<const Complex> solution);

// Least-squares slope of log|u| vs log t along a probe ray, rounded to a
// rational with denominator <= deg_u(defining).
Rational estimateBranchDegree(const MultiPoly& defining);

} // namespace iets
