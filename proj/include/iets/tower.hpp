#pragma once

// Iterated exponential towers f(z) = p(z, e_1(z), ..., e_k(z)) with
// e_0(z) = z and e_{j+1}(z) = e^{e_j(z)}.

#include <optional>
#include <vector>

#include "iets/logmag.hpp"
#include "iets/poly.hpp"

namespace iets {

class ExpTower {
public:
    // p has 1+k variables ordered (x, y_1, ..., y_k), is nonzero and depends
    // on y_k.
    ExpTower(int k, MultiPoly p);

    int k() const { return k_; }
    const MultiPoly& poly() const { return p_; }

private:
    int k_;
    MultiPoly p_;
};

// The only towers with finitely many zeros are p = g(x) * y_1^n1 * ... * y_k^nk,
// i.e. every term carries one shared y-exponent vector.
struct DegeneracyWitness {
    MultiPoly g;             // univariate in x (kept in the tower's variable space)
    std::vector<int> yExps;  // the shared exponent vector on (y_1, ..., y_k)
};

std::optional<DegeneracyWitness> isDegenerate(const ExpTower& t);

struct DegenerateTowerError : Error {
    DegeneracyWitness witness;
    explicit DegenerateTowerError(DegeneracyWitness w)
        : Error("tower polynomial has the degenerate form g(x) * y-monomial"),
          witness(std::move(w)) {}
};

struct TowerEval {
    std::optional<Complex> value;        // f(z), absent when a level overflows
    std::vector<LogMagComplex> levels;   // e_1(z), ..., e_k(z) (as far as computable)
    bool overflow = false;
    bool lossyArg = false;
};

TowerEval evalTower(const ExpTower& t, Complex z);

// Polynomial evaluation in log-magnitude arithmetic; usable when tower
// values exceed double range.
LogMagComplex evalPolyLogMag(const MultiPoly& p, const std::vector<LogMagComplex>& point);

// Consistency of a reduced-system solution x = (x_0, ..., x_{k-1}) standing
// for (z, e_1(z), ..., e_{k-1}(z)) with the tower it came from.
struct TowerResidual {
    double chain = 0.0;  // max_j |x_{j+1} - e^{x_j}|
    double poly = 0.0;   // |p(x_0, ..., x_{k-1}, e^{x_{k-1}})|
    double value = 0.0;  // max of the two, clamped to a finite double
    bool lossyArg = false;
};

TowerResidual towerResidual(const ExpTower& t, const std::vector<Complex>& x);

} // namespace iets
