#pragma once

// The genericity machinery: exact enumeration of the rational relations a
// tower polynomial is compatible with (witnessed by exact divisibility),
// multiplicative-independence of constant terms, integer-relation
// diagnostics on solved roots, and the solve plan tying it to the solver.
//
// The enumerators are unconditional algebra. Only their interpretation --
// "these are the only obstructions to genericity" -- rides on Schanuel's
// Conjecture, and every report says so.

#include <optional>
#include <string>
#include <vector>

#include "iets/parallel.hpp"
#include "iets/poly.hpp"
#include "iets/solver.hpp"
#include "iets/system.hpp"
#include "iets/tower.hpp"

namespace iets {

enum class BadRelationKind { TwoIter, ThreeIterTuple, TdOne };

struct BadRelation {
    BadRelationKind kind = BadRelationKind::TwoIter;
    std::vector<Rational> coeffs;  // r, s, or the tuple ratios r~
    std::vector<long> tuple;       // integer data: (n, m) or the raw tuple
    MultiPoly witnessDivisor;      // the q or s_m~ that divided
    bool specializationVanished = false; // p_r (or g_r~) was identically zero
    int heightBound = 0;
    LinearForm exclusion;          // ready-to-use form on the chain variables
    std::string note;
};

// Binomial shapes x^n - s*y^m or x^n*y^m - r with gcd(n, m) = 1; at most one.
std::vector<BadRelation> badRationalsTwoVar(const MultiPoly& p);

// All r = n/m with max(|n|, m) <= deg p such that p(x, r*x, z) vanishes or is
// divided by the case divisor (z^m - r^n x^n for n > 0, z^m x^{-n} - r^n
// cleared to polynomial form for n < 0).
std::vector<BadRelation> badRationalsThreeVar(const MultiPoly& p, Exec exec = Exec::Serial);

// Tuple scan for towers of depth k >= 2: m = (m_0, ..., m_{k-1}),
// m_{k-1} > 0 after sign normalization, gcd 1, |m_i| <= deg p. Reported when
// g_r~ = p(x~, r~.x~, z) vanishes or s_m~ divides it exactly in z.
std::vector<BadRelation> badTuplesTower(const ExpTower& t, Exec exec = Exec::Serial);

struct MultIndepResult {
    bool independent = false;
    std::vector<long> witness; // prod c_i^{m_i} = 1 when dependent
};

MultIndepResult multiplicativeIndependenceCheck(const std::vector<Rational>& constants);

struct RelationCandidate {
    std::vector<long> m;
    double residual = 0;
    bool multiplicative = false; // found on the log vector
};

struct RelationDiagnostic {
    std::vector<Complex> values; // (a, e_1(a), ..., e_k(a)) at double precision
    int heightBound = 0;
    int precisionDigits = 0;
    bool partial = false; // tower overflowed at the requested precision
    std::vector<RelationCandidate> candidates;
    bool noneFound() const { return candidates.empty(); }
};

// Numerical surrogate for genericity: recomputes the tower vector at high
// precision and searches for integer relations of height <= H (exhaustive at
// small height, plus lattice reduction; multiplicative relations via logs).
// Relations forced by a linear defining polynomial are not genericity
// violations and are filtered out. Absence of a relation is evidence, never
// proof.
RelationDiagnostic diagnoseRelations(const RootRecord& root, const ExpTower& tower, int H,
                                     int digits);
// Same search on a raw vector (used by the CLI diagnose subcommand and tests).
RelationDiagnostic diagnoseVector(const std::vector<Complex>& values, int H, int digits,
                                  const std::vector<long>& filterRelation = {});

struct GenericPlan {
    MasserSystem system;
    std::vector<BadRelation> excluded;
};

// Chain system of the tower augmented with one exp-equation per excluded
// relation (bad relations for the depth at hand, plus the degree form
// d_1 x_1 - d_2 x_0 for k >= 2).
GenericPlan genericSolvePlan(const ExpTower& t);

// LLL-reduced integer relation proposals for a real matrix embedding;
// exposed for tests.
std::vector<std::vector<long>> latticeRelationCandidates(
    const std::vector<std::vector<Rational>>& scaledColumns, int dim);

} // namespace iets
