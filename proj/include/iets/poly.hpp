#pragma once

// Sparse multivariate polynomials over exact Gaussian rationals or complex
// doubles. Terms are kept in graded-lexicographic order so that printing,
// JSON output and division are reproducible run to run.

#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "iets/errors.hpp"
#include "iets/rational.hpp"

namespace iets {

enum class CoeffMode { Exact, Float };

using Coeff = std::variant<GaussianRational, Complex>;

inline CoeffMode coeffMode(const Coeff& c) {
    return std::holds_alternative<GaussianRational>(c) ? CoeffMode::Exact : CoeffMode::Float;
}

bool coeffIsZero(const Coeff& c);
Coeff coeffAdd(const Coeff& a, const Coeff& b);
Coeff coeffMul(const Coeff& a, const Coeff& b);
Coeff coeffNeg(const Coeff& a);
Complex coeffToComplex(const Coeff& c);
double coeffAbs(const Coeff& c);
std::string coeffToString(const Coeff& c);

// Conversion hooks used by the templated evaluator; specialized for the
// high-precision complex type in highprec.hpp.
template <typename C>
struct ComplexTraits;

template <>
struct ComplexTraits<Complex> {
    static Complex fromCoeff(const Coeff& c) { return coeffToComplex(c); }
    static Complex zero() { return {0.0, 0.0}; }
    static Complex one() { return {1.0, 0.0}; }
};

// Exact evaluation at Gaussian-rational points (exact mode only).
template <>
struct ComplexTraits<GaussianRational> {
    static GaussianRational fromCoeff(const Coeff& c) {
        if (const auto* g = std::get_if<GaussianRational>(&c)) return *g;
        throw ModeError("exact evaluation of a float polynomial");
    }
    static GaussianRational zero() { return GaussianRational(0); }
    static GaussianRational one() { return GaussianRational(1); }
};

class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> exps);
    static MultiIndex zero(int nvars) { return MultiIndex(std::vector<int>(nvars, 0)); }
    static MultiIndex unit(int nvars, int var, int exp = 1);

    int nvars() const { return static_cast<int>(exps_.size()); }
    int operator[](int i) const { return exps_[i]; }
    const std::vector<int>& exps() const { return exps_; }
    int totalDegree() const;

    MultiIndex plus(const MultiIndex& o) const;
    // Componentwise subtraction; nullopt if any exponent would go negative.
    std::optional<MultiIndex> minus(const MultiIndex& o) const;
    MultiIndex withVar(int var, int exp) const;

    bool operator==(const MultiIndex& o) const { return exps_ == o.exps_; }

private:
    std::vector<int> exps_;
};

// Strict graded-lex order: total degree first, then lexicographic.
struct GradedLexLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

struct PolyDivision;

class MultiPoly {
public:
    using TermMap = std::map<MultiIndex, Coeff, GradedLexLess>;

    MultiPoly() = default;
    MultiPoly(int nvars, CoeffMode mode) : nvars_(nvars), mode_(mode) {}

    static MultiPoly zero(int nvars, CoeffMode mode) { return {nvars, mode}; }
    static MultiPoly constant(int nvars, const Coeff& c);
    static MultiPoly variable(int nvars, int var, CoeffMode mode);
    static MultiPoly monomial(int nvars, const MultiIndex& idx, const Coeff& c);

    int nvars() const { return nvars_; }
    CoeffMode mode() const { return mode_; }
    bool isZero() const { return terms_.empty(); }
    const TermMap& terms() const { return terms_; }

    // Total degree of the zero polynomial is undefined by design.
    int totalDegree() const;
    // Largest exponent of `var`; -1 for the zero polynomial.
    int degreeIn(int var) const;
    bool dependsOn(int var) const;

    void addTerm(const MultiIndex& idx, const Coeff& c);

    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly& operator-=(const MultiPoly& o);
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    MultiPoly operator-() const;
    MultiPoly scaled(const Coeff& c) const;

    bool operator==(const MultiPoly& o) const;

    template <typename C>
    C evaluateAs(std::span<const C> point) const;
    Complex evaluate(std::span<const Complex> point) const { return evaluateAs<Complex>(point); }
    Complex evaluate(const std::vector<Complex>& point) const {
        return evaluateAs<Complex>(std::span<const Complex>(point));
    }

    MultiPoly partialDerivative(int var) const;

    // Decomposition into homogeneous parts, ascending degree; parts sum to
    // the input and the top part is nonzero.
    std::vector<std::pair<int, MultiPoly>> homogeneousParts() const;
    MultiPoly leadingHomogeneousPart() const;

    // Coefficient of var^exp, returned in the full variable space with the
    // exponent of `var` set to zero.
    MultiPoly coefficientOf(int var, int exp) const;

    // Exact division by a divisor monic (+-1) in `var`.
    static PolyDivision divideMonicInVar(const MultiPoly& p, const MultiPoly& d, int var);
    // Division where the leading coefficient of d in `var` is a single
    // monomial; nullopt means a forced quotient step left the polynomial
    // ring, which already rules out exact divisibility.
    static std::optional<PolyDivision> divideMonomialLeading(const MultiPoly& p,
                                                             const MultiPoly& d, int var);
    static bool dividesExactly(const MultiPoly& d, const MultiPoly& p, int var);

    // Substitution p(args[0], ..., args[nvars-1]).
    MultiPoly compose(const std::vector<MultiPoly>& args) const;
    // Embed into a wider variable space, sending variable i to where[i].
    MultiPoly remapVars(int newNvars, const std::vector<int>& where) const;

    MultiPoly toFloat() const;

    // Upper bound for |p| on the polydisk of radius R (sum of |c|*R^deg).
    double absMajorantAt(double radius) const;

    std::string toString() const;

private:
    int nvars_ = 0;
    CoeffMode mode_ = CoeffMode::Exact;
    TermMap terms_;

    void checkCompatible(const MultiPoly& o) const;
};

struct PolyDivision {
    MultiPoly quotient;
    MultiPoly remainder;
};

template <typename C>
C MultiPoly::evaluateAs(std::span<const C> point) const {
    if (static_cast<int>(point.size()) != nvars_)
        throw InputError("evaluate: point has " + std::to_string(point.size()) +
                         " coordinates, polynomial has " + std::to_string(nvars_) + " variables");
    using T = ComplexTraits<C>;
    // Power tables, one per variable, built to the largest exponent used.
    std::vector<std::vector<C>> pow(nvars_);
    for (int v = 0; v < nvars_; ++v) {
        int maxExp = 0;
        for (const auto& [idx, c] : terms_) maxExp = std::max(maxExp, idx[v]);
        pow[v].resize(maxExp + 1);
        pow[v][0] = T::one();
        for (int e = 1; e <= maxExp; ++e) pow[v][e] = pow[v][e - 1] * point[v];
    }
    C acc = T::zero();
    for (const auto& [idx, c] : terms_) {
        C term = T::fromCoeff(c);
        for (int v = 0; v < nvars_; ++v)
            if (idx[v] > 0) term = term * pow[v][idx[v]];
        acc = acc + term;
    }
    return acc;
}

} // namespace iets
