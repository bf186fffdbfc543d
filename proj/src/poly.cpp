#include "iets/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace iets {

namespace {

void requireSameMode(const Coeff& a, const Coeff& b) {
    if (coeffMode(a) != coeffMode(b)) throw ModeError("mixed exact/float coefficients");
}

} // namespace

bool coeffIsZero(const Coeff& c) {
    if (const auto* g = std::get_if<GaussianRational>(&c)) return g->isZero();
    return std::get<Complex>(c) == Complex(0.0, 0.0);
}

Coeff coeffAdd(const Coeff& a, const Coeff& b) {
    requireSameMode(a, b);
    if (const auto* g = std::get_if<GaussianRational>(&a))
        return *g + std::get<GaussianRational>(b);
    return std::get<Complex>(a) + std::get<Complex>(b);
}

Coeff coeffMul(const Coeff& a, const Coeff& b) {
    requireSameMode(a, b);
    if (const auto* g = std::get_if<GaussianRational>(&a))
        return *g * std::get<GaussianRational>(b);
    return std::get<Complex>(a) * std::get<Complex>(b);
}

Coeff coeffNeg(const Coeff& a) {
    if (const auto* g = std::get_if<GaussianRational>(&a)) return -*g;
    return -std::get<Complex>(a);
}

Complex coeffToComplex(const Coeff& c) {
    if (const auto* g = std::get_if<GaussianRational>(&c)) return g->toComplex();
    return std::get<Complex>(c);
}

double coeffAbs(const Coeff& c) { return std::abs(coeffToComplex(c)); }

std::string coeffToString(const Coeff& c) {
    if (const auto* g = std::get_if<GaussianRational>(&c)) return g->toString();
    std::ostringstream os;
    Complex z = std::get<Complex>(c);
    os << "(" << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i)";
    return os.str();
}

MultiIndex::MultiIndex(std::vector<int> exps) : exps_(std::move(exps)) {
    for (int e : exps_)
        if (e < 0) throw InputError("negative exponent in multi-index");
}

MultiIndex MultiIndex::unit(int nvars, int var, int exp) {
    std::vector<int> e(nvars, 0);
    e.at(var) = exp;
    return MultiIndex(std::move(e));
}

int MultiIndex::totalDegree() const {
    int d = 0;
    for (int e : exps_) d += e;
    return d;
}

MultiIndex MultiIndex::plus(const MultiIndex& o) const {
    std::vector<int> e(exps_);
    for (size_t i = 0; i < e.size(); ++i) e[i] += o.exps_[i];
    return MultiIndex(std::move(e));
}

std::optional<MultiIndex> MultiIndex::minus(const MultiIndex& o) const {
    std::vector<int> e(exps_);
    for (size_t i = 0; i < e.size(); ++i) {
        e[i] -= o.exps_[i];
        if (e[i] < 0) return std::nullopt;
    }
    return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::withVar(int var, int exp) const {
    std::vector<int> e(exps_);
    e.at(var) = exp;
    return MultiIndex(std::move(e));
}

bool GradedLexLess::operator()(const MultiIndex& a, const MultiIndex& b) const {
    int da = a.totalDegree(), db = b.totalDegree();
    if (da != db) return da < db;
    return a.exps() < b.exps();
}

MultiPoly MultiPoly::constant(int nvars, const Coeff& c) {
    MultiPoly p(nvars, coeffMode(c));
    p.addTerm(MultiIndex::zero(nvars), c);
    return p;
}

MultiPoly MultiPoly::variable(int nvars, int var, CoeffMode mode) {
    Coeff one = mode == CoeffMode::Exact ? Coeff(GaussianRational(1)) : Coeff(Complex(1.0, 0.0));
    return monomial(nvars, MultiIndex::unit(nvars, var), one);
}

MultiPoly MultiPoly::monomial(int nvars, const MultiIndex& idx, const Coeff& c) {
    MultiPoly p(nvars, coeffMode(c));
    p.addTerm(idx, c);
    return p;
}

int MultiPoly::totalDegree() const {
    if (terms_.empty()) throw InputError("total degree of the zero polynomial is undefined");
    return terms_.rbegin()->first.totalDegree();
}

int MultiPoly::degreeIn(int var) const {
    int d = -1;
    for (const auto& [idx, c] : terms_) d = std::max(d, idx[var]);
    return d;
}

bool MultiPoly::dependsOn(int var) const { return degreeIn(var) > 0; }

void MultiPoly::checkCompatible(const MultiPoly& o) const {
    if (nvars_ != o.nvars_) throw InputError("polynomial variable counts differ");
    if (mode_ != o.mode_) throw ModeError("mixed exact/float polynomials");
}

void MultiPoly::addTerm(const MultiIndex& idx, const Coeff& c) {
    if (idx.nvars() != nvars_) throw InputError("multi-index length does not match variable count");
    if (coeffMode(c) != mode_) throw ModeError("coefficient mode does not match polynomial mode");
    if (const auto* z = std::get_if<Complex>(&c))
        if (!std::isfinite(z->real()) || !std::isfinite(z->imag()))
            throw InputError("non-finite float coefficient");
    if (coeffIsZero(c)) return;
    auto it = terms_.find(idx);
    if (it == terms_.end()) {
        terms_.emplace(idx, c);
    } else {
        Coeff s = coeffAdd(it->second, c);
        if (coeffIsZero(s))
            terms_.erase(it);
        else
            it->second = s;
    }
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
    checkCompatible(o);
    for (const auto& [idx, c] : o.terms_) addTerm(idx, c);
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
    checkCompatible(o);
    for (const auto& [idx, c] : o.terms_) addTerm(idx, coeffNeg(c));
    return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.checkCompatible(b);
    MultiPoly out(a.nvars_, a.mode_);
    for (const auto& [ia, ca] : a.terms_)
        for (const auto& [ib, cb] : b.terms_) out.addTerm(ia.plus(ib), coeffMul(ca, cb));
    return out;
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly out(nvars_, mode_);
    for (const auto& [idx, c] : terms_) out.terms_.emplace(idx, coeffNeg(c));
    return out;
}

MultiPoly MultiPoly::scaled(const Coeff& c) const {
    if (coeffMode(c) != mode_) throw ModeError("scalar mode does not match polynomial mode");
    MultiPoly out(nvars_, mode_);
    if (coeffIsZero(c)) return out;
    for (const auto& [idx, t] : terms_) out.addTerm(idx, coeffMul(t, c));
    return out;
}

bool MultiPoly::operator==(const MultiPoly& o) const {
    if (nvars_ != o.nvars_ || mode_ != o.mode_ || terms_.size() != o.terms_.size()) return false;
    auto it = terms_.begin();
    auto jt = o.terms_.begin();
    for (; it != terms_.end(); ++it, ++jt) {
        if (!(it->first == jt->first)) return false;
        if (!coeffIsZero(coeffAdd(it->second, coeffNeg(jt->second)))) return false;
    }
    return true;
}

MultiPoly MultiPoly::partialDerivative(int var) const {
    if (var < 0 || var >= nvars_) throw InputError("partialDerivative: variable index out of range");
    MultiPoly out(nvars_, mode_);
    for (const auto& [idx, c] : terms_) {
        int e = idx[var];
        if (e == 0) continue;
        Coeff factor = mode_ == CoeffMode::Exact ? Coeff(GaussianRational(e))
                                                 : Coeff(Complex(static_cast<double>(e), 0.0));
        out.addTerm(idx.withVar(var, e - 1), coeffMul(c, factor));
    }
    return out;
}

std::vector<std::pair<int, MultiPoly>> MultiPoly::homogeneousParts() const {
    if (terms_.empty()) throw InputError("homogeneousParts: zero polynomial");
    std::map<int, MultiPoly> parts;
    for (const auto& [idx, c] : terms_) {
        int d = idx.totalDegree();
        parts.try_emplace(d, nvars_, mode_).first->second.addTerm(idx, c);
    }
    std::vector<std::pair<int, MultiPoly>> out;
    out.reserve(parts.size());
    for (auto& [d, p] : parts) out.emplace_back(d, std::move(p));
    return out;
}

MultiPoly MultiPoly::leadingHomogeneousPart() const {
    if (terms_.empty()) throw InputError("leadingHomogeneousPart: zero polynomial");
    int d = totalDegree();
    MultiPoly out(nvars_, mode_);
    for (const auto& [idx, c] : terms_)
        if (idx.totalDegree() == d) out.addTerm(idx, c);
    return out;
}

MultiPoly MultiPoly::coefficientOf(int var, int exp) const {
    MultiPoly out(nvars_, mode_);
    for (const auto& [idx, c] : terms_)
        if (idx[var] == exp) out.addTerm(idx.withVar(var, 0), c);
    return out;
}

PolyDivision MultiPoly::divideMonicInVar(const MultiPoly& p, const MultiPoly& d,
                                                      int var) {
    p.checkCompatible(d);
    if (p.mode_ != CoeffMode::Exact) throw ModeError("division requires exact coefficients");
    if (var < 0 || var >= p.nvars_) throw InputError("division: variable index out of range");
    int m = d.degreeIn(var);
    if (m < 1) throw UnsupportedDivisorError("divisor does not depend on the division variable");
    MultiPoly lead = d.coefficientOf(var, m);
    if (lead.terms().size() != 1)
        throw UnsupportedDivisorError("divisor leading coefficient is not a single term");
    const auto& [lidx, lc] = *lead.terms().begin();
    if (lidx.totalDegree() != 0)
        throw UnsupportedDivisorError("divisor is not monic in the division variable");
    const auto& g = std::get<GaussianRational>(lc);
    if (!(g == GaussianRational(1) || g == GaussianRational(-1)))
        throw UnsupportedDivisorError("divisor leading coefficient is not +-1");

    MultiPoly q(p.nvars_, p.mode_);
    MultiPoly r = p;
    while (!r.isZero()) {
        int D = r.degreeIn(var);
        if (D < m) break;
        MultiPoly cD = r.coefficientOf(var, D);
        // lead is +-1, so the forced quotient slice is +-cD * var^(D-m).
        MultiPoly shift = monomial(p.nvars_, MultiIndex::unit(p.nvars_, var, D - m),
                                   Coeff(GaussianRational(1)));
        MultiPoly slice = (g == GaussianRational(1) ? cD : -cD) * shift;
        q += slice;
        r -= slice * d;
    }
    return {std::move(q), std::move(r)};
}

std::optional<PolyDivision> MultiPoly::divideMonomialLeading(const MultiPoly& p,
                                                                          const MultiPoly& d,
                                                                          int var) {
    p.checkCompatible(d);
    if (p.mode_ != CoeffMode::Exact) throw ModeError("division requires exact coefficients");
    int m = d.degreeIn(var);
    if (m < 1) throw UnsupportedDivisorError("divisor does not depend on the division variable");
    MultiPoly lead = d.coefficientOf(var, m);
    if (lead.terms().size() != 1)
        throw UnsupportedDivisorError("divisor leading coefficient is not a single monomial");
    const auto& [lidx, lcoeff] = *lead.terms().begin();
    const auto lg = std::get<GaussianRational>(lcoeff);

    MultiPoly q(p.nvars_, p.mode_);
    MultiPoly r = p;
    while (!r.isZero()) {
        int D = r.degreeIn(var);
        if (D < m) break;
        MultiPoly cD = r.coefficientOf(var, D);
        // Divide every term of cD by the leading monomial; a failed exponent
        // subtraction means no polynomial quotient exists.
        MultiPoly slice(p.nvars_, p.mode_);
        for (const auto& [idx, c] : cD.terms()) {
            auto reduced = idx.minus(lidx);
            if (!reduced) return std::nullopt;
            slice.addTerm(reduced->withVar(var, D - m),
                          std::get<GaussianRational>(c) / lg);
        }
        q += slice;
        r -= slice * d;
    }
    return PolyDivision{std::move(q), std::move(r)};
}

bool MultiPoly::dividesExactly(const MultiPoly& d, const MultiPoly& p, int var) {
    if (p.isZero()) return true;
    auto res = divideMonomialLeading(p, d, var);
    return res && res->remainder.isZero();
}

MultiPoly MultiPoly::compose(const std::vector<MultiPoly>& args) const {
    if (static_cast<int>(args.size()) != nvars_)
        throw InputError("compose: argument count does not match variable count");
    for (const auto& a : args) {
        if (a.mode() != mode_) throw ModeError("compose: argument mode mismatch");
        if (a.nvars() != args.front().nvars()) throw InputError("compose: argument spaces differ");
    }
    int outVars = args.empty() ? 0 : args.front().nvars();
    Coeff one = mode_ == CoeffMode::Exact ? Coeff(GaussianRational(1)) : Coeff(Complex(1.0, 0.0));
    // Cached powers of each argument.
    std::vector<std::vector<MultiPoly>> pow(nvars_);
    for (int v = 0; v < nvars_; ++v) pow[v].push_back(constant(outVars, one));

    MultiPoly out(outVars, mode_);
    for (const auto& [idx, c] : terms_) {
        MultiPoly term = constant(outVars, c);
        for (int v = 0; v < nvars_; ++v) {
            while (static_cast<int>(pow[v].size()) <= idx[v]) pow[v].push_back(pow[v].back() * args[v]);
            if (idx[v] > 0) term = term * pow[v][idx[v]];
        }
        out += term;
    }
    return out;
}

MultiPoly MultiPoly::remapVars(int newNvars, const std::vector<int>& where) const {
    if (static_cast<int>(where.size()) != nvars_) throw InputError("remapVars: map length mismatch");
    MultiPoly out(newNvars, mode_);
    for (const auto& [idx, c] : terms_) {
        std::vector<int> e(newNvars, 0);
        for (int v = 0; v < nvars_; ++v) {
            if (idx[v] != 0) {
                if (where[v] < 0 || where[v] >= newNvars)
                    throw InputError("remapVars: target index out of range");
                e[where[v]] += idx[v];
            }
        }
        out.addTerm(MultiIndex(std::move(e)), c);
    }
    return out;
}

MultiPoly MultiPoly::toFloat() const {
    MultiPoly out(nvars_, CoeffMode::Float);
    for (const auto& [idx, c] : terms_) out.addTerm(idx, Coeff(coeffToComplex(c)));
    return out;
}

double MultiPoly::absMajorantAt(double radius) const {
    double sum = 0.0;
    for (const auto& [idx, c] : terms_) sum += coeffAbs(c) * std::pow(radius, idx.totalDegree());
    return sum * (1.0 + 1e-12);
}

std::string MultiPoly::toString() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        if (!first) os << " + ";
        first = false;
        os << coeffToString(it->second);
        for (int v = 0; v < nvars_; ++v) {
            int e = it->first[v];
            if (e == 0) continue;
            os << "*x" << v;
            if (e > 1) os << "^" << e;
        }
    }
    return os.str();
}

} // namespace iets
