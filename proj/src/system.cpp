#include "iets/system.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "iets/numeric.hpp"

namespace iets {

bool LinearForm::isZero() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](const Rational& c) { return c == 0; });
}

Complex LinearForm::eval(std::span<const Complex> x) const {
    if (x.size() < coeffs.size()) throw InputError("linear form: point too short");
    Complex acc = 0.0;
    for (size_t i = 0; i < coeffs.size(); ++i) acc += coeffs[i].get_d() * x[i];
    return acc;
}

MultiPoly LinearForm::toPoly(int nvars, CoeffMode mode) const {
    if (static_cast<int>(coeffs.size()) > nvars) throw InputError("linear form: too many coefficients");
    MultiPoly p(nvars, mode);
    for (size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] == 0) continue;
        Coeff c = mode == CoeffMode::Exact ? Coeff(GaussianRational(coeffs[i]))
                                           : Coeff(Complex(coeffs[i].get_d(), 0.0));
        p.addTerm(MultiIndex::unit(nvars, static_cast<int>(i)), c);
    }
    return p;
}

std::string LinearForm::toString() const {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] == 0) continue;
        if (!first) os << " + ";
        first = false;
        os << rationalToString(coeffs[i]) << "*x" << i;
    }
    if (first) os << "0";
    return os.str();
}

namespace {

void validateRhs(const Rhs& r, int n, CoeffMode mode) {
    if (const auto* p = std::get_if<PolyRhs>(&r)) {
        if (p->P.isZero()) throw InputError("polynomial right-hand side is zero");
        if (p->P.nvars() != n) throw InputError("right-hand side variable count mismatch");
        if (p->P.mode() != mode) throw ModeError("mixed coefficient modes across the system");
    } else if (const auto* q = std::get_if<RationalRhs>(&r)) {
        if (q->num.isZero() || q->den.isZero())
            throw InputError("rational right-hand side with zero numerator or denominator");
        if (q->num.nvars() != n || q->den.nvars() != n)
            throw InputError("right-hand side variable count mismatch");
        if (q->num.mode() != mode || q->den.mode() != mode)
            throw ModeError("mixed coefficient modes across the system");
    } else {
        const auto& b = std::get<BranchRhs>(r);
        if (b.defining.nvars() != n + 1)
            throw InputError("branch defining polynomial must have n+1 variables");
        if (b.defining.mode() != mode) throw ModeError("mixed coefficient modes across the system");
        int u = n;
        if (b.defining.degreeIn(u) < 1)
            throw InputError("branch defining polynomial must have degree >= 1 in u");
        if (b.defining.terms().size() == 1) {
            const auto& idx = b.defining.terms().begin()->first;
            if (idx[u] == 1 && idx.totalDegree() == 1)
                throw InputError("branch defining polynomial is a constant times u");
        }
    }
}

CoeffMode rhsMode(const Rhs& r) {
    if (const auto* p = std::get_if<PolyRhs>(&r)) return p->P.mode();
    if (const auto* q = std::get_if<RationalRhs>(&r)) return q->num.mode();
    return std::get<BranchRhs>(r).defining.mode();
}

} // namespace

MasserSystem::MasserSystem(std::vector<Rhs> rhs, Provenance prov)
    : rhs_(std::move(rhs)), prov_(std::move(prov)) {
    if (rhs_.empty()) throw InputError("empty system");
    CoeffMode mode = rhsMode(rhs_.front());
    for (const auto& r : rhs_) validateRhs(r, n(), mode);
}

bool MasserSystem::hasRational() const {
    return std::any_of(rhs_.begin(), rhs_.end(),
                       [](const Rhs& r) { return std::holds_alternative<RationalRhs>(r); });
}

bool MasserSystem::hasBranch() const {
    return std::any_of(rhs_.begin(), rhs_.end(),
                       [](const Rhs& r) { return std::holds_alternative<BranchRhs>(r); });
}

CoeffMode MasserSystem::mode() const { return rhsMode(rhs_.front()); }

MasserSystem fromTower(const ExpTower& t) {
    if (auto w = isDegenerate(t)) throw DegenerateTowerError(*w);
    if (!t.poly().dependsOn(0)) throw InputError("tower polynomial does not depend on x");
    const int k = t.k();
    const CoeffMode mode = t.poly().mode();

    std::vector<Rhs> rhs;
    rhs.reserve(k);
    for (int j = 0; j + 1 < k; ++j) rhs.push_back(PolyRhs{MultiPoly::variable(k, j + 1, mode)});

    // Variable layout of p, (x, y_1, ..., y_k), already matches the branch
    // layout (x_0, ..., x_{k-1}, u) with u standing for e_k(z).
    BranchRhs br;
    br.defining = t.poly();
    br.branchDegree = estimateBranchDegree(br.defining);
    rhs.push_back(std::move(br));

    Provenance prov;
    prov.towerK = k;
    prov.notes.push_back("chain reduction of a depth-" + std::to_string(k) + " tower");
    return MasserSystem(std::move(rhs), std::move(prov));
}

MasserSystem rationalToIntegral(const MasserSystem& s) {
    if (!s.hasRational()) return s;
    if (s.hasBranch())
        throw InputError("rationalToIntegral: branch right-hand sides are already integral");
    const int n = s.n();
    const CoeffMode mode = s.mode();
    const Coeff one =
        mode == CoeffMode::Exact ? Coeff(GaussianRational(1)) : Coeff(Complex(1.0, 0.0));

    std::vector<MultiPoly> diff;
    diff.reserve(n);
    for (int i = 0; i < n; ++i)
        diff.push_back(MultiPoly::variable(2 * n, i, mode) - MultiPoly::variable(2 * n, n + i, mode));

    std::vector<Rhs> rhs(2 * n, PolyRhs{});
    for (int i = 0; i < n; ++i) {
        MultiPoly num(0, mode), den(0, mode);
        if (const auto* p = std::get_if<PolyRhs>(&s.rhs()[i])) {
            num = p->P;
            den = MultiPoly::constant(n, one);
        } else {
            const auto& q = std::get<RationalRhs>(s.rhs()[i]);
            num = q.num;
            den = q.den;
        }
        rhs[i] = PolyRhs{num.compose(diff)};
        rhs[n + i] = PolyRhs{den.compose(diff)};
    }
    Provenance prov = s.provenance();
    prov.notes.push_back("doubled 2n-variable integral system; recover a_i = x_i - y_i");
    return MasserSystem(std::move(rhs), std::move(prov));
}

BranchValue branchEval(BranchRhs& r, std::span<const Complex> x) {
    const int n = r.defining.nvars() - 1;
    if (static_cast<int>(x.size()) != n) throw InputError("branchEval: dimension mismatch");
    const int m = r.defining.degreeIn(n);

    std::vector<Complex> point(x.begin(), x.end());
    point.push_back(0.0);
    std::vector<Complex> coeffs(m + 1);
    double scale = 0.0;
    for (int j = 0; j <= m; ++j) {
        coeffs[j] = r.defining.coefficientOf(n, j).evaluate(point);
        scale = std::max(scale, std::abs(coeffs[j]));
    }
    if (scale == 0.0 || !std::isfinite(scale))
        throw BranchError("branch undefined: coefficient slice vanished or overflowed");

    auto roots = polyRootsCompanion(coeffs);
    if (roots.empty()) throw BranchError("branch undefined: degree collapsed at this point");

    Complex chosen;
    if (r.branchState) {
        chosen = roots.front();
        double best = std::abs(roots.front() - *r.branchState);
        for (const auto& u : roots) {
            double d = std::abs(u - *r.branchState);
            if (d < best) {
                best = d;
                chosen = u;
            }
        }
    } else {
        // Largest modulus, matching the dominant leading behavior along seed
        // rays; modulus ties prefer arg in (-pi/2, pi/2], then smaller |arg|.
        double maxMod = 0.0;
        for (const auto& u : roots) maxMod = std::max(maxMod, std::abs(u));
        auto inRange = [](const Complex& u) {
            double a = std::arg(u);
            return a > -std::numbers::pi / 2 && a <= std::numbers::pi / 2;
        };
        bool first = true;
        for (const auto& u : roots) {
            if (std::abs(u) < maxMod * (1.0 - 1e-9)) continue;
            if (first) {
                chosen = u;
                first = false;
                continue;
            }
            if (inRange(u) != inRange(chosen)) {
                if (inRange(u)) chosen = u;
            } else if (std::abs(std::arg(u)) < std::abs(std::arg(chosen))) {
                chosen = u;
            }
        }
    }

    BranchValue out;
    out.value = chosen;
    for (const auto& u : roots)
        if (u != chosen && std::abs(u - chosen) < 1e-9 * (1.0 + std::abs(chosen)))
            out.ambiguous = true;
    r.branchState = chosen;
    return out;
}

MasserSystem augmentExcludeRelations(const MasserSystem& s, const std::vector<LinearForm>& forms) {
    if (forms.empty()) return s;
    const int n = s.n();
    const int n2 = n + static_cast<int>(forms.size());
    const CoeffMode mode = s.mode();

    for (const auto& f : forms) {
        if (f.isZero()) throw InputError("cannot exclude the zero linear form");
        if (static_cast<int>(f.coeffs.size()) > n)
            throw InputError("excluded form refers to variables beyond the system");
    }

    std::vector<int> keep(n);
    for (int i = 0; i < n; ++i) keep[i] = i;

    std::vector<Rhs> rhs;
    rhs.reserve(n2);
    for (const auto& r : s.rhs()) {
        if (const auto* p = std::get_if<PolyRhs>(&r)) {
            rhs.push_back(PolyRhs{p->P.remapVars(n2, keep)});
        } else if (const auto* q = std::get_if<RationalRhs>(&r)) {
            rhs.push_back(RationalRhs{q->num.remapVars(n2, keep), q->den.remapVars(n2, keep)});
        } else {
            const auto& b = std::get<BranchRhs>(r);
            std::vector<int> withU = keep;
            withU.push_back(n2); // u stays last
            BranchRhs nb;
            nb.defining = b.defining.remapVars(n2 + 1, withU);
            nb.branchDegree = b.branchDegree;
            rhs.push_back(std::move(nb));
        }
    }
    for (const auto& f : forms) rhs.push_back(PolyRhs{f.toPoly(n2, mode)});

    Provenance prov = s.provenance();
    for (const auto& f : forms) {
        prov.excludedForms.push_back(f);
        prov.notes.push_back("excluded relation " + f.toString() + " = 0");
    }
    return MasserSystem(std::move(rhs), std::move(prov));
}

std::vector<double> exclusionMargins(const MasserSystem& s, std::span<const Complex> solution) {
    std::vector<double> out;
    out.reserve(s.provenance().excludedForms.size());
    for (const auto& f : s.provenance().excludedForms)
        out.push_back(std::abs(f.eval(solution)));
    return out;
}

Rational estimateBranchDegree(const MultiPoly& defining) {
    const int n = defining.nvars() - 1;
    const int degU = std::max(1, defining.degreeIn(n));
    static const double kTwoPi = 2.0 * std::numbers::pi;

    std::vector<std::vector<double>> rays;
    rays.push_back(std::vector<double>(n, 1.0));
    {
        std::vector<double> ramp(n);
        for (int i = 0; i < n; ++i) ramp[i] = static_cast<double>(i + 1);
        rays.push_back(ramp);
        std::vector<double> alt(n);
        for (int i = 0; i < n; ++i) alt[i] = (i % 2 == 0) ? static_cast<double>(i + 1)
                                                          : -static_cast<double>(i + 1);
        rays.push_back(alt);
    }

    const std::vector<double> ts = {64, 128, 256, 512, 1024};
    for (const auto& ray : rays) {
        std::vector<double> xs, ys;
        bool ok = true;
        for (double t : ts) {
            std::vector<Complex> pt(n);
            for (int i = 0; i < n; ++i) pt[i] = Complex(0.0, kTwoPi * t * ray[i]);
            BranchRhs probe{defining.toFloat(), Rational(0), std::nullopt};
            try {
                BranchValue v = branchEval(probe, pt);
                double mag = std::abs(v.value);
                if (!(mag > 1e-12) || !std::isfinite(mag)) {
                    ok = false;
                    break;
                }
                xs.push_back(std::log(t));
                ys.push_back(std::log(mag));
            } catch (const BranchError&) {
                ok = false;
                break;
            }
        }
        if (!ok || xs.size() < 2) continue;
        double mx = 0, my = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= xs.size();
        my /= ys.size();
        double num = 0, den = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            num += (xs[i] - mx) * (ys[i] - my);
            den += (xs[i] - mx) * (xs[i] - mx);
        }
        if (den == 0) continue;
        return ratApprox(num / den, degU);
    }
    return Rational(1);
}

} // namespace iets
