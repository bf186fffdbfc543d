#include "iets/tower.hpp"

#include <algorithm>
#include <cmath>

namespace iets {

ExpTower::ExpTower(int k, MultiPoly p) : k_(k), p_(std::move(p)) {
    if (k_ < 1) throw InputError("tower depth k must be >= 1");
    if (p_.nvars() != k_ + 1)
        throw InputError("tower polynomial must have 1+k variables (x, y_1, ..., y_k)");
    if (p_.isZero()) throw InputError("tower polynomial is zero");
    if (!p_.dependsOn(k_)) throw InputError("tower polynomial does not depend on y_k");
}

std::optional<DegeneracyWitness> isDegenerate(const ExpTower& t) {
    const MultiPoly& p = t.poly();
    const int k = t.k();
    std::optional<std::vector<int>> shared;
    for (const auto& [idx, c] : p.terms()) {
        std::vector<int> yPart(idx.exps().begin() + 1, idx.exps().end());
        if (!shared) {
            shared = std::move(yPart);
        } else if (*shared != yPart) {
            return std::nullopt;
        }
    }
    DegeneracyWitness w;
    w.yExps = *shared;
    w.g = MultiPoly(k + 1, p.mode());
    for (const auto& [idx, c] : p.terms()) {
        std::vector<int> e(k + 1, 0);
        e[0] = idx[0];
        w.g.addTerm(MultiIndex(std::move(e)), c);
    }
    return w;
}

TowerEval evalTower(const ExpTower& t, Complex z) {
    TowerEval out;
    LogMagComplex cur;
    cur.logAbs = z.real();
    cur.arg = LogMagComplex::reduceArg(z.imag());
    cur.lossyArg = std::abs(z.imag()) > kArgReductionLimit;
    out.levels.push_back(cur); // e_1
    for (int j = 2; j <= t.k(); ++j) {
        auto next = cur.expOf();
        if (!next) {
            out.overflow = true;
            break;
        }
        cur = *next;
        out.levels.push_back(cur);
    }
    for (const auto& lv : out.levels) out.lossyArg = out.lossyArg || lv.lossyArg;
    if (out.overflow || static_cast<int>(out.levels.size()) < t.k()) {
        out.overflow = true;
        return out;
    }
    std::vector<Complex> point(t.k() + 1);
    point[0] = z;
    for (int j = 1; j <= t.k(); ++j) {
        auto v = out.levels[j - 1].toComplex();
        if (!v) {
            out.overflow = true;
            return out;
        }
        point[j] = *v;
    }
    out.value = t.poly().evaluate(point);
    return out;
}

LogMagComplex evalPolyLogMag(const MultiPoly& p, const std::vector<LogMagComplex>& point) {
    if (static_cast<int>(point.size()) != p.nvars())
        throw InputError("evalPolyLogMag: dimension mismatch");
    LogMagComplex acc; // zero
    for (const auto& [idx, c] : p.terms()) {
        Complex cc = coeffToComplex(c);
        LogMagComplex term = LogMagComplex::fromComplex(cc);
        for (int v = 0; v < p.nvars(); ++v) {
            int e = idx[v];
            if (e == 0) continue;
            LogMagComplex powed;
            powed.logAbs = point[v].logAbs * e;
            powed.arg = LogMagComplex::reduceArg(point[v].arg * e);
            powed.lossyArg = point[v].lossyArg;
            term = term * powed;
        }
        acc = acc + term;
    }
    return acc;
}

TowerResidual towerResidual(const ExpTower& t, const std::vector<Complex>& x) {
    const int k = t.k();
    if (static_cast<int>(x.size()) != k)
        throw InputError("towerResidual: expected the k-variable reduced solution vector");
    TowerResidual r;

    auto expLogMag = [&](Complex w) {
        LogMagComplex m;
        m.logAbs = w.real();
        m.arg = LogMagComplex::reduceArg(w.imag());
        m.lossyArg = std::abs(w.imag()) > kArgReductionLimit;
        return m;
    };

    for (int j = 0; j + 1 < k; ++j) {
        LogMagComplex e = expLogMag(x[j]);
        r.lossyArg = r.lossyArg || e.lossyArg;
        r.chain = std::max(r.chain, logMagDistance(LogMagComplex::fromComplex(x[j + 1]), e));
    }

    LogMagComplex top = expLogMag(x[k - 1]);
    r.lossyArg = r.lossyArg || top.lossyArg;
    if (top.floatable()) {
        std::vector<Complex> point(k + 1);
        for (int j = 0; j < k; ++j) point[j] = x[j];
        point[k] = *top.toComplex();
        r.poly = std::abs(t.poly().evaluate(point));
    } else {
        std::vector<LogMagComplex> point(k + 1);
        for (int j = 0; j < k; ++j) point[j] = LogMagComplex::fromComplex(x[j]);
        point[k] = top;
        LogMagComplex v = evalPolyLogMag(t.poly(), point);
        r.poly = v.isZero() ? 0.0
                            : (v.logAbs >= kFloatableLogAbs ? std::numeric_limits<double>::max()
                                                            : std::exp(v.logAbs));
    }
    r.value = std::max(r.chain, r.poly);
    return r;
}

} // namespace iets
