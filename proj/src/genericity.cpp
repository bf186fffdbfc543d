#include "iets/genericity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>

#include <boost/math/constants/constants.hpp>

#include "iets/highprec.hpp"

namespace iets {

namespace {

Rational rationalPow(const Rational& r, long e) {
    Rational out(1);
    Rational base = e >= 0 ? r : Rational(1) / r;
    for (long i = 0; i < std::labs(e); ++i) out *= base;
    return out;
}

GaussianRational toGaussian(const Rational& q) { return GaussianRational(q); }

// Primitive integer vector with positive first nonzero entry; identifies a
// linear form up to scaling.
std::vector<long> normalizedFormKey(const LinearForm& f) {
    mpz_class lcm(1);
    for (const auto& c : f.coeffs) {
        mpz_class den(c.get_den());
        lcm = lcm * den / gcd(lcm, den);
    }
    std::vector<mpz_class> ints;
    mpz_class g(0);
    for (const auto& c : f.coeffs) {
        mpz_class v = c.get_num() * (lcm / c.get_den());
        ints.push_back(v);
        g = gcd(g, v);
    }
    if (g == 0) g = 1;
    int sign = 1;
    for (const auto& v : ints)
        if (v != 0) {
            sign = v < 0 ? -1 : 1;
            break;
        }
    std::vector<long> out;
    for (const auto& v : ints) out.push_back(mpz_class(sign * v / g).get_si());
    return out;
}

} // namespace

std::vector<BadRelation> badRationalsTwoVar(const MultiPoly& p) {
    if (p.mode() != CoeffMode::Exact)
        throw ModeError("bad-relation scan requires exact coefficients");
    if (p.nvars() != 2) throw InputError("badRationalsTwoVar expects a polynomial in (x, y)");
    if (p.isZero() || !p.dependsOn(0) || !p.dependsOn(1))
        throw InputError("badRationalsTwoVar: polynomial must depend on x and y");

    std::vector<BadRelation> out;
    if (p.terms().size() != 2) return out;

    auto it = p.terms().begin();
    const MultiIndex idxA = it->first;
    const GaussianRational ga = std::get<GaussianRational>(it->second);
    ++it;
    const MultiIndex idxB = it->first;
    const GaussianRational gb = std::get<GaussianRational>(it->second);

    auto makeRelation = [&](long n, long m, const Rational& s, const GaussianRational& leadCoeff,
                            const std::string& shape) {
        if (std::gcd(n, m) != 1 || s == 0) return;
        BadRelation rel;
        rel.kind = BadRelationKind::TwoIter;
        rel.coeffs = {s};
        rel.tuple = {n, m};
        rel.heightBound = p.totalDegree();
        rel.note = shape;
        rel.witnessDivisor = p.scaled(Coeff(GaussianRational(1) / leadCoeff));
        // The binomial pins the linear dependence between z and e^z;
        // excluded as x_1 - s*x_0 on the chain variables.
        rel.exclusion.coeffs = {-s, Rational(1)};
        out.push_back(std::move(rel));
    };

    // Shape x^n - s*y^m (either term order).
    if (idxA[1] == 0 && idxA[0] >= 1 && idxB[0] == 0 && idxB[1] >= 1) {
        GaussianRational s = -(gb / ga);
        if (s.isReal()) makeRelation(idxA[0], idxB[1], s.re(), ga, "x^n - s*y^m");
    } else if (idxB[1] == 0 && idxB[0] >= 1 && idxA[0] == 0 && idxA[1] >= 1) {
        GaussianRational s = -(ga / gb);
        if (s.isReal()) makeRelation(idxB[0], idxA[1], s.re(), gb, "x^n - s*y^m");
    }
    // Shape x^n*y^m - r.
    else if (idxA.totalDegree() == 0 && idxB[0] >= 1 && idxB[1] >= 1) {
        GaussianRational r = -(ga / gb);
        if (r.isReal()) makeRelation(idxB[0], idxB[1], r.re(), gb, "x^n*y^m - r");
    } else if (idxB.totalDegree() == 0 && idxA[0] >= 1 && idxA[1] >= 1) {
        GaussianRational r = -(gb / ga);
        if (r.isReal()) makeRelation(idxA[0], idxA[1], r.re(), ga, "x^n*y^m - r");
    }
    return out;
}

namespace {

// Case divisor for a bad rational r = n/m: z^m - r^n x^n for n > 0, and the
// cleared polynomial form z^m x^{-n} - r^n for n < 0.
MultiPoly caseDivisor(int nvars, int xVar, int zVar, long n, long m, const Rational& r) {
    MultiPoly q(nvars, CoeffMode::Exact);
    Rational rn = rationalPow(r, n);
    if (n > 0) {
        q.addTerm(MultiIndex::unit(nvars, zVar, static_cast<int>(m)), Coeff(GaussianRational(1)));
        q.addTerm(MultiIndex::unit(nvars, xVar, static_cast<int>(n)), Coeff(-toGaussian(rn)));
    } else {
        MultiIndex zx = MultiIndex::unit(nvars, zVar, static_cast<int>(m))
                            .plus(MultiIndex::unit(nvars, xVar, static_cast<int>(-n)));
        q.addTerm(zx, Coeff(GaussianRational(1)));
        q.addTerm(MultiIndex::zero(nvars), Coeff(-toGaussian(rn)));
    }
    return q;
}

} // namespace

std::vector<BadRelation> badRationalsThreeVar(const MultiPoly& p, Exec exec) {
    if (p.mode() != CoeffMode::Exact)
        throw ModeError("bad-relation scan requires exact coefficients");
    if (p.nvars() != 3) throw InputError("badRationalsThreeVar expects a polynomial in (x, y, z)");
    if (p.isZero() || !p.dependsOn(0) || !p.dependsOn(2))
        throw InputError("badRationalsThreeVar: polynomial must depend on x and z");

    const long D = p.totalDegree();
    struct Cand {
        long n, m;
    };
    std::vector<Cand> cands;
    for (long m = 1; m <= D; ++m)
        for (long n = -D; n <= D; ++n) {
            if (n == 0 || std::gcd(std::labs(n), m) != 1) continue;
            cands.push_back({n, m});
        }

    std::vector<std::optional<BadRelation>> hits(cands.size());
    auto worker = [&](size_t i) {
        const long n = cands[i].n, m = cands[i].m;
        Rational r(n, m);
        r.canonicalize();
        std::vector<MultiPoly> args = {
            MultiPoly::variable(3, 0, CoeffMode::Exact),
            MultiPoly::variable(3, 0, CoeffMode::Exact).scaled(Coeff(toGaussian(r))),
            MultiPoly::variable(3, 2, CoeffMode::Exact)};
        MultiPoly pr = p.compose(args);
        MultiPoly q = caseDivisor(3, 0, 2, n, m, r);
        bool vanished = pr.isZero();
        if (!vanished && !MultiPoly::dividesExactly(q, pr, 2)) return;
        BadRelation rel;
        rel.kind = BadRelationKind::TwoIter;
        rel.coeffs = {r};
        rel.tuple = {n, m};
        rel.witnessDivisor = std::move(q);
        rel.specializationVanished = vanished;
        rel.heightBound = static_cast<int>(D);
        rel.note = vanished ? "p(x, r*x, z) vanished identically" : "case divisor divides p_r";
        // Relation e^a = r*a, excluded as x_1 - r*x_0.
        rel.exclusion.coeffs = {-r, Rational(1)};
        hits[i] = std::move(rel);
    };

    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (size_t i = 0; i < cands.size(); ++i) worker(i);
    } else {
        for (size_t i = 0; i < cands.size(); ++i) worker(i);
    }

    std::vector<BadRelation> out;
    for (auto& h : hits)
        if (h) out.push_back(std::move(*h));
    std::sort(out.begin(), out.end(),
              [](const BadRelation& a, const BadRelation& b) { return a.coeffs[0] < b.coeffs[0]; });
    return out;
}

std::vector<BadRelation> badTuplesTower(const ExpTower& t, Exec exec) {
    const MultiPoly& p = t.poly();
    if (p.mode() != CoeffMode::Exact)
        throw ModeError("bad-relation scan requires exact coefficients");
    const int k = t.k();
    if (k < 2) throw InputError("badTuplesTower applies to towers of depth k >= 2");

    const long D = p.totalDegree();
    const int nv = k + 1;
    const int zVar = k; // y_k plays the role of z in the divisibility test

    // Odometer over m~ = (m_0, ..., m_{k-2}) in [-D, D]^{k-1} and
    // m_{k-1} in [1, D] (sign-normalized tuples only).
    const long width = 2 * D + 1;
    long total = D;
    for (int i = 0; i < k - 1; ++i) total *= width;

    std::vector<std::optional<BadRelation>> hits(total);
    auto worker = [&](long lin) {
        long rest = lin;
        std::vector<long> m(k);
        for (int i = 0; i < k - 1; ++i) {
            m[i] = rest % width - D;
            rest /= width;
        }
        m[k - 1] = rest + 1;
        long g = 0;
        for (long v : m) g = std::gcd(g, std::labs(v));
        if (g != 1) return;

        // g_r~ : substitute y_{k-1} := (m_0 x + m_1 y_1 + ... + m_{k-2} y_{k-2}) / m_{k-1}.
        std::vector<MultiPoly> args;
        args.reserve(nv);
        for (int v = 0; v < nv; ++v) args.push_back(MultiPoly::variable(nv, v, CoeffMode::Exact));
        MultiPoly sub(nv, CoeffMode::Exact);
        for (int i = 0; i <= k - 2; ++i) {
            Rational ri(m[i], m[k - 1]);
            ri.canonicalize();
            if (ri == 0) continue;
            sub += MultiPoly::variable(nv, i, CoeffMode::Exact).scaled(Coeff(toGaussian(ri)));
        }
        args[k - 1] = std::move(sub);
        MultiPoly gr = p.compose(args);

        // s_m~ = z^{m_{k-1}} * prod_{m_i<0} x_i^{-m_i} - prod_{m_j>0} x_j^{m_j},
        // monic in z up to a monomial factor.
        std::vector<int> lhs(nv, 0), rhs(nv, 0);
        lhs[zVar] = static_cast<int>(m[k - 1]);
        for (int i = 0; i <= k - 2; ++i) {
            if (m[i] < 0) lhs[i] = static_cast<int>(-m[i]);
            if (m[i] > 0) rhs[i] = static_cast<int>(m[i]);
        }
        MultiPoly s(nv, CoeffMode::Exact);
        s.addTerm(MultiIndex(std::move(lhs)), Coeff(GaussianRational(1)));
        s.addTerm(MultiIndex(std::move(rhs)), Coeff(GaussianRational(-1)));

        bool vanished = gr.isZero();
        if (!vanished && !MultiPoly::dividesExactly(s, gr, zVar)) return;

        BadRelation rel;
        rel.kind = BadRelationKind::ThreeIterTuple;
        for (int i = 0; i <= k - 2; ++i) {
            Rational ri(m[i], m[k - 1]);
            ri.canonicalize();
            rel.coeffs.push_back(ri);
        }
        rel.tuple = m;
        rel.witnessDivisor = std::move(s);
        rel.specializationVanished = vanished;
        rel.heightBound = static_cast<int>(D);
        rel.note = vanished ? "g_r~ vanished identically" : "s_m~ divides g_r~";
        // Relation m_{k-1} e_{k-1}(a) = sum_i m_i e_i(a), excluded as
        // m_{k-1} x_{k-1} - sum_i m_i x_i.
        rel.exclusion.coeffs.assign(k, Rational(0));
        for (int i = 0; i <= k - 2; ++i) rel.exclusion.coeffs[i] = Rational(-m[i]);
        rel.exclusion.coeffs[k - 1] = Rational(m[k - 1]);
        hits[lin] = std::move(rel);
    };

    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 64)
        for (long lin = 0; lin < total; ++lin) worker(lin);
    } else {
        for (long lin = 0; lin < total; ++lin) worker(lin);
    }

    std::vector<BadRelation> out;
    for (auto& h : hits)
        if (h) out.push_back(std::move(*h));
    std::sort(out.begin(), out.end(),
              [](const BadRelation& a, const BadRelation& b) { return a.tuple < b.tuple; });
    return out;
}

// ---------------------------------------------------------------------------
// Multiplicative independence.

namespace {

// Trial division; constants at input scale factor instantly.
void accumulateFactors(mpz_class v, long mult, std::map<mpz_class, long>& out) {
    if (v < 0) v = -v;
    for (mpz_class d(2); d * d <= v;) {
        if (v % d == 0) {
            long e = 0;
            while (v % d == 0) {
                v /= d;
                ++e;
            }
            out[d] += mult * e;
        }
        d += d == 2 ? 1 : 2;
    }
    if (v > 1) out[v] += mult;
}

// Basis of { x in Q^cols : M x = 0 }.
std::vector<std::vector<Rational>> nullspaceBasis(std::vector<std::vector<Rational>> M, int cols) {
    const int rows = static_cast<int>(M.size());
    std::vector<int> pivotCol;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (M[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(M[r], M[piv]);
        Rational lead = M[r][c];
        for (int j = c; j < cols; ++j) M[r][j] /= lead;
        for (int i = 0; i < rows; ++i) {
            if (i == r || M[i][c] == 0) continue;
            Rational f = M[i][c];
            for (int j = c; j < cols; ++j) M[i][j] -= f * M[r][j];
        }
        pivotCol.push_back(c);
        ++r;
    }
    std::vector<bool> isPivot(cols, false);
    for (int c : pivotCol) isPivot[c] = true;
    std::vector<std::vector<Rational>> basis;
    for (int c = 0; c < cols; ++c) {
        if (isPivot[c]) continue;
        std::vector<Rational> v(cols, Rational(0));
        v[c] = 1;
        for (int i = 0; i < static_cast<int>(pivotCol.size()); ++i) v[pivotCol[i]] = -M[i][c];
        basis.push_back(std::move(v));
    }
    return basis;
}

} // namespace

MultIndepResult multiplicativeIndependenceCheck(const std::vector<Rational>& constants) {
    if (constants.empty()) throw InputError("no constants given");
    for (const auto& c : constants)
        if (c == 0) throw InputError("multiplicative independence requires nonzero constants");

    const int s = static_cast<int>(constants.size());
    std::vector<std::map<mpz_class, long>> fact(s);
    std::vector<long> signExp(s);
    std::map<mpz_class, int> primeIndex;
    for (int i = 0; i < s; ++i) {
        signExp[i] = sgn(constants[i]) < 0 ? 1 : 0;
        accumulateFactors(mpz_class(constants[i].get_num()), 1, fact[i]);
        accumulateFactors(mpz_class(constants[i].get_den()), -1, fact[i]);
        for (const auto& [prime, e] : fact[i]) primeIndex.emplace(prime, 0);
    }
    int np = 0;
    for (auto& [prime, idx] : primeIndex) idx = np++;

    // A dependence prod c_i^{m_i} = +-1 is a left-kernel vector of the
    // prime-exponent matrix; the sign lives in Z/2 and is fixed on the
    // witness by doubling, since it carries no Q-rank.
    std::vector<std::vector<Rational>> AT(std::max(np, 1), std::vector<Rational>(s, Rational(0)));
    for (int i = 0; i < s; ++i)
        for (const auto& [prime, e] : fact[i]) AT[primeIndex[prime]][i] = Rational(e);

    auto basis = nullspaceBasis(std::move(AT), s);
    MultIndepResult out;
    if (basis.empty()) {
        out.independent = true;
        return out;
    }

    const auto& v = basis.front();
    mpz_class lcm(1);
    for (const auto& q : v) {
        mpz_class den(q.get_den());
        lcm = lcm * den / gcd(lcm, den);
    }
    std::vector<long> m(s);
    long signSum = 0;
    for (int i = 0; i < s; ++i) {
        mpz_class vi = v[i].get_num() * (lcm / v[i].get_den());
        m[i] = vi.get_si();
        signSum += m[i] * signExp[i];
    }
    if (signSum % 2 != 0)
        for (auto& x : m) x *= 2;

    out.independent = false;
    out.witness = std::move(m);
    return out;
}

// ---------------------------------------------------------------------------
// Integer-relation detection.

namespace {

using QVec = std::vector<Rational>;

Rational dotQ(const QVec& a, const QVec& b) {
    Rational s(0);
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Textbook LLL (delta = 3/4) in exact rational arithmetic; the dimensions
// here are tiny, so the naive re-orthogonalization is fine.
void lllReduce(std::vector<QVec>& b) {
    const int n = static_cast<int>(b.size());
    if (n < 2) return;
    std::vector<QVec> bs(n);
    std::vector<QVec> mu(n, QVec(n, Rational(0)));
    std::vector<Rational> B(n);

    auto gramSchmidt = [&]() {
        for (int i = 0; i < n; ++i) {
            bs[i] = b[i];
            for (int j = 0; j < i; ++j) {
                mu[i][j] = B[j] == 0 ? Rational(0) : dotQ(b[i], bs[j]) / B[j];
                for (size_t t = 0; t < bs[i].size(); ++t) bs[i][t] -= mu[i][j] * bs[j][t];
            }
            B[i] = dotQ(bs[i], bs[i]);
        }
    };

    gramSchmidt();
    const Rational delta(3, 4);
    int k = 1;
    int guard = 0;
    while (k < n && guard++ < 20000) {
        for (int j = k - 1; j >= 0; --j) {
            const Rational& q = mu[k][j];
            mpz_class num(q.get_num()), den(q.get_den());
            mpz_class twice = 2 * num;
            mpz_class shifted = twice >= 0 ? mpz_class(twice + den) : mpz_class(twice - den);
            mpz_class nearest = shifted / (2 * den);
            if (nearest != 0) {
                Rational f(nearest);
                for (size_t t = 0; t < b[k].size(); ++t) b[k][t] -= f * b[j][t];
                gramSchmidt();
            }
        }
        if (B[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]) {
            ++k;
        } else {
            std::swap(b[k], b[k - 1]);
            gramSchmidt();
            k = std::max(k - 1, 1);
        }
    }
}

} // namespace

std::vector<std::vector<long>> latticeRelationCandidates(
    const std::vector<std::vector<Rational>>& scaledColumns, int dim) {
    std::vector<QVec> basis(dim);
    for (int i = 0; i < dim; ++i) {
        QVec row(dim + scaledColumns.size(), Rational(0));
        row[i] = 1;
        for (size_t c = 0; c < scaledColumns.size(); ++c) row[dim + c] = scaledColumns[c].at(i);
        basis[i] = std::move(row);
    }
    lllReduce(basis);

    std::vector<std::vector<long>> out;
    for (const auto& row : basis) {
        std::vector<long> m(dim);
        bool nonzero = false;
        for (int i = 0; i < dim; ++i) {
            m[i] = static_cast<long>(mpz_class(row[i].get_num()).get_si());
            nonzero = nonzero || m[i] != 0;
        }
        if (nonzero) out.push_back(std::move(m));
    }
    return out;
}

namespace {

bool isParallel(const std::vector<long>& a, const std::vector<long>& b) {
    if (a.size() != b.size() || b.empty()) return false;
    bool bNonzero = false;
    for (long v : b) bNonzero = bNonzero || v != 0;
    if (!bNonzero) return false;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = i + 1; j < a.size(); ++j)
            if (static_cast<long long>(a[i]) * b[j] != static_cast<long long>(a[j]) * b[i])
                return false;
    return true;
}

mpz_class hpScaledToMpz(const HPReal& x, int digits) {
    HPReal scaled = x * pow(HPReal(10), digits);
    auto ip = scaled.convert_to<boost::multiprecision::cpp_int>();
    return mpz_class(ip.str());
}

struct RelationSearch {
    const std::vector<HPComplex>& values; // length of a candidate
    int H;
    int digits;
    const std::vector<long>& filter;
    size_t reportLen; // coordinates reported (drops auxiliary columns)

    std::optional<RelationCandidate> check(const std::vector<long>& m, bool multiplicative) const {
        if (m.size() != values.size()) return std::nullopt;
        long height = 0;
        for (long v : m) height = std::max(height, std::labs(v));
        if (height == 0 || height > H) return std::nullopt;
        std::vector<long> head(m.begin(), m.begin() + reportLen);
        bool headNonzero = false;
        for (long v : head) headNonzero = headNonzero || v != 0;
        if (!headNonzero) return std::nullopt;
        if (!filter.empty() && isParallel(head, filter)) return std::nullopt;

        HPComplex acc(0, 0);
        HPReal nm(0), nv(0);
        for (size_t i = 0; i < values.size(); ++i) {
            acc += HPReal(m[i]) * values[i];
            nm += HPReal(m[i]) * HPReal(m[i]);
            nv += norm(values[i]);
        }
        HPReal bound = pow(HPReal(10), -digits / 2) * sqrt(nm) * sqrt(nv);
        if (!(abs(acc) < bound)) return std::nullopt;

        RelationCandidate cand;
        cand.m = std::move(head);
        for (long v : cand.m) {
            if (v == 0) continue;
            if (v < 0)
                for (auto& x : cand.m) x = -x;
            break;
        }
        cand.residual = static_cast<double>(abs(acc));
        cand.multiplicative = multiplicative;
        return cand;
    }
};

} // namespace

static RelationDiagnostic detailDiagnose(const std::vector<HPComplex>& hp,
                                         const std::vector<Complex>& display, int H, int digits,
                                         const std::vector<long>& filterRelation, bool partial);

RelationDiagnostic diagnoseVector(const std::vector<Complex>& values, int H, int digits,
                                  const std::vector<long>& filterRelation) {
    std::vector<HPComplex> hp;
    hp.reserve(values.size());
    for (const auto& v : values) hp.push_back(toHP(v));
    return detailDiagnose(hp, values, H, digits, filterRelation, false);
}

static RelationDiagnostic detailDiagnose(const std::vector<HPComplex>& hp,
                                         const std::vector<Complex>& display, int H, int digits,
                                         const std::vector<long>& filterRelation, bool partial) {
    if (hp.empty()) throw InputError("relation diagnosis: empty vector");
    if (H < 1) throw InputError("relation diagnosis: height bound must be >= 1");

    RelationDiagnostic d;
    d.values = display;
    d.heightBound = H;
    d.precisionDigits = digits;
    d.partial = partial;
    if (partial) return d;

    const int k1 = static_cast<int>(hp.size());
    std::vector<RelationCandidate> found;
    auto push = [&](const std::optional<RelationCandidate>& c) {
        if (!c) return;
        for (const auto& have : found)
            if (have.m == c->m && have.multiplicative == c->multiplicative) return;
        found.push_back(*c);
    };

    RelationSearch additive{hp, H, digits, filterRelation, static_cast<size_t>(k1)};

    // Exhaustive scan: the completeness guarantee for additive relations of
    // height <= H (the lattice pass below is the general detector). Leaves
    // are pre-filtered on a double-precision magnitude bound; only near-hits
    // pay for the full high-precision residual check.
    if (std::pow(2.0 * H + 1.0, k1) <= 2e6) {
        std::vector<std::vector<HPComplex>> table(k1);
        for (int i = 0; i < k1; ++i) {
            table[i].resize(2 * H + 1);
            for (long c = -H; c <= H; ++c) table[i][c + H] = HPReal(c) * hp[i];
        }
        double normV = 0;
        for (const auto& z : hp) normV += static_cast<double>(norm(z));
        const double crude = std::pow(10.0, -digits / 2) * (H * std::sqrt(double(k1)) + 1.0) *
                                 std::sqrt(normV) +
                             1e-280;
        std::vector<long> m(k1, 0);
        std::function<void(int, const HPComplex&)> rec = [&](int pos, const HPComplex& acc) {
            if (pos == k1) {
                double mag = std::abs(static_cast<double>(acc.real())) +
                             std::abs(static_cast<double>(acc.imag()));
                if (mag <= crude * 2.0) push(additive.check(m, false));
                return;
            }
            for (long c = -H; c <= H; ++c) {
                m[pos] = c;
                rec(pos + 1, acc + table[pos][c + H]);
            }
            m[pos] = 0;
        };
        rec(0, HPComplex(0, 0));
    }

    // Lattice-reduction proposals on the scaled real embedding.
    {
        std::vector<std::vector<Rational>> cols(2, std::vector<Rational>(k1));
        for (int i = 0; i < k1; ++i) {
            cols[0][i] = Rational(hpScaledToMpz(hp[i].real(), digits));
            cols[1][i] = Rational(hpScaledToMpz(hp[i].imag(), digits));
        }
        for (const auto& m : latticeRelationCandidates(cols, k1)) push(additive.check(m, false));
    }

    // Multiplicative relations via principal logs; a 2*pi*i column absorbs
    // branch mismatches. Coordinates whose value is 1 (zero log) carry only
    // trivial torsion and are left out of the lattice.
    {
        std::vector<int> live;
        std::vector<HPComplex> logs;
        bool usable = true;
        for (int i = 0; i < k1; ++i) {
            if (abs(hp[i]) == 0) {
                usable = false;
                break;
            }
            HPComplex w = log(hp[i]);
            if (abs(w) < HPReal("1e-40")) continue;
            live.push_back(i);
            logs.push_back(w);
        }
        if (usable && !live.empty()) {
            logs.push_back(HPComplex(HPReal(0), 2 * boost::math::constants::pi<HPReal>()));
            const int dim = static_cast<int>(logs.size());
            std::vector<std::vector<Rational>> cols(2, std::vector<Rational>(dim));
            for (int i = 0; i < dim; ++i) {
                cols[0][i] = Rational(hpScaledToMpz(logs[i].real(), digits));
                cols[1][i] = Rational(hpScaledToMpz(logs[i].imag(), digits));
            }
            RelationSearch mult{logs, H, digits, {}, static_cast<size_t>(dim - 1)};
            for (const auto& m : latticeRelationCandidates(cols, dim)) {
                auto cand = mult.check(m, true);
                if (!cand) continue;
                // Map back to the full coordinate list.
                std::vector<long> full(k1, 0);
                for (size_t j = 0; j < live.size(); ++j) full[live[j]] = cand->m[j];
                if (!filterRelation.empty() && isParallel(full, filterRelation)) continue;
                cand->m = std::move(full);
                push(cand);
            }
        }
    }

    std::sort(found.begin(), found.end(),
              [](const RelationCandidate& a, const RelationCandidate& b) {
                  if (a.multiplicative != b.multiplicative) return !a.multiplicative;
                  return a.residual < b.residual;
              });
    d.candidates = std::move(found);
    return d;
}

RelationDiagnostic diagnoseRelations(const RootRecord& root, const ExpTower& tower, int H,
                                     int digits) {
    if (root.solution.empty()) throw InputError("diagnoseRelations: empty root");
    const int k = tower.k();

    // A relation forced by a linear homogeneous defining polynomial (e.g.
    // y_k - x) is a tautology of f(a) = 0, not a genericity violation.
    std::vector<long> filter;
    {
        const MultiPoly& p = tower.poly();
        bool linear = true;
        bool hasConstant = false;
        LinearForm f;
        f.coeffs.assign(k + 1, Rational(0));
        for (const auto& [idx, c] : p.terms()) {
            int deg = idx.totalDegree();
            const auto* g = std::get_if<GaussianRational>(&c);
            if (deg == 0) {
                hasConstant = true;
            } else if (deg == 1 && g && g->isReal()) {
                for (int v = 0; v <= k; ++v)
                    if (idx[v] == 1) f.coeffs[v] = g->re();
            } else {
                linear = false;
                break;
            }
        }
        if (linear && !hasConstant && !f.isZero()) filter = normalizedFormKey(f);
    }

    // Recompute (a, e_1(a), ..., e_k(a)) at high precision from the root's
    // first coordinate.
    std::vector<HPComplex> hp;
    hp.push_back(toHP(root.solution[0]));
    bool overflow = false;
    for (int j = 1; j <= k; ++j) {
        if (hp.back().real() > HPReal(1e6)) {
            overflow = true;
            break;
        }
        hp.push_back(exp(hp.back()));
    }
    std::vector<Complex> display;
    display.reserve(hp.size());
    for (const auto& z : hp) display.push_back(hpToComplex(z));
    return detailDiagnose(hp, display, H, digits, filter, overflow);
}

GenericPlan genericSolvePlan(const ExpTower& t) {
    if (t.poly().mode() != CoeffMode::Exact)
        throw ModeError("genericSolvePlan requires exact coefficients");
    const int k = t.k();

    GenericPlan plan;
    std::vector<BadRelation> excluded;

    if (k == 2) {
        if (t.poly().dependsOn(1)) {
            excluded = badRationalsThreeVar(t.poly(), Exec::Parallel);
        } else {
            // p(x, y_2) only: the two-variable binomial analysis applies.
            MultiPoly p2 = t.poly().remapVars(2, {0, 0, 1});
            excluded = badRationalsTwoVar(p2);
        }
    } else if (k >= 3) {
        excluded = badTuplesTower(t, Exec::Parallel);
    }

    MasserSystem base = fromTower(t);

    if (k >= 2) {
        // Degree form d_1 x_1 - d_2 x_0: chain polynomials have degree 1,
        // the branch contributes its growth degree.
        Rational d1(1), d2(1);
        if (k == 2) d2 = std::get<BranchRhs>(base.rhs().back()).branchDegree;
        if (d2 == 0) d2 = 1;
        BadRelation dform;
        dform.kind = BadRelationKind::TdOne;
        dform.coeffs = {d1, d2};
        dform.heightBound = 0;
        dform.note = "degree form d_1*x_1 - d_2*x_0";
        dform.witnessDivisor = MultiPoly(k + 1, CoeffMode::Exact);
        dform.exclusion.coeffs.assign(k, Rational(0));
        dform.exclusion.coeffs[0] = -d2;
        dform.exclusion.coeffs[1] = d1;
        excluded.push_back(std::move(dform));
    }

    // Pad forms to the chain width and drop duplicates up to scaling.
    std::vector<LinearForm> forms;
    std::vector<std::vector<long>> seen;
    for (auto& rel : excluded) {
        rel.exclusion.coeffs.resize(k, Rational(0));
        auto key = normalizedFormKey(rel.exclusion);
        bool dup = false;
        for (const auto& have : seen) dup = dup || have == key;
        if (dup) continue;
        seen.push_back(key);
        forms.push_back(rel.exclusion);
    }

    plan.system = augmentExcludeRelations(base, forms);
    plan.excluded = std::move(excluded);
    return plan;
}

} // namespace iets
