#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "iets/census.hpp"
#include "iets/numeric.hpp"
#include "iets/recheck.hpp"
#include "iets/solver.hpp"
#include "oracles.hpp"

using namespace iets;

namespace {

Coeff one() { return Coeff(GaussianRational(1)); }
MultiPoly var(int nvars, int v) { return MultiPoly::variable(nvars, v, CoeffMode::Exact); }

// f(z) = z - e^z as a depth-1 tower.
ExpTower zMinusExp() {
    MultiPoly p(2, CoeffMode::Exact);
    p.addTerm(MultiIndex::unit(2, 0, 1), one());
    p.addTerm(MultiIndex::unit(2, 1, 1), Coeff(GaussianRational(-1)));
    return ExpTower(1, p);
}

} // namespace

TEST_CASE("countZeros: double zero of z^2") {
    MultiPoly p = var(1, 0) * var(1, 0);
    CountRegion reg;
    reg.lo = Complex(-1, -1);
    reg.hi = Complex(1, 1);
    CHECK(countZeros(polyFn(p), reg).count == 2);
}

TEST_CASE("countZeros: e^z never vanishes") {
    MultiPoly p(2, CoeffMode::Exact);
    p.addTerm(MultiIndex::unit(2, 1, 1), one()); // p = y1, f = e^z
    ExpTower t(1, p);
    CountRegion reg;
    reg.lo = Complex(-3, -2);
    reg.hi = Complex(2, 5);
    CHECK(countZeros(towerFn(t), reg).count == 0);
}

TEST_CASE("countZeros: z - e^z on [-1,3]x[0,10]") {
    CountRegion reg;
    reg.lo = Complex(-1, 0);
    reg.hi = Complex(3, 10);
    CountResult res = countZeros(towerFn(zMinusExp()), reg);
    // both fixed points -W(-1) ~ 0.318+1.337i and 2.062+7.589i lie inside
    CHECK(res.count == 2);
}

TEST_CASE("countZeros: subdivision additivity on four splits") {
    ExpTower t = zMinusExp();
    AnalyticFn f = towerFn(t);
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> frac(0.3, 0.7);
    CountRegion parent;
    parent.lo = Complex(-1, 0.25);
    parent.hi = Complex(3.5, 21.0);
    int total = countZeros(f, parent).count;
    for (int split = 0; split < 4; ++split) {
        double fx = frac(rng), fy = frac(rng);
        double mx = parent.lo.real() + fx * (parent.hi.real() - parent.lo.real());
        double my = parent.lo.imag() + fy * (parent.hi.imag() - parent.lo.imag());
        int sum = 0;
        CountRegion r;
        r.lo = parent.lo;
        r.hi = Complex(mx, my);
        sum += countZeros(f, r).count;
        r.lo = Complex(mx, parent.lo.imag());
        r.hi = Complex(parent.hi.real(), my);
        sum += countZeros(f, r).count;
        r.lo = Complex(parent.lo.real(), my);
        r.hi = Complex(mx, parent.hi.imag());
        sum += countZeros(f, r).count;
        r.lo = Complex(mx, my);
        r.hi = parent.hi;
        sum += countZeros(f, r).count;
        CHECK(sum == total);
    }
}

TEST_CASE("countZeros matches companion-matrix roots for polynomials") {
    std::mt19937 rng(103);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_int_distribution<int> degDist(1, 8);
    int done = 0;
    while (done < 50) {
        int deg = degDist(rng);
        std::vector<Complex> coeffs(deg + 1);
        for (auto& c : coeffs) c = Complex(coef(rng), coef(rng));
        if (std::abs(coeffs.back()) < 0.2) continue;
        MultiPoly p(1, CoeffMode::Float);
        for (int j = 0; j <= deg; ++j) p.addTerm(MultiIndex::unit(1, 0, j), Coeff(coeffs[j]));
        if (p.isZero() || p.degreeIn(0) != deg) continue;

        CountRegion reg;
        reg.lo = Complex(-1.2, -1.1);
        reg.hi = Complex(1.15, 1.25);
        auto roots = polyRootsCompanion(coeffs);
        int inside = 0;
        bool nearEdge = false;
        for (const auto& r : roots) {
            if (r.real() > reg.lo.real() && r.real() < reg.hi.real() &&
                r.imag() > reg.lo.imag() && r.imag() < reg.hi.imag())
                ++inside;
            for (double edge : {std::abs(r.real() - reg.lo.real()),
                                std::abs(r.real() - reg.hi.real()),
                                std::abs(r.imag() - reg.lo.imag()),
                                std::abs(r.imag() - reg.hi.imag())})
                nearEdge = nearEdge || edge < 1e-3;
        }
        if (nearEdge) continue; // the oracle count itself would be ambiguous
        CHECK(countZeros(polyFn(p), reg).count == inside);
        ++done;
    }
}

TEST_CASE("countZeros: serial and parallel kernels agree") {
    CountRegion reg;
    reg.lo = Complex(-1, 0.5);
    reg.hi = Complex(4, 40);
    auto fs = countZeros(towerFn(zMinusExp()), reg, Exec::Serial);
    auto fp = countZeros(towerFn(zMinusExp()), reg, Exec::Parallel);
    CHECK(fs.count == fp.count);
    REQUIRE(fs.pieces.size() == fp.pieces.size());
}

TEST_CASE("countZeros nudges rectangles with a root on the contour") {
    // z^2 - 1 with a root exactly on the edge Re = 1
    MultiPoly p = var(1, 0) * var(1, 0) - MultiPoly::constant(1, one());
    CountRegion reg;
    reg.lo = Complex(-2, -1);
    reg.hi = Complex(1, 1); // right edge passes through z = 1
    CountResult res = countZeros(polyFn(p), reg);
    CHECK(res.nudged);
    CHECK(res.count == 2); // nudging expands outward past both roots
}

TEST_CASE("countZeros: overflow on the contour is a region error") {
    MultiPoly p(3, CoeffMode::Exact);
    p.addTerm(MultiIndex::unit(3, 2, 1), one());
    p.addTerm(MultiIndex::unit(3, 0, 1), Coeff(GaussianRational(-1)));
    ExpTower t(2, p); // e^{e^z} - z
    CountRegion reg;
    reg.lo = Complex(690, -1);
    reg.hi = Complex(800, 1); // e^z overflows on this contour
    CHECK_THROWS_AS(countZeros(towerFn(t), reg), RegionError);
}

TEST_CASE("cross-check: census equals certified-root count on a reachable strip") {
    MasserSystem s({Rhs{PolyRhs{var(1, 0)}}});
    EnumerateOptions opts;
    opts.count = 14; // every (t, sign) seed in the schedule
    opts.tSchedule = {13, 14, 15, 16, 17, 18, 19};
    auto res = enumerateRoots(s, opts);

    CountRegion reg;
    reg.lo = Complex(-1, 90);
    reg.hi = Complex(6, 110);
    int census = countZeros(towerFn(zMinusExp()), reg).count;

    int inRect = 0;
    for (const auto& rec : res.roots) {
        Complex z = rec.solution[0];
        if (z.real() > -1 && z.real() < 6 && z.imag() > 90 && z.imag() < 110) ++inRect;
    }
    CHECK(census == inRect);
    CHECK(census >= 1);
}

TEST_CASE("recheckResidual: certified root at 30 digits, with and without polish") {
    MasserSystem s({Rhs{PolyRhs{var(1, 0)}}});
    SeedRay seed = makeSeed(s, {1}, 64);
    ShiftedPack pack = shiftSystem(s, seed);
    auto cert = certify(pack);
    REQUIRE(cert.certified);
    RootRecord rec = newtonSolve(pack, cert, 1e-12);

    RecheckResult plain = recheckResidual(rec, s, 30);
    CHECK(plain.maxResidual < 1e-9);
    CHECK_FALSE(plain.precisionLimited);

    RecheckResult polished = recheckResidual(rec, s, 30, /*polish=*/true);
    CHECK(polished.maxResidual < 1e-25);
    REQUIRE_FALSE(polished.polishedSolution.empty());
}

TEST_CASE("recheckResidual: non-roots stay large, huge arguments get flagged") {
    MasserSystem s({Rhs{PolyRhs{var(1, 0)}}});
    RootRecord fake;
    fake.solution = {Complex(1.25, 2.5)};
    RecheckResult rc = recheckResidual(fake, s, 30);
    CHECK(rc.maxResidual > 1e-3);

    RootRecord huge;
    huge.solution = {Complex(0.0, 3e12)};
    CHECK(recheckResidual(huge, s, 30).precisionLimited);
}

TEST_CASE("recheckResidual on a branch system") {
    MultiPoly p(3, CoeffMode::Exact);
    p.addTerm(MultiIndex::unit(3, 2, 1), one());
    p.addTerm(MultiIndex::unit(3, 0, 1), Coeff(GaussianRational(-1)));
    MasserSystem s = fromTower(ExpTower(2, p));
    EnumerateOptions opts;
    opts.count = 1;
    opts.tSchedule = {16, 32};
    auto res = enumerateRoots(s, opts);
    REQUIRE(res.roots.size() == 1);
    RecheckResult rc = recheckResidual(res.roots[0], s, 30);
    CHECK(rc.maxResidual < 1e3 * 1e-12);
}

TEST_CASE("high-precision polish works on multivariate systems") {
    MasserSystem s({Rhs{PolyRhs{var(2, 1)}}, Rhs{PolyRhs{var(2, 0)}}});
    SeedRay seed = makeSeed(s, {1, 1}, 64);
    ShiftedPack pack = shiftSystem(s, seed);
    auto cert = certify(pack);
    REQUIRE(cert.certified);
    RootRecord rec = newtonSolve(pack, cert, 1e-12);
    RecheckResult polished = recheckResidual(rec, s, 30, true);
    CHECK(polished.maxResidual < 1e-25);
}
