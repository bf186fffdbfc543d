// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances and budgets are pinned here, not configurable.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "iets/census.hpp"
#include "iets/cli.hpp"
#include "iets/genericity.hpp"
#include "iets/jsonl.hpp"
#include "iets/recheck.hpp"
#include "iets/solver.hpp"
#include "oracles.hpp"

using namespace iets;

namespace {

Coeff one() { return Coeff(GaussianRational(1)); }
Coeff rat(long n, long d = 1) { return Coeff(GaussianRational(Rational(n, d))); }
MultiPoly var(int nvars, int v) { return MultiPoly::variable(nvars, v, CoeffMode::Exact); }

struct Checker {
    bool ok = true;
    std::ostringstream detail;
    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }
};

int failures = 0;

template <typename Body>
void criterion(int id, const std::string& label, double budgetSeconds, Body&& body) {
    Checker c;
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budgetSeconds > 0 && secs >= budgetSeconds) {
        c.ok = false;
        c.detail << (c.detail.str().empty() ? "" : "; ") << "runtime " << secs << "s over budget "
                 << budgetSeconds << "s";
    }
    std::printf("[%s] criterion %d (%.2fs): %s%s%s\n", c.ok ? "PASS" : "FAIL", id, secs,
                label.c_str(), c.detail.str().empty() ? "" : " -- ", c.detail.str().c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
}

ExpTower towerYkMinusX(int k) {
    MultiPoly p(k + 1, CoeffMode::Exact);
    p.addTerm(MultiIndex::unit(k + 1, k, 1), one());
    p.addTerm(MultiIndex::unit(k + 1, 0, 1), rat(-1));
    return ExpTower(k, p);
}

ExpTower zMinusExpTower() {
    MultiPoly p(2, CoeffMode::Exact);
    p.addTerm(MultiIndex::unit(2, 0, 1), one());
    p.addTerm(MultiIndex::unit(2, 1, 1), rat(-1));
    return ExpTower(1, p);
}

int bareissRank(std::vector<std::vector<long long>> a) {
    int rows = static_cast<int>(a.size());
    if (rows == 0) return 0;
    int cols = static_cast<int>(a[0].size());
    int rank = 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (a[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(a[rank], a[piv]);
        for (int r = 0; r < rows; ++r) {
            if (r == rank || a[r][c] == 0) continue;
            long long f = a[r][c], g = a[rank][c];
            for (int j = 0; j < cols; ++j) a[r][j] = a[r][j] * g - a[rank][j] * f;
        }
        ++rank;
    }
    return rank;
}

} // namespace

int main() {
    // ------------------------------------------------------------------
    criterion(1, "certified desk-scale roots for five polynomial systems", 5.0, [](Checker& c) {
        std::vector<std::pair<std::string, MasserSystem>> systems;
        systems.emplace_back("e^z = z", MasserSystem({Rhs{PolyRhs{var(1, 0)}}}));
        systems.emplace_back("swap pair",
                             MasserSystem({Rhs{PolyRhs{var(2, 1)}}, Rhs{PolyRhs{var(2, 0)}}}));
        systems.emplace_back(
            "e^z = 2z + 5",
            MasserSystem({Rhs{PolyRhs{var(1, 0).scaled(rat(2)) + MultiPoly::constant(1, rat(5))}}}));
        systems.emplace_back(
            "n = 2 affine",
            MasserSystem({Rhs{PolyRhs{var(2, 0) - var(2, 1) + MultiPoly::constant(2, one())}},
                          Rhs{PolyRhs{var(2, 1).scaled(rat(2)) + MultiPoly::constant(2, rat(3))}}}));
        std::vector<Rhs> cyc;
        for (int i = 0; i < 3; ++i) cyc.push_back(PolyRhs{var(3, (i + 1) % 3)});
        systems.emplace_back("n = 3 cycle", MasserSystem(std::move(cyc)));

        for (auto& [name, sys] : systems) {
            EnumerateOptions opts;
            opts.count = 1;
            opts.tSchedule = {16, 32, 64, 128, 256, 512, 1024}; // t <= 2^10
            auto res = enumerateRoots(sys, opts);
            if (res.roots.empty()) {
                c.require(false, name + ": no certified root");
                continue;
            }
            const auto& rec = res.roots.front();
            c.require(rec.seed.t <= 1024, name + ": seed beyond 2^10");
            c.require(rec.certificate.certified && rec.certificate.condition < 0.5,
                      name + ": certificate missing");
            c.require(rec.maxResidual < 1e-12, name + ": residual " +
                                                   formatDouble17(rec.maxResidual) + " >= 1e-12");
            RecheckResult rc = recheckResidual(rec, sys, 30);
            c.require(rc.maxResidual < 1e-9,
                      name + ": 30-digit recheck " + formatDouble17(rc.maxResidual) + " >= 1e-9");
        }
    });

    // ------------------------------------------------------------------
    criterion(2, "eta ~ log T / T, J(0) -> I, condition < 0.5 from t = 2^6", 2.0, [](Checker& c) {
        MasserSystem sys({Rhs{PolyRhs{var(1, 0)}}});
        std::vector<double> etas, jdist, conds, Ts;
        for (long t = 16; t <= 1024; t *= 2) {
            SeedRay seed = makeSeed(sys, {1}, t);
            ShiftedPack pack = shiftSystem(sys, seed);
            KantorovichCertificate cert = certify(pack);
            etas.push_back(cert.eta);
            conds.push_back(cert.condition);
            Ts.push_back(seed.T);
            auto J = pack.jacobian(std::vector<Complex>(1, Complex(0, 0)));
            jdist.push_back(std::abs(J[0] - Complex(1, 0)));
            if (t >= 64)
                c.require(cert.certified && cert.condition < 0.5,
                          "condition >= 0.5 at t = " + std::to_string(t));
        }
        double fit = etas[0] / (std::log(Ts[0]) / Ts[0]);
        for (size_t i = 0; i < etas.size(); ++i) {
            c.require(etas[i] <= fit * std::log(Ts[i]) / Ts[i] * (1 + 1e-9),
                      "eta above the c log T / T fit");
            if (i > 0) {
                c.require(etas[i] <= etas[i - 1], "eta not nonincreasing");
                c.require(jdist[i] < jdist[i - 1], "|J(0) - I| not decreasing");
            }
        }
    });

    // ------------------------------------------------------------------
    criterion(3, "tower existence: 3 roots each for y2 - x and y3 - x, degenerate exits 2", 10.0,
              [](Checker& c) {
                  for (int k : {2, 3}) {
                      ExpTower t = towerYkMinusX(k);
                      GenericPlan plan = genericSolvePlan(t);
                      EnumerateOptions opts;
                      opts.count = 3;
                      opts.tSchedule = {16, 32, 64, 128};
                      opts.dedupPrefix = k;
                      auto res = enumerateRoots(plan.system, opts);
                      c.require(res.roots.size() >= 3,
                                "k=" + std::to_string(k) + ": fewer than 3 distinct roots");
                      for (const auto& rec : res.roots) {
                          std::vector<Complex> chain(rec.solution.begin(),
                                                     rec.solution.begin() + k);
                          TowerResidual tr = towerResidual(t, chain);
                          c.require(tr.value < 1e-8,
                                    "k=" + std::to_string(k) + ": chain residual " +
                                        formatDouble17(tr.value) + " >= 1e-8");
                      }
                  }
                  // degenerate input: p = x^2 y1^3 exits 2 with witness g = x^2
                  std::ostringstream out, err;
                  std::string path = "/tmp/iets_acceptance_degenerate.json";
                  {
                      std::ofstream f(path);
                      f << R"({ "k": 1, "p": {"nvars":2,"mode":"exact","terms":[
                            {"exps":[2,3],"re":"1/1","im":"0/1"}]} })";
                  }
                  int code = runCliArgs({"check-degenerate", path}, out, err);
                  c.require(code == 2, "degenerate input did not exit 2");
                  c.require(out.str().find("x0^2") != std::string::npos,
                            "witness g = x^2 not printed");
              });

    // ------------------------------------------------------------------
    criterion(4, "zero census equals solver census on [-1,3]x[0,10] for z - e^z", 3.0,
              [](Checker& c) {
                  const int pinnedCount = 2; // countZeros oracle value, fixed at build time

                  CountRegion reg;
                  reg.lo = Complex(-1, 0);
                  reg.hi = Complex(3, 10);
                  AnalyticFn f = towerFn(zMinusExpTower());
                  CountResult census = countZeros(f, reg);
                  c.require(census.count == pinnedCount,
                            "countZeros = " + std::to_string(census.count) + ", pinned value " +
                                std::to_string(pinnedCount));

                  // Independent route: certified enumeration including the small
                  // seed scales, filtered to the rectangle.
                  MasserSystem sys({Rhs{PolyRhs{var(1, 0)}}});
                  EnumerateOptions opts;
                  opts.count = 24;
                  opts.tSchedule = {1, 2, 3, 4, 8, 16};
                  auto res = enumerateRoots(sys, opts);
                  int inRect = 0;
                  for (const auto& rec : res.roots) {
                      Complex z = rec.solution[0];
                      if (z.real() > -1 && z.real() < 3 && z.imag() > 0 && z.imag() < 10) ++inRect;
                  }
                  c.require(inRect == pinnedCount,
                            "solver census = " + std::to_string(inRect) + " != " +
                                std::to_string(pinnedCount) +
                                " (the fixed point 0.318+1.337i lies below the t >= 1 seed "
                                "lattice; see decisions ledger)");

                  // Subdivision additivity on 4 random splits.
                  std::mt19937 rng(109);
                  std::uniform_real_distribution<double> frac(0.35, 0.65);
                  for (int split = 0; split < 4; ++split) {
                      double mx = -1 + frac(rng) * 4.0;
                      double my = 0 + frac(rng) * 10.0;
                      int sum = 0;
                      CountRegion r;
                      r.lo = reg.lo;
                      r.hi = Complex(mx, my);
                      sum += countZeros(f, r).count;
                      r.lo = Complex(mx, 0);
                      r.hi = Complex(3, my);
                      sum += countZeros(f, r).count;
                      r.lo = Complex(-1, my);
                      r.hi = Complex(mx, 10);
                      sum += countZeros(f, r).count;
                      r.lo = Complex(mx, my);
                      r.hi = reg.hi;
                      sum += countZeros(f, r).count;
                      c.require(sum == census.count, "subdivision additivity violated");
                  }
              });

    // ------------------------------------------------------------------
    criterion(5, "bad-relation enumerators agree with the brute-force oracle", 10.0,
              [](Checker& c) {
                  std::mt19937 rng(113);
                  int checked = 0;
                  while (checked < 25) {
                      MultiPoly p = oracle::randomExactPoly(rng, 3, 4, 4);
                      if (!p.dependsOn(0) || !p.dependsOn(2)) continue;
                      ++checked;
                      auto rels = badRationalsThreeVar(p);
                      long D = p.totalDegree();
                      std::vector<Rational> ref;
                      for (long m = 1; m <= D; ++m)
                          for (long n = -D; n <= D; ++n) {
                              if (n == 0 || std::gcd(std::labs(n), m) != 1) continue;
                              Rational r(n, m);
                              r.canonicalize();
                              std::vector<MultiPoly> args = {
                                  var(3, 0), var(3, 0).scaled(Coeff(GaussianRational(r))),
                                  var(3, 2)};
                              MultiPoly pr = p.compose(args);
                              bool bad = pr.isZero();
                              if (!bad) {
                                  MultiPoly q(3, CoeffMode::Exact);
                                  Rational rn(1);
                                  for (long e = 0; e < std::labs(n); ++e) rn *= r;
                                  if (n > 0) {
                                      q.addTerm(MultiIndex({0, 0, static_cast<int>(m)}), one());
                                      q.addTerm(MultiIndex({static_cast<int>(n), 0, 0}),
                                                Coeff(GaussianRational(-rn)));
                                  } else {
                                      rn = Rational(1) / rn;
                                      q.addTerm(
                                          MultiIndex({static_cast<int>(-n), 0, static_cast<int>(m)}),
                                          one());
                                      q.addTerm(MultiIndex::zero(3), Coeff(GaussianRational(-rn)));
                                  }
                                  bad = oracle::dividesBySlices(q, pr, 2);
                              }
                              if (bad) ref.push_back(r);
                          }
                      std::sort(ref.begin(), ref.end());
                      bool same = rels.size() == ref.size();
                      for (size_t i = 0; same && i < ref.size(); ++i)
                          same = rels[i].coeffs[0] == ref[i];
                      c.require(same, "three-var scan disagrees with the oracle");
                  }

                  checked = 0;
                  while (checked < 25) {
                      MultiPoly p = oracle::randomExactPoly(rng, 4, 4, 4);
                      if (!p.dependsOn(3)) continue;
                      ++checked;
                      ExpTower t(3, p);
                      auto rels = badTuplesTower(t);
                      long D = p.totalDegree();
                      std::vector<std::vector<long>> ref;
                      std::vector<long> m(3);
                      for (m[0] = -D; m[0] <= D; ++m[0])
                          for (m[1] = -D; m[1] <= D; ++m[1])
                              for (m[2] = 1; m[2] <= D; ++m[2]) {
                                  long g =
                                      std::gcd(std::gcd(std::labs(m[0]), std::labs(m[1])), m[2]);
                                  if (g != 1) continue;
                                  std::vector<MultiPoly> args;
                                  for (int v = 0; v < 4; ++v) args.push_back(var(4, v));
                                  MultiPoly sub(4, CoeffMode::Exact);
                                  for (int i = 0; i <= 1; ++i) {
                                      if (m[i] == 0) continue;
                                      Rational ri(m[i], m[2]);
                                      ri.canonicalize();
                                      sub += var(4, i).scaled(Coeff(GaussianRational(ri)));
                                  }
                                  args[2] = sub;
                                  MultiPoly gr = p.compose(args);
                                  bool bad = gr.isZero();
                                  if (!bad) {
                                      std::vector<int> lhs(4, 0), rhs(4, 0);
                                      lhs[3] = static_cast<int>(m[2]);
                                      for (int i = 0; i <= 1; ++i) {
                                          if (m[i] < 0) lhs[i] = static_cast<int>(-m[i]);
                                          if (m[i] > 0) rhs[i] = static_cast<int>(m[i]);
                                      }
                                      MultiPoly s(4, CoeffMode::Exact);
                                      s.addTerm(MultiIndex(lhs), one());
                                      s.addTerm(MultiIndex(rhs), Coeff(GaussianRational(-1)));
                                      bad = oracle::dividesBySlices(s, gr, 3);
                                  }
                                  if (bad) ref.push_back(m);
                              }
                      std::sort(ref.begin(), ref.end());
                      bool same = rels.size() == ref.size();
                      for (size_t i = 0; same && i < ref.size(); ++i)
                          same = rels[i].tuple == ref[i];
                      c.require(same, "tuple scan disagrees with the oracle");
                  }

                  // binomial example: exactly one relation for x^2 - 3 y^3
                  MultiPoly bin =
                      var(2, 0) * var(2, 0) - MultiPoly::monomial(2, MultiIndex({0, 3}), rat(3));
                  c.require(badRationalsTwoVar(bin).size() == 1,
                            "x^2 - 3y^3 did not yield exactly one relation");
              });

    // ------------------------------------------------------------------
    criterion(6, "generic pipeline on y3 - x: margins >= 1e-6, none-found at H = 10", 10.0,
              [](Checker& c) {
                  ExpTower t = towerYkMinusX(3);
                  GenericPlan plan = genericSolvePlan(t);
                  c.require(!plan.system.provenance().excludedForms.empty(),
                            "no exclusions in the plan");
                  EnumerateOptions opts;
                  opts.count = 1;
                  opts.tSchedule = {16, 32, 64, 128};
                  opts.dedupPrefix = t.k();
                  auto res = enumerateRoots(plan.system, opts);
                  if (res.roots.empty()) {
                      c.require(false, "no certified root");
                      return;
                  }
                  const auto& rec = res.roots.front();
                  c.require(rec.certificate.certified, "root not certified");
                  for (double margin : exclusionMargins(plan.system, rec.solution))
                      c.require(margin >= 1e-6, "exclusion margin below 1e-6");
                  RelationDiagnostic d = diagnoseRelations(rec, t, 10, 30);
                  c.require(d.noneFound(), "relation candidate reported");
              });

    // ------------------------------------------------------------------
    criterion(7, "multiplicative independence matches the rank oracle; margins hold", 2.0,
              [](Checker& c) {
                  std::mt19937 rng(127);
                  std::uniform_int_distribution<long> pick(1, 60);
                  std::uniform_int_distribution<int> len(1, 4);
                  for (int it = 0; it < 100; ++it) {
                      int s = len(rng);
                      std::vector<Rational> cs;
                      bool unit = false;
                      for (int i = 0; i < s; ++i) {
                          Rational v(pick(rng), pick(rng));
                          v.canonicalize();
                          if (rng() % 4 == 0) v = -v;
                          if (v == 1 || v == -1) unit = true;
                          cs.push_back(v);
                      }
                      auto mine = multiplicativeIndependenceCheck(cs);
                      if (unit) {
                          c.require(!mine.independent, "unit constant reported independent");
                          continue;
                      }
                      std::map<long long, int> primes;
                      auto factorInto = [&](long long v, int sign,
                                            std::map<long long, long long>& acc) {
                          if (v < 0) v = -v;
                          for (long long d = 2; d * d <= v; d += (d == 2 ? 1 : 2))
                              while (v % d == 0) {
                                  acc[d] += sign;
                                  v /= d;
                              }
                          if (v > 1) acc[v] += sign;
                      };
                      std::vector<std::map<long long, long long>> facts(s);
                      for (int i = 0; i < s; ++i) {
                          factorInto(cs[i].get_num().get_si(), 1, facts[i]);
                          factorInto(cs[i].get_den().get_si(), -1, facts[i]);
                          for (auto& [p, e] : facts[i]) primes.emplace(p, 0);
                      }
                      int np = 0;
                      for (auto& [p, idx] : primes) idx = np++;
                      std::vector<std::vector<long long>> M(
                          s, std::vector<long long>(std::max(np, 1), 0));
                      for (int i = 0; i < s; ++i)
                          for (auto& [p, e] : facts[i]) M[i][primes[p]] = e;
                      c.require(mine.independent == (bareissRank(M) == s),
                                "verdict disagrees with the rank oracle");
                      if (!mine.independent) {
                          Rational prod(1);
                          for (int i = 0; i < s; ++i) {
                              long mexp = mine.witness[i];
                              for (long e = 0; e < std::labs(mexp); ++e)
                                  prod *= (mexp > 0 ? cs[i] : Rational(1) / cs[i]);
                          }
                          c.require(prod == 1, "dependency witness fails direct verification");
                      }
                  }

                  // independent constants (2, 3): all roots clear the degree form
                  MasserSystem sys(
                      {Rhs{PolyRhs{var(2, 0) - var(2, 1) + MultiPoly::constant(2, rat(2))}},
                       Rhs{PolyRhs{var(2, 1) + MultiPoly::constant(2, rat(3))}}});
                  auto indep = multiplicativeIndependenceCheck({Rational(2), Rational(3)});
                  c.require(indep.independent, "(2, 3) not reported independent");
                  EnumerateOptions opts;
                  opts.count = 3;
                  opts.tSchedule = {16, 32, 64};
                  auto res = enumerateRoots(sys, opts);
                  c.require(res.roots.size() >= 3, "fewer than 3 roots on the instance");
                  for (const auto& rec : res.roots) {
                      // gradotras-style degree form d1 x1 - d2 x0 with d1 = d2 = 1
                      double margin = std::abs(rec.solution[1] - rec.solution[0]);
                      c.require(margin >= 1e-6, "degree-form margin below 1e-6");
                  }
              });

    // ------------------------------------------------------------------
    criterion(8, "module invariant suite", 0.0, [](Checker& c) {
        std::mt19937 rng(131);
        // division identity on 200 random exact pairs
        int done = 0;
        while (done < 200) {
            MultiPoly p = oracle::randomExactPoly(rng, 2, 5, 7);
            int m = 1 + static_cast<int>(rng() % 3);
            MultiPoly d = MultiPoly::monomial(2, MultiIndex::unit(2, 1, m), one());
            MultiPoly lower = oracle::randomExactPoly(rng, 2, 2, 3);
            for (const auto& [idx, co] : lower.terms())
                if (idx[1] < m) d.addTerm(idx, co);
            if (d.degreeIn(1) != m) continue;
            auto div = MultiPoly::divideMonicInVar(p, d, 1);
            bool identity = (d * div.quotient + div.remainder) == p;
            bool degOk = div.remainder.isZero() || div.remainder.degreeIn(1) < m;
            c.require(identity && degOk, "division identity failed");
            ++done;
        }
        // homogeneous re-sum
        for (int it = 0; it < 25; ++it) {
            MultiPoly p = oracle::randomExactPoly(rng, 3, 5, 9);
            MultiPoly sum(3, CoeffMode::Exact);
            for (const auto& [deg, part] : p.homogeneousParts()) sum += part;
            c.require(sum == p, "homogeneous parts do not re-sum");
        }
        // branch monodromy of sqrt(x)
        {
            MultiPoly def = var(2, 1) * var(2, 1) - var(2, 0);
            BranchRhs b{def, Rational(1, 2), std::nullopt};
            Complex u = branchEval(b, std::vector<Complex>{Complex(4, 0)}).value;
            for (int i = 1; i <= 100; ++i) {
                double ang = 2.0 * std::numbers::pi * i / 100;
                u = branchEval(b, std::vector<Complex>{4.0 * std::polar(1.0, ang)}).value;
            }
            c.require(std::abs(u - Complex(-2, 0)) < 1e-8, "sqrt monodromy did not flip the sign");
        }
        // shift identity and ball containment on the swap system
        {
            MasserSystem sys({Rhs{PolyRhs{var(2, 1)}}, Rhs{PolyRhs{var(2, 0)}}});
            SeedRay seed = makeSeed(sys, {1, 1}, 64);
            ShiftedPack pack = shiftSystem(sys, seed);
            std::uniform_real_distribution<double> coord(-0.4, 0.4);
            for (int it = 0; it < 40; ++it) {
                std::vector<Complex> x{Complex(coord(rng), coord(rng)),
                                       Complex(coord(rng), coord(rng))};
                auto F = pack.F(x);
                for (int i = 0; i < 2; ++i) {
                    Complex fi = std::get<PolyRhs>(sys.rhs()[i])
                                     .P.evaluate(std::vector<Complex>{pack.center()[0] + x[0],
                                                                      pack.center()[1] + x[1]});
                    Complex A = seed.normalizer[i];
                    c.require(std::abs(F[i] * A + fi - A * std::exp(x[i])) <=
                                  1e-12 * (std::abs(A) + std::abs(fi)),
                              "shift identity violated");
                }
            }
            auto cert = certify(pack);
            c.require(cert.certified, "swap system failed to certify at t = 64");
            RootRecord rec = newtonSolve(pack, cert, 1e-12);
            for (int i = 0; i < 2; ++i)
                c.require(std::abs(rec.solution[i] - pack.center()[i]) <= cert.ballRadius + 1e-12,
                          "Newton limit escaped the certified ball");
        }
        // determinism of CLI output
        {
            std::string path = "/tmp/iets_acceptance_ez.json";
            {
                std::ofstream f(path);
                f << R"({ "n": 1, "rhs": [ {"kind":"poly","P":
                     {"nvars":1,"mode":"exact","terms":[{"exps":[1],"re":"1/1","im":"0/1"}]}} ] })";
            }
            std::ostringstream o1, o2, e1, e2;
            int c1 = runCliArgs({"solve", path, "--roots", "3"}, o1, e1);
            int c2 = runCliArgs({"solve", path, "--roots", "3"}, o2, e2);
            c.require(c1 == 0 && c2 == 0 && o1.str() == o2.str(),
                      "CLI output is not byte-identical across runs");
        }
    });

    std::printf("%d/8 criteria passed\n", 8 - failures);
    return failures == 0 ? 0 : 1;
}
