#include "iets/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

namespace iets {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double infNorm(std::span<const Complex> v) {
    double m = 0.0;
    for (const auto& c : v) m = std::max(m, std::abs(c));
    return m;
}

Eigen::MatrixXcd toMatrix(const std::vector<Complex>& rowMajor, int n) {
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = rowMajor[i * n + j];
    return m;
}

double matInfNorm(const Eigen::MatrixXcd& m) {
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

// Exact nonvanishing test for exact polynomials at an integer point,
// numeric with a scale-relative threshold otherwise.
bool nonvanishingAt(const MultiPoly& p, const std::vector<long>& q) {
    if (p.mode() == CoeffMode::Exact) {
        std::vector<GaussianRational> pt;
        pt.reserve(q.size());
        for (long v : q) pt.emplace_back(Rational(v));
        return !p.evaluateAs<GaussianRational>(std::span<const GaussianRational>(pt)).isZero();
    }
    std::vector<Complex> pt;
    double qmax = 0;
    for (long v : q) {
        pt.emplace_back(static_cast<double>(v), 0.0);
        qmax = std::max(qmax, std::abs(static_cast<double>(v)));
    }
    double val = std::abs(p.evaluate(pt));
    return val > 1e-9 * (1.0 + p.absMajorantAt(qmax));
}

bool seedFeasible(const MasserSystem& s, const std::vector<long>& q) {
    const int n = s.n();
    for (const auto& r : s.rhs()) {
        if (const auto* p = std::get_if<PolyRhs>(&r)) {
            if (!nonvanishingAt(p->P.leadingHomogeneousPart(), q)) return false;
        } else if (const auto* rat = std::get_if<RationalRhs>(&r)) {
            if (!nonvanishingAt(rat->num.leadingHomogeneousPart(), q)) return false;
            if (!nonvanishingAt(rat->den.leadingHomogeneousPart(), q)) return false;
        } else {
            // Leading behavior of the branch probed numerically at t = 2^8.
            const auto& b = std::get<BranchRhs>(r);
            std::vector<Complex> pt(n);
            for (int i = 0; i < n; ++i) pt[i] = Complex(0.0, kTwoPi * 256.0 * q[i]);
            BranchRhs probe{b.defining, b.branchDegree, std::nullopt};
            try {
                BranchValue v = branchEval(probe, pt);
                if (!(std::abs(v.value) > 1e-9) || !std::isfinite(std::abs(v.value))) return false;
            } catch (const BranchError&) {
                return false;
            }
        }
    }
    return true;
}

// Candidate vectors of a fixed grade sum |q_i|, coordinates ordered
// 1, -1, 2, -2, ...; the visitor returns true to stop.
bool visitGrade(int n, int radius, int grade, std::vector<long>& q, int pos,
                const std::function<bool(const std::vector<long>&)>& visit) {
    if (pos == n) return grade == 0 ? visit(q) : false;
    int remainingMin = n - pos - 1;
    for (int mag = 1; mag <= std::min(radius, grade - remainingMin); ++mag) {
        for (int sign = 0; sign < 2; ++sign) {
            q[pos] = sign == 0 ? mag : -mag;
            if (visitGrade(n, radius, grade - mag, q, pos + 1, visit)) return true;
        }
    }
    return false;
}

} // namespace

std::vector<long> findSeedVector(const MasserSystem& s, int searchRadius) {
    const int n = s.n();
    if (searchRadius < 1) throw InputError("seed search radius must be >= 1");
    std::vector<long> q(n), found;
    for (int grade = n; grade <= n * searchRadius && found.empty(); ++grade) {
        visitGrade(n, searchRadius, grade, q, 0, [&](const std::vector<long>& cand) {
            if (seedFeasible(s, cand)) {
                found = cand;
                return true;
            }
            return false;
        });
    }
    if (found.empty())
        throw NoSeedError("no feasible seed vector within radius " + std::to_string(searchRadius));
    return found;
}

SeedRay makeSeed(const MasserSystem& s, const std::vector<long>& q, long t) {
    const int n = s.n();
    if (static_cast<int>(q.size()) != n) throw InputError("seed vector length mismatch");
    if (t < 1) throw InputError("seed scale t must be >= 1");
    if (s.hasRational())
        throw InputError("seed construction requires an integral system (double it first)");
    for (long v : q)
        if (v == 0) throw InvalidSeedError("seed vector has a zero entry");

    SeedRay seed;
    seed.q = q;
    seed.t = t;
    seed.omega.resize(n);
    double sumAbs = 0;
    for (int i = 0; i < n; ++i) {
        seed.omega[i] = Complex(0.0, kTwoPi * static_cast<double>(t) * static_cast<double>(q[i]));
        sumAbs += std::abs(static_cast<double>(t) * static_cast<double>(q[i]));
    }
    seed.T = 1.0 + sumAbs;

    seed.normalizer.resize(n);
    seed.logShift.resize(n);
    MasserSystem scratch = s; // branch evaluations keep their own state here
    double maxLog = 0;
    for (int i = 0; i < n; ++i) {
        Complex A;
        if (const auto* p = std::get_if<PolyRhs>(&scratch.rhs()[i])) {
            A = p->P.evaluate(seed.omega);
        } else {
            auto& b = std::get<BranchRhs>(scratch.rhs()[i]);
            b.branchState.reset();
            A = branchEval(b, seed.omega).value;
        }
        if (!(std::abs(A) > 1e-12) || !std::isfinite(std::abs(A)))
            throw InvalidSeedError("normalizer A_" + std::to_string(i) + " vanishes at the seed");
        seed.normalizer[i] = A;
        Complex a = std::log(A); // principal value
        if (a.imag() <= -std::numbers::pi) a.imag(std::numbers::pi);
        seed.logShift[i] = a;
        maxLog = std::max(maxLog, std::abs(a));
    }
    seed.shiftConstC = maxLog / std::log(seed.T);
    return seed;
}

ShiftedPack::ShiftedPack(const MasserSystem& s, SeedRay seed)
    : sys_(s), seed_(std::move(seed)) {
    const int n = sys_.n();
    if (sys_.hasRational())
        throw InputError("shiftSystem requires an integral system (double it first)");
    center_.resize(n);
    offset_.assign(n, Complex(0.0, 0.0));
    for (int i = 0; i < n; ++i) center_[i] = seed_.omega[i] + seed_.logShift[i];

    firstPartials_.resize(n);
    definingPartials_.resize(n);
    for (int i = 0; i < n; ++i) {
        if (const auto* p = std::get_if<PolyRhs>(&sys_.rhs()[i])) {
            for (int j = 0; j < n; ++j) firstPartials_[i].push_back(p->P.partialDerivative(j));
        } else {
            auto& b = std::get<BranchRhs>(sys_.rhs()[i]);
            b.branchState = seed_.normalizer[i]; // continuation starts at A_i
            for (int j = 0; j <= n; ++j)
                definingPartials_[i].push_back(b.defining.partialDerivative(j));
        }
    }
}

void ShiftedPack::recenter(std::span<const Complex> x0) {
    if (static_cast<int>(x0.size()) != n()) throw InputError("recenter: dimension mismatch");
    for (int i = 0; i < n(); ++i) offset_[i] += x0[i];
}

Complex ShiftedPack::rhsValue(int i, std::span<const Complex> z) {
    if (const auto* p = std::get_if<PolyRhs>(&sys_.rhs()[i]))
        return p->P.evaluateAs<Complex>(z);
    auto& b = std::get<BranchRhs>(sys_.rhs()[i]);
    return branchEval(b, z).value;
}

std::vector<Complex> ShiftedPack::rhsGradient(int i, std::span<const Complex> z) {
    const int nn = n();
    std::vector<Complex> g(nn);
    if (std::holds_alternative<PolyRhs>(sys_.rhs()[i])) {
        for (int j = 0; j < nn; ++j) g[j] = firstPartials_[i][j].evaluateAs<Complex>(z);
        return g;
    }
    auto& b = std::get<BranchRhs>(sys_.rhs()[i]);
    Complex u = branchEval(b, z).value;
    std::vector<Complex> zu(z.begin(), z.end());
    zu.push_back(u);
    Complex du = definingPartials_[i][nn].evaluate(zu);
    // Implicit differentiation of defining(z, u(z)) = 0.
    for (int j = 0; j < nn; ++j) g[j] = -definingPartials_[i][j].evaluate(zu) / du;
    return g;
}

std::vector<Complex> ShiftedPack::F(std::span<const Complex> x) {
    const int nn = n();
    if (static_cast<int>(x.size()) != nn) throw InputError("F: dimension mismatch");
    std::vector<Complex> z(nn);
    for (int i = 0; i < nn; ++i) z[i] = center_[i] + offset_[i] + x[i];
    std::vector<Complex> out(nn);
    for (int i = 0; i < nn; ++i)
        out[i] = std::exp(offset_[i] + x[i]) - rhsValue(i, z) / seed_.normalizer[i];
    return out;
}

std::vector<Complex> ShiftedPack::jacobian(std::span<const Complex> x) {
    const int nn = n();
    std::vector<Complex> z(nn);
    for (int i = 0; i < nn; ++i) z[i] = center_[i] + offset_[i] + x[i];
    std::vector<Complex> J(nn * nn, Complex(0.0, 0.0));
    for (int i = 0; i < nn; ++i) {
        auto grad = rhsGradient(i, z);
        for (int j = 0; j < nn; ++j) J[i * nn + j] = -grad[j] / seed_.normalizer[i];
        J[i * nn + i] += std::exp(offset_[i] + x[i]);
    }
    return J;
}

double ShiftedPack::hessianBound(double radius) {
    const int nn = n();
    double Rinf = 0.0;
    for (int i = 0; i < nn; ++i) Rinf = std::max(Rinf, std::abs(center_[i] + offset_[i]));
    Rinf += radius;

    std::vector<Complex> origin(nn);
    for (int i = 0; i < nn; ++i) origin[i] = center_[i] + offset_[i];

    double M = 0.0;
    for (int i = 0; i < nn; ++i) {
        double rowSum = std::exp(offset_[i].real() + radius); // |d2/dx_i2 e^{offset+x}| on the ball
        const double absA = std::abs(seed_.normalizer[i]);
        if (const auto* p = std::get_if<PolyRhs>(&sys_.rhs()[i])) {
            for (int h = 0; h < nn; ++h) {
                MultiPoly dh = p->P.partialDerivative(h);
                for (int l = h; l < nn; ++l) {
                    MultiPoly dhl = dh.partialDerivative(l);
                    if (dhl.isZero()) continue;
                    double bnd = dhl.absMajorantAt(Rinf) / absA;
                    rowSum += (h == l ? 1.0 : 2.0) * bnd;
                }
            }
        } else {
            // Second divided differences of the branch around the pack
            // origin, 1.5x inflated; the step is kept above the noise floor
            // of first-order branch evaluations.
            const auto& b = std::get<BranchRhs>(sys_.rhs()[i]);
            BranchRhs base{b.defining, b.branchDegree, b.branchState};
            Complex u0 = branchEval(base, origin).value;
            const double step = std::max(radius, 1e-4);
            auto evalAt = [&](const std::vector<Complex>& pt) {
                BranchRhs local{b.defining, b.branchDegree, u0};
                return branchEval(local, pt).value;
            };
            for (int h = 0; h < nn; ++h) {
                for (int l = h; l < nn; ++l) {
                    Complex dd;
                    if (h == l) {
                        auto up = origin, dn = origin;
                        up[h] += step;
                        dn[h] -= step;
                        dd = (evalAt(up) - 2.0 * u0 + evalAt(dn)) / (step * step);
                    } else {
                        auto pp = origin, pm = origin, mp = origin, mm = origin;
                        pp[h] += step; pp[l] += step;
                        pm[h] += step; pm[l] -= step;
                        mp[h] -= step; mp[l] += step;
                        mm[h] -= step; mm[l] -= step;
                        dd = (evalAt(pp) - evalAt(pm) - evalAt(mp) + evalAt(mm)) /
                             (4.0 * step * step);
                    }
                    rowSum += (h == l ? 1.0 : 2.0) * 1.5 * std::abs(dd) / absA;
                }
            }
        }
        M = std::max(M, rowSum);
    }
    return M;
}

std::vector<double> ShiftedPack::unshiftedResiduals(std::span<const Complex> x) {
    auto Fv = F(x);
    std::vector<double> r(n());
    for (int i = 0; i < n(); ++i) r[i] = std::abs(seed_.normalizer[i]) * std::abs(Fv[i]);
    return r;
}

std::vector<Complex> ShiftedPack::originalPoint(std::span<const Complex> x) const {
    std::vector<Complex> z(n());
    for (int i = 0; i < n(); ++i) z[i] = center_[i] + offset_[i] + x[i];
    return z;
}

ShiftedPack shiftSystem(const MasserSystem& s, const SeedRay& seed) { return {s, seed}; }

KantorovichCertificate certify(ShiftedPack& pack) {
    const int n = pack.n();
    KantorovichCertificate cert;

    std::vector<Complex> origin(n, Complex(0.0, 0.0));
    Eigen::MatrixXcd J0 = toMatrix(pack.jacobian(origin), n);
    if (!J0.allFinite()) {
        cert.failureReason = "non-finite Jacobian at seed center";
        return cert;
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(J0);
    Eigen::MatrixXcd Jinv = lu.solve(Eigen::MatrixXcd::Identity(n, n));
    if (!Jinv.allFinite() ||
        matInfNorm(J0 * Jinv - Eigen::MatrixXcd::Identity(n, n)) > 1e-6) {
        cert.failureReason = "singular Jacobian at seed center";
        return cert;
    }
    cert.invJacNorm = matInfNorm(Jinv) * (1.0 + 10.0 * n * kEps);

    auto F0v = pack.F(origin);
    Eigen::VectorXcd F0(n);
    for (int i = 0; i < n; ++i) F0(i) = F0v[i];
    Eigen::VectorXcd corr = Jinv * F0;
    cert.eta = corr.cwiseAbs().maxCoeff();
    cert.ballRadius = 2.0 * cert.eta;

    cert.hessBound = pack.hessianBound(cert.ballRadius);
    cert.condition = 2.0 * cert.hessBound * cert.eta * cert.invJacNorm;
    if (std::isfinite(cert.condition) && cert.condition < 0.5) {
        cert.certified = true;
    } else {
        cert.failureReason = "Kantorovich condition " + std::to_string(cert.condition) + " >= 0.5";
    }
    return cert;
}

RootRecord newtonSolve(ShiftedPack& pack, const KantorovichCertificate& cert, double tol) {
    if (!cert.certified) throw InputError("newtonSolve requires a certified pack");
    const int n = pack.n();
    double maxA = 0;
    for (const auto& A : pack.seed().normalizer) maxA = std::max(maxA, std::abs(A));
    const double tolShifted = std::max(tol / std::max(1.0, maxA), 8.0 * kEps);

    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
    std::vector<Complex> xs(n, Complex(0.0, 0.0));
    std::vector<double> history;
    int iters = 0;

    auto fNorm = [&](const std::vector<Complex>& v) { return infNorm(v); };
    auto step = [&](Eigen::VectorXcd& xv) {
        std::vector<Complex> xc(xv.data(), xv.data() + n);
        Eigen::MatrixXcd J = toMatrix(pack.jacobian(xc), n);
        auto Fv = pack.F(xc);
        Eigen::VectorXcd Fe(n);
        for (int i = 0; i < n; ++i) Fe(i) = Fv[i];
        Eigen::VectorXcd delta = Eigen::PartialPivLU<Eigen::MatrixXcd>(J).solve(Fe);
        if (!delta.allFinite()) throw SolveFailure("Newton step failed (singular Jacobian)");
        xv -= delta;
    };

    double fn = fNorm(pack.F(xs));
    history.push_back(fn);
    while (iters < 60) {
        if (fn < tolShifted) {
            // Polish while the residual still halves.
            Eigen::VectorXcd xNext = x;
            step(xNext);
            std::vector<Complex> xc(xNext.data(), xNext.data() + n);
            double fNext = fNorm(pack.F(xc));
            if (fNext < 0.5 * fn) {
                x = xNext;
                fn = fNext;
                history.push_back(fn);
                ++iters;
                continue;
            }
            break;
        }
        step(x);
        ++iters;
        std::vector<Complex> xc(x.data(), x.data() + n);
        fn = fNorm(pack.F(xc));
        history.push_back(fn);
        if (x.cwiseAbs().maxCoeff() > 2.0 * cert.ballRadius + 16.0 * kEps)
            throw SolveFailure("Newton iterate left twice the certified ball");
    }
    if (!(fn < tolShifted))
        throw SolveFailure("Newton did not reach the shifted tolerance in 60 iterations");

    std::vector<Complex> xc(x.data(), x.data() + n);
    double limitNorm = x.cwiseAbs().maxCoeff();
    if (limitNorm > cert.ballRadius + 16.0 * kEps)
        throw SolveFailure("Newton limit escaped the certified ball");

    RootRecord rec;
    rec.solution = pack.originalPoint(xc);
    rec.residuals = pack.unshiftedResiduals(xc);
    rec.maxResidual = *std::max_element(rec.residuals.begin(), rec.residuals.end());
    if (!(rec.maxResidual <= tol))
        throw SolveFailure("unshifted residual " + std::to_string(rec.maxResidual) +
                           " above tolerance");
    rec.certificate = cert;
    rec.seed = pack.seed();
    rec.newtonIterations = iters;
    rec.newtonHistory = std::move(history);
    return rec;
}

SeedOutcome solveAtSeed(const MasserSystem& s, const std::vector<long>& q, long t, double tol,
                        bool allowRecenter) {
    SeedOutcome out;
    out.q = q;
    out.t = t;
    try {
        SeedRay seed = makeSeed(s, q, t);
        ShiftedPack pack(s, seed);
        KantorovichCertificate cert = certify(pack);
        bool recentered = false;

        if (!cert.certified && allowRecenter) {
            // Uncertified Newton search; if it lands, certify there.
            const int n = pack.n();
            Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
            double best = std::numeric_limits<double>::infinity();
            int stale = 0;
            bool landed = false;
            for (int it = 0; it < 40; ++it) {
                std::vector<Complex> xc(x.data(), x.data() + n);
                auto Fv = pack.F(xc);
                double fn = infNorm(Fv);
                if (fn < 1e-10) {
                    landed = true;
                    break;
                }
                if (fn < 0.9 * best) {
                    best = fn;
                    stale = 0;
                } else if (++stale > 4) {
                    break;
                }
                Eigen::MatrixXcd J = toMatrix(pack.jacobian(xc), n);
                Eigen::VectorXcd Fe(n);
                for (int i = 0; i < n; ++i) Fe(i) = Fv[i];
                Eigen::VectorXcd delta = Eigen::PartialPivLU<Eigen::MatrixXcd>(J).solve(Fe);
                if (!delta.allFinite()) break;
                x -= delta;
                if (x.cwiseAbs().maxCoeff() > 3.0) break; // wandered off the seed cell
            }
            if (landed) {
                std::vector<Complex> xc(x.data(), x.data() + n);
                pack.recenter(xc);
                KantorovichCertificate cert2 = certify(pack);
                if (cert2.certified) {
                    cert = cert2;
                    recentered = true;
                }
            }
        }

        if (!cert.certified) {
            out.status = SeedStatus::CertificationFailed;
            out.detail = cert.failureReason;
            return out;
        }
        RootRecord rec = newtonSolve(pack, cert, tol);
        rec.recentered = recentered;
        out.status = SeedStatus::Certified;
        out.root = std::move(rec);
        return out;
    } catch (const InvalidSeedError& e) {
        out.status = SeedStatus::InvalidSeed;
        out.detail = e.what();
    } catch (const BranchError& e) {
        out.status = SeedStatus::InvalidSeed;
        out.detail = e.what();
    } catch (const SolveFailure& e) {
        out.status = SeedStatus::NewtonFailed;
        out.detail = e.what();
    }
    return out;
}

std::vector<long> defaultTSchedule(long tMax) {
    std::vector<long> ts;
    for (long t = 16; t <= tMax; t *= 2) ts.push_back(t);
    if (ts.empty()) ts.push_back(std::max(1L, tMax));
    return ts;
}

EnumerateResult enumerateRoots(const MasserSystem& s, const EnumerateOptions& opts) {
    EnumerateResult result;
    if (opts.count <= 0) return result;
    if (s.hasRational())
        throw InputError("enumerateRoots requires an integral system (double it first)");

    std::vector<long> baseQ;
    int radius = opts.searchRadius;
    for (;;) {
        try {
            baseQ = findSeedVector(s, radius);
            break;
        } catch (const NoSeedError&) {
            if (radius >= 64) throw;
            radius *= 2;
        }
    }
    const int n = s.n();
    const std::vector<long> schedule = opts.tSchedule.empty() ? defaultTSchedule() : opts.tSchedule;

    // Job stream in deterministic (t, sign-pattern) order; all-plus first.
    struct Job {
        std::vector<long> q;
        long t;
    };
    std::vector<Job> jobs;
    const unsigned signPatterns = n <= 16 ? (1u << n) : 1u; // beyond desk scale: base only
    for (long t : schedule) {
        for (unsigned mask = 0; mask < signPatterns; ++mask) {
            std::vector<long> q(baseQ);
            for (int i = 0; i < n; ++i)
                if (mask & (1u << (n - 1 - i))) q[i] = -q[i];
            if (!seedFeasible(s, q)) continue;
            jobs.push_back({std::move(q), t});
        }
    }

    const int cmpLen = opts.dedupPrefix > 0 ? std::min(opts.dedupPrefix, n) : n;
    auto isDuplicate = [&](const RootRecord& rec) {
        for (const auto& have : result.roots) {
            double dist = 0, scale = 0;
            for (int i = 0; i < cmpLen; ++i) {
                dist = std::max(dist, std::abs(rec.solution[i] - have.solution[i]));
                scale = std::max(scale, std::abs(rec.solution[i]));
            }
            if (dist < 1e-6 * (1.0 + scale)) return true;
        }
        return false;
    };

    const size_t batchSize = std::max<size_t>(8, 2 * static_cast<size_t>(hardwareWorkers()));
    size_t next = 0;
    while (next < jobs.size() && static_cast<int>(result.roots.size()) < opts.count) {
        size_t end = std::min(jobs.size(), next + batchSize);
        std::vector<SeedOutcome> outcomes(end - next);
        if (opts.exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
            for (size_t j = next; j < end; ++j)
                outcomes[j - next] =
                    solveAtSeed(s, jobs[j].q, jobs[j].t, opts.tol, opts.allowRecenter);
        } else {
            for (size_t j = next; j < end; ++j)
                outcomes[j - next] =
                    solveAtSeed(s, jobs[j].q, jobs[j].t, opts.tol, opts.allowRecenter);
        }
        for (auto& oc : outcomes) {
            if (static_cast<int>(result.roots.size()) >= opts.count) break;
            if (oc.status == SeedStatus::Certified && oc.root) {
                if (!isDuplicate(*oc.root)) result.roots.push_back(std::move(*oc.root));
            } else {
                result.failures.push_back(std::move(oc));
            }
        }
        next = end;
    }
    result.shortfall = static_cast<int>(result.roots.size()) < opts.count;
    return result;
}

} // namespace iets
