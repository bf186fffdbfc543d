#pragma once

// The constructive engine: integer seed rays omega = 2*pi*i*t*q, the
// variable shift z = omega + a + x that normalizes every equation to
// e^{x_i} = f_i(center + x)/A_i, Kantorovich certification at the shifted
// origin, and Newton iteration to a certified root.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iets/parallel.hpp"
#include "iets/system.hpp"

namespace iets {

struct InvalidSeedError : Error {
    using Error::Error;
};

struct SeedRay {
    std::vector<long> q;             // all entries nonzero
    long t = 1;
    std::vector<Complex> omega;      // 2*pi*i*t*q
    std::vector<Complex> normalizer; // A_i = f_i(omega)
    std::vector<Complex> logShift;   // a_i, principal value of log A_i
    double T = 0;                    // 1 + sum |t q_l|
    double shiftConstC = 0;          // fitted max|a_i| / log T
};

struct KantorovichCertificate {
    double eta = 0;
    double invJacNorm = 0;
    double hessBound = 0;
    double condition = 0;
    double ballRadius = 0;
    bool certified = false;
    std::string failureReason;
};

struct RootRecord {
    std::vector<Complex> solution;  // original (unshifted) coordinates
    std::vector<double> residuals;  // per-equation |e^{z_i} - f_i(z)|
    double maxResidual = 0;
    KantorovichCertificate certificate;
    SeedRay seed;
    int newtonIterations = 0;
    bool recentered = false;             // certificate issued at a polished center
    std::vector<double> newtonHistory;   // ||F||_inf per iteration
};

// Callable pack for the shifted system. `offset` supports re-centering: all
// evaluations happen at center + offset + x, and the exponential term is
// e^{offset_i + x_i}, so the identity e^{z_i} = A_i e^{offset_i + x_i} holds
// exactly (omega is an integer multiple of 2*pi*i).
class ShiftedPack {
public:
    ShiftedPack(const MasserSystem& s, SeedRay seed);

    int n() const { return sys_.n(); }
    const SeedRay& seed() const { return seed_; }
    const std::vector<Complex>& center() const { return center_; }
    const std::vector<Complex>& offset() const { return offset_; }

    void recenter(std::span<const Complex> x0);

    std::vector<Complex> F(std::span<const Complex> x);
    // Row-major n x n Jacobian.
    std::vector<Complex> jacobian(std::span<const Complex> x);
    // Bound on max_i sum_{h,l} |d2 F_i / dx_h dx_l| over the ball ||x|| <= radius.
    double hessianBound(double radius);

    // |A_i| * |F_i(x)|, which equals the unshifted residual |e^{z_i} - f_i(z)|
    // without ever exponentiating a large imaginary part.
    std::vector<double> unshiftedResiduals(std::span<const Complex> x);
    std::vector<Complex> originalPoint(std::span<const Complex> x) const;

private:
    MasserSystem sys_; // private copy; owns branch continuation state
    SeedRay seed_;
    std::vector<Complex> center_;
    std::vector<Complex> offset_;
    std::vector<std::vector<MultiPoly>> firstPartials_;  // per equation (polys only)
    std::vector<std::vector<MultiPoly>> definingPartials_; // per equation (branches only)

    Complex rhsValue(int i, std::span<const Complex> z);
    std::vector<Complex> rhsGradient(int i, std::span<const Complex> z);
};

// Smallest feasible q in graded order (grade = sum |q_i|, ties by
// coordinate order 1, -1, 2, -2, ...); every coordinate is nonzero. A seed
// is feasible when every polynomial leading part is nonvanishing at q and
// every branch has nonzero leading behavior along the ray (probed at t=256).
std::vector<long> findSeedVector(const MasserSystem& s, int searchRadius);

SeedRay makeSeed(const MasserSystem& s, const std::vector<long>& q, long t);

ShiftedPack shiftSystem(const MasserSystem& s, const SeedRay& seed);

KantorovichCertificate certify(ShiftedPack& pack);

// Newton iteration from the pack origin; requires a certified pack.
// Throws SolveFailure on divergence or a residual above tol.
struct SolveFailure : Error {
    using Error::Error;
};
RootRecord newtonSolve(ShiftedPack& pack, const KantorovichCertificate& cert, double tol);

enum class SeedStatus { Certified, InvalidSeed, CertificationFailed, NewtonFailed };

struct SeedOutcome {
    std::vector<long> q;
    long t = 0;
    SeedStatus status = SeedStatus::InvalidSeed;
    std::string detail;
    std::optional<RootRecord> root;
};

// When certification fails at the raw shift, run an uncertified Newton
// search and re-issue the certificate at the polished center. Gives honest
// a-posteriori certificates for seeds below the asymptotic regime.
SeedOutcome solveAtSeed(const MasserSystem& s, const std::vector<long>& q, long t, double tol,
                        bool allowRecenter = true);

struct EnumerateOptions {
    int count = 3;
    std::vector<long> tSchedule; // default 2^4 ... 2^14
    double tol = 1e-12;
    bool allowRecenter = true;
    int searchRadius = 4;
    Exec exec = Exec::Parallel;
    // Distinctness is judged on the first dedupPrefix coordinates (0 = all);
    // tower solves pass k so that different branches of the auxiliary
    // exclusion variables do not count as new roots.
    int dedupPrefix = 0;
};

struct EnumerateResult {
    std::vector<RootRecord> roots;      // deterministic (t, sign-pattern) order
    std::vector<SeedOutcome> failures;  // per-seed reasons
    bool shortfall = false;
};

EnumerateResult enumerateRoots(const MasserSystem& s, const EnumerateOptions& opts);

std::vector<long> defaultTSchedule(long tMax = 1L << 14);

} // namespace iets
