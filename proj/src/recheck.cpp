#include "iets/recheck.hpp"

#include <algorithm>
#include <cmath>

#include "iets/highprec.hpp"
#include "iets/logmag.hpp"
#include "iets/numeric.hpp"

namespace iets {

namespace {

// Univariate slice coefficients of a branch-defining polynomial at z.
std::vector<HPComplex> sliceCoeffs(const MultiPoly& defining, const std::vector<HPComplex>& z) {
    const int n = defining.nvars() - 1;
    const int m = defining.degreeIn(n);
    std::vector<HPComplex> point(z.begin(), z.end());
    point.push_back(HPComplex(0, 0));
    std::vector<HPComplex> coeffs(m + 1);
    for (int j = 0; j <= m; ++j)
        coeffs[j] = defining.coefficientOf(n, j).evaluateAs<HPComplex>(
            std::span<const HPComplex>(point));
    return coeffs;
}

HPComplex hornerEval(const std::vector<HPComplex>& c, const HPComplex& u, HPComplex* deriv) {
    HPComplex p(0, 0), dp(0, 0);
    for (int j = static_cast<int>(c.size()) - 1; j >= 0; --j) {
        dp = dp * u + p;
        p = p * u + c[j];
    }
    if (deriv) *deriv = dp;
    return p;
}

// Newton-polished branch value nearest to the given guess.
HPComplex hpBranchValue(const BranchRhs& b, const std::vector<HPComplex>& z,
                        const Complex& guess) {
    auto coeffs = sliceCoeffs(b.defining, z);

    // Start from the double-precision root closest to the guess.
    std::vector<Complex> dcoeffs;
    dcoeffs.reserve(coeffs.size());
    for (const auto& c : coeffs) dcoeffs.push_back(hpToComplex(c));
    Complex start = guess;
    try {
        auto roots = polyRootsCompanion(dcoeffs);
        if (!roots.empty()) {
            start = roots.front();
            for (const auto& r : roots)
                if (std::abs(r - guess) < std::abs(start - guess)) start = r;
        }
    } catch (const InputError&) {
        // fall through with the raw guess
    }

    HPComplex u = toHP(start);
    for (int it = 0; it < 64; ++it) {
        HPComplex dp;
        HPComplex p = hornerEval(coeffs, u, &dp);
        if (abs(dp) == 0) break;
        HPComplex step = p / dp;
        u -= step;
        if (abs(step) < HPReal("1e-45") * (1 + abs(u))) break;
    }
    return u;
}

HPComplex hpRhsValue(const Rhs& r, const std::vector<HPComplex>& z, const Complex& branchGuess) {
    if (const auto* p = std::get_if<PolyRhs>(&r))
        return p->P.evaluateAs<HPComplex>(std::span<const HPComplex>(z));
    if (const auto* q = std::get_if<RationalRhs>(&r))
        return q->num.evaluateAs<HPComplex>(std::span<const HPComplex>(z)) /
               q->den.evaluateAs<HPComplex>(std::span<const HPComplex>(z));
    return hpBranchValue(std::get<BranchRhs>(r), z, branchGuess);
}

std::vector<HPComplex> hpRhsGradient(const Rhs& r, const std::vector<HPComplex>& z,
                                     const HPComplex& u) {
    const int n = static_cast<int>(z.size());
    std::vector<HPComplex> g(n);
    if (const auto* p = std::get_if<PolyRhs>(&r)) {
        for (int j = 0; j < n; ++j)
            g[j] = p->P.partialDerivative(j).evaluateAs<HPComplex>(std::span<const HPComplex>(z));
        return g;
    }
    const auto& b = std::get<BranchRhs>(r);
    std::vector<HPComplex> zu(z);
    zu.push_back(u);
    HPComplex du =
        b.defining.partialDerivative(n).evaluateAs<HPComplex>(std::span<const HPComplex>(zu));
    for (int j = 0; j < n; ++j)
        g[j] = -b.defining.partialDerivative(j).evaluateAs<HPComplex>(
                   std::span<const HPComplex>(zu)) /
               du;
    return g;
}

// Gaussian elimination with partial pivoting; dimensions here are tiny.
std::vector<HPComplex> hpSolve(std::vector<std::vector<HPComplex>> A, std::vector<HPComplex> rhs) {
    const int n = static_cast<int>(rhs.size());
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int i = c + 1; i < n; ++i)
            if (abs(A[i][c]) > abs(A[piv][c])) piv = i;
        std::swap(A[c], A[piv]);
        std::swap(rhs[c], rhs[piv]);
        if (abs(A[c][c]) == 0) throw SolveFailure("singular Jacobian in high-precision polish");
        for (int i = c + 1; i < n; ++i) {
            HPComplex f = A[i][c] / A[c][c];
            for (int j = c; j < n; ++j) A[i][j] -= f * A[c][j];
            rhs[i] -= f * rhs[c];
        }
    }
    std::vector<HPComplex> x(n);
    for (int i = n - 1; i >= 0; --i) {
        HPComplex acc = rhs[i];
        for (int j = i + 1; j < n; ++j) acc -= A[i][j] * x[j];
        x[i] = acc / A[i][i];
    }
    return x;
}

} // namespace

RecheckResult recheckResidual(const RootRecord& root, const MasserSystem& s, int digits,
                              bool polish) {
    if (digits < 1 || digits > kHighPrecDigits - 5)
        throw InputError("recheck digits must be between 1 and " +
                         std::to_string(kHighPrecDigits - 5));
    const int n = s.n();
    if (static_cast<int>(root.solution.size()) != n)
        throw InputError("recheckResidual: root dimension does not match the system");

    RecheckResult out;
    std::vector<HPComplex> z;
    z.reserve(n);
    for (const auto& c : root.solution) {
        z.push_back(toHP(c));
        if (std::abs(c.imag()) > kArgReductionLimit) out.precisionLimited = true;
    }

    auto residualsAt = [&](const std::vector<HPComplex>& pt) {
        std::vector<double> res(n);
        for (int i = 0; i < n; ++i) {
            HPComplex lhs = exp(pt[i]);
            HPComplex rhs = hpRhsValue(s.rhs()[i], pt, hpToComplex(lhs));
            res[i] = static_cast<double>(abs(lhs - rhs));
        }
        return res;
    };

    if (polish) {
        for (int it = 0; it < 20; ++it) {
            std::vector<HPComplex> G(n);
            std::vector<std::vector<HPComplex>> J(n, std::vector<HPComplex>(n, HPComplex(0, 0)));
            HPReal gn(0);
            for (int i = 0; i < n; ++i) {
                HPComplex lhs = exp(z[i]);
                HPComplex val = hpRhsValue(s.rhs()[i], z, hpToComplex(lhs));
                G[i] = lhs - val;
                gn = std::max(gn, abs(G[i]));
                auto grad = hpRhsGradient(s.rhs()[i], z, val);
                for (int j = 0; j < n; ++j) J[i][j] = -grad[j];
                J[i][i] += lhs;
            }
            if (gn < HPReal("1e-42")) break;
            auto delta = hpSolve(std::move(J), std::move(G));
            for (int i = 0; i < n; ++i) z[i] -= delta[i];
        }
        out.polishedSolution.reserve(n);
        for (const auto& c : z) out.polishedSolution.push_back(hpToComplex(c));
    }

    out.residuals = residualsAt(z);
    out.maxResidual = *std::max_element(out.residuals.begin(), out.residuals.end());
    return out;
}

} // namespace iets
