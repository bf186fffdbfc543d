#include "iets/numeric.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "iets/errors.hpp"

namespace iets {

std::vector<Complex> polyRootsCompanion(std::vector<Complex> coeffs) {
    double scale = 0.0;
    for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) throw InputError("polyRootsCompanion: zero polynomial");
    while (coeffs.size() > 1 && std::abs(coeffs.back()) <= 1e-14 * scale) coeffs.pop_back();
    const int m = static_cast<int>(coeffs.size()) - 1;
    if (m <= 0) return {};

    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(m, m);
    for (int i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < m; ++i) companion(i, m - 1) = -coeffs[i] / coeffs[m];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, /*computeEigenvectors=*/false);

    std::vector<Complex> roots(m);
    for (int i = 0; i < m; ++i) roots[i] = es.eigenvalues()(i);

    // A few Newton steps against the original coefficients.
    for (auto& r : roots) {
        for (int it = 0; it < 3; ++it) {
            Complex p = coeffs[m], dp = 0.0;
            for (int j = m - 1; j >= 0; --j) {
                dp = p + dp * r;
                p = coeffs[j] + p * r;
            }
            if (dp == Complex(0.0, 0.0)) break;
            Complex step = p / dp;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
            r -= step;
        }
    }
    std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

Rational ratApprox(double x, long maxDen) {
    if (maxDen < 1) maxDen = 1;
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double v = x;
    for (int it = 0; it < 64; ++it) {
        double fl = std::floor(v);
        if (fl > 1e17 || fl < -1e17) break;
        long a = static_cast<long>(fl);
        long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > maxDen) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        double frac = v - fl;
        if (frac < 1e-12) break;
        v = 1.0 / frac;
    }
    if (q1 == 0) return Rational(static_cast<long>(std::llround(x)));
    Rational best(p1, q1);
    best.canonicalize();
    // The last convergent may overshoot; compare with the previous one.
    if (q0 >= 1) {
        Rational prev(p0, q0);
        prev.canonicalize();
        if (std::abs(prev.get_d() - x) < std::abs(best.get_d() - x)) return prev;
    }
    return best;
}

} // namespace iets
