#pragma once

// Log-magnitude representation of complex values: exp(logAbs + i*arg).
// Tower values e_k(z) overflow doubles almost immediately; in this form the
// next tower level only needs Re/Im of the previous value, which stay
// representable as long as logAbs stays below the double exponent limit.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>

#include "iets/rational.hpp"

namespace iets {

// Mod-2pi reduction of e^w loses all digits once |Im w| passes this; values
// computed through such a reduction are only indicative.
inline constexpr double kArgReductionLimit = 1e12;
// Just under log(DBL_MAX) ~ 709.78, with margin for later arithmetic.
inline constexpr double kFloatableLogAbs = 700.0;

struct LogMagComplex {
    double logAbs = -std::numeric_limits<double>::infinity(); // log|value|
    double arg = 0.0;                                         // in (-pi, pi]
    bool lossyArg = false; // arg went through a reduction past kArgReductionLimit

    static double reduceArg(double a) {
        double r = std::remainder(a, 2.0 * std::numbers::pi);
        if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
        return r;
    }

    static LogMagComplex fromComplex(const Complex& z) {
        LogMagComplex m;
        m.logAbs = std::log(std::abs(z));
        m.arg = std::arg(z);
        if (m.arg <= -std::numbers::pi) m.arg = std::numbers::pi;
        return m;
    }

    bool isZero() const { return std::isinf(logAbs) && logAbs < 0; }
    bool floatable() const { return logAbs < kFloatableLogAbs; }

    std::optional<Complex> toComplex() const {
        if (isZero()) return Complex(0.0, 0.0);
        if (!floatable()) return std::nullopt;
        double r = std::exp(logAbs);
        return Complex(r * std::cos(arg), r * std::sin(arg));
    }

    LogMagComplex negated() const {
        LogMagComplex m = *this;
        m.arg = reduceArg(m.arg + std::numbers::pi);
        return m;
    }

    friend LogMagComplex operator*(const LogMagComplex& a, const LogMagComplex& b) {
        LogMagComplex m;
        m.logAbs = a.logAbs + b.logAbs;
        m.arg = reduceArg(a.arg + b.arg);
        m.lossyArg = a.lossyArg || b.lossyArg;
        return m;
    }

    friend LogMagComplex operator+(const LogMagComplex& a, const LogMagComplex& b) {
        // Factor out the larger magnitude: a + b = a * (1 + b/a).
        const LogMagComplex& big = a.logAbs >= b.logAbs ? a : b;
        const LogMagComplex& small = a.logAbs >= b.logAbs ? b : a;
        if (small.isZero()) return big;
        double ratioLog = small.logAbs - big.logAbs; // <= 0
        Complex ratio = std::exp(ratioLog) * Complex(std::cos(small.arg - big.arg),
                                                     std::sin(small.arg - big.arg));
        Complex s = 1.0 + ratio;
        LogMagComplex m;
        if (s == Complex(0.0, 0.0)) return m; // exact cancellation
        m.logAbs = big.logAbs + std::log(std::abs(s));
        m.arg = reduceArg(big.arg + std::arg(s));
        m.lossyArg = a.lossyArg || b.lossyArg;
        return m;
    }

    // e^w for the value w this object represents. Needs Re w and Im w as
    // doubles, so it requires logAbs < kFloatableLogAbs; otherwise the result
    // is reported unrepresentable.
    std::optional<LogMagComplex> expOf() const {
        if (!floatable() && !isZero()) return std::nullopt;
        double r = isZero() ? 0.0 : std::exp(logAbs);
        double reW = r * std::cos(arg);
        double imW = r * std::sin(arg);
        LogMagComplex m;
        m.logAbs = reW;
        m.arg = reduceArg(imW);
        m.lossyArg = lossyArg || std::abs(imW) > kArgReductionLimit;
        return m;
    }
};

// |a - b| with both values in log scale; clamped to DBL_MAX.
inline double logMagDistance(const LogMagComplex& a, const LogMagComplex& b) {
    LogMagComplex d = a + b.negated();
    if (d.isZero()) return 0.0;
    if (d.logAbs >= kFloatableLogAbs) return std::numeric_limits<double>::max();
    return std::exp(d.logAbs);
}

} // namespace iets
