#pragma once

// Fixed-precision (50 significant decimal digits) complex layer for the
// verification and diagnostics paths. The solver core stays at native
// double precision.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include "iets/poly.hpp"

namespace iets {

using HPReal = boost::multiprecision::cpp_bin_float_50;
using HPComplex = boost::multiprecision::cpp_complex_50;

inline constexpr int kHighPrecDigits = 50;

inline HPComplex toHP(const Complex& z) { return {HPReal(z.real()), HPReal(z.imag())}; }

inline Complex hpToComplex(const HPComplex& z) {
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

inline HPReal rationalToHP(const Rational& q) {
    return HPReal(q.get_num().get_str()) / HPReal(q.get_den().get_str());
}

inline HPComplex gaussianToHP(const GaussianRational& g) {
    return {rationalToHP(g.re()), rationalToHP(g.im())};
}

template <>
struct ComplexTraits<HPComplex> {
    static HPComplex fromCoeff(const Coeff& c) {
        if (const auto* g = std::get_if<GaussianRational>(&c)) return gaussianToHP(*g);
        return toHP(std::get<Complex>(c));
    }
    static HPComplex zero() { return {HPReal(0), HPReal(0)}; }
    static HPComplex one() { return {HPReal(1), HPReal(0)}; }
};

} // namespace iets
