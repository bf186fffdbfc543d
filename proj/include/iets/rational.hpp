#pragma once

#include <complex>
#include <string>

#include <gmpxx.h>

#include "iets/errors.hpp"

namespace iets {

using Complex = std::complex<double>;
using Rational = mpq_class;

inline Rational parseRational(const std::string& s) {
    auto slash = s.find('/');
    try {
        mpq_class q;
        if (slash == std::string::npos) {
            q = mpq_class(s);
        } else {
            q = mpq_class(s.substr(0, slash)) / mpq_class(s.substr(slash + 1));
        }
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw ParseError("not a rational: \"" + s + "\"");
    }
}

inline std::string rationalToString(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline double rationalToDouble(const Rational& q) { return q.get_d(); }

// Gaussian rational a + bi with exact arbitrary-precision parts. GMP keeps
// both parts canonical (lowest terms, positive denominator).
class GaussianRational {
public:
    GaussianRational() = default;
    GaussianRational(long re) : re_(re) {}
    GaussianRational(const Rational& re) : re_(re) {}
    GaussianRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

    static GaussianRational fromStrings(const std::string& re, const std::string& im) {
        return {parseRational(re), parseRational(im)};
    }

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool isZero() const { return re_ == 0 && im_ == 0; }
    bool isReal() const { return im_ == 0; }

    GaussianRational operator-() const { return {-re_, -im_}; }
    GaussianRational conj() const { return {re_, -im_}; }

    GaussianRational& operator+=(const GaussianRational& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o) {
        Rational r = re_ * o.re_ - im_ * o.im_;
        Rational i = re_ * o.im_ + im_ * o.re_;
        re_ = r;
        im_ = i;
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o) {
        if (o.isZero()) throw InputError("division by zero Gaussian rational");
        Rational n = o.re_ * o.re_ + o.im_ * o.im_;
        Rational r = (re_ * o.re_ + im_ * o.im_) / n;
        Rational i = (im_ * o.re_ - re_ * o.im_) / n;
        re_ = r;
        im_ = i;
        return *this;
    }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

    Complex toComplex() const { return {re_.get_d(), im_.get_d()}; }

    std::string toString() const {
        return rationalToString(re_) + (sgn(im_) >= 0 ? "+" : "") + rationalToString(im_) + "i";
    }

private:
    Rational re_{0}, im_{0};
};

} // namespace iets
