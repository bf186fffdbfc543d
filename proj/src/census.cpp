#include "iets/census.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace iets {

AnalyticFn towerFn(const ExpTower& t) {
    // f'(z) = d_x p + sum_j d_{y_j} p * e_j'(z), with e_1' = e_1 and
    // e_{j+1}' = e_{j+1} * e_j'.
    const int k = t.k();
    std::vector<MultiPoly> partials;
    for (int v = 0; v <= k; ++v) partials.push_back(t.poly().partialDerivative(v));
    MultiPoly p = t.poly();
    return AnalyticFn{[p, partials, t](Complex z) -> std::optional<std::pair<Complex, Complex>> {
        TowerEval ev = evalTower(t, z);
        if (!ev.value) return std::nullopt;
        const int k = t.k();
        std::vector<Complex> pt(k + 1);
        pt[0] = z;
        for (int j = 1; j <= k; ++j) {
            auto c = ev.levels[j - 1].toComplex();
            if (!c) return std::nullopt;
            pt[j] = *c;
        }
        Complex deriv = partials[0].evaluate(pt);
        Complex chainDeriv = 1.0;
        for (int j = 1; j <= k; ++j) {
            chainDeriv *= pt[j]; // e_j' = e_j * e_{j-1}'
            deriv += partials[j].evaluate(pt) * chainDeriv;
        }
        return std::make_pair(*ev.value, deriv);
    }};
}

AnalyticFn polyFn(const MultiPoly& univariate) {
    if (univariate.nvars() != 1) throw InputError("polyFn expects a univariate polynomial");
    MultiPoly p = univariate;
    MultiPoly dp = univariate.partialDerivative(0);
    return AnalyticFn{[p, dp](Complex z) -> std::optional<std::pair<Complex, Complex>> {
        std::vector<Complex> pt{z};
        return std::make_pair(p.evaluate(pt), dp.evaluate(pt));
    }};
}

AnalyticFn systemResidualFn(const MasserSystem& s) {
    if (s.n() != 1 || !std::holds_alternative<PolyRhs>(s.rhs().front()))
        throw InputError("systemResidualFn expects one polynomial equation");
    MultiPoly p = std::get<PolyRhs>(s.rhs().front()).P;
    MultiPoly dp = p.partialDerivative(0);
    return AnalyticFn{[p, dp](Complex z) -> std::optional<std::pair<Complex, Complex>> {
        std::vector<Complex> pt{z};
        Complex ez = std::exp(z);
        if (!std::isfinite(ez.real()) || !std::isfinite(ez.imag())) return std::nullopt;
        return std::make_pair(ez - p.evaluate(pt), ez - dp.evaluate(pt));
    }};
}

namespace {

struct ContourStats {
    Complex integral;   // of f'/f dz
    double minAbsF = std::numeric_limits<double>::infinity();
    double maxAbsF = 0;
};

// Trapezoid quadrature of f'/f along the rectangle contour. Samples are
// evaluated into an array (parallel when asked) and summed in a fixed order,
// so both execution modes give bit-identical results.
ContourStats contourIntegral(const AnalyticFn& f, Complex lo, Complex hi, int samplesPerEdge,
                             Exec exec) {
    const std::array<Complex, 4> corners = {lo, Complex(hi.real(), lo.imag()), hi,
                                            Complex(lo.real(), hi.imag())};
    const int S = samplesPerEdge;
    const int total = 4 * S; // nodes per edge, endpoints shared
    std::vector<Complex> nodes(total + 1);
    for (int e = 0; e < 4; ++e) {
        Complex a = corners[e], b = corners[(e + 1) % 4];
        for (int i = 0; i < S; ++i)
            nodes[e * S + i] = a + (b - a) * (static_cast<double>(i) / S);
    }
    nodes[total] = nodes[0];

    std::vector<std::optional<Complex>> g(total + 1);
    std::vector<double> absF(total + 1);
    bool overflow = false;
    auto evalNode = [&](int i) {
        auto v = f.evalWithDeriv(nodes[i]);
        if (!v) {
            overflow = true;
            return;
        }
        absF[i] = std::abs(v->first);
        if (v->first == Complex(0.0, 0.0)) {
            g[i] = std::nullopt; // exact root on the contour; caller nudges
            return;
        }
        g[i] = v->second / v->first;
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i <= total; ++i) evalNode(i);
    } else {
        for (int i = 0; i <= total; ++i) evalNode(i);
    }
    if (overflow) throw RegionError("function not representable on the contour");

    ContourStats st;
    Complex acc = 0.0;
    for (int i = 0; i < total; ++i) {
        if (!g[i] || !g[i + 1]) {
            st.minAbsF = 0;
            continue;
        }
        acc += 0.5 * (*g[i] + *g[i + 1]) * (nodes[i + 1] - nodes[i]);
    }
    st.integral = acc;
    for (int i = 0; i <= total; ++i) {
        st.minAbsF = std::min(st.minAbsF, absF[i]);
        st.maxAbsF = std::max(st.maxAbsF, absF[i]);
    }
    return st;
}

std::optional<int> windingNumber(const AnalyticFn& f, Complex lo, Complex hi, int samples0,
                                 Exec exec) {
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int S = samples0; S <= samples0 * 64; S *= 2) {
        ContourStats st = contourIntegral(f, lo, hi, S, exec);
        double w = (st.integral / Complex(0.0, 2.0 * std::numbers::pi)).real();
        double imagPart = (st.integral / Complex(0.0, 2.0 * std::numbers::pi)).imag();
        double snapped = std::round(w);
        bool snapOk = std::abs(w - snapped) < 0.25 && std::abs(imagPart) < 0.25;
        if (snapOk && !std::isnan(prev) && std::abs(w - prev) < 0.1)
            return static_cast<int>(snapped);
        prev = w;
    }
    return std::nullopt;
}

void countRecurse(const AnalyticFn& f, Complex lo, Complex hi, int depth, int samples0, Exec exec,
                  CountResult& out) {
    auto w = windingNumber(f, lo, hi, samples0, exec);
    if (w) {
        out.pieces.push_back({lo, hi, *w});
        out.count += *w;
        return;
    }
    if (depth <= 0)
        throw RegionError("winding number did not snap to an integer at full subdivision depth");

    // Split at the midpoint, shifting the cut lines off any nearby root.
    double fx = 0.5, fy = 0.5;
    ContourStats probe = contourIntegral(f, lo, hi, samples0, exec);
    const double tiny = 1e-6 * (1.0 + probe.maxAbsF);
    for (double shift : {0.0, 0.03, -0.03, 0.07}) {
        Complex mid(lo.real() + (fx + shift) * (hi.real() - lo.real()),
                    lo.imag() + (fy + shift) * (hi.imag() - lo.imag()));
        auto v1 = f.evalWithDeriv(mid);
        if (v1 && std::abs(v1->first) > tiny) {
            fx = fy = 0.5 + shift;
            break;
        }
    }
    double mx = lo.real() + fx * (hi.real() - lo.real());
    double my = lo.imag() + fy * (hi.imag() - lo.imag());
    countRecurse(f, lo, Complex(mx, my), depth - 1, samples0, exec, out);
    countRecurse(f, Complex(mx, lo.imag()), Complex(hi.real(), my), depth - 1, samples0, exec, out);
    countRecurse(f, Complex(lo.real(), my), Complex(mx, hi.imag()), depth - 1, samples0, exec, out);
    countRecurse(f, Complex(mx, my), hi, depth - 1, samples0, exec, out);
}

} // namespace

CountResult countZeros(const AnalyticFn& f, const CountRegion& region, Exec exec) {
    Complex lo = region.lo, hi = region.hi;
    if (!(lo.real() < hi.real()) || !(lo.imag() < hi.imag()))
        throw InputError("degenerate counting rectangle");

    CountResult out;
    // Nudge the outer rectangle off any root sitting near the contour.
    const double diag = std::abs(hi - lo);
    for (int attempt = 0; attempt < 3; ++attempt) {
        ContourStats st = contourIntegral(f, lo, hi, region.contourSamplesPerEdge, exec);
        if (st.minAbsF > 1e-6 * (1.0 + st.maxAbsF)) break;
        Complex bump(1e-4 * diag, 1e-4 * diag);
        lo -= bump;
        hi += bump;
        out.nudged = true;
    }

    countRecurse(f, lo, hi, region.subdivisionDepth, region.contourSamplesPerEdge, exec, out);
    return out;
}

} // namespace iets
