#pragma once

#include <vector>

#include "iets/rational.hpp"

namespace iets {

// All roots of c[0] + c[1] u + ... + c[m] u^m, via the companion matrix of
// the coefficient vector, Newton-polished against the input coefficients.
// Near-zero leading coefficients are stripped relative to the largest one.
// Returns roots sorted by (Re, Im). Empty when the stripped degree is zero.
std::vector<Complex> polyRootsCompanion(std::vector<Complex> coeffs);

// Best rational approximation with denominator <= maxDen (continued
// fractions).
Rational ratApprox(double x, long maxDen);

} // namespace iets
