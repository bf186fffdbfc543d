#pragma once

// Independent high-precision re-evaluation of system residuals at a solved
// root, with optional high-precision Newton polish.

#include "iets/solver.hpp"
#include "iets/system.hpp"

namespace iets {

struct RecheckResult {
    double maxResidual = 0;
    std::vector<double> residuals;
    bool precisionLimited = false;        // argument reduction past 1e12 |Im|
    std::vector<Complex> polishedSolution; // set when polish was requested
};

// Re-evaluates |e^{z_i} - f_i(z)| at `digits` significant digits (the layer
// is fixed at 50; digits only bounds what is considered meaningful). With
// polish = true the root is first refined by Newton at high precision.
RecheckResult recheckResidual(const RootRecord& root, const MasserSystem& s, int digits,
                              bool polish = false);

} // namespace iets
