#pragma once

// Deterministic JSON-lines emission: floats are always printed with 17
// significant digits so identical runs produce byte-identical output.

#include <string>

#include "iets/genericity.hpp"
#include "iets/recheck.hpp"
#include "iets/solver.hpp"

namespace iets {

std::string formatDouble17(double x);

std::string complexPairJson(const Complex& z);

std::string badRelationJson(const BadRelation& rel);

std::string relationDiagnosticJson(const RelationDiagnostic& d);

struct RootEmitContext {
    const RelationDiagnostic* relations = nullptr;
    const RecheckResult* recheck = nullptr;
    const std::vector<double>* exclusionMargins = nullptr;
    double towerChainResidual = -1; // < 0 means absent
};

std::string rootRecordJsonLine(const RootRecord& rec, const RootEmitContext& ctx = {});

std::string seedOutcomeJsonLine(const SeedOutcome& oc, const std::string& stage);

} // namespace iets
