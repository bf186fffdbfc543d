#include "iets/jsonl.hpp"

#include <cstdio>
#include <sstream>

namespace iets {

std::string formatDouble17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string complexPairJson(const Complex& z) {
    return "[" + formatDouble17(z.real()) + "," + formatDouble17(z.imag()) + "]";
}

namespace {

std::string jsonEscape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += std::string("\\") + c;
        else if (c == '\n')
            out += "\\n";
        else
            out += c;
    }
    return out;
}

std::string longArrayJson(const std::vector<long>& v) {
    std::string out = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out + "]";
}

const char* kindName(BadRelationKind k) {
    switch (k) {
        case BadRelationKind::TwoIter: return "TwoIter";
        case BadRelationKind::ThreeIterTuple: return "ThreeIterTuple";
        case BadRelationKind::TdOne: return "TdOne";
    }
    return "?";
}

} // namespace

std::string badRelationJson(const BadRelation& rel) {
    std::ostringstream os;
    os << "{\"kind\":\"" << kindName(rel.kind) << "\",\"coeffs\":[";
    for (size_t i = 0; i < rel.coeffs.size(); ++i) {
        if (i) os << ",";
        os << "\"" << rationalToString(rel.coeffs[i]) << "\"";
    }
    os << "],\"tuple\":" << longArrayJson(rel.tuple);
    os << ",\"heightBound\":" << rel.heightBound;
    os << ",\"specializationVanished\":" << (rel.specializationVanished ? "true" : "false");
    os << ",\"witnessDivisor\":\"" << jsonEscape(rel.witnessDivisor.toString()) << "\"";
    os << ",\"exclusion\":\"" << jsonEscape(rel.exclusion.toString()) << "\"";
    os << ",\"note\":\"" << jsonEscape(rel.note) << "\"}";
    return os.str();
}

std::string relationDiagnosticJson(const RelationDiagnostic& d) {
    std::ostringstream os;
    os << "{\"heightBound\":" << d.heightBound << ",\"precisionDigits\":" << d.precisionDigits;
    os << ",\"partial\":" << (d.partial ? "true" : "false");
    os << ",\"values\":[";
    for (size_t i = 0; i < d.values.size(); ++i) {
        if (i) os << ",";
        os << complexPairJson(d.values[i]);
    }
    os << "],\"verdict\":\"" << (d.noneFound() ? "none-found" : "candidate") << "\"";
    os << ",\"candidates\":[";
    for (size_t i = 0; i < d.candidates.size(); ++i) {
        if (i) os << ",";
        os << "{\"m\":" << longArrayJson(d.candidates[i].m)
           << ",\"residual\":" << formatDouble17(d.candidates[i].residual)
           << ",\"multiplicative\":" << (d.candidates[i].multiplicative ? "true" : "false") << "}";
    }
    os << "],\"note\":\"heuristic: absence of a relation is evidence, not proof\"}";
    return os.str();
}

std::string rootRecordJsonLine(const RootRecord& rec, const RootEmitContext& ctx) {
    std::ostringstream os;
    os << "{\"x\":[";
    for (size_t i = 0; i < rec.solution.size(); ++i) {
        if (i) os << ",";
        os << complexPairJson(rec.solution[i]);
    }
    os << "],\"residual\":" << formatDouble17(rec.maxResidual);
    os << ",\"residuals\":[";
    for (size_t i = 0; i < rec.residuals.size(); ++i) {
        if (i) os << ",";
        os << formatDouble17(rec.residuals[i]);
    }
    os << "],\"certificate\":{\"eta\":" << formatDouble17(rec.certificate.eta)
       << ",\"M\":" << formatDouble17(rec.certificate.hessBound)
       << ",\"invJacNorm\":" << formatDouble17(rec.certificate.invJacNorm)
       << ",\"condition\":" << formatDouble17(rec.certificate.condition)
       << ",\"ballRadius\":" << formatDouble17(rec.certificate.ballRadius)
       << ",\"recentered\":" << (rec.recentered ? "true" : "false") << "}";
    os << ",\"seed\":{\"q\":" << longArrayJson(rec.seed.q) << ",\"t\":" << rec.seed.t << "}";
    os << ",\"newtonIterations\":" << rec.newtonIterations;
    if (ctx.towerChainResidual >= 0)
        os << ",\"towerResidual\":" << formatDouble17(ctx.towerChainResidual);
    if (ctx.exclusionMargins && !ctx.exclusionMargins->empty()) {
        os << ",\"exclusionMargins\":[";
        for (size_t i = 0; i < ctx.exclusionMargins->size(); ++i) {
            if (i) os << ",";
            os << formatDouble17((*ctx.exclusionMargins)[i]);
        }
        os << "]";
    }
    if (ctx.recheck) {
        os << ",\"recheck\":{\"residual\":" << formatDouble17(ctx.recheck->maxResidual)
           << ",\"precisionLimited\":" << (ctx.recheck->precisionLimited ? "true" : "false") << "}";
    }
    if (ctx.relations) os << ",\"relations\":" << relationDiagnosticJson(*ctx.relations);
    os << "}";
    return os.str();
}

std::string seedOutcomeJsonLine(const SeedOutcome& oc, const std::string& stage) {
    const char* status = "?";
    switch (oc.status) {
        case SeedStatus::Certified: status = "certified"; break;
        case SeedStatus::InvalidSeed: status = "invalid-seed"; break;
        case SeedStatus::CertificationFailed: status = "certification-failed"; break;
        case SeedStatus::NewtonFailed: status = "newton-failed"; break;
    }
    std::ostringstream os;
    os << "{\"event\":\"seed-failure\",\"stage\":\"" << jsonEscape(stage) << "\",\"seed\":{\"q\":"
       << longArrayJson(oc.q) << ",\"t\":" << oc.t << "},\"status\":\"" << status
       << "\",\"detail\":\"" << jsonEscape(oc.detail) << "\"}";
    return os.str();
}

} // namespace iets
