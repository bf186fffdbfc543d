#pragma once

// JSON schemas for polynomials, towers and Masser systems.
//
//   polynomial: { "nvars": n, "mode": "exact"|"float",
//                 "terms": [ { "exps": [e0,...], "re": "num/den"|x, "im": "num/den"|x } ] }
//   tower:      { "k": k, "p": <polynomial> }        (variables x, y_1, ..., y_k)
//   system:     { "n": n, "rhs": [ {"kind":"poly","P":...} | {"kind":"rational","num":...,"den":...}
//                                  | {"kind":"branch","defining":...} ], "provenance": {...} }
//
// Exact coefficients are always emitted as "num/den" strings.

#include <json.hpp>

#include "iets/poly.hpp"

namespace iets {

class ExpTower;
class MasserSystem;

nlohmann::json polyToJson(const MultiPoly& p);
MultiPoly polyFromJson(const nlohmann::json& j);

nlohmann::json towerToJson(const ExpTower& t);
ExpTower towerFromJson(const nlohmann::json& j);

nlohmann::json systemToJson(const MasserSystem& s);
MasserSystem systemFromJson(const nlohmann::json& j);

// Parses a top-level input file that may contain a tower or a system.
nlohmann::json loadJsonFile(const std::string& path);

} // namespace iets
