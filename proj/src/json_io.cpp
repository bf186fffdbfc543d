#include "iets/json_io.hpp"

#include <cmath>
#include <fstream>

#include "iets/system.hpp"

namespace iets {

using nlohmann::json;

json polyToJson(const MultiPoly& p) {
    json j;
    j["nvars"] = p.nvars();
    j["mode"] = p.mode() == CoeffMode::Exact ? "exact" : "float";
    json terms = json::array();
    for (const auto& [idx, c] : p.terms()) {
        json t;
        t["exps"] = idx.exps();
        if (p.mode() == CoeffMode::Exact) {
            const auto& g = std::get<GaussianRational>(c);
            t["re"] = rationalToString(g.re());
            t["im"] = rationalToString(g.im());
        } else {
            Complex z = std::get<Complex>(c);
            t["re"] = z.real();
            t["im"] = z.imag();
        }
        terms.push_back(std::move(t));
    }
    j["terms"] = std::move(terms);
    return j;
}

MultiPoly polyFromJson(const json& j) {
    try {
        int nvars = j.at("nvars").get<int>();
        if (nvars < 0) throw ParseError("polynomial: negative nvars");
        std::string mode = j.at("mode").get<std::string>();
        if (mode != "exact" && mode != "float")
            throw ParseError("polynomial: mode must be \"exact\" or \"float\"");
        bool exact = mode == "exact";
        MultiPoly p(nvars, exact ? CoeffMode::Exact : CoeffMode::Float);
        for (const auto& t : j.at("terms")) {
            auto exps = t.at("exps").get<std::vector<int>>();
            if (static_cast<int>(exps.size()) != nvars)
                throw ParseError("polynomial: exps length does not match nvars");
            Coeff c;
            if (exact) {
                if (!t.at("re").is_string() || !t.at("im").is_string())
                    throw ParseError("polynomial: exact coefficients must be \"num/den\" strings");
                c = GaussianRational::fromStrings(t.at("re").get<std::string>(),
                                                  t.at("im").get<std::string>());
            } else {
                double re = t.at("re").get<double>();
                double im = t.at("im").get<double>();
                if (!std::isfinite(re) || !std::isfinite(im))
                    throw ParseError("polynomial: non-finite float coefficient");
                c = Complex(re, im);
            }
            p.addTerm(MultiIndex(std::move(exps)), c);
        }
        return p;
    } catch (const json::exception& e) {
        throw ParseError(std::string("polynomial JSON: ") + e.what());
    }
}

json towerToJson(const ExpTower& t) {
    json j;
    j["k"] = t.k();
    j["p"] = polyToJson(t.poly());
    return j;
}

ExpTower towerFromJson(const json& j) {
    try {
        int k = j.at("k").get<int>();
        MultiPoly p = polyFromJson(j.at("p"));
        return ExpTower(k, std::move(p));
    } catch (const json::exception& e) {
        throw ParseError(std::string("tower JSON: ") + e.what());
    } catch (const InputError& e) {
        throw ParseError(std::string("tower JSON: ") + e.what());
    }
}

json systemToJson(const MasserSystem& s) {
    json j;
    j["n"] = s.n();
    json rhs = json::array();
    for (const auto& r : s.rhs()) {
        json e;
        if (const auto* p = std::get_if<PolyRhs>(&r)) {
            e["kind"] = "poly";
            e["P"] = polyToJson(p->P);
        } else if (const auto* q = std::get_if<RationalRhs>(&r)) {
            e["kind"] = "rational";
            e["num"] = polyToJson(q->num);
            e["den"] = polyToJson(q->den);
        } else {
            const auto& b = std::get<BranchRhs>(r);
            e["kind"] = "branch";
            e["defining"] = polyToJson(b.defining);
            e["branchDegree"] = rationalToString(b.branchDegree);
        }
        rhs.push_back(std::move(e));
    }
    j["rhs"] = std::move(rhs);

    json prov;
    if (s.provenance().towerK) prov["towerK"] = *s.provenance().towerK;
    json excluded = json::array();
    for (const auto& f : s.provenance().excludedForms) {
        json coeffs = json::array();
        for (const auto& c : f.coeffs) coeffs.push_back(rationalToString(c));
        excluded.push_back(std::move(coeffs));
    }
    prov["excluded"] = std::move(excluded);
    prov["notes"] = s.provenance().notes;
    j["provenance"] = std::move(prov);
    return j;
}

MasserSystem systemFromJson(const json& j) {
    try {
        int n = j.at("n").get<int>();
        std::vector<Rhs> rhs;
        for (const auto& e : j.at("rhs")) {
            std::string kind = e.at("kind").get<std::string>();
            if (kind == "poly") {
                rhs.push_back(PolyRhs{polyFromJson(e.at("P"))});
            } else if (kind == "rational") {
                rhs.push_back(RationalRhs{polyFromJson(e.at("num")), polyFromJson(e.at("den"))});
            } else if (kind == "branch") {
                BranchRhs b;
                b.defining = polyFromJson(e.at("defining"));
                if (e.contains("branchDegree"))
                    b.branchDegree = parseRational(e.at("branchDegree").get<std::string>());
                rhs.push_back(std::move(b));
            } else {
                throw ParseError("system JSON: unknown rhs kind \"" + kind + "\"");
            }
        }
        if (static_cast<int>(rhs.size()) != n)
            throw ParseError("system JSON: rhs count does not match n");
        Provenance prov;
        if (j.contains("provenance")) {
            const auto& p = j.at("provenance");
            if (p.contains("towerK")) prov.towerK = p.at("towerK").get<int>();
            if (p.contains("excluded")) {
                for (const auto& fc : p.at("excluded")) {
                    LinearForm f;
                    for (const auto& c : fc) f.coeffs.push_back(parseRational(c.get<std::string>()));
                    prov.excludedForms.push_back(std::move(f));
                }
            }
            if (p.contains("notes")) prov.notes = p.at("notes").get<std::vector<std::string>>();
        }
        return MasserSystem(std::move(rhs), std::move(prov));
    } catch (const json::exception& e) {
        throw ParseError(std::string("system JSON: ") + e.what());
    } catch (const InputError& e) {
        throw ParseError(std::string("system JSON: ") + e.what());
    }
}

json loadJsonFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open input file: " + path);
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw ParseError("invalid JSON in " + path + ": " + e.what());
    }
}

} // namespace iets
