#include "iets/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "iets/census.hpp"
#include "iets/genericity.hpp"
#include "iets/json_io.hpp"
#include "iets/jsonl.hpp"
#include "iets/recheck.hpp"
#include "iets/solver.hpp"

namespace iets {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitDegenerate = 2;
constexpr int kExitShortfall = 3;
constexpr int kExitParse = 4;

std::vector<long> scheduleUpTo(long tMax) {
    auto ts = defaultTSchedule(tMax);
    return ts;
}

EnumerateOptions makeOptions(const RunConfig& c) {
    EnumerateOptions opts;
    opts.count = c.rootCount;
    opts.tSchedule = scheduleUpTo(c.tMax);
    opts.tol = c.tol;
    opts.exec = c.serial ? Exec::Serial : Exec::Parallel;
    return opts;
}

void emitPlotCsv(const std::string& path, const std::vector<RootRecord>& roots) {
    if (path.empty()) return;
    std::ofstream csv(path);
    csv << "re,im,residual\n";
    for (const auto& r : roots)
        csv << formatDouble17(r.solution.front().real()) << ","
            << formatDouble17(r.solution.front().imag()) << "," << formatDouble17(r.maxResidual)
            << "\n";
}

Complex parseComplexArg(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) throw ParseError("expected \"re,im\", got \"" + s + "\"");
    try {
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw ParseError("expected \"re,im\", got \"" + s + "\"");
    }
}

CountRegion parseRegionArg(const std::string& s) {
    std::istringstream is(s);
    std::vector<double> v;
    std::string tok;
    try {
        while (std::getline(is, tok, ',')) v.push_back(std::stod(tok));
    } catch (const std::exception&) {
        throw ParseError("expected --region x0,y0,x1,y1, got \"" + s + "\"");
    }
    if (v.size() != 4) throw ParseError("expected --region x0,y0,x1,y1");
    CountRegion r;
    r.lo = Complex(std::min(v[0], v[2]), std::min(v[1], v[3]));
    r.hi = Complex(std::max(v[0], v[2]), std::max(v[1], v[3]));
    return r;
}

int runSolve(const RunConfig& c, std::ostream& out, std::ostream& err) {
    MasserSystem sys = systemFromJson(loadJsonFile(c.inputPath));
    const bool rational = sys.hasRational();
    MasserSystem solveSys = rational ? rationalToIntegral(sys) : sys;

    EnumerateResult res = enumerateRoots(solveSys, makeOptions(c));
    std::vector<RootRecord> emitted;
    for (auto& rec : res.roots) {
        if (rational) {
            // Recover a = x - y and re-evaluate against the original system.
            const int n = sys.n();
            RootRecord orig = rec;
            orig.solution.resize(n);
            for (int i = 0; i < n; ++i) orig.solution[i] = rec.solution[i] - rec.solution[n + i];
            orig.residuals.assign(n, 0.0);
            for (int i = 0; i < n; ++i) {
                Complex f;
                if (const auto* p = std::get_if<PolyRhs>(&sys.rhs()[i]))
                    f = p->P.evaluate(orig.solution);
                else {
                    const auto& q = std::get<RationalRhs>(sys.rhs()[i]);
                    f = q.num.evaluate(orig.solution) / q.den.evaluate(orig.solution);
                }
                orig.residuals[i] = std::abs(std::exp(orig.solution[i]) - f);
            }
            orig.maxResidual = *std::max_element(orig.residuals.begin(), orig.residuals.end());
            out << rootRecordJsonLine(orig) << "\n";
            emitted.push_back(std::move(orig));
        } else {
            RootEmitContext ctx;
            auto margins = exclusionMargins(solveSys, rec.solution);
            if (!margins.empty()) ctx.exclusionMargins = &margins;
            out << rootRecordJsonLine(rec, ctx) << "\n";
            emitted.push_back(rec);
        }
    }
    for (const auto& f : res.failures) out << seedOutcomeJsonLine(f, "solve") << "\n";
    emitPlotCsv(c.plotPath, emitted);
    if (res.shortfall) {
        err << "certification shortfall: " << res.roots.size() << "/" << c.rootCount
            << " roots certified\n";
        return kExitShortfall;
    }
    return kExitOk;
}

int runSolveTower(const RunConfig& c, std::ostream& out, std::ostream& err) {
    ExpTower tower = towerFromJson(loadJsonFile(c.inputPath));

    if (auto w = isDegenerate(tower)) {
        out << "{\"event\":\"degenerate\",\"g\":\"" << w->g.toString() << "\",\"yExps\":[";
        for (size_t i = 0; i < w->yExps.size(); ++i)
            out << (i ? "," : "") << w->yExps[i];
        out << "]}\n";
        err << "degenerate tower: zeros are exactly the roots of g(x)\n";
        return kExitDegenerate;
    }

    GenericPlan plan;
    bool exact = tower.poly().mode() == CoeffMode::Exact;
    if (exact) {
        plan = genericSolvePlan(tower);
    } else {
        // Float coefficients: genericity preprocessing is disabled.
        plan.system = fromTower(tower);
    }

    out << "{\"event\":\"plan\",\"n\":" << plan.system.n() << ",\"excluded\":[";
    for (size_t i = 0; i < plan.excluded.size(); ++i)
        out << (i ? "," : "") << badRelationJson(plan.excluded[i]);
    out << "]}\n";

    EnumerateOptions opts = makeOptions(c);
    opts.dedupPrefix = tower.k();
    EnumerateResult res = enumerateRoots(plan.system, opts);
    const int k = tower.k();
    for (const auto& rec : res.roots) {
        RootEmitContext ctx;
        std::vector<Complex> chain(rec.solution.begin(), rec.solution.begin() + k);
        TowerResidual tres = towerResidual(tower, chain);
        ctx.towerChainResidual = tres.value;
        auto margins = exclusionMargins(plan.system, rec.solution);
        if (!margins.empty()) ctx.exclusionMargins = &margins;
        RelationDiagnostic rel;
        if (exact) {
            rel = diagnoseRelations(rec, tower, c.heightBound, c.digits);
            ctx.relations = &rel;
        }
        RecheckResult rc = recheckResidual(rec, plan.system, c.digits);
        ctx.recheck = &rc;
        out << rootRecordJsonLine(rec, ctx) << "\n";
    }
    for (const auto& f : res.failures) out << seedOutcomeJsonLine(f, "solve-tower") << "\n";
    emitPlotCsv(c.plotPath, res.roots);
    if (res.shortfall) {
        err << "certification shortfall: " << res.roots.size() << "/" << c.rootCount
            << " roots certified\n";
        return kExitShortfall;
    }
    return kExitOk;
}

int runCheckDegenerate(const RunConfig& c, std::ostream& out, std::ostream&) {
    ExpTower tower = towerFromJson(loadJsonFile(c.inputPath));
    if (auto w = isDegenerate(tower)) {
        out << "{\"degenerate\":true,\"g\":\"" << w->g.toString() << "\",\"yExps\":[";
        for (size_t i = 0; i < w->yExps.size(); ++i) out << (i ? "," : "") << w->yExps[i];
        out << "]}\n";
        return kExitDegenerate;
    }
    out << "{\"degenerate\":false}\n";
    return kExitOk;
}

int runBadRelations(const RunConfig& c, std::ostream& out, std::ostream&) {
    ExpTower tower = towerFromJson(loadJsonFile(c.inputPath));
    Exec exec = c.serial ? Exec::Serial : Exec::Parallel;
    std::vector<BadRelation> rels;
    const int k = tower.k();
    if (k == 2) {
        if (tower.poly().dependsOn(1))
            rels = badRationalsThreeVar(tower.poly(), exec);
        else
            rels = badRationalsTwoVar(tower.poly().remapVars(2, {0, 0, 1}));
    } else if (k >= 3) {
        rels = badTuplesTower(tower, exec);
    }
    out << "[";
    for (size_t i = 0; i < rels.size(); ++i) out << (i ? "," : "") << badRelationJson(rels[i]);
    out << "]\n";
    return kExitOk;
}

int runCountRoots(const RunConfig& c, std::ostream& out, std::ostream&) {
    ExpTower tower = towerFromJson(loadJsonFile(c.inputPath));
    CountRegion region = parseRegionArg(c.region);
    CountResult res = countZeros(towerFn(tower), region, c.serial ? Exec::Serial : Exec::Parallel);
    out << "{\"count\":" << res.count << ",\"nudged\":" << (res.nudged ? "true" : "false")
        << ",\"pieces\":[";
    for (size_t i = 0; i < res.pieces.size(); ++i) {
        out << (i ? "," : "") << "{\"lo\":" << complexPairJson(res.pieces[i].lo)
            << ",\"hi\":" << complexPairJson(res.pieces[i].hi)
            << ",\"count\":" << res.pieces[i].count << "}";
    }
    out << "]}\n";
    return kExitOk;
}

int runDiagnose(const RunConfig& c, std::ostream& out, std::ostream&) {
    ExpTower tower = towerFromJson(loadJsonFile(c.inputPath));
    Complex a = parseComplexArg(c.rootArg);
    RootRecord fake;
    fake.solution = {a};
    RelationDiagnostic d = diagnoseRelations(fake, tower, c.heightBound, c.digits);
    out << relationDiagnosticJson(d) << "\n";
    return kExitOk;
}

} // namespace

int runCli(const RunConfig& c, std::ostream& out, std::ostream& err) {
    setWorkers(resolveWorkers(c.workers));
    try {
        if (!(c.tol > 0)) throw ParseError("--tol must be positive");
        if (c.rootCount < 0) throw ParseError("--roots must be >= 0");
        if (c.heightBound < 1) throw ParseError("--height must be >= 1");
        if (c.digits < 1) throw ParseError("--digits must be >= 1");
        if (c.tMax < 1) throw ParseError("--t-max must be >= 1");
        std::ofstream fileOut;
        std::ostream* sink = &out;
        if (!c.outPath.empty()) {
            fileOut.open(c.outPath);
            if (!fileOut) throw Error("cannot open output file " + c.outPath);
            sink = &fileOut;
        }
        if (c.subcommand == "solve") return runSolve(c, *sink, err);
        if (c.subcommand == "solve-tower") return runSolveTower(c, *sink, err);
        if (c.subcommand == "check-degenerate") return runCheckDegenerate(c, *sink, err);
        if (c.subcommand == "bad-relations") return runBadRelations(c, *sink, err);
        if (c.subcommand == "count-roots") return runCountRoots(c, *sink, err);
        if (c.subcommand == "diagnose") return runDiagnose(c, *sink, err);
        err << "unknown subcommand: " << c.subcommand << "\n";
        return kExitError;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const DegenerateTowerError& e) {
        err << "degenerate input: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const Error& e) {
        err << "error [" << c.subcommand << "]: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        err << "internal error [" << c.subcommand << "]: " << e.what() << "\n";
        return kExitError;
    }
}

int runCliArgs(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"certified solver for Masser exponential systems and iterated towers"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto addCommon = [&](CLI::App* sub, bool needsInput = true) {
        if (needsInput) sub->add_option("input", cfg.inputPath, "input JSON file")->required();
        sub->add_option("--tol", cfg.tol, "solver tolerance");
        sub->add_option("--roots", cfg.rootCount, "number of roots requested");
        sub->add_option("--height", cfg.heightBound, "relation height bound H");
        sub->add_option("--digits", cfg.digits, "diagnostic precision digits");
        sub->add_option("--t-max", cfg.tMax, "largest seed scale t");
        sub->add_option("--workers", cfg.workers, "worker threads (default: all)");
        sub->add_flag("--serial", cfg.serial, "use the serial reference kernels");
        sub->add_option("--out", cfg.outPath, "write JSON lines to this file");
        sub->add_option("--plot", cfg.plotPath, "write (re, im, residual) CSV");
    };

    addCommon(app.add_subcommand("solve", "solve a Masser system"));
    addCommon(app.add_subcommand("solve-tower", "full tower pipeline"));
    addCommon(app.add_subcommand("check-degenerate", "finitely-many-zeros form test"));
    addCommon(app.add_subcommand("bad-relations", "enumerate bad rational relations"));
    auto* count = app.add_subcommand("count-roots", "argument-principle zero count");
    addCommon(count);
    count->add_option("--region", cfg.region, "rectangle x0,y0,x1,y1")->required();
    auto* diag = app.add_subcommand("diagnose", "relation diagnostics at a point");
    addCommon(diag);
    diag->add_option("--root", cfg.rootArg, "point re,im")->required();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            out << app.help();
            return kExitOk;
        }
        err << "argument error: " << e.what() << "\n";
        return kExitParse;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    return runCli(cfg, out, err);
}

} // namespace iets
