#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "iets/cli.hpp"
#include "iets/json_io.hpp"
#include "iets/system.hpp"
#include "oracles.hpp"

using namespace iets;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / fs::path("iets_cli_test");
        fs::create_directories(path);
    }
    std::string file(const std::string& name, const std::string& content) const {
        fs::path p = path / name;
        std::ofstream out(p);
        out << content;
        return p.string();
    }
};

struct CliRun {
    int exit;
    std::string out;
    std::string err;
};

CliRun run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = runCliArgs(args, out, err);
    return {code, out.str(), err.str()};
}

const char* kEzSystem = R"({ "n": 1, "rhs": [ {"kind":"poly","P":
  {"nvars":1,"mode":"exact","terms":[{"exps":[1],"re":"1/1","im":"0/1"}]}} ] })";

const char* kTowerY2X = R"({ "k": 2, "p": {"nvars":3,"mode":"exact","terms":[
  {"exps":[0,0,1],"re":"1/1","im":"0/1"},{"exps":[1,0,0],"re":"-1/1","im":"0/1"}]} })";

const char* kTowerY3X = R"({ "k": 3, "p": {"nvars":4,"mode":"exact","terms":[
  {"exps":[0,0,0,1],"re":"1/1","im":"0/1"},{"exps":[1,0,0,0],"re":"-1/1","im":"0/1"}]} })";

const char* kDegenerate = R"({ "k": 1, "p": {"nvars":2,"mode":"exact","terms":[
  {"exps":[2,3],"re":"1/1","im":"0/1"}]} })";

} // namespace

TEST_CASE("solve: e^z = z emits one JSON line per root") {
    TempDir dir;
    auto path = dir.file("ez.json", kEzSystem);
    CliRun r = run({"solve", path, "--roots", "5"});
    CHECK(r.exit == 0);
    int lines = 0;
    std::istringstream is(r.out);
    std::string line;
    while (std::getline(is, line)) {
        auto j = nlohmann::json::parse(line); // every line is valid JSON
        CHECK(j.contains("x"));
        CHECK(j.at("residual").get<double>() < 1e-12);
        CHECK(j.at("certificate").at("condition").get<double>() < 0.5);
        ++lines;
    }
    CHECK(lines == 5);
}

TEST_CASE("solve-tower: pipeline output and exit 0") {
    TempDir dir;
    auto path = dir.file("t2.json", kTowerY2X);
    CliRun r = run({"solve-tower", path, "--roots", "3"});
    CHECK(r.exit == 0);
    std::istringstream is(r.out);
    std::string line;
    REQUIRE(std::getline(is, line));
    auto plan = nlohmann::json::parse(line);
    CHECK(plan.at("event") == "plan");
    int roots = 0;
    while (std::getline(is, line)) {
        auto j = nlohmann::json::parse(line);
        if (!j.contains("x")) continue;
        ++roots;
        CHECK(j.at("towerResidual").get<double>() < 1e-8);
        CHECK(j.at("relations").at("verdict") == "none-found");
    }
    CHECK(roots == 3);
}

TEST_CASE("solve-tower: deterministic byte-identical output") {
    TempDir dir;
    auto path = dir.file("t3.json", kTowerY3X);
    CliRun a = run({"solve-tower", path, "--roots", "2"});
    CliRun b = run({"solve-tower", path, "--roots", "2"});
    CHECK(a.exit == 0);
    CHECK(a.out == b.out);
    // serial reference path gives the same bytes as the parallel kernels
    CliRun c = run({"solve-tower", path, "--roots", "2", "--serial"});
    CHECK(a.out == c.out);
}

TEST_CASE("check-degenerate: witness and exit 2") {
    TempDir dir;
    auto path = dir.file("deg.json", kDegenerate);
    CliRun r = run({"check-degenerate", path});
    CHECK(r.exit == 2);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("degenerate") == true);
    CHECK(j.at("yExps") == nlohmann::json::array({3}));

    auto path2 = dir.file("t2.json", kTowerY2X);
    CHECK(run({"check-degenerate", path2}).exit == 0);
}

TEST_CASE("solve-tower on degenerate input exits 2") {
    TempDir dir;
    auto path = dir.file("deg.json", kDegenerate);
    CliRun r = run({"solve-tower", path});
    CHECK(r.exit == 2);
}

TEST_CASE("parse errors exit 4") {
    TempDir dir;
    auto bad = dir.file("bad.json", "{ not json");
    CHECK(run({"solve", bad}).exit == 4);
    auto badSchema = dir.file("bad2.json", R"({"n": 2, "rhs": []})");
    CHECK(run({"solve", badSchema}).exit == 4);
    CHECK(run({"count-roots", dir.file("t.json", kTowerY2X), "--region", "0,0,1"}).exit == 4);
}

TEST_CASE("certification shortfall exits 3") {
    TempDir dir;
    auto path = dir.file("ez.json", kEzSystem);
    // only t = 16 with two sign patterns exists below t-max 16
    CliRun r = run({"solve", path, "--roots", "50", "--t-max", "16"});
    CHECK(r.exit == 3);
    CHECK(r.err.find("shortfall") != std::string::npos);
}

TEST_CASE("bad-relations: JSON array with exact rational strings") {
    TempDir dir;
    auto path = dir.file("t3.json", kTowerY3X);
    CliRun r = run({"bad-relations", path});
    CHECK(r.exit == 0);
    auto j = nlohmann::json::parse(r.out);
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 1);
    CHECK(j[0].at("tuple") == nlohmann::json::array({1, 0, 1}));
    CHECK(j[0].at("coeffs")[0].get<std::string>() == "1/1");
}

TEST_CASE("count-roots: census with per-piece breakdown") {
    TempDir dir;
    // z - e^z as a float tower
    const char* tower = R"({ "k": 1, "p": {"nvars":2,"mode":"float","terms":[
      {"exps":[1,0],"re":1.0,"im":0.0},{"exps":[0,1],"re":-1.0,"im":0.0}]} })";
    auto path = dir.file("f.json", tower);
    CliRun r = run({"count-roots", path, "--region", "-1,0,3,10"});
    CHECK(r.exit == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("count") == 2);
    int sum = 0;
    for (const auto& piece : j.at("pieces")) sum += piece.at("count").get<int>();
    CHECK(sum == 2);
}

TEST_CASE("diagnose: relation report at a point") {
    TempDir dir;
    auto path = dir.file("t2.json", kTowerY2X);
    CliRun r = run({"diagnose", path, "--root", "1.0,2.0", "--height", "6"});
    CHECK(r.exit == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j.contains("verdict"));
    CHECK(j.at("heightBound") == 6);
}

TEST_CASE("plot CSV and --out routing") {
    TempDir dir;
    auto path = dir.file("ez.json", kEzSystem);
    auto outPath = (dir.path / "roots.jsonl").string();
    auto csvPath = (dir.path / "roots.csv").string();
    CliRun r = run({"solve", path, "--roots", "2", "--out", outPath, "--plot", csvPath});
    CHECK(r.exit == 0);
    CHECK(r.out.empty()); // everything went to the file

    std::ifstream jsonl(outPath);
    int lines = 0;
    std::string line;
    while (std::getline(jsonl, line)) ++lines;
    CHECK(lines == 2);

    std::ifstream csv(csvPath);
    REQUIRE(std::getline(csv, line));
    CHECK(line == "re,im,residual");
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 2);
}

TEST_CASE("JSON round-trip: polynomials, towers and systems") {
    std::mt19937 rng(107);
    for (int it = 0; it < 20; ++it) {
        MultiPoly p = oracle::randomExactPoly(rng, 3, 4, 6);
        CHECK(polyFromJson(polyToJson(p)) == p);
        MultiPoly f = oracle::randomFloatPoly(rng, 2, 4, 5);
        CHECK(polyFromJson(polyToJson(f)) == f);
    }
    // a tower and a system with every rhs kind
    ExpTower t = towerFromJson(nlohmann::json::parse(kTowerY2X));
    auto t2 = towerFromJson(towerToJson(t));
    CHECK(t2.k() == t.k());
    CHECK(t2.poly() == t.poly());

    MasserSystem sys = fromTower(t);
    LinearForm form;
    form.coeffs = {Rational(-1), Rational(1)};
    sys = augmentExcludeRelations(sys, {form});
    MasserSystem sys2 = systemFromJson(systemToJson(sys));
    CHECK(sys2.n() == sys.n());
    CHECK(sys2.provenance().excludedForms.size() == 1);
    CHECK(systemToJson(sys2) == systemToJson(sys));
}

TEST_CASE("help exits cleanly") {
    CHECK(run({"--help"}).exit == 0);
}

TEST_CASE("solve: rational system roots are recovered against the original") {
    TempDir dir;
    const char* rationalSys = R"({ "n": 1, "rhs": [ {"kind":"rational",
      "num":{"nvars":1,"mode":"exact","terms":[{"exps":[1],"re":"1/1","im":"0/1"}]},
      "den":{"nvars":1,"mode":"exact","terms":[{"exps":[1],"re":"1/1","im":"0/1"},
                                               {"exps":[0],"re":"-1/1","im":"0/1"}]}} ] })";
    auto path = dir.file("rat.json", rationalSys);
    CliRun r = run({"solve", path, "--roots", "2"});
    CHECK(r.exit == 0);
    std::istringstream is(r.out);
    std::string line;
    int roots = 0;
    while (std::getline(is, line)) {
        auto j = nlohmann::json::parse(line);
        if (!j.contains("x")) continue;
        ++roots;
        REQUIRE(j.at("x").size() == 1); // recovered a = x - y, one coordinate
        Complex a(j.at("x")[0][0].get<double>(), j.at("x")[0][1].get<double>());
        // e^a (a - 1) = a
        CHECK(std::abs(std::exp(a) * (a - Complex(1, 0)) - a) < 1e-8 * (1 + std::abs(a)));
        CHECK(j.at("residual").get<double>() < 1e-8);
    }
    CHECK(roots == 2);
}

TEST_CASE("solve-tower: float towers skip genericity preprocessing") {
    TempDir dir;
    const char* floatTower = R"({ "k": 2, "p": {"nvars":3,"mode":"float","terms":[
      {"exps":[0,0,1],"re":1.0,"im":0.0},{"exps":[1,0,0],"re":-1.0,"im":0.0}]} })";
    auto path = dir.file("ft.json", floatTower);
    CliRun r = run({"solve-tower", path, "--roots", "2"});
    CHECK(r.exit == 0);
    std::istringstream is(r.out);
    std::string line;
    REQUIRE(std::getline(is, line));
    auto plan = nlohmann::json::parse(line);
    CHECK(plan.at("excluded").empty()); // no exact genericity pass
    int roots = 0;
    while (std::getline(is, line)) {
        auto j = nlohmann::json::parse(line);
        if (!j.contains("x")) continue;
        ++roots;
        CHECK_FALSE(j.contains("relations"));
        CHECK(j.at("towerResidual").get<double>() < 1e-8);
    }
    CHECK(roots == 2);
}

TEST_CASE("shortfall output names failing stage and seed") {
    TempDir dir;
    auto path = dir.file("ez.json", kEzSystem);
    CliRun r = run({"solve", path, "--roots", "50", "--t-max", "16"});
    CHECK(r.exit == 3);
    CHECK(r.out.find("seed-failure") == std::string::npos); // all t=16 seeds succeed
    // force per-seed failures: t-max 1 makes certification fail raw and the
    // recentered pipeline still certifies, so use a root count beyond them
    CliRun r2 = run({"solve", path, "--roots", "5", "--t-max", "1"});
    CHECK(r2.exit == 3);
}

TEST_CASE("solve accepts branch systems from JSON") {
    TempDir dir;
    // chain system of the y2 - x tower, serialized by hand
    const char* branchSys = R"({ "n": 2, "rhs": [
      {"kind":"poly","P":{"nvars":2,"mode":"exact","terms":[{"exps":[0,1],"re":"1/1","im":"0/1"}]}},
      {"kind":"branch","defining":{"nvars":3,"mode":"exact","terms":[
        {"exps":[0,0,1],"re":"1/1","im":"0/1"},{"exps":[1,0,0],"re":"-1/1","im":"0/1"}]},
       "branchDegree":"1/1"} ] })";
    auto path = dir.file("br.json", branchSys);
    CliRun r = run({"solve", path, "--roots", "1"});
    CHECK(r.exit == 0);
    auto j = nlohmann::json::parse(r.out.substr(0, r.out.find('\n')));
    CHECK(j.at("residual").get<double>() < 1e-12);
}

TEST_CASE("flag validation exits 4") {
    TempDir dir;
    auto path = dir.file("ez.json", kEzSystem);
    CHECK(run({"solve", path, "--tol", "0"}).exit == 4);
    CHECK(run({"solve", path, "--height", "0"}).exit == 4);
}

TEST_CASE("exact polynomials reject numeric coefficients in JSON") {
    auto bad = nlohmann::json::parse(
        R"({"nvars":1,"mode":"exact","terms":[{"exps":[1],"re":1.0,"im":0.0}]})");
    CHECK_THROWS_AS(polyFromJson(bad), ParseError);
    auto nan = nlohmann::json::parse(
        R"({"nvars":1,"mode":"float","terms":[{"exps":[1],"re":"x","im":0.0}]})");
    CHECK_THROWS_AS(polyFromJson(nan), ParseError);
}

TEST_CASE("malformed region tokens exit 4, not crash") {
    TempDir dir;
    auto path = dir.file("t.json", kTowerY2X);
    CHECK(run({"count-roots", path, "--region", "a,b,c,d"}).exit == 4);
}
