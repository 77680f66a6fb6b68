#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "harmonic/cli.hpp"
#include "temp_dir.hpp"

using harmonic::cli::parse_extent;
using harmonic::cli::run;

namespace {

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

Invocation invoke_cached(std::vector<std::string> args, const TempDir& td) {
    args.push_back("--cache-dir");
    args.push_back(td.path.string());
    return invoke(std::move(args));
}

} // namespace

TEST_CASE("extent parsing normalizes scientific notation exactly") {
    CHECK(parse_extent("100") == 100);
    CHECK(parse_extent("1e5") == 100000);
    CHECK(parse_extent("2.5e3") == 2500);
    CHECK(parse_extent("1.10e5") == 110000);
    CHECK(parse_extent("7E2") == 700);
    CHECK_THROWS_AS(parse_extent("2.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_extent("0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_extent("1e-2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_extent("abc"), std::invalid_argument);
}

TEST_CASE("harmonic subcommand") {
    auto r = invoke({"harmonic", "2"});
    CHECK(r.code == 0);
    CHECK(r.out == "3/2\n");

    r = invoke({"harmonic", "6", "--format", "csv"});
    CHECK(r.code == 0);
    CHECK(r.out == "n,numerator,denominator\n6,49,20\n");

    r = invoke({"harmonic", "0"});
    CHECK(r.code == 2);
}

TEST_CASE("valuation subcommand") {
    auto r = invoke({"valuation", "22", "3"});
    CHECK(r.code == 0);
    CHECK(r.out == "1\n");

    r = invoke({"valuation", "2", "2", "--format", "csv"});
    CHECK(r.code == 0);
    CHECK(r.out == "n,p,valuation,certainty,precision\n2,2,-1,padic-certified,16\n");

    r = invoke({"valuation", "5", "6"});
    CHECK(r.code == 2); // 6 is not prime
}

TEST_CASE("jp subcommand with a cold and warm cache") {
    TempDir td("cli-jp");
    auto cold = invoke_cached({"jp", "3", "--bound", "1000"}, td);
    CHECK(cold.code == 0);
    CHECK(cold.out == "2\n7\n22\n");
    CHECK(std::filesystem::exists(td.path / "jp_3.table"));

    auto warm = invoke_cached({"jp", "3", "--bound", "1000"}, td);
    CHECK(warm.out == cold.out);

    auto csv = invoke_cached({"jp", "3", "--bound", "1000", "--format", "csv"}, td);
    CHECK(csv.out == "p,search_bound,n,engine\n"
                     "3,1000,2,padic\n3,1000,7,padic\n3,1000,22,padic\n");

    auto bad = invoke_cached({"jp", "4", "--bound", "10"}, td);
    CHECK(bad.code == 2);
}

TEST_CASE("ipk subcommand agrees across methods") {
    TempDir td("cli-ipk");
    auto r = invoke_cached({"ipk", "2", "2", "--x", "100", "--method", "both"}, td);
    CHECK(r.code == 0);
    CHECK(r.out == "1\n2\n3\nmethods agree\n");

    r = invoke_cached({"ipk", "3", "1", "--x", "30", "--method", "direct"}, td);
    CHECK(r.code == 0);
    CHECK(r.out == "1\n2\n6\n7\n8\n21\n22\n23\n");
}

TEST_CASE("im and bounds subcommands") {
    TempDir td("cli-im");
    auto r = invoke_cached({"im", "12", "--x", "100"}, td);
    CHECK(r.code == 0);
    CHECK(r.out == "1\n2\n3\n6\n7\n8\n21\n22\n23\n66\n67\n68\n");

    r = invoke_cached({"im", "1", "--x", "100"}, td);
    CHECK(r.code == 2);

    auto b = invoke_cached({"bounds", "12", "--x", "100", "--format", "csv"}, td);
    CHECK(b.code == 0);
    CHECK(b.out.rfind("m,x,count,bound_thm1,bound_lemma22,bound_eq11,bound_sanna,pass\n", 0) ==
          0);
    CHECK(b.out.find("12,100,12,") != std::string::npos);
    CHECK(b.out.find(",,,") != std::string::npos); // inapplicable columns stay empty
    CHECK(b.out.find("true\n") != std::string::npos);

    auto bp = invoke_cached({"bounds", "3", "--x", "100", "--format", "json"}, td);
    CHECK(bp.code == 0);
    const auto parsed = nlohmann::json::parse(bp.out);
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0]["m"] == 3);
    CHECK(parsed[0]["count"] == 11);
    CHECK(parsed[0]["pass"] == true);
    CHECK(parsed[0]["bound_lemma22"].is_number());
    CHECK(parsed[0]["bound_eq11"].is_number());
}

TEST_CASE("density subcommand emits checkpoint rows") {
    TempDir td("cli-density");
    auto r = invoke_cached({"density", "--x", "1e3", "--theta", "1/4", "--format", "csv"}, td);
    CHECK(r.code == 0);
    // union bounds: x=100 has t=3, I_2(100)+I_3(100) = 1+11; x=1000 has t=5,
    // I_4(1000)+I_3(1000)+I_5(1000) = 3+11+19
    CHECK(r.out == "x,theta,exceptions,ratio,union_bound\n"
                   "10,1/4,0,0.00000000,0\n"
                   "100,1/4,0,0.00000000,12\n"
                   "1000,1/4,0,0.00000000,33\n");

    auto j = invoke_cached({"density", "--x", "100", "--format", "json"}, td);
    CHECK(j.code == 0);
    const auto parsed = nlohmann::json::parse(j.out);
    REQUIRE(parsed.is_array());
    CHECK(parsed.size() == 2); // x = 10, 100
    for (const auto& row : parsed) {
        CHECK(row.contains("x"));
        CHECK(row.contains("theta"));
        CHECK(row.contains("exceptions"));
        CHECK(row.contains("ratio"));
        CHECK(row.contains("union_bound"));
    }

    auto bad = invoke_cached({"density", "--x", "100", "--theta", "1/9"}, td);
    CHECK(bad.code == 2);
}

TEST_CASE("cache directory falls back to the environment variable") {
    TempDir td("cli-env");
    ::setenv("HARMONIC_CACHE_DIR", td.path.string().c_str(), 1);
    auto r = invoke({"jp", "3", "--bound", "100"});
    ::unsetenv("HARMONIC_CACHE_DIR");
    CHECK(r.code == 0);
    CHECK(std::filesystem::exists(td.path / "jp_3.table"));
}

TEST_CASE("selftest subcommand writes its report") {
    TempDir td("cli-selftest");
    const auto report = td.path / "report.txt";
    auto r = invoke({"selftest", "--only", "3", "--report", report.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("[PASS] 3.") != std::string::npos);
    std::ifstream f(report);
    std::stringstream content;
    content << f.rdbuf();
    CHECK(content.str().find("all criteria passed") != std::string::npos);
}

TEST_CASE("usage errors exit with status 2") {
    CHECK(invoke({"no-such-command"}).code == 2);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"jp", "3"}).code == 2);          // missing --bound
    CHECK(invoke({"harmonic", "abc"}).code == 2);
}
