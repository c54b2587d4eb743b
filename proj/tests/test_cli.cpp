#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "jetsym/cli.hpp"
#include "json.hpp"

using jetsym::cli::run;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run jetsym_cli(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

nlohmann::ordered_json strip_timing(nlohmann::ordered_json j)
{
    j.erase("timing_ms");
    return j;
}

} // namespace

TEST_CASE("check exit codes", "[cli][check]")
{
    CHECK(jetsym_cli({"check", "--equation", "theorem1", "--n", "2"}).code == 0);
    Run kdv = jetsym_cli({"check", "--equation", "kdv-system", "--param", "lambda1=0"});
    CHECK(kdv.code == 1);
    CHECK(kdv.out.find("FAIL [sec3-kdv] G") != std::string::npos);
    Run euler = jetsym_cli({"check", "--equation", "euler-system", "--case", "2", "--param", "k=-1"});
    CHECK(euler.code == 2);
    CHECK(euler.err.find("k != -1") != std::string::npos);
    CHECK(jetsym_cli({"check", "--equation", "euler-system", "--case", "3", "--n", "2"}).code == 0);
    CHECK(jetsym_cli({"check", "--equation", "nope"}).code == 2);
    CHECK(jetsym_cli({"check", "--equation", "theorem1", "--param", "novalue"}).code == 2);
}

TEST_CASE("usage errors exit 2 without throwing", "[cli][usage]")
{
    CHECK(jetsym_cli({}).code == 2);
    CHECK(jetsym_cli({"frobnicate"}).code == 2);
    CHECK(jetsym_cli({"determining", "--bogus"}).code == 2);
    CHECK(jetsym_cli({"check", "--equation", "theorem1", "--jobs", "0"}).code == 2);
    CHECK(jetsym_cli({"check", "--equation", "theorem1", "--tol", "-1"}).code == 2);
    CHECK(jetsym_cli({"check", "--equation", "theorem1", "--format", "xml"}).code == 2);
    CHECK(jetsym_cli({"--help"}).code == 0);
    CHECK(jetsym_cli({"check", "--help"}).code == 0);
}

TEST_CASE("user-supplied residuals are flagged uncurated", "[cli][check]")
{
    Run ok = jetsym_cli({"check", "--residual", "i*D(psi;t) + D(psi;x1,x1)", "--solve-for", "D(psi;x1,x1)",
                         "--field", "t*@x1 + (i/2)*x1*psi*@psi - (i/2)*x1*cpsi*@cpsi", "--field", "@t"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("uncurated") != std::string::npos);
    Run bad = jetsym_cli({"check", "--residual", "i*D(psi;t) + D(psi;x1,x1)", "--solve-for", "D(psi;x1,x1)",
                          "--field", "x1*@x1"});
    CHECK(bad.code == 1);
    CHECK(jetsym_cli({"check", "--residual", "D(psi;x1,x1)^2 + psi", "--solve-for", "D(psi;x1,x1)", "--field",
                      "@t"})
              .code == 2);
    Run parse_error = jetsym_cli({"check", "--residual", "i*D(psi;t) +", "--solve-for", "psi", "--field", "@t"});
    CHECK(parse_error.code == 2);
    CHECK(parse_error.err.find("column") != std::string::npos);
}

TEST_CASE("determining command", "[cli][determining]")
{
    Run r = jetsym_cli({"determining", "--equation", "theorem1", "--n", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("extraction equivalent to the reference system") != std::string::npos);
    CHECK(r.out.find("general solution satisfies the system") != std::string::npos);
    CHECK(jetsym_cli({"determining", "--equation", "theorem1", "--n", "1"}).code == 0);
    CHECK(jetsym_cli({"determining", "--equation", "heat-system"}).code == 2);
}

TEST_CASE("flow command", "[cli][flow]")
{
    Run qb = jetsym_cli({"flow", "--name", "qb", "--potential", "1/(x1^2+x2^2)"});
    CHECK(qb.code == 0);
    CHECK(qb.out.find("W' = 1/(x1^2 + x2^2) + alpha*D(B(t);#1)") != std::string::npos);
    CHECK(qb.out.find("parameters add along the chain") != std::string::npos);
    CHECK(jetsym_cli({"flow", "--name", "projective"}).code == 0);
    CHECK(jetsym_cli({"flow", "--name", "contact-special"}).code == 0);
    CHECK(jetsym_cli({"flow", "--name", "dilation", "--potential", "1/(x1^2+x2^2)"}).out.find("(unchanged)") !=
          std::string::npos);
    CHECK(jetsym_cli({"flow", "--name", "nope"}).code == 2);
    CHECK(jetsym_cli({"flow"}).code == 2);
}

TEST_CASE("numeric command", "[cli][numeric]")
{
    CHECK(jetsym_cli({"numeric", "--flow", "galilei", "--solution", "planewave", "--mode", "analytic", "--tol",
                      "1e-10"})
              .code == 0);
    Run fd = jetsym_cli({"numeric", "--flow", "projective", "--solution", "planewave", "--mode", "fd",
                         "--refinements", "3", "--grid", "51x51", "--format", "json"});
    CHECK(fd.code == 0);
    auto j = nlohmann::json::parse(fd.out);
    auto rec = nlohmann::json::parse(j["items"][0]["detail"].get<std::string>());
    CHECK(rec["ratios"].size() == 2);
    for (const char *key : {"flow", "solution", "mode", "grid", "residual_max", "ratios"})
        CHECK(rec.contains(key));
    CHECK(jetsym_cli({"numeric", "--solution", "planewave", "--grid", "2x2"}).code == 2);
    CHECK(jetsym_cli({"numeric", "--solution", "constant", "--mode", "fd", "--grid", "41x41"}).code == 1);
    CHECK(jetsym_cli({"numeric", "--flow", "projective", "--param", "mu=1.5"}).code == 2);
    CHECK(jetsym_cli({"numeric", "--param", "k=two"}).code == 2);
    CHECK(jetsym_cli({"numeric", "--n", "2"}).code == 2);
}

TEST_CASE("JSON report schema", "[cli][json]")
{
    Run r = jetsym_cli({"reproduce", "--only", "sec6", "--format", "json"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::ordered_json::parse(r.out);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it)
        keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"version", "command", "status", "items", "timing_ms"});
    CHECK(j["status"] == "pass");
    REQUIRE_FALSE(j["items"].empty());
    for (const auto &item : j["items"]) {
        std::vector<std::string> ik;
        for (auto it = item.begin(); it != item.end(); ++it)
            ik.push_back(it.key());
        CHECK(ik == std::vector<std::string>{"id", "section", "status", "detail"});
        CHECK(item["section"] == "sec6-contact");
    }
}

TEST_CASE("reproduce is deterministic and filterable", "[cli][reproduce]")
{
    std::string path = "reproduce_test.json";
    Run a = jetsym_cli({"reproduce", "--only", "sec2", "--json", path, "--jobs", "1"});
    Run b = jetsym_cli({"reproduce", "--only", "sec2", "--format", "json", "--jobs", "3"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    std::ifstream in(path);
    auto ja = nlohmann::ordered_json::parse(in);
    auto jb = nlohmann::ordered_json::parse(b.out);
    CHECK(strip_timing(ja) == strip_timing(jb));
    for (const auto &item : ja["items"])
        CHECK(item["section"].get<std::string>().rfind("sec2", 0) == 0);
    std::remove(path.c_str());
    CHECK(jetsym_cli({"reproduce", "--only", "sec9"}).code == 2);
}

TEST_CASE("report collects items", "[cli][report]")
{
    jetsym::cli::Report r;
    r.add("s", "a", true, "");
    CHECK(r.pass());
    jetsym::CheckReport cr;
    cr.add({"X:eq1", "0", true, ""});
    cr.add({"X:eq2", "x1", false, ""});
    cr.add({"Y:eq1", "0", true, ""});
    r.add_grouped("s", "p ", cr);
    REQUIRE(r.items.size() == 3);
    CHECK(r.items[1].id == "p X");
    CHECK_FALSE(r.items[1].pass);
    CHECK(r.items[2].pass);
    CHECK_FALSE(r.pass());
}
