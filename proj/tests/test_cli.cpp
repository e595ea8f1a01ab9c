/**
 * @file test_cli.cpp
 * @brief Tests for the `stf` executable: exit codes, JSON/CSV output, configuration files and determinism.
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "stf/cli.hpp"

using namespace stf;
using nlohmann::json;

namespace {

const std::string kDepth0 = "g^4 (prec 12)";
const std::string kDepth1 =
    "1 + g^1*w^1 + 4*w^2 + g^41*w^3 + g^76*w^4 + g^26*w^5 + g^103*w^6 + g^34*w^7 + g^41*w^8 + g^119*w^9 + "
    "g^65*w^10 + g^94*w^11 (prec 12)";
const std::string kDepth2 = "1 + g^1*w^2 + 4*w^4 + g^41*w^6 + g^76*w^8 + g^26*w^10 (prec 12)";

struct Run {
    std::string out;
    int code = -1;
};

std::string quote(const std::string& s) { return "'" + s + "'"; }

Run run(const std::string& args) {
    const char* bin = std::getenv("STF_BINARY");
    REQUIRE_MESSAGE(bin != nullptr, "STF_BINARY must point to the stf executable");
    const std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    Run r;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace

TEST_CASE("configuration validation") {
    RunConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    cfg.p = 4;
    CHECK_THROWS_AS(validate(cfg), UsageError);
    cfg = {};
    cfg.p = 3;
    CHECK_THROWS_AS(validate(cfg), UsageError);  // p must exceed n = 3
    cfg = {};
    cfg.prec = 11;
    CHECK_THROWS_AS(validate(cfg), UsageError);  // prec below 2·depth_cap + 4
    cfg = {};
    cfg.jobs = 0;
    CHECK_THROWS_AS(validate(cfg), UsageError);
    CHECK(parse_format("csv") == OutputFormat::Csv);
    CHECK_THROWS_AS(parse_format("xml"), UsageError);
}

TEST_CASE("cyclotomic JSON round trip") {
    const CycNumber x = CycNumber::root_of_unity(5, 2) * CycNumber(mpq_class(3, 7)) + CycNumber(2);
    CHECK(cyc_from_json(to_json(x)) == x);
    CHECK(cyc_from_json(to_json(CycNumber(11535))) == CycNumber(11535));
}

TEST_CASE("depth subcommand") {
    const Run one = run("depth 1");
    CHECK(one.code == 0);
    CHECK(json::parse(one.out).at("depth") == "inf");

    const Run d1 = run("depth " + quote(kDepth1));
    CHECK(d1.code == 0);
    const json j = json::parse(d1.out);
    CHECK(j.at("depth") == "1");
    CHECK(j.at("good") == true);

    const Run m = run("depth '[[1, w], [w, 1]]' --p 3 --n 2");
    CHECK(m.code == 0);
    CHECK(json::parse(m.out).at("newton_depth") == "1");

    const Run csv = run("depth " + quote(kDepth2) + " --format csv");
    CHECK(csv.code == 0);
    CHECK(csv.out.rfind("gamma,kind,depth,", 0) == 0);
}

TEST_CASE("exit codes") {
    CHECK(run("depth '1 + + w'").code == 2);
    CHECK(run("verify no-such-suite").code == 2);
    CHECK(run("depth 1 --p 4").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("depth 'w (prec 12)'").code == 1);  // not in the norm-one torus
}

TEST_CASE("transfer subcommand") {
    const Run r = run("transfer " + quote(kDepth2) + " " + quote(kDepth1));
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(cyc_from_json(j.at("smooth")) == CycNumber(11535));
    CHECK(cyc_from_json(j.at("closed_form").at("smooth")) == CycNumber(11535));
    CHECK(cyc_from_json(j.at("diff").at("brute_minus_closed")).is_zero());
    CHECK(j.at("report").is_object());

    const Run anchor = run("transfer " + quote(kDepth2) + " " + quote(kDepth0) + " --mode closed");
    REQUIRE(anchor.code == 0);
    CHECK(cyc_from_json(json::parse(anchor.out).at("closed_form").at("smooth")) == CycNumber(3));

    const Run csv = run("transfer " + quote(kDepth2) + " " + quote(kDepth1) + " --format csv");
    REQUIRE(csv.code == 0);
    CHECK(csv.out.rfind("gamma,t,depth,stratum,partial_sum,smooth,closed\n", 0) == 0);
    CHECK(run("transfer 1 1 --mode sideways").code == 2);
}

TEST_CASE("output is deterministic across runs and worker counts") {
    const std::string args = "transfer " + quote(kDepth2) + " " + quote(kDepth1);
    const Run a = run(args), b = run(args), c = run(args + " --jobs 2");
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    const Run v1 = run("verify counting --p 3 --n 2 --seed 7"), v2 = run("verify counting --p 3 --n 2 --seed 7");
    CHECK(v1.code == 0);
    CHECK(v1.out == v2.out);
}

TEST_CASE("configuration file") {
    const auto path = std::filesystem::temp_directory_path() / "stf_test_cli.conf";
    {
        std::ofstream f(path);
        f << "p=3\nn=2\nformat=csv\n";
    }
    const Run r = run("--config " + path.string() + " depth '[[1, w], [w, 1]]'");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("gamma,kind,depth,", 0) == 0);
    {
        std::ofstream f(path);
        f << "p=4\n";
    }
    CHECK(run("--config " + path.string() + " depth 1").code == 2);
    std::filesystem::remove(path);
}
