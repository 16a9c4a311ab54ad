#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include "json.hpp"
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string env(const char* name) {
    const char* v = std::getenv(name);
    REQUIRE_MESSAGE(v != nullptr, name << " is not set");
    return v;
}

fs::path tmpdir() {
    static fs::path d = [] {
        fs::path p = fs::temp_directory_path() / ("ktorus_cli_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Run run(const std::string& args) {
    fs::path err = tmpdir() / "stderr.txt";
    std::string cmd = env("KTORUS_BIN") + " " + args + " 2>" + err.string();
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
}

std::string example(const std::string& name) {
    return env("KTORUS_DOCS") + "/examples/" + name + ".json";
}

std::string cfg(const std::string& name) { return "--config " + example(name); }

fs::path write_config(const std::string& name, const std::string& body) {
    fs::path p = tmpdir() / name;
    std::ofstream(p) << body;
    return p;
}

}  // namespace

TEST_CASE("bands") {
    auto r = run("bands " + cfg("clifton_pohl"));
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["command"] == "bands");
    CHECK(j["profile"]["bands"].size() == 2);
    CHECK(j["profile"]["n_bands"] == 2);
    CHECK(j["metadata"]["tool"] == "ktorus");

    auto f = run("bands " + cfg("flat"));
    CHECK(f.code == 0);
    CHECK(f.out.find("flat") != std::string::npos);

    auto b = run("bands " + cfg("bad_expr"));
    CHECK(b.code == 4);
    CHECK(b.err.find("^") != std::string::npos);
    CHECK(b.err.find("sin(2*x") != std::string::npos);

    auto l = run("bands " + cfg("ln_raw"));
    CHECK(l.code == 3);
}

TEST_CASE("strict configuration") {
    auto p = write_config("unknown.json", R"j({"profile": {"expr": "sin(2*x)", "period_hint": 3.14159}, "colour": 1})j");
    auto r = run("bands --config " + p.string());
    CHECK(r.code == 4);
    CHECK(r.err.find("colour") != std::string::npos);

    auto q = write_config("nested.json", R"j({"profile": {"expr": "sin(2*x)", "tolerances": {"tol_rot": 1}}})j");
    CHECK(run("bands --config " + q.string()).code == 4);

    auto n = write_config("negative.json", R"j({"profile": {"expr": "sin(2*x)", "tolerances": {"tol_root": -1}}})j");
    CHECK(run("bands --config " + n.string()).code == 4);

    CHECK(run("bands --config " + (tmpdir() / "missing.json").string()).code == 4);
    CHECK(run("bands").code == 4);
}

TEST_CASE("conditions") {
    auto r = run("conditions " + cfg("clifton_pohl"));
    CHECK(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["conditions"]["pass"] == true);
    auto o = run("conditions " + cfg("obstruction"));
    CHECK(o.code == 1);
    auto jo = Json::parse(o.out);
    CHECK(jo["conditions"]["obstruction"]["pass"] == false);
}

TEST_CASE("certify exit codes and determinism") {
    fs::path a = tmpdir() / "a.json", b = tmpdir() / "b.json", csv = tmpdir() / "z.csv";
    auto r1 = run("certify " + cfg("clifton_pohl") + " --samples 8 --jobs 1 --out " + a.string());
    auto r4 = run("certify " + cfg("clifton_pohl") + " --samples 8 --jobs 4 --out " + b.string());
    CHECK(r1.code == 0);
    CHECK(r4.code == 0);
    CHECK(slurp(a) == slurp(b));
    auto j = Json::parse(slurp(a));
    CHECK(j["verdict"]["overall"] == "certified_no_conjugate");
    CHECK(j["verdict"]["agreement"] == true);

    auto p = write_config("csv.json", R"j({"profile": {"expr": "sin(2*x)", "period_hint": "pi"}, "certify": {"samples": 4, "csv": ")j" + csv.string() + R"j("}})j");
    CHECK(run("certify --config " + p.string()).code == 0);
    std::string c = slurp(csv);
    CHECK(c.rfind("band,eps,side,c2,Z0,Z1", 0) == 0);
    CHECK(std::count(c.begin(), c.end(), '\n') == 1 + 2 * 2 * 4);

    auto o = run("certify " + cfg("obstruction"));
    CHECK(o.code == 1);
    auto jo = Json::parse(o.out);
    CHECK(jo["verdict"]["overall"] == "conjugate_found");
    CHECK(jo["verdict"]["evidence"]["witness"].is_object());

    CHECK(run("certify " + cfg("ln_raw")).code == 3);
    CHECK(run("certify " + cfg("bad_expr")).code == 4);
}

TEST_CASE("geodesic") {
    auto r = run("geodesic " + cfg("clifton_pohl"));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# kind=periodic") != std::string::npos);
    CHECK(r.out.find("t,x,xprime,f_of_x,kappa_of_t\n") != std::string::npos);
    auto jr = run("geodesic " + cfg("clifton_pohl") + " --jacobi --c2 0.25");
    REQUIRE(jr.code == 0);
    CHECK(jr.out.find("t,s,c,sprime,cprime,beta\n") != std::string::npos);
    CHECK(run("geodesic " + cfg("clifton_pohl") + " --c2 2").code == 3);
}

TEST_CASE("saddle") {
    auto r = run("saddle " + cfg("clifton_pohl"));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("u,v,g_uu,g_uv,g_vv\n") != std::string::npos);
    std::size_t rows = std::count(r.out.begin(), r.out.end(), '\n');
    CHECK(rows >= 21 * 21 + 1);
}

TEST_CASE("oracle") {
    auto r = run("oracle " + cfg("clifton_pohl") + " --seed 7 --samples 4");
    CHECK(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["agreement"] == true);
    CHECK(j["witnesses"] == 0);

    auto o = run("oracle " + cfg("obstruction"));
    CHECK(o.code == 1);
    auto jo = Json::parse(o.out);
    CHECK(jo["agreement"] == true);
    CHECK(jo["witnesses"].get<int>() > 0);

    auto a = run("oracle " + cfg("clifton_pohl") + " --seed 3 --samples 4 --jobs 1");
    auto b = run("oracle " + cfg("clifton_pohl") + " --seed 3 --samples 4 --jobs 3");
    CHECK(a.out == b.out);
}
