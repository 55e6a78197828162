#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bslms/io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string output;
};

fs::path tmp_dir(const std::string& name) {
    const fs::path dir = fs::path(BSLMS_TEST_TMP) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Result run(const std::string& args) {
    const std::string cmd = std::string("\"") + BSLMS_CLI_PATH + "\" " + args + " 2>&1";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("generate is deterministic") {
    const auto dir = tmp_dir("gen");
    write(dir / "g.json", R"({"model": {"length": 800, "p1": 0.99, "p2": 0.91, "sigma_s2": 1, "count": 1}, "run": {"seed": 7}})");
    REQUIRE(run("generate --config " + q(dir / "g.json") + " --out " + q(dir / "a.csv")).code == 0);
    REQUIRE(run("generate --config " + q(dir / "g.json") + " --out " + q(dir / "b.csv")).code == 0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(fs::exists(dir / "a.csv.manifest.json"));
    REQUIRE(run("generate --config " + q(dir / "g.json") + " --seed 8 --out " + q(dir / "c.csv")).code == 0);
    CHECK(slurp(dir / "a.csv") != slurp(dir / "c.csv"));
}

TEST_CASE("generate writes one column per system") {
    const auto dir = tmp_dir("shape");
    write(dir / "g.ini", "[model]\nlength = 800\np1 = 0.99\np2 = 0.91\nsigma_s2 = 1\ncount = 100\n");
    REQUIRE(run("generate --config " + q(dir / "g.ini") + " --out " + q(dir / "s.csv")).code == 0);
    const auto cols = bslms::io::read_columns(dir / "s.csv");
    REQUIRE(cols.size() == 100);
    for (const auto& c : cols) CHECK(c.size() == 800);
}

TEST_CASE("invalid probability is a config error naming the field") {
    const auto dir = tmp_dir("bad");
    write(dir / "g.json", R"({"model": {"length": 800, "p1": 1.2, "p2": 0.91}})");
    const auto r = run("generate --config " + q(dir / "g.json") + " --out " + q(dir / "s.csv"));
    CHECK(r.code == 2);
    CHECK(r.output.find("p1") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "s.csv"));
}

TEST_CASE("malformed JSON reports line and column") {
    const auto dir = tmp_dir("malformed");
    write(dir / "t.json", "{\"model\":\n  {\"length\": 800,,}}");
    const auto r = run("theory --config " + q(dir / "t.json"));
    CHECK(r.code == 2);
    CHECK(r.output.find("line 2") != std::string::npos);
    CHECK(r.output.find("column") != std::string::npos);
}

TEST_CASE("theory reports the optimal group size") {
    const auto dir = tmp_dir("popt");
    const std::array<std::pair<std::string, std::size_t>, 3> cases{{{"0.98, \"p2\": 0.82", 3},
                                                                      {"0.99, \"p2\": 0.91", 4},
                                                                      {"0.995, \"p2\": 0.955", 5}}};
    for (const auto& [probs, expected] : cases) {
        write(dir / "t.json", R"({"model": {"length": 800, "p1": )" + probs +
                                  R"(}, "filter": {"mu_scale": 0.4, "alpha": 1}, "theory": {"p_opt": true}})");
        const auto r = run("theory --config " + q(dir / "t.json"));
        REQUIRE(r.code == 0);
        const auto j = Json::parse(r.output);
        CHECK(j["p_opt"].get<std::size_t>() == expected);
        CHECK(j["ams_by_p"].size() == 50);
    }
}

TEST_CASE("kappa = 0 dump gives the LMS floor") {
    const auto dir = tmp_dir("kappa0");
    write(dir / "g.json", R"({"model": {"length": 800, "p1": 0.99, "p2": 0.91, "count": 2}})");
    REQUIRE(run("generate --config " + q(dir / "g.json") + " --out " + q(dir / "s.csv")).code == 0);
    write(dir / "t.json", R"({"filter": {"mu_scale": 0.5, "kappa": 0, "group_size": 4}, "theory": {"system_file": )" +
                              Json((dir / "s.csv").string()).dump() + R"(, "sigma_v2": 0.01}})");
    const auto r = run("theory --config " + q(dir / "t.json") + " --out " + q(dir / "t_out.json"));
    REQUIRE(r.code == 0);
    const auto j = Json::parse(slurp(dir / "t_out.json"));
    REQUIRE(j["systems"].size() == 2);
    const double mu = 0.5 / 800;
    const double delta_l = 2.0 - 802.0 * mu;
    for (const auto& s : j["systems"]) CHECK(s["d_inf"].get<double>() == doctest::Approx(mu * 0.01 * 800 / delta_l).epsilon(1e-12));
    CHECK(fs::exists(dir / "t_out.json.manifest.json"));
}

TEST_CASE("strict mode turns validity warnings into exit 4") {
    const auto dir = tmp_dir("strict");
    // few active groups: the small-P regime assumption is flagged
    write(dir / "t.json", R"({"model": {"length": 100, "p1": 0.99, "p2": 0.91}, "filter": {"group_size": 2}})");
    const auto lax = run("theory --config " + q(dir / "t.json"));
    CHECK(lax.code == 0);
    CHECK(lax.output.find("assumption_small_p") != std::string::npos);
    CHECK(run("theory --strict --config " + q(dir / "t.json")).code == 4);
}

TEST_CASE("desk experiment runs and replays bit-identically from its manifest") {
    const auto dir = tmp_dir("replay");
    write(dir / "e.json", R"({
        "model": {"length": 64, "p1": 0.95, "p2": 0.8},
        "filter": {"mu_scale": 0.8},
        "experiment": {"systems": 2, "trials": 2, "iterations": 800, "p_list": "1,4",
                       "kappa_grid": "1e-7,1e-5,1e-3"},
        "run": {"seed": 5}})");
    const auto first = run("experiment sweep-kappa --config " + q(dir / "e.json") + " --out " + q(dir / "a") + " --threads 3");
    REQUIRE(first.code == 0);
    REQUIRE(fs::exists(dir / "a" / "sweep_kappa_P1.csv"));
    REQUIRE(fs::exists(dir / "a" / "sweep_kappa_P4.csv"));
    CHECK(fs::exists(dir / "a" / "sweep_kappa_P4.csv.gp"));
    const auto manifest = Json::parse(slurp(dir / "a" / "manifest.json"));
    CHECK(manifest["results"]["status"] == "ok");
    CHECK(manifest["master_seed"] == 5);

    const auto again = run("experiment sweep-kappa --config " + q(dir / "a" / "manifest.json") + " --out " + q(dir / "b") + " --threads 1");
    REQUIRE(again.code == 0);
    CHECK(slurp(dir / "a" / "sweep_kappa_P1.csv") == slurp(dir / "b" / "sweep_kappa_P1.csv"));
    CHECK(slurp(dir / "a" / "sweep_kappa_P4.csv") == slurp(dir / "b" / "sweep_kappa_P4.csv"));

    const auto cols = bslms::io::read_columns(dir / "a" / "sweep_kappa_P4.csv");
    REQUIRE(cols.size() == 3);
    CHECK(cols[0].size() == 3);
}

TEST_CASE("divergence exits 3 and keeps partial output") {
    const auto dir = tmp_dir("diverge");
    std::string csv = "s0\n1e200\n";
    for (int i = 1; i < 8; ++i) csv += "0\n";
    write(dir / "sys.csv", csv);
    write(dir / "e.json", R"({"filter": {"mu": 0.05}, "experiment": {"system_file": )" + Json((dir / "sys.csv").string()).dump() +
                              R"(, "snr_db": "inf", "iterations": 20, "trials": 1, "p_list": "1", "kappa_grid": "1e-6"}})");
    const auto r = run("experiment sweep-kappa --config " + q(dir / "e.json") + " --out " + q(dir / "o"));
    CHECK(r.code == 3);
    CHECK(r.output.find("seed") != std::string::npos);
    CHECK(fs::exists(dir / "o" / "sweep_kappa_P1.csv.partial"));
    CHECK_FALSE(fs::exists(dir / "o" / "sweep_kappa_P1.csv"));
    const auto manifest = Json::parse(slurp(dir / "o" / "manifest.json"));
    CHECK(manifest["results"]["status"] == "diverged");
}

TEST_CASE("usage errors") {
    CHECK(run("frobnicate").code == 2);
    CHECK(run("experiment nonsense").code == 2);
    CHECK(run("theory --profile huge").code == 2);
    CHECK(run("--version").output.find('.') != std::string::npos);
}
