#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

std::string binary() {
    const char* p = std::getenv("SUBWAVE_BIN");
    REQUIRE(p != nullptr);
    return p;
}

int run(const std::string& args) {
    const int st = std::system((binary() + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(st);
}

fs::path sandbox() {
    const fs::path d = fs::temp_directory_path() / "subwave_cli_test";
    fs::create_directories(d);
    return d;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

const char* kBaseConfig = R"({
  "geometry": {"type": "supercell", "L": 2, "R": 0.1},
  "gamma": 0.05,
  "modulation": {"Omega": 2.0, "epsilon": 0.2, "phases": "supercell"},
  "capacitance": {"backend": "dilute"},
  "solver": {"steps": 600},
  "robustness": {"mu_list": [0.01], "sigma": 0.01, "trials": 12},
  "seed": 11
})";

}  // namespace

TEST_CASE("unknown config keys are rejected with exit code 2") {
    const auto d = sandbox();
    write_file(d / "bad.json", R"({"geometry": {"type": "supercell"}, "fancy_knob": 3})");
    CHECK(run("capmat --config " + (d / "bad.json").string()) == 2);
    write_file(d / "bad2.json", R"({"modulation": {"phases": "nonsense"}})");
    CHECK(run("capmat --config " + (d / "bad2.json").string()) == 2);
}

TEST_CASE("missing config file gives exit code 4") {
    CHECK(run("capmat --config /nonexistent/nope.json") == 4);
}

TEST_CASE("capmat writes the documented CSV header") {
    const auto d = sandbox();
    write_file(d / "cfg.json", kBaseConfig);
    CHECK(run("capmat --config " + (d / "cfg.json").string() + " --out " +
              (d / "cap").string()) == 0);
    const std::string csv = slurp(d / "cap" / "capmat.csv");
    CHECK(csv.rfind("# capacitance N=12 backend=dilute", 0) == 0);
    CHECK(fs::exists(d / "cap" / "run-manifest.json"));
}

TEST_CASE("robustness artifacts are byte-identical under a fixed seed") {
    const auto d = sandbox();
    write_file(d / "cfg.json", kBaseConfig);
    const std::string base = "robustness --config " + (d / "cfg.json").string();
    CHECK(run(base + " --out " + (d / "r1").string()) == 0);
    CHECK(run(base + " --out " + (d / "r2").string()) == 0);
    CHECK(slurp(d / "r1" / "robustness.csv") == slurp(d / "r2" / "robustness.csv"));
    CHECK(run(base + " --seed 99 --out " + (d / "r3").string()) == 0);
    CHECK(slurp(d / "r1" / "robustness.csv") != slurp(d / "r3" / "robustness.csv"));
}

TEST_CASE("manifest feeds back as a config and reproduces the run") {
    const auto d = sandbox();
    write_file(d / "cfg.json", kBaseConfig);
    CHECK(run("perturb --config " + (d / "cfg.json").string() + " --out " +
              (d / "p1").string()) == 0);
    CHECK(run("perturb --config " + (d / "p1" / "run-manifest.json").string() + " --out " +
              (d / "p2").string()) == 0);
    CHECK(slurp(d / "p1" / "perturb.json") == slurp(d / "p2" / "perturb.json"));
    CHECK(slurp(d / "p1" / "perturb.csv") == slurp(d / "p2" / "perturb.csv"));
}

TEST_CASE("ssh-demo emits one magnitude column per amplitude") {
    const auto d = sandbox();
    write_file(d / "ssh.json", R"({
      "geometry": {"type": "ssh", "n": 13, "R": 0.1},
      "gamma": 0.02,
      "modulation": {"Omega": 0.2, "epsilon": 0.0, "phases": "ssh"},
      "solver": {"steps": 2500},
      "ssh_demo": {"epsilons": [0.0, 0.1]}
    })");
    CHECK(run("ssh-demo --config " + (d / "ssh.json").string() + " --out " +
              (d / "ssh").string()) == 0);
    const std::string csv = slurp(d / "ssh" / "ssh-demo.csv");
    CHECK(csv.find("abs_u_eps=0.1") != std::string::npos);
    // 13 data rows
    int rows = 0;
    for (char c : csv)
        if (c == '\n') ++rows;
    CHECK(rows >= 13);
}
