#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rtq/cli.hpp"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("rtq_cli_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string write_file(const fs::path& dir, const std::string& name,
                       const std::string& content) {
    const fs::path p = dir / name;
    std::ofstream f(p, std::ios::binary);
    f << content;
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = rtq::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
    std::size_t n = 0, pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

const char* kMinimalConfig = R"({
  "policy": "fcfs",
  "arrivals": 2000,
  "rate": 2.0,
  "deadline": {"family": "exponential", "mean": 4.0},
  "seed": 7
})";

} // namespace

TEST_CASE("simulate prints a summary with conserved counts") {
    const fs::path dir = fresh_dir("simulate");
    const std::string cfg = write_file(dir, "cfg.json", kMinimalConfig);
    const CliResult res = run_cli({"simulate", "--config", cfg});
    REQUIRE(res.code == 0);
    CHECK(res.out.find("policy: fcfs") != std::string::npos);
    CHECK(res.out.find("arrivals: 2000") != std::string::npos);
    CHECK(res.out.find("loss_ratio:") != std::string::npos);
    CHECK(res.out.find("busy_time:") != std::string::npos);
}

TEST_CASE("unknown policy exits with code 2 and lists the valid names") {
    const fs::path dir = fresh_dir("badpolicy");
    const std::string cfg = write_file(
        dir, "cfg.json",
        R"({"policy": "sjf", "deadline": {"family": "exponential", "mean": 2}})");
    const CliResult res = run_cli({"simulate", "--config", cfg});
    CHECK(res.code == 2);
    CHECK(res.err.find("fcfs-edt") != std::string::npos);
    CHECK(res.err.find("edf-eac") != std::string::npos);
}

TEST_CASE("config diagnostics carry the offending field or position") {
    const fs::path dir = fresh_dir("badcfg");
    SECTION("syntactically broken json") {
        const std::string cfg = write_file(dir, "broken.json", "{ \"policy\": ");
        const CliResult res = run_cli({"simulate", "--config", cfg});
        CHECK(res.code == 1);
        CHECK(res.err.find("parse error") != std::string::npos);
    }
    SECTION("missing required field") {
        const std::string cfg =
            write_file(dir, "nodl.json", R"({"policy": "fcfs"})");
        const CliResult res = run_cli({"simulate", "--config", cfg});
        CHECK(res.code == 1);
        CHECK(res.err.find("deadline") != std::string::npos);
    }
    SECTION("bad distribution family") {
        const std::string cfg = write_file(
            dir, "badfam.json",
            R"({"policy": "fcfs", "deadline": {"family": "zeta", "mean": 1}})");
        const CliResult res = run_cli({"simulate", "--config", cfg});
        CHECK(res.code == 1);
        CHECK(res.err.find("zeta") != std::string::npos);
    }
    SECTION("missing config file") {
        const CliResult res = run_cli({"simulate", "--config", "/nonexistent.json"});
        CHECK(res.code == 1);
    }
}

TEST_CASE("a simulate manifest reproduces the identical run") {
    const fs::path dir = fresh_dir("manifest");
    const std::string cfg = write_file(dir, "cfg.json", kMinimalConfig);
    const CliResult first =
        run_cli({"simulate", "--config", cfg, "--out", (dir / "o").string()});
    REQUIRE(first.code == 0);
    const fs::path manifest = dir / "o" / "simulate_manifest.json";
    REQUIRE(fs::exists(manifest));
    const CliResult second = run_cli({"simulate", "--config", manifest.string()});
    REQUIRE(second.code == 0);
    CHECK(first.out == second.out);
    CHECK(fs::exists(dir / "o" / "disposals.csv"));
}

TEST_CASE("reproduce writes csv and svg for a counterexample figure") {
    const fs::path dir = fresh_dir("fig1");
    const CliResult res =
        run_cli({"reproduce", "--figure", "fig1", "--out", dir.string(),
                 "--arrivals", "2000", "--seeds", "2", "--rates", "0.5,2,4"});
    REQUIRE(res.code == 0);
    REQUIRE(fs::exists(dir / "fig1.csv"));
    REQUIRE(fs::exists(dir / "fig1.svg"));
    REQUIRE(fs::exists(dir / "reproduce_manifest.json"));

    const std::string csv = slurp(dir / "fig1.csv");
    CHECK(csv.rfind("scenario,policy,family,rate,mean_deadline,seed,loss,ci\n", 0) == 0);
    CHECK(csv.find("edf") != std::string::npos);
    CHECK(csv.find("fcfs-eac") != std::string::npos);

    const std::string svg = slurp(dir / "fig1.svg");
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(count_occurrences(svg, "<polyline") == 2); // one per policy curve
    CHECK(svg.find("\xce\xbb/\xce\xbc") != std::string::npos); // lambda/mu label
    CHECK(svg.find("loss ratio") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("reproduce emits ratio curves for a conjecture figure") {
    const fs::path dir = fresh_dir("fig5");
    const CliResult res =
        run_cli({"reproduce", "--figure", "fig5", "--out", dir.string(),
                 "--arrivals", "2000", "--seeds", "2", "--rates", "1,2",
                 "--means", "2"});
    REQUIRE(res.code == 0);
    const std::string svg = slurp(dir / "fig5.svg");
    // one curve per (family, mean): four families at one mean
    CHECK(count_occurrences(svg, "<polyline") == 4);
    CHECK(slurp(dir / "fig5.csv").find("conj2") != std::string::npos);
}

TEST_CASE("reproduce rejects unknown figures") {
    const CliResult res = run_cli({"reproduce", "--figure", "fig3"});
    CHECK(res.code == 1);
    CHECK(res.err.find("fig3") != std::string::npos);
}

TEST_CASE("byte-identical csv output on re-run with the same options") {
    const fs::path a = fresh_dir("det_a");
    const fs::path b = fresh_dir("det_b");
    const std::vector<std::string> base = {"reproduce", "--figure", "fig6",
                                           "--arrivals", "2500", "--seeds", "2",
                                           "--rates", "0.5,2,4"};
    auto with_out = [&](const fs::path& d) {
        std::vector<std::string> v = base;
        v.push_back("--out");
        v.push_back(d.string());
        return v;
    };
    REQUIRE(run_cli(with_out(a)).code == 0);
    REQUIRE(run_cli(with_out(b)).code == 0);
    CHECK(slurp(a / "fig6.csv") == slurp(b / "fig6.csv"));
    CHECK(slurp(a / "fig6.svg") == slurp(b / "fig6.svg"));
}

TEST_CASE("verify runs the harness and writes the verdict table") {
    const fs::path dir = fresh_dir("verify");
    const std::string cfg = write_file(dir, "verify.json", R"({
      "rates": [1, 4],
      "families": ["exponential"],
      "mean_deadlines": [2],
      "arrivals": 4000,
      "seeds": 2,
      "per_path_arrivals": 1500,
      "per_path_seeds": 1,
      "det_eq_arrivals": 1500,
      "det_eq_traces": 4
    })");
    const CliResult res = run_cli({"verify", "--config", cfg, "--out",
                                   (dir / "o").string()});
    REQUIRE(res.code == 0);
    CHECK(res.out.find("edf_edt_leq_edf [per_path]: PASS") != std::string::npos);
    CHECK(res.out.find("det_fcfs_eq_edf [equality]: PASS") != std::string::npos);
    const std::string csv = slurp(dir / "o" / "verify_verdicts.csv");
    CHECK(csv.rfind("relation,kind,verdict,evidence_seed\n", 0) == 0);
    CHECK(csv.find("fcfs_edt_eq_fcfs_eac") != std::string::npos);
    CHECK(csv.find("edf_eac_leq_fcfs_eac") != std::string::npos);
}

TEST_CASE("help is printed without an error status") {
    const CliResult res = run_cli({"--help"});
    CHECK(res.code == 0);
    CHECK(res.out.find("simulate") != std::string::npos);
    CHECK(res.out.find("reproduce") != std::string::npos);
    CHECK(res.out.find("verify") != std::string::npos);
}
