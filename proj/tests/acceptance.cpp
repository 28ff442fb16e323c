#include <catch2/catch.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rtq/appendix.hpp"
#include "rtq/cli.hpp"
#include "rtq/experiments.hpp"

using namespace rtq;

namespace {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void report(const char* id, const char* what, bool pass, const std::string& detail) {
    std::cout << "[ACCEPTANCE] " << id << ' ' << what << ": "
              << (pass ? "PASS" : "FAIL") << " (" << detail << ")" << std::endl;
}

std::string seconds_str(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f s", s);
    return buf;
}

} // namespace

TEST_CASE("criterion 1: per-path dominance suite") {
    Stopwatch sw;
    PerPathOptions opt; // 4 rates x 5 deadline families x 2 services x 5 seeds
    opt.arrivals = 10000;
    opt.master_seed = 118001;
    const PerPathReport rep = run_per_path_suite(opt);
    const double elapsed = sw.seconds();

    std::ostringstream detail;
    detail << rep.traces << " coupled traces, " << rep.violations.size()
           << " violations, " << seconds_str(elapsed);
    for (const PerPathViolation& v : rep.violations)
        detail << "; " << v.relation << " seed=" << v.trace_seed
               << " minimal_prefix=" << v.shrunk_length;
    report("C1", "per-path dominance of guarded policies", rep.all_pass(),
           detail.str());

    CHECK(rep.traces >= 200);
    CHECK(elapsed < 300.0);
    REQUIRE(rep.all_pass());
}

TEST_CASE("criterion 2: deterministic-deadline equivalences") {
    Stopwatch sw;
    DetEqOptions opt;
    opt.traces = 50;
    opt.arrivals = 10000;
    opt.master_seed = 118002;
    const DetEqReport rep = deterministic_equivalences(opt);

    std::ostringstream detail;
    detail << rep.traces << " coupled traces per pair, "
           << rep.violations.size() << " violations, " << seconds_str(sw.seconds());
    report("C2", "deterministic-deadline equivalences (facts 1-4)", rep.all_pass(),
           detail.str());
    REQUIRE(rep.all_pass());
}

TEST_CASE("criterion 3: stochastic relations at desk scale") {
    Stopwatch sw;
    ScenarioConfig cfg; // rates {0.5,1,2,4}, means {2,16}, 4 families
    cfg.arrivals = 100000;
    cfg.seeds = 10;
    cfg.master_seed = 118003;
    const StochasticReport rep = run_stochastic_suite(cfg);
    const double elapsed = sw.seconds();

    bool all_ok = true;
    for (const StochasticRelation& rel : stochastic_relations()) {
        const bool reversed = rep.reversal_certified(rel.name);
        all_ok &= !reversed;
        double worst_lower = -1e300;
        for (const StochasticCell& c : rep.cells)
            if (c.relation == rel.name) worst_lower = std::max(worst_lower, c.cmp.lower());
        std::ostringstream detail;
        detail << "worst CI lower bound " << worst_lower;
        report("C3", ("no certified reversal: " + rel.name).c_str(), !reversed,
               detail.str());
    }
    std::cout << "[ACCEPTANCE] C3 total wall time: " << seconds_str(elapsed)
              << std::endl;
    for (const StochasticRelation& rel : stochastic_relations())
        REQUIRE_FALSE(rep.reversal_certified(rel.name));
    REQUIRE(all_ok);
}

TEST_CASE("criterion 4: counter-example crossings") {
    for (int id = 1; id <= 4; ++id) {
        Stopwatch sw;
        CeOptions opt; // 10 rates in (0,4], 1e5 arrivals x 10 seeds
        opt.master_seed = 118004;
        const CeResult res = reproduce_counterexample(id, opt);
        const double elapsed = sw.seconds();

        std::ostringstream detail;
        if (res.crossing)
            detail << "crossing in [" << res.crossing->rate_lo << ", "
                   << res.crossing->rate_hi << "], ";
        else
            detail << "no crossing found, ";
        detail << seconds_str(elapsed);
        const std::string what = "counter-example " + std::to_string(id) + " (" +
                                 res.def.policy_a.name() + "@" +
                                 family_name(res.def.deadline_family_a) + " vs " +
                                 res.def.policy_b.name() + "@" +
                                 family_name(res.def.deadline_family_b) +
                                 ", mean " + std::to_string((int)res.def.mean_deadline) + ")";
        report("C4", what.c_str(), res.crossing.has_value(), detail.str());
        CHECK(elapsed < 900.0);
        REQUIRE(res.crossing.has_value());
    }
}

TEST_CASE("criterion 5: saturation anchor") {
    Stopwatch sw;
    // lambda/mu = 2 with an effectively infinite deadline: the server stays
    // saturated, throughput equals mu, so the loss ratio tends to 1 - mu/lambda.
    const Trace t = generate_trace(1000000, DistributionSpec::exponential(0.5),
                                   DistributionSpec::exponential(1.0),
                                   DistributionSpec::deterministic(1000.0), 118005);
    const SimOutcome out = run(t, {Discipline::Fcfs, Guard::None});
    const LossEstimate est = loss_estimate(out, 100000, 30);

    std::ostringstream detail;
    detail << "loss " << est.point << " +/- " << est.ci_half_width << ", expected "
           << "0.5 +/- 0.02, " << seconds_str(sw.seconds());
    const bool pass = est.point > 0.48 && est.point < 0.52;
    report("C5", "saturated fcfs anchor (1e6 arrivals)", pass, detail.str());
    // The server never idles once saturated; delivered work tracks the horizon.
    CHECK(out.busy_time / t.jobs.back().arrival > 0.98);
    REQUIRE(pass);
}

TEST_CASE("criterion 6: appendix dominance verification") {
    Stopwatch sw;
    RandomStream gen(118006);
    int checked = 0;
    bool all_ok = true;
    double worst_sigma = 0.0, worst_margin = 0.0;
    while (checked < 20) {
        AppendixScenario s;
        s.mu = 0.6 + gen.next_unit();
        s.tau = 0.2 + 1.3 * gen.next_unit();
        s.d = s.tau + 0.3 + 1.7 * gen.next_unit();
        s.tau_star = 0.2 + 1.3 * gen.next_unit();
        const double shortfall = s.tau + s.tau_star - s.d;
        s.d_star = (shortfall > 0.0 ? shortfall : 0.0) + 0.2 + 1.3 * gen.next_unit();
        s.d_prime = 0.2 + gen.next_unit();
        s.validate();
        if (event_probability(s) < 0.03) continue; // keep the oracle affordable
        AppendixCheckOptions opt;
        opt.grid_points = 1000;
        opt.mc_accepted = 1000000;
        opt.seed = mix_seed(118006, static_cast<std::uint64_t>(checked));
        const AppendixReport rep = appendix_dominance_check(s, opt);
        all_ok &= rep.ok();
        worst_sigma = std::max({worst_sigma, rep.mc_mean_sigma_x,
                                rep.mc_mean_sigma_xprime});
        worst_margin = std::min(worst_margin, rep.min_dominance_margin);
        CHECK(rep.cdfs_valid);
        CHECK(rep.dominance_holds);
        CHECK(rep.sufficient_condition_holds);
        CHECK(rep.mc_mean_sigma_x <= 3.0);
        CHECK(rep.mc_mean_sigma_xprime <= 3.0);
        CHECK(rep.mc_dkw_ok);
        ++checked;
    }
    std::ostringstream detail;
    detail << checked << " scenarios, worst mean deviation " << worst_sigma
           << " sigma, min dominance margin " << worst_margin << ", "
           << seconds_str(sw.seconds());
    report("C6", "appendix closed forms vs rejection oracle", all_ok, detail.str());
    REQUIRE(all_ok);
}

TEST_CASE("criterion 7: engine oracle fixtures") {
    bool ok = true;

    // Hand-simulated three-job trace.
    const std::vector<TraceJob> hand = {{0.0, 4.0, 10.0}, {1.0, 2.0, 3.0},
                                        {2.0, 2.0, 10.0}};
    const SimOutcome fcfs = run(std::span<const TraceJob>(hand),
                                {Discipline::Fcfs, Guard::None});
    ok &= fcfs.loss_ratio == Approx(1.0 / 3.0).epsilon(1e-15);
    ok &= fcfs.disposal_log[0].epoch == 4.0 &&
          fcfs.disposal_log[1].status == JobStatus::Expired &&
          fcfs.disposal_log[1].epoch == 4.0 && fcfs.disposal_log[2].epoch == 6.0;
    const SimOutcome edf = run(std::span<const TraceJob>(hand),
                               {Discipline::Edf, Guard::None});
    ok &= edf.loss_ratio == 0.0 && edf.disposal_log[1].epoch == 3.0 &&
          edf.disposal_log[0].epoch == 6.0 && edf.disposal_log[2].epoch == 8.0;

    // Admission and discard examples.
    {
        std::vector<Job> jobs(3);
        jobs[0] = {0, 0.0, 2.0, 5.0, 2.0, 0.0, JobStatus::Waiting};
        jobs[1] = {1, 0.0, 2.0, 6.0, 2.0, 0.0, JobStatus::Waiting};
        jobs[2] = {2, 0.0, 1.0, 3.0, 1.0, 0.0, JobStatus::Waiting};
        ReadyQueue q(Discipline::Edf, jobs);
        q.insert_waiting(0);
        q.insert_waiting(1);
        ok &= admit_edf_eac(q, jobs[2], 0.0);

        jobs[1].deadline = 5.5;
        jobs[2].service = jobs[2].remaining = 2.0;
        ReadyQueue q2(Discipline::Edf, jobs);
        q2.insert_waiting(0);
        q2.insert_waiting(1);
        ok &= !admit_edf_eac(q2, jobs[2], 0.0);

        std::vector<Job> empty;
        ReadyQueue q3(Discipline::Edf, empty);
        Job infeasible{0, 0.0, 4.0, 3.0, 4.0, 0.0, JobStatus::Waiting};
        ok &= !admit_edf_eac(q3, infeasible, 0.0);
    }
    {
        std::vector<Job> jobs(2);
        jobs[0] = {0, 0.0, 5.0, 100.0, 5.0, 0.0, JobStatus::Waiting};
        jobs[1] = {1, 0.0, 2.0, 6.0, 2.0, 0.0, JobStatus::Waiting};
        ReadyQueue q(Discipline::Fcfs, jobs);
        q.insert_waiting(0);
        ok &= !admit_fcfs_eac(q, jobs[1], 0.0);
        jobs[1].deadline = 7.0;
        ok &= admit_fcfs_eac(q, jobs[1], 0.0); // boundary completion counts

        std::vector<Job> empty;
        ReadyQueue qe(Discipline::Fcfs, empty);
        Job easy{0, 0.0, 2.0, 3.0, 2.0, 0.0, JobStatus::Waiting};
        ok &= admit_fcfs_eac(qe, easy, 0.0);
    }
    {
        Job j{0, 0.0, 4.0, 3.0, 4.0, 0.0, JobStatus::Waiting};
        ok &= !edt_serve_ok(j, 0.0);
        j = {0, 0.0, 3.0, 3.0, 1.0, 0.0, JobStatus::Waiting};
        ok &= edt_serve_ok(j, 2.0);
        j = {0, 0.0, 4.0, 6.0, 2.0, 0.0, JobStatus::Waiting};
        ok &= !edt_serve_ok(j, 5.0); // re-grant after preemption
    }

    report("C7", "hand-simulation and admission fixtures", ok, "exact values");
    REQUIRE(ok);
}

TEST_CASE("criterion 8: byte-identical outputs on re-run") {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "rtq_accept_c8";
    fs::remove_all(base);
    fs::create_directories(base);

    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };

    bool ok = true;
    for (const char* sub : {"a", "b"}) {
        std::ostringstream out, err;
        const int code = rtq::cli::run(
            {"reproduce", "--figure", "fig7", "--out", (base / sub).string(),
             "--arrivals", "3000", "--seeds", "2", "--rates", "0.5,2,4"},
            out, err);
        ok &= code == 0;
    }
    ok &= slurp(base / "a" / "fig7.csv") == slurp(base / "b" / "fig7.csv");
    ok &= !slurp(base / "a" / "fig7.csv").empty();
    ok &= slurp(base / "a" / "fig7.svg") == slurp(base / "b" / "fig7.svg");

    // simulate: run from the echoed manifest and compare the disposal logs
    {
        std::ofstream cfg(base / "sim.json");
        cfg << R"({"policy":"edf-edt","arrivals":5000,"rate":2.0,)"
            << R"("deadline":{"family":"lognormal","mean":8.0,"cv":1.0},"seed":5})";
    }
    for (const char* sub : {"s1", "s2"}) {
        std::ostringstream out, err;
        const std::string cfg_path = sub == std::string("s1")
                                         ? (base / "sim.json").string()
                                         : (base / "s1" / "simulate_manifest.json").string();
        const int code = rtq::cli::run(
            {"simulate", "--config", cfg_path, "--out", (base / sub).string()},
            out, err);
        ok &= code == 0;
    }
    ok &= slurp(base / "s1" / "disposals.csv") == slurp(base / "s2" / "disposals.csv");
    ok &= !slurp(base / "s1" / "disposals.csv").empty();

    report("C8", "determinism of csv outputs", ok, "reproduce + simulate re-runs");
    REQUIRE(ok);
}
