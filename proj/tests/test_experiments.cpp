#include <catch2/catch.hpp>

#include <algorithm>

#include "rtq/experiments.hpp"

using namespace rtq;

namespace {

Trace random_trace(std::size_t n, double rate, std::uint64_t seed,
                   const DistributionSpec& deadline) {
    return generate_trace(n, DistributionSpec::exponential(1.0 / rate),
                          DistributionSpec::exponential(1.0), deadline, seed);
}

// Mutant early-discard rule: strict inequality, so a job whose completion
// would land exactly on its deadline is wrongly discarded.
struct BrokenEdt {
    bool operator()(const Job& j, double now) const {
        return now + j.remaining < j.deadline;
    }
};

} // namespace

TEST_CASE("per-path relations hold on healthy coupled runs") {
    for (int k = 0; k < 6; ++k) {
        const Trace t = random_trace(3000, 0.5 + 0.7 * k, 4000 + k,
                                     DistributionSpec::exponential(3.0));
        const auto outs = run_coupled(t, canonical_policies());
        CHECK(per_path_violations(outs).empty());
    }
}

TEST_CASE("a broken early-discard boundary breaks the edt/eac equality") {
    // Service 2 then service 3 against absolute deadlines 10 and 5: the second
    // job finishes exactly at its deadline, which the mutant discards.
    const std::vector<TraceJob> trace = {{0.0, 2.0, 10.0}, {1.0, 3.0, 4.0}};
    NullObserver obs;

    std::vector<SimOutcome> outs;
    for (const PolicySpec& p : canonical_policies()) {
        if (p.guard == Guard::Edt)
            outs.push_back(run_observed(std::span<const TraceJob>(trace), p, obs,
                                        BrokenEdt{}));
        else
            outs.push_back(run(std::span<const TraceJob>(trace), p));
    }
    const auto bad = per_path_violations(outs);
    CHECK(std::find(bad.begin(), bad.end(), "fcfs_edt_eq_fcfs_eac") != bad.end());

    // The healthy engine keeps the equality on the same trace.
    const auto healthy = run_coupled(std::span<const TraceJob>(trace),
                                     canonical_policies());
    CHECK(per_path_violations(healthy).empty());
    CHECK(healthy[kFcfsEdt].completed == 2);
}

TEST_CASE("prefix bisection returns a confirmed violating length") {
    const auto violated = [](std::size_t len) { return len >= 37; };
    CHECK(shrink_violating_prefix(100, violated) == 37);
    CHECK(shrink_violating_prefix(37, violated) == 37);
    const auto always = [](std::size_t) { return true; };
    CHECK(shrink_violating_prefix(50, always) == 1);
}

TEST_CASE("deterministic equivalences pass on coupled traces") {
    DetEqOptions opt;
    opt.traces = 8;
    opt.arrivals = 2000;
    opt.master_seed = 5150;
    const DetEqReport rep = deterministic_equivalences(opt);
    CHECK(rep.all_pass());
    REQUIRE(rep.rows.size() == 4);
    for (const VerdictRow& r : rep.rows) {
        CHECK(r.kind == "equality");
        CHECK(r.verdict == "PASS");
    }
}

TEST_CASE("with random deadlines fcfs and edf genuinely differ") {
    bool differ = false;
    for (int k = 0; k < 10 && !differ; ++k) {
        const Trace t = random_trace(2000, 2.0, 6000 + k,
                                     DistributionSpec::exponential(4.0));
        const SimOutcome a = run(t, {Discipline::Fcfs, Guard::None});
        const SimOutcome b = run(t, {Discipline::Edf, Guard::None});
        differ = !same_disposal_log(a, b);
    }
    CHECK(differ);
}

TEST_CASE("per-path suite passes at a reduced scale") {
    PerPathOptions opt;
    opt.rates = {1.0, 4.0};
    opt.deadline_families = {Family::Exponential, Family::Deterministic};
    opt.services = {DistributionSpec::exponential(1.0)};
    opt.arrivals = 2000;
    opt.seeds_per_combo = 2;
    const PerPathReport rep = run_per_path_suite(opt);
    CHECK(rep.traces == 8);
    CHECK(rep.all_pass());
    REQUIRE(rep.rows.size() == 5);
    for (const VerdictRow& r : rep.rows) CHECK(r.verdict == "PASS");
}

TEST_CASE("stochastic suite emits one verdict per relation") {
    ScenarioConfig cfg;
    cfg.rates = {1.0, 4.0};
    cfg.mean_deadlines = {2.0};
    cfg.deadline_families = {Family::Exponential, Family::TwoPoint};
    cfg.arrivals = 4000;
    cfg.seeds = 3;
    const StochasticReport rep = run_stochastic_suite(cfg);
    REQUIRE(rep.rows.size() == stochastic_relations().size());
    for (const VerdictRow& r : rep.rows) {
        INFO(r.relation);
        CHECK((r.verdict == "PASS" || r.verdict == "WARN"));
    }
    // every relation evaluated on every cell
    CHECK(rep.cells.size() == rep.rows.size() * 4);
    CHECK_FALSE(rep.data.empty());
}

TEST_CASE("a one-point counterexample grid reports estimates but no crossing") {
    CeOptions opt;
    opt.rates = {2.0};
    opt.arrivals = 2000;
    opt.seeds = 2;
    const CeResult res = reproduce_counterexample(1, opt);
    REQUIRE(res.points.size() == 1);
    CHECK(res.points[0].a.point >= 0.0);
    CHECK(res.points[0].b.point >= 0.0);
    CHECK_FALSE(res.crossing.has_value());
    CHECK_THROWS_AS(reproduce_counterexample(9, opt), std::invalid_argument);
}

TEST_CASE("conjecture sweep against the same deterministic family is identity") {
    ScenarioConfig cfg;
    cfg.rates = {1.0};
    cfg.mean_deadlines = {2.0};
    cfg.deadline_families = {Family::Deterministic};
    cfg.arrivals = 3000;
    cfg.seeds = 2;
    const ConjectureSweep sweep = conjecture_sweep(2, cfg);
    REQUIRE(sweep.rows.size() == 1);
    CHECK(sweep.rows[0].ratio == 1.0);
    CHECK(sweep.rows[0].diff.mean_diff == 0.0);
}

TEST_CASE("conjecture ids outside 1..3 are rejected") {
    ScenarioConfig cfg;
    CHECK_THROWS_AS(conjecture_sweep(0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(conjecture_sweep(4, cfg), std::invalid_argument);
}

TEST_CASE("the combined dominance harness merges both verdict families") {
    DominanceOptions opt;
    opt.per_path.rates = {1.0, 4.0};
    opt.per_path.deadline_families = {Family::Exponential};
    opt.per_path.services = {DistributionSpec::exponential(1.0)};
    opt.per_path.arrivals = 1500;
    opt.per_path.seeds_per_combo = 1;
    opt.stochastic.rates = {2.0};
    opt.stochastic.mean_deadlines = {2.0};
    opt.stochastic.deadline_families = {Family::Exponential};
    opt.stochastic.arrivals = 3000;
    opt.stochastic.seeds = 2;
    const DominanceReport rep = verify_dominance(opt);
    CHECK(rep.rows().size() == 5 + stochastic_relations().size());
    CHECK(rep.all_proven_pass());
}

TEST_CASE("sweep data is identical whatever the worker count") {
    ScenarioConfig cfg;
    cfg.rates = {1.0, 4.0};
    cfg.mean_deadlines = {2.0};
    cfg.deadline_families = {Family::Exponential, Family::Uniform};
    cfg.arrivals = 2000;
    cfg.seeds = 3;
    cfg.workers = 1;
    const StochasticReport serial = run_stochastic_suite(cfg);
    cfg.workers = 4;
    const StochasticReport threaded = run_stochastic_suite(cfg);
    REQUIRE(serial.data.size() == threaded.data.size());
    for (std::size_t i = 0; i < serial.data.size(); ++i) {
        REQUIRE(serial.data[i].policy == threaded.data[i].policy);
        REQUIRE(serial.data[i].seed == threaded.data[i].seed);
        REQUIRE(serial.data[i].loss == threaded.data[i].loss);
    }
}

TEST_CASE("verdict rows gate the verify exit status by kind") {
    CHECK(verdict_gates_exit({"edf_edt_leq_edf", "per_path", "FAIL", 0}));
    CHECK(verdict_gates_exit({"edf_edt_leq_edf_eac", "stochastic", "FAIL", 0}));
    CHECK(verdict_gates_exit({"det_fcfs_eq_edf", "equality", "FAIL", 0}));
    CHECK_FALSE(verdict_gates_exit({"edf_eac_leq_fcfs_eac", "conjecture", "FAIL", 0}));
    CHECK_FALSE(verdict_gates_exit({"ce1", "no_dominance", "FAIL", 0}));
}
