#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtq/engine.hpp"
#include "rtq/parallel.hpp"
#include "rtq/stats.hpp"

namespace rtq {

// Canonical policy order used by coupled runs and verdict tables.
enum PolicyIndex : std::size_t {
    kFcfs = 0,
    kEdf = 1,
    kFcfsEdt = 2,
    kEdfEdt = 3,
    kFcfsEac = 4,
    kEdfEac = 5,
};

inline std::span<const PolicySpec> canonical_policies() {
    static const std::array<PolicySpec, 6> ps = {{
        {Discipline::Fcfs, Guard::None},
        {Discipline::Edf, Guard::None},
        {Discipline::Fcfs, Guard::Edt},
        {Discipline::Edf, Guard::Edt},
        {Discipline::Fcfs, Guard::Eac},
        {Discipline::Edf, Guard::Eac},
    }};
    return ps;
}

/// One CSV row of sweep data: per-seed loss with its batch-means half-width.
struct SweepRow {
    std::string scenario;
    std::string policy;
    std::string family;
    double rate = 0.0;
    double mean_deadline = 0.0;
    std::uint64_t seed = 0;
    double loss = 0.0;
    double ci = 0.0;
};

/// One edge of the dominance diagram with its verified status.
struct VerdictRow {
    std::string relation;
    std::string kind;    // per_path | stochastic | conjecture | equality | no_dominance
    std::string verdict; // PASS | FAIL | WARN
    std::uint64_t evidence_seed = 0;
};

inline bool verdict_gates_exit(const VerdictRow& r) {
    return r.kind != "conjecture" && r.kind != "no_dominance";
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t s = mix_seed(master, tag);
    s = mix_seed(s, a);
    s = mix_seed(s, b);
    return mix_seed(s, c);
}

/// Loss ratio over arrivals with id >= warmup.
inline double trimmed_loss(const SimOutcome& o, std::uint64_t warmup) {
    const std::uint64_t n = o.arrivals - warmup;
    std::uint64_t lost = 0;
    for (std::uint64_t i = warmup; i < o.arrivals; ++i)
        lost += o.disposal_log[i].status != JobStatus::Completed;
    return static_cast<double>(lost) / static_cast<double>(n);
}

/// Batch-means estimate that degrades gracefully at small scales: the batch
/// count shrinks to keep at least 100 jobs per batch, and if even two batches
/// are impossible the half-width is reported as zero.
inline LossEstimate robust_loss_estimate(const SimOutcome& o, std::uint64_t warmup,
                                         int batches) {
    const std::uint64_t post = o.arrivals - warmup;
    const std::uint64_t max_batches = post / 100;
    if (max_batches < 2) {
        LossEstimate est;
        est.point = trimmed_loss(o, warmup);
        est.warmup_discarded = warmup;
        return est;
    }
    const int b = std::min<std::uint64_t>(static_cast<std::uint64_t>(batches),
                                          max_batches);
    return loss_estimate(o, warmup, b);
}

inline bool same_completed_set(const SimOutcome& a, const SimOutcome& b) {
    if (a.arrivals != b.arrivals) return false;
    for (std::uint64_t i = 0; i < a.arrivals; ++i)
        if ((a.disposal_log[i].status == JobStatus::Completed) !=
            (b.disposal_log[i].status == JobStatus::Completed))
            return false;
    return true;
}

/// Identical terminal status and disposal epoch for every job.
inline bool same_disposal_log(const SimOutcome& a, const SimOutcome& b) {
    if (a.arrivals != b.arrivals) return false;
    for (std::uint64_t i = 0; i < a.arrivals; ++i) {
        if (a.disposal_log[i].status != b.disposal_log[i].status) return false;
        if (a.disposal_log[i].epoch != b.disposal_log[i].epoch) return false;
    }
    return true;
}

/// Same completed ids and, for those, identical completion epochs. Loss
/// statuses are allowed to differ (a guard discards where another rejects).
inline bool same_completions(const SimOutcome& a, const SimOutcome& b) {
    if (a.arrivals != b.arrivals) return false;
    for (std::uint64_t i = 0; i < a.arrivals; ++i) {
        const bool ca = a.disposal_log[i].status == JobStatus::Completed;
        const bool cb = b.disposal_log[i].status == JobStatus::Completed;
        if (ca != cb) return false;
        if (ca && a.disposal_log[i].epoch != b.disposal_log[i].epoch) return false;
    }
    return true;
}

/// Per-path relations that must hold on every coupled trace, applied to
/// outcomes ordered as canonical_policies(). Returns the violated relations.
inline std::vector<std::string> per_path_violations(std::span<const SimOutcome> six) {
    std::vector<std::string> bad;
    auto leq = [&](PolicyIndex a, PolicyIndex b, const char* name) {
        if (six[a].lost() > six[b].lost()) bad.emplace_back(name);
    };
    leq(kEdfEdt, kEdf, "edf_edt_leq_edf");
    leq(kFcfsEdt, kFcfs, "fcfs_edt_leq_fcfs");
    leq(kEdfEac, kEdf, "edf_eac_leq_edf");
    leq(kFcfsEac, kFcfs, "fcfs_eac_leq_fcfs");
    if (!same_completed_set(six[kFcfsEdt], six[kFcfsEac])) bad.emplace_back("fcfs_edt_eq_fcfs_eac");
    return bad;
}

/// Bisects toward a short violating prefix of a trace. `violated(len)` must
/// be true for the full length; the returned length is confirmed violating.
inline std::size_t shrink_violating_prefix(std::size_t full_len,
                                           const std::function<bool(std::size_t)>& violated) {
    std::size_t lo = 1, hi = full_len;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (violated(mid)) hi = mid;
        else lo = mid + 1;
    }
    return hi;
}

// ---------------------------------------------------------------------------
// Per-path dominance suite: the guard inequalities and the fcfs guard
// equality, asserted on every coupled trace.

struct PerPathOptions {
    std::vector<double> rates = {0.5, 1.0, 2.0, 4.0};
    std::vector<Family> deadline_families = {Family::Deterministic, Family::Exponential,
                                             Family::Uniform, Family::LogNormal,
                                             Family::TwoPoint};
    std::vector<DistributionSpec> services = {DistributionSpec::exponential(1.0),
                                              DistributionSpec::deterministic(1.0)};
    std::vector<double> mean_deadlines = {1.0, 2.0, 4.0, 8.0, 16.0}; // cycled by seed
    std::uint64_t arrivals = 10000;
    int seeds_per_combo = 5;
    std::uint64_t master_seed = 7001;
    int workers = 1;
};

struct PerPathViolation {
    std::string relation;
    std::uint64_t trace_seed = 0;
    std::size_t shrunk_length = 0;
    std::string description;
};

struct PerPathReport {
    std::uint64_t traces = 0;
    std::vector<VerdictRow> rows;
    std::vector<PerPathViolation> violations;

    bool all_pass() const { return violations.empty(); }
};

inline PerPathReport run_per_path_suite(const PerPathOptions& opt) {
    struct Task {
        double rate;
        Family family;
        std::size_t service_idx;
        double mean;
        std::uint64_t seed;
        std::string label;
    };
    std::vector<Task> tasks;
    std::size_t combo = 0;
    for (double rate : opt.rates)
        for (Family fam : opt.deadline_families)
            for (std::size_t si = 0; si < opt.services.size(); ++si, ++combo)
                for (int k = 0; k < opt.seeds_per_combo; ++k) {
                    const double mean =
                        opt.mean_deadlines[k % opt.mean_deadlines.size()];
                    const std::uint64_t seed =
                        derive_seed(opt.master_seed, 0xA1, combo, k);
                    char label[160];
                    std::snprintf(label, sizeof label,
                                  "rate=%g family=%s service=%zu mean=%g", rate,
                                  family_name(fam), si, mean);
                    tasks.push_back({rate, fam, si, mean, seed, label});
                }

    std::vector<std::vector<std::string>> violated(tasks.size());
    std::vector<std::optional<Trace>> failing_traces(tasks.size());
    parallel_for(tasks.size(), opt.workers, [&](std::size_t i) {
        const Task& t = tasks[i];
        const Trace trace = generate_trace(
            opt.arrivals, DistributionSpec::exponential(1.0 / t.rate),
            opt.services[t.service_idx], DistributionSpec::with_mean(t.family, t.mean),
            t.seed);
        const std::vector<SimOutcome> outs = run_coupled(trace, canonical_policies());
        violated[i] = per_path_violations(outs);
        if (!violated[i].empty()) failing_traces[i] = trace;
    });

    PerPathReport rep;
    rep.traces = tasks.size();
    std::map<std::string, PerPathViolation> firsts;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        for (const std::string& rel : violated[i]) {
            if (firsts.count(rel)) continue;
            // Shrink to a short prefix that still violates this relation.
            const Trace& trace = *failing_traces[i];
            auto violates = [&](std::size_t len) {
                const std::span<const TraceJob> prefix(trace.jobs.data(), len);
                const auto outs = run_coupled(prefix, canonical_policies());
                const auto bad = per_path_violations(outs);
                return std::find(bad.begin(), bad.end(), rel) != bad.end();
            };
            const std::size_t len =
                shrink_violating_prefix(trace.jobs.size(), violates);
            firsts[rel] = {rel, tasks[i].seed, len, tasks[i].label};
        }
    }
    for (const auto& [rel, v] : firsts) rep.violations.push_back(v);

    for (const char* rel : {"edf_edt_leq_edf", "fcfs_edt_leq_fcfs", "edf_eac_leq_edf", "fcfs_eac_leq_fcfs", "fcfs_edt_eq_fcfs_eac"}) {
        const bool bad = firsts.count(rel) > 0;
        rep.rows.push_back({rel, rel == std::string("fcfs_edt_eq_fcfs_eac") ? "equality" : "per_path",
                            bad ? "FAIL" : "PASS",
                            bad ? firsts[rel].trace_seed : opt.master_seed});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Stochastic relations under common random numbers, paired over
// independent seeds per grid cell: edf vs fcfs, edf-edt vs both guards,
// the deterministic-deadline minimality claims, and the conjectured
// eac ordering.

struct ScenarioConfig {
    std::vector<double> rates = {0.5, 1.0, 2.0, 4.0};
    std::vector<double> mean_deadlines = {2.0, 16.0};
    std::vector<Family> deadline_families = {Family::Exponential, Family::Uniform,
                                             Family::LogNormal, Family::TwoPoint};
    DistributionSpec service = DistributionSpec::exponential(1.0);
    std::uint64_t arrivals = 100000;
    int seeds = 10;
    std::uint64_t master_seed = 20260808;
    double warmup_fraction = 0.1;
    int batches = 30;
    int workers = 1;

    std::uint64_t warmup_count() const {
        return static_cast<std::uint64_t>(warmup_fraction *
                                          static_cast<double>(arrivals));
    }
};

struct StochasticCell {
    std::string relation;
    std::string kind; // stochastic | conjecture
    Family family;
    double rate = 0.0;
    double mean_deadline = 0.0;
    PairedComparison cmp; // per-cell 95% interval, for tables and plots
    double se = 0.0;      // standard error of the paired mean difference
};

struct StochasticReport {
    std::vector<StochasticCell> cells;
    std::vector<VerdictRow> rows;
    std::vector<SweepRow> data;

    /// True iff some cell's paired CI lies strictly above zero. The 95%
    /// confidence statement applies to the verdict table as a whole, so each
    /// of the m cells is tested at the Bonferroni-adjusted level 0.025/m;
    /// with per-cell intervals, a table this size would certify a handful of
    /// false reversals at equality cells on every run. Any genuine reversal
    /// sits tens of standard errors out and still certifies instantly.
    bool reversal_certified(const std::string& relation) const {
        const double m = static_cast<double>(cells.size());
        for (const StochasticCell& c : cells) {
            if (c.relation != relation || c.cmp.pairs < 2) continue;
            const double t = c.se > 0.0
                                 ? student_t_quantile(1.0 - 0.025 / m, c.cmp.pairs - 1)
                                 : 0.0;
            if (c.cmp.mean_diff - t * c.se > 0.0) return true;
        }
        return false;
    }
};

/// Relation catalogue: {name, kind, policy on the G trace or the det trace}.
/// diff = loss(first) - loss(second); the claim is diff <= 0.
struct StochasticRelation {
    std::string name;
    std::string kind;
    bool first_on_det;
    PolicyIndex first;
    bool second_on_det;
    PolicyIndex second;
};

inline const std::vector<StochasticRelation>& stochastic_relations() {
    static const std::vector<StochasticRelation> rels = {
        {"edf_leq_fcfs", "stochastic", false, kEdf, false, kFcfs},
        {"edf_edt_leq_edf_eac", "stochastic", false, kEdfEdt, false, kEdfEac},
        {"edf_edt_leq_fcfs_edt", "stochastic", false, kEdfEdt, false, kFcfsEdt},
        {"fcfs_det_leq_fcfs_g", "stochastic", true, kFcfs, false, kFcfs},
        {"edf_eac_leq_fcfs_eac", "conjecture", false, kEdfEac, false, kFcfsEac},
        {"edf_det_leq_edf_g", "conjecture", true, kEdf, false, kEdf},
        {"edf_edt_det_leq_edf_edt_g", "conjecture", true, kEdfEdt, false, kEdfEdt},
    };
    return rels;
}

inline StochasticReport run_stochastic_suite(const ScenarioConfig& cfg) {
    struct Cell {
        double rate, mean;
        Family family;
    };
    std::vector<Cell> cells;
    for (double r : cfg.rates)
        for (double m : cfg.mean_deadlines)
            for (Family f : cfg.deadline_families) cells.push_back({r, m, f});

    // losses[cell][seed][policy]; det-side runs depend only on (rate, mean),
    // so they are computed once per (rate, mean, seed) and shared.
    const std::size_t n_cells = cells.size();
    const std::size_t n_seeds = static_cast<std::size_t>(cfg.seeds);
    const std::uint64_t warmup = cfg.warmup_count();

    struct DetKey {
        double rate, mean;
        bool operator<(const DetKey& o) const {
            return rate != o.rate ? rate < o.rate : mean < o.mean;
        }
    };
    std::map<DetKey, std::size_t> det_index;
    std::vector<DetKey> det_cells;
    for (double r : cfg.rates)
        for (double m : cfg.mean_deadlines) {
            det_index.emplace(DetKey{r, m}, det_cells.size());
            det_cells.push_back({r, m});
        }

    // Policies needed on det traces: the three det-vs-G comparisons.
    static constexpr std::array<PolicyIndex, 3> det_pols = {kFcfs, kEdf, kEdfEdt};

    std::vector<std::array<std::vector<double>, 6>> g_loss(n_cells);
    std::vector<std::array<std::vector<double>, 6>> det_loss(det_cells.size());
    for (auto& arr : g_loss)
        for (auto& v : arr) v.assign(n_seeds, 0.0);
    for (auto& arr : det_loss)
        for (auto& v : arr) v.assign(n_seeds, 0.0);

    // Rows are slotted by task index so the CSV order is independent of the
    // worker schedule.
    std::vector<std::vector<SweepRow>> g_rows(n_cells * n_seeds);
    std::vector<std::vector<SweepRow>> det_rows(det_cells.size() * n_seeds);

    parallel_for(n_cells * n_seeds, cfg.workers, [&](std::size_t idx) {
        const std::size_t ci = idx / n_seeds, k = idx % n_seeds;
        const Cell& c = cells[ci];
        const std::uint64_t seed = derive_seed(cfg.master_seed, 0xB2,
                                               static_cast<std::uint64_t>(c.rate * 1e6),
                                               static_cast<std::uint64_t>(c.mean * 1e6), k);
        const Trace trace = generate_trace(
            cfg.arrivals, DistributionSpec::exponential(1.0 / c.rate), cfg.service,
            DistributionSpec::with_mean(c.family, c.mean), seed);
        for (std::size_t p = 0; p < 6; ++p) {
            const SimOutcome out = rtq::run(trace, canonical_policies()[p]);
            const LossEstimate est = robust_loss_estimate(out, warmup, cfg.batches);
            g_loss[ci][p][k] = est.point;
            g_rows[idx].push_back({"stochastic", canonical_policies()[p].name(),
                                   family_name(c.family), c.rate, c.mean, seed,
                                   est.point, est.ci_half_width});
        }
    });

    // Deterministic-deadline tasks share the same seeds per (rate, mean, k),
    // coupling arrivals and services with every G family at that cell.
    parallel_for(det_cells.size() * n_seeds, cfg.workers, [&](std::size_t idx) {
        const std::size_t ci = idx / n_seeds, k = idx % n_seeds;
        const DetKey& c = det_cells[ci];
        // Same seed derivation as the G traces so arrival/service streams match.
        const std::uint64_t seed = derive_seed(cfg.master_seed, 0xB2,
                                               static_cast<std::uint64_t>(c.rate * 1e6),
                                               static_cast<std::uint64_t>(c.mean * 1e6), k);
        const Trace trace = generate_trace(
            cfg.arrivals, DistributionSpec::exponential(1.0 / c.rate), cfg.service,
            DistributionSpec::deterministic(c.mean), seed);
        for (PolicyIndex p : det_pols) {
            const SimOutcome out = rtq::run(trace, canonical_policies()[p]);
            const LossEstimate est = robust_loss_estimate(out, warmup, cfg.batches);
            det_loss[ci][p][k] = est.point;
            det_rows[idx].push_back({"stochastic", canonical_policies()[p].name(),
                                     "deterministic", c.rate, c.mean, seed,
                                     est.point, est.ci_half_width});
        }
    });

    StochasticReport rep;
    for (auto& rows : g_rows)
        rep.data.insert(rep.data.end(), rows.begin(), rows.end());
    for (auto& rows : det_rows)
        rep.data.insert(rep.data.end(), rows.begin(), rows.end());
    for (const StochasticRelation& rel : stochastic_relations()) {
        for (std::size_t ci = 0; ci < n_cells; ++ci) {
            const Cell& c = cells[ci];
            const std::size_t di = det_index.at({c.rate, c.mean});
            const auto& first =
                rel.first_on_det ? det_loss[di][rel.first] : g_loss[ci][rel.first];
            const auto& second =
                rel.second_on_det ? det_loss[di][rel.second] : g_loss[ci][rel.second];
            StochasticCell cell;
            cell.relation = rel.name;
            cell.kind = rel.kind;
            cell.family = c.family;
            cell.rate = c.rate;
            cell.mean_deadline = c.mean;
            cell.cmp = paired_compare(std::span<const double>(first),
                                      std::span<const double>(second));
            if (cell.cmp.pairs >= 2)
                cell.se = cell.cmp.ci_half_width /
                          student_t_quantile(0.975, cell.cmp.pairs - 1);
            rep.cells.push_back(cell);
        }
    }
    for (const StochasticRelation& rel : stochastic_relations()) {
        const bool reversed = rep.reversal_certified(rel.name);
        const char* verdict =
            !reversed ? "PASS" : (rel.kind == "conjecture" ? "WARN" : "FAIL");
        rep.rows.push_back({rel.name, rel.kind, verdict, cfg.master_seed});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Combined dominance harness: the per-path assertions plus the paired
// statistics, one verdict row per edge of the relation diagram.

struct DominanceOptions {
    PerPathOptions per_path;
    ScenarioConfig stochastic;
};

struct DominanceReport {
    PerPathReport per_path;
    StochasticReport stochastic;

    std::vector<VerdictRow> rows() const {
        std::vector<VerdictRow> out = per_path.rows;
        out.insert(out.end(), stochastic.rows.begin(), stochastic.rows.end());
        return out;
    }

    bool all_proven_pass() const {
        for (const VerdictRow& r : rows())
            if (r.verdict == "FAIL" && verdict_gates_exit(r)) return false;
        return true;
    }
};

inline DominanceReport verify_dominance(const DominanceOptions& opt) {
    return {run_per_path_suite(opt.per_path), run_stochastic_suite(opt.stochastic)};
}

// ---------------------------------------------------------------------------
// Deterministic-deadline equivalences (facts 1-4): coupled policies must
// produce equal disposal logs when every relative deadline is the same.

struct DetEqOptions {
    std::vector<double> rates = {0.5, 1.0, 2.0, 4.0};
    std::vector<double> mean_deadlines = {1.0, 2.0, 4.0, 8.0, 16.0};
    DistributionSpec service = DistributionSpec::exponential(1.0);
    std::uint64_t arrivals = 10000;
    int traces = 50;
    std::uint64_t master_seed = 9003;
    int workers = 1;
};

struct DetEqReport {
    std::uint64_t traces = 0;
    std::vector<VerdictRow> rows;
    std::vector<PerPathViolation> violations;

    bool all_pass() const { return violations.empty(); }
};

inline DetEqReport deterministic_equivalences(const DetEqOptions& opt) {
    struct FactDef {
        const char* name;
        PolicyIndex a, b;
        bool full_log; // full status+epoch equality vs completion equality
    };
    // Facts 1 and 2 pair identical schedules, so the full logs must match.
    // Facts 3 and 4 pair a discard guard with an admission guard: completed
    // jobs and their epochs match while loss statuses differ by construction.
    static constexpr std::array<FactDef, 4> facts = {{
        {"det_fcfs_eq_edf", kFcfs, kEdf, true},
        {"det_fcfs_edt_eq_edf_edt", kFcfsEdt, kEdfEdt, true},
        {"det_fcfs_edt_eq_fcfs_eac", kFcfsEdt, kFcfsEac, false},
        {"det_edf_edt_eq_edf_eac", kEdfEdt, kEdfEac, false},
    }};

    const std::size_t n = static_cast<std::size_t>(opt.traces);
    std::vector<std::array<bool, 4>> ok(n, {true, true, true, true});
    std::vector<std::uint64_t> seeds(n);
    std::vector<std::optional<Trace>> failing(n);
    parallel_for(n, opt.workers, [&](std::size_t i) {
        const double rate = opt.rates[i % opt.rates.size()];
        const double mean =
            opt.mean_deadlines[(i / opt.rates.size()) % opt.mean_deadlines.size()];
        seeds[i] = derive_seed(opt.master_seed, 0xC3, i);
        const Trace trace = generate_trace(
            opt.arrivals, DistributionSpec::exponential(1.0 / rate), opt.service,
            DistributionSpec::deterministic(mean), seeds[i]);
        const std::vector<SimOutcome> outs = run_coupled(trace, canonical_policies());
        bool any_bad = false;
        for (std::size_t f = 0; f < facts.size(); ++f) {
            const FactDef& fd = facts[f];
            ok[i][f] = fd.full_log
                           ? same_disposal_log(outs[fd.a], outs[fd.b])
                           : same_completions(outs[fd.a], outs[fd.b]);
            any_bad |= !ok[i][f];
        }
        if (any_bad) failing[i] = trace;
    });

    DetEqReport rep;
    rep.traces = n;
    for (std::size_t f = 0; f < facts.size(); ++f) {
        std::optional<std::size_t> bad;
        for (std::size_t i = 0; i < n && !bad; ++i)
            if (!ok[i][f]) bad = i;
        if (bad) {
            const FactDef& fd = facts[f];
            const Trace& trace = *failing[*bad];
            auto violates = [&](std::size_t len) {
                const std::span<const TraceJob> prefix(trace.jobs.data(), len);
                const SimOutcome a = rtq::run(prefix, canonical_policies()[fd.a]);
                const SimOutcome b = rtq::run(prefix, canonical_policies()[fd.b]);
                return fd.full_log ? !same_disposal_log(a, b) : !same_completions(a, b);
            };
            const std::size_t len =
                shrink_violating_prefix(trace.jobs.size(), violates);
            rep.violations.push_back({facts[f].name, seeds[*bad], len, facts[f].name});
            rep.rows.push_back({facts[f].name, "equality", "FAIL", seeds[*bad]});
        } else {
            rep.rows.push_back({facts[f].name, "equality", "PASS", opt.master_seed});
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Counter-example reproduction: sweeps whose loss difference changes sign.

struct CeOptions {
    std::vector<double> rates = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0,
                                 2.5,  3.0, 3.5,  4.0};
    std::uint64_t arrivals = 100000;
    int seeds = 10;
    std::uint64_t master_seed = 31001;
    double warmup_fraction = 0.1;
    int batches = 30;
    int workers = 1;
};

struct CeDefinition {
    int id;
    PolicySpec policy_a, policy_b;
    Family deadline_family_a, deadline_family_b;
    double mean_deadline;
    const char* slug; // verdict-table name for the no-dominance pair
};

inline CeDefinition counterexample_definition(int id) {
    switch (id) {
    case 1:
        return {1, {Discipline::Edf, Guard::None}, {Discipline::Fcfs, Guard::Eac},
                Family::Exponential, Family::Exponential, 16.0,
                "nodom_edf_vs_fcfs_eac"};
    case 2:
        return {2, {Discipline::Fcfs, Guard::None}, {Discipline::Fcfs, Guard::Edt},
                Family::Deterministic, Family::Exponential, 2.0,
                "nodom_fcfs_det_vs_fcfs_edt"};
    case 3:
        return {3, {Discipline::Fcfs, Guard::None}, {Discipline::Edf, Guard::Edt},
                Family::Deterministic, Family::Exponential, 16.0,
                "nodom_fcfs_det_vs_edf_edt"};
    case 4:
        return {4, {Discipline::Fcfs, Guard::None}, {Discipline::Edf, Guard::Eac},
                Family::Deterministic, Family::Exponential, 16.0,
                "nodom_fcfs_det_vs_edf_eac"};
    default: throw std::invalid_argument("counter-example id must be 1..4");
    }
}

struct CePoint {
    double rate = 0.0;
    LossEstimate a, b;
    PairedComparison diff;
};

struct CeResult {
    CeDefinition def;
    std::vector<CePoint> points;
    std::optional<CrossingInterval> crossing;
    std::vector<SweepRow> data;
};

inline CeResult reproduce_counterexample(int id, const CeOptions& opt) {
    const CeDefinition def = counterexample_definition(id);
    const std::uint64_t warmup =
        static_cast<std::uint64_t>(opt.warmup_fraction * opt.arrivals);
    const std::size_t n_rates = opt.rates.size();
    const std::size_t n_seeds = static_cast<std::size_t>(opt.seeds);

    std::vector<std::vector<double>> loss_a(n_rates), loss_b(n_rates);
    std::vector<std::vector<double>> ci_a(n_rates), ci_b(n_rates);
    std::vector<std::vector<std::uint64_t>> seeds(n_rates);
    for (std::size_t i = 0; i < n_rates; ++i) {
        loss_a[i].assign(n_seeds, 0.0);
        loss_b[i].assign(n_seeds, 0.0);
        ci_a[i].assign(n_seeds, 0.0);
        ci_b[i].assign(n_seeds, 0.0);
        seeds[i].assign(n_seeds, 0);
    }

    parallel_for(n_rates * n_seeds, opt.workers, [&](std::size_t idx) {
        const std::size_t ri = idx / n_seeds, k = idx % n_seeds;
        const double rate = opt.rates[ri];
        const std::uint64_t seed =
            derive_seed(opt.master_seed, 0xD4 + static_cast<std::uint64_t>(id), ri, k);
        seeds[ri][k] = seed;
        // Both sides share arrival and service streams; only the deadline
        // stream differs between the two distributions.
        const auto arrival = DistributionSpec::exponential(1.0 / rate);
        const auto service = DistributionSpec::exponential(1.0);
        const Trace ta = generate_trace(
            opt.arrivals, arrival, service,
            DistributionSpec::with_mean(def.deadline_family_a, def.mean_deadline), seed);
        const Trace tb = generate_trace(
            opt.arrivals, arrival, service,
            DistributionSpec::with_mean(def.deadline_family_b, def.mean_deadline), seed);
        const LossEstimate ea =
            robust_loss_estimate(rtq::run(ta, def.policy_a), warmup, opt.batches);
        const LossEstimate eb =
            robust_loss_estimate(rtq::run(tb, def.policy_b), warmup, opt.batches);
        loss_a[ri][k] = ea.point;
        loss_b[ri][k] = eb.point;
        ci_a[ri][k] = ea.ci_half_width;
        ci_b[ri][k] = eb.ci_half_width;
    });

    CeResult res;
    res.def = def;
    const std::string scenario = "ce" + std::to_string(id);
    std::vector<DiffPoint> diffs;
    for (std::size_t ri = 0; ri < n_rates; ++ri) {
        CePoint pt;
        pt.rate = opt.rates[ri];
        auto summarize = [&](const std::vector<double>& xs,
                             const std::vector<double>& cis) {
            LossEstimate est;
            double sum = 0.0;
            for (double x : xs) sum += x;
            est.point = sum / xs.size();
            est.batches = static_cast<int>(xs.size());
            est.warmup_discarded = warmup;
            if (xs.size() >= 2) {
                double var = 0.0;
                for (double x : xs) var += (x - est.point) * (x - est.point);
                var /= xs.size() - 1;
                est.ci_half_width = student_t_quantile(0.975, xs.size() - 1) *
                                    std::sqrt(var / xs.size());
            } else {
                est.ci_half_width = cis[0];
            }
            return est;
        };
        pt.a = summarize(loss_a[ri], ci_a[ri]);
        pt.b = summarize(loss_b[ri], ci_b[ri]);
        if (n_seeds >= 2) {
            pt.diff = paired_compare(std::span<const double>(loss_a[ri]),
                                     std::span<const double>(loss_b[ri]));
            diffs.push_back({pt.rate, pt.diff.mean_diff, pt.diff.ci_half_width});
        } else {
            pt.diff.mean_diff = pt.a.point - pt.b.point;
            pt.diff.ci_half_width = pt.a.ci_half_width + pt.b.ci_half_width;
            pt.diff.pairs = 1;
            diffs.push_back({pt.rate, pt.diff.mean_diff, pt.diff.ci_half_width});
        }
        res.points.push_back(pt);
        for (std::size_t k = 0; k < n_seeds; ++k) {
            res.data.push_back({scenario, def.policy_a.name(),
                                family_name(def.deadline_family_a), pt.rate,
                                def.mean_deadline, seeds[ri][k], loss_a[ri][k],
                                ci_a[ri][k]});
            res.data.push_back({scenario, def.policy_b.name(),
                                family_name(def.deadline_family_b), pt.rate,
                                def.mean_deadline, seeds[ri][k], loss_b[ri][k],
                                ci_b[ri][k]});
        }
    }
    if (diffs.size() >= 3)
        res.crossing = find_crossing(std::span<const DiffPoint>(diffs));
    return res;
}

// ---------------------------------------------------------------------------
// Conjecture sweeps: normalized ratios of the conjectured-smaller loss to the
// conjectured-larger one over the (rate, mean, family) grid.

struct ConjectureRow {
    Family family = Family::Exponential;
    double rate = 0.0;
    double mean_deadline = 0.0;
    double loss_small = 0.0;
    double loss_large = 0.0;
    double ratio = 1.0;
    PairedComparison diff;
};

struct ConjectureSweep {
    int id = 0;
    std::string smaller;
    std::string larger;
    std::vector<ConjectureRow> rows;
    std::vector<SweepRow> data;
};

inline ConjectureSweep conjecture_sweep(int id, const ScenarioConfig& cfg) {
    if (id < 1 || id > 3) throw std::invalid_argument("conjecture id must be 1..3");
    // id 1: EDF-EAC vs FCFS-EAC on the same G trace.
    // id 2: EDF on deterministic deadlines vs EDF on G.
    // id 3: EDF-EDT on deterministic deadlines vs EDF-EDT on G.
    const PolicyIndex pol_small = id == 1 ? kEdfEac : (id == 2 ? kEdf : kEdfEdt);
    const PolicyIndex pol_large = id == 1 ? kFcfsEac : pol_small;
    const bool small_on_det = id != 1;

    ConjectureSweep sweep;
    sweep.id = id;
    sweep.smaller = std::string(canonical_policies()[pol_small].name()) +
                    (small_on_det ? "@deterministic" : "");
    sweep.larger = canonical_policies()[pol_large].name();

    struct Cell {
        Family family;
        double rate, mean;
    };
    std::vector<Cell> cells;
    for (Family f : cfg.deadline_families)
        for (double r : cfg.rates)
            for (double m : cfg.mean_deadlines) cells.push_back({f, r, m});

    const std::uint64_t warmup = cfg.warmup_count();
    const std::size_t n_seeds = static_cast<std::size_t>(cfg.seeds);
    std::vector<std::vector<double>> small_loss(cells.size()),
        large_loss(cells.size());
    for (auto& v : small_loss) v.assign(n_seeds, 0.0);
    for (auto& v : large_loss) v.assign(n_seeds, 0.0);
    std::vector<std::array<SweepRow, 2>> rows_by_task(cells.size() * n_seeds);

    parallel_for(cells.size() * n_seeds, cfg.workers, [&](std::size_t idx) {
        const std::size_t ci = idx / n_seeds, k = idx % n_seeds;
        const Cell& c = cells[ci];
        const std::uint64_t seed = derive_seed(cfg.master_seed, 0xE5 + id,
                                               static_cast<std::uint64_t>(c.rate * 1e6),
                                               static_cast<std::uint64_t>(c.mean * 1e6), k);
        const auto arrival = DistributionSpec::exponential(1.0 / c.rate);
        const Trace tg = generate_trace(cfg.arrivals, arrival, cfg.service,
                                        DistributionSpec::with_mean(c.family, c.mean),
                                        seed);
        const std::string scenario = "conj" + std::to_string(id);
        double lsmall, llarge;
        if (id == 1) {
            lsmall = trimmed_loss(rtq::run(tg, canonical_policies()[kEdfEac]), warmup);
            llarge = trimmed_loss(rtq::run(tg, canonical_policies()[kFcfsEac]), warmup);
        } else {
            const Trace td = generate_trace(cfg.arrivals, arrival, cfg.service,
                                            DistributionSpec::deterministic(c.mean),
                                            seed);
            lsmall = trimmed_loss(rtq::run(td, canonical_policies()[pol_small]), warmup);
            llarge = trimmed_loss(rtq::run(tg, canonical_policies()[pol_large]), warmup);
        }
        small_loss[ci][k] = lsmall;
        large_loss[ci][k] = llarge;
        rows_by_task[idx][0] = {scenario, sweep.smaller,
                                small_on_det ? "deterministic" : family_name(c.family),
                                c.rate, c.mean, seed, lsmall, 0.0};
        rows_by_task[idx][1] = {scenario, sweep.larger, family_name(c.family),
                                c.rate, c.mean, seed, llarge, 0.0};
    });

    for (auto& pair : rows_by_task) {
        sweep.data.push_back(std::move(pair[0]));
        sweep.data.push_back(std::move(pair[1]));
    }
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const Cell& c = cells[ci];
        ConjectureRow row;
        row.family = c.family;
        row.rate = c.rate;
        row.mean_deadline = c.mean;
        double ss = 0.0, sl = 0.0;
        for (std::size_t k = 0; k < n_seeds; ++k) {
            ss += small_loss[ci][k];
            sl += large_loss[ci][k];
        }
        row.loss_small = ss / n_seeds;
        row.loss_large = sl / n_seeds;
        row.ratio = row.loss_large > 0.0
                        ? row.loss_small / row.loss_large
                        : (row.loss_small > 0.0 ? INFINITY : 1.0);
        row.diff = paired_compare(std::span<const double>(small_loss[ci]),
                                  std::span<const double>(large_loss[ci]));
        sweep.rows.push_back(row);
    }
    return sweep;
}

} // namespace rtq
