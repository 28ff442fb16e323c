#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rtq/config.hpp"
#include "rtq/csv.hpp"
#include "rtq/engine.hpp"
#include "rtq/svg.hpp"
#include "rtq/version.hpp"

namespace rtq::cli {

namespace fs = std::filesystem;

struct OutputSink {
    std::optional<fs::path> dir;
    json manifest;
    std::vector<std::string> outputs;

    explicit OutputSink(const std::optional<std::string>& out_dir) {
        if (out_dir) {
            dir = fs::path(*out_dir);
            fs::create_directories(*dir);
        }
        manifest["tool"] = "rtq";
        manifest["version"] = kVersion;
    }

    bool enabled() const { return dir.has_value(); }

    void write_file(const std::string& name, const std::string& content) {
        if (!dir) return;
        std::ofstream f(*dir / name, std::ios::binary);
        f << content;
        outputs.push_back(name);
    }

    void finish(const std::string& command, double wall_seconds) {
        if (!dir) return;
        manifest["command"] = command;
        manifest["outputs"] = outputs;
        manifest["wall_time_seconds"] = wall_seconds;
        std::ofstream f(*dir / (command + "_manifest.json"), std::ios::binary);
        f << manifest.dump(2) << '\n';
    }
};

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------

inline int cmd_simulate(const std::string& config_path,
                        const std::optional<std::string>& out_dir,
                        std::ostream& out, std::ostream& err) {
    Timer timer;
    SimulateConfig cfg;
    try {
        cfg = simulate_config_from_json(load_json_file(config_path));
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code;
    }

    Trace generated{{}, {}, cfg.arrival_spec(), cfg.service, cfg.deadline};
    std::vector<TraceJob> jobs;
    if (cfg.trace_csv) {
        std::ifstream in(*cfg.trace_csv);
        if (!in) {
            err << "error: cannot open trace csv: " << *cfg.trace_csv << '\n';
            return 1;
        }
        try {
            jobs = read_trace_csv(in);
        } catch (const std::invalid_argument& e) {
            err << "error: " << e.what() << '\n';
            return 1;
        }
    } else {
        generated = generate_trace(cfg.arrivals, cfg.arrival_spec(), cfg.service,
                                   cfg.deadline, cfg.seed);
        jobs = generated.jobs;
    }

    const SimOutcome outcome = run(std::span<const TraceJob>(jobs), cfg.policy);
    const auto warmup =
        static_cast<std::uint64_t>(cfg.warmup_fraction * outcome.arrivals);

    char line[256];
    out << "policy: " << cfg.policy.name() << '\n';
    out << "arrivals: " << outcome.arrivals << '\n';
    std::snprintf(line, sizeof line,
                  "completed: %llu  expired: %llu  discarded_edt: %llu  "
                  "rejected_eac: %llu\n",
                  (unsigned long long)outcome.completed,
                  (unsigned long long)outcome.expired,
                  (unsigned long long)outcome.discarded_edt,
                  (unsigned long long)outcome.rejected_eac);
    out << line;
    std::snprintf(line, sizeof line, "loss_ratio: %.17g\n", outcome.loss_ratio);
    out << line;
    try {
        const LossEstimate est = loss_estimate(outcome, warmup, cfg.batches);
        std::snprintf(line, sizeof line,
                      "loss_estimate: %.17g +/- %.17g (95%% CI, %d batches, "
                      "warmup %llu)\n",
                      est.point, est.ci_half_width, est.batches,
                      (unsigned long long)est.warmup_discarded);
        out << line;
    } catch (const std::invalid_argument&) {
        out << "loss_estimate: n/a (too few jobs per batch)\n";
    }
    std::snprintf(line, sizeof line, "busy_time: %.17g\n", outcome.busy_time);
    out << line;

    if (cfg.export_trace && !cfg.trace_csv) {
        std::ofstream f(*cfg.export_trace, std::ios::binary);
        write_trace_csv(f, generated.jobs);
    }
    if (cfg.export_disposals) {
        std::ofstream f(*cfg.export_disposals, std::ios::binary);
        write_disposal_csv(f, outcome);
    }

    OutputSink sink(out_dir);
    if (sink.enabled()) {
        sink.manifest["config"] = simulate_config_to_json(cfg);
        sink.manifest["master_seed"] = cfg.seed;
        sink.manifest["run_seeds"] = std::vector<std::uint64_t>{cfg.seed};
        std::ostringstream csv;
        write_disposal_csv(csv, outcome);
        sink.write_file("disposals.csv", csv.str());
        sink.finish("simulate", timer.seconds());
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct ReproduceOptions {
    std::string figure;
    std::string out_dir = "out";
    std::uint64_t arrivals = 100000; // desk scale; --full mirrors the 1e6 runs
    int seeds = 10;
    std::uint64_t master_seed = 20260808;
    std::vector<double> rates; // empty: per-figure default
    std::vector<double> means; // empty: per-figure default
    int workers = 1;
    bool full = false; // one seed with a million arrivals per point
};

namespace detail {

inline std::vector<std::pair<double, double>> curve(
    const std::vector<CePoint>& pts, bool side_a) {
    std::vector<std::pair<double, double>> xy;
    for (const CePoint& p : pts)
        xy.emplace_back(p.rate, side_a ? p.a.point : p.b.point);
    return xy;
}

inline int reproduce_ce(int ce_id, const std::string& figure,
                        const ReproduceOptions& opt, OutputSink& sink,
                        std::ostream& out) {
    CeOptions ce;
    if (!opt.rates.empty()) ce.rates = opt.rates;
    ce.arrivals = opt.full ? 1000000 : opt.arrivals;
    ce.seeds = opt.full ? 1 : opt.seeds;
    ce.master_seed = opt.master_seed;
    ce.workers = opt.workers;
    const CeResult res = reproduce_counterexample(ce_id, ce);

    std::ostringstream csv;
    write_results_csv(csv, res.data);
    sink.write_file(figure + ".csv", csv.str());
    sink.manifest["run_seeds"] = json::array();
    for (const SweepRow& r : res.data) sink.manifest["run_seeds"].push_back(r.seed);

    SvgLineChart chart("loss ratios, counter-example " + std::to_string(ce_id),
                       "normalized arrival rate (\xce\xbb/\xce\xbc)", "loss ratio");
    const std::string label_a = res.def.policy_a.name() + std::string(", ") +
                                family_name(res.def.deadline_family_a) +
                                " deadline";
    const std::string label_b = res.def.policy_b.name() + std::string(", ") +
                                family_name(res.def.deadline_family_b) +
                                " deadline";
    chart.add_series(label_a, curve(res.points, true));
    chart.add_series(label_b, curve(res.points, false));
    std::ostringstream svg;
    chart.render(svg);
    sink.write_file(figure + ".svg", svg.str());

    if (res.crossing)
        out << figure << ": crossing of loss(" << label_a << ") - loss(" << label_b
            << ") within rates [" << res.crossing->rate_lo << ", "
            << res.crossing->rate_hi << "]\n";
    else
        out << figure << ": no CI-significant crossing found on this grid\n";
    return 0;
}

inline int reproduce_conjecture(int conj_id, const std::string& figure,
                                const ReproduceOptions& opt, OutputSink& sink,
                                std::ostream& out) {
    ScenarioConfig cfg;
    if (!opt.rates.empty()) cfg.rates = opt.rates;
    else cfg.rates = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
    if (!opt.means.empty()) cfg.mean_deadlines = opt.means;
    cfg.arrivals = opt.full ? 1000000 : opt.arrivals;
    cfg.seeds = opt.full ? 1 : opt.seeds;
    cfg.master_seed = opt.master_seed;
    cfg.workers = opt.workers;
    const ConjectureSweep sweep = conjecture_sweep(conj_id, cfg);

    std::ostringstream csv;
    write_results_csv(csv, sweep.data);
    sink.write_file(figure + ".csv", csv.str());
    sink.manifest["run_seeds"] = json::array();
    for (const SweepRow& r : sweep.data) sink.manifest["run_seeds"].push_back(r.seed);

    SvgLineChart chart("loss ratio of " + sweep.smaller + " normalized by " +
                           sweep.larger,
                       "normalized arrival rate (\xce\xbb/\xce\xbc)",
                       "normalized loss ratio");
    std::map<std::pair<Family, double>, std::vector<std::pair<double, double>>> curves;
    for (const ConjectureRow& r : sweep.rows)
        curves[{r.family, r.mean_deadline}].emplace_back(r.rate, r.ratio);
    for (auto& [key, pts] : curves) {
        char name[96];
        std::snprintf(name, sizeof name, "%s, \xce\xbc/\xce\xb4=%g",
                      family_name(key.first), key.second);
        chart.add_series(name, pts);
    }
    std::ostringstream svg;
    chart.render(svg);
    sink.write_file(figure + ".svg", svg.str());
    out << figure << ": " << sweep.rows.size() << " grid points\n";
    return 0;
}

inline int reproduce_dominance(const ReproduceOptions& opt, OutputSink& sink,
                               std::ostream& out) {
    sink.manifest["run_seeds"] = std::vector<std::uint64_t>{opt.master_seed};

    PerPathOptions pp;
    pp.arrivals = std::min<std::uint64_t>(opt.arrivals, 10000);
    pp.seeds_per_combo = 2;
    pp.master_seed = opt.master_seed;
    pp.workers = opt.workers;

    ScenarioConfig sc;
    sc.arrivals = opt.arrivals;
    sc.seeds = opt.seeds;
    sc.master_seed = opt.master_seed;
    sc.workers = opt.workers;
    if (!opt.rates.empty()) sc.rates = opt.rates;
    if (!opt.means.empty()) sc.mean_deadlines = opt.means;

    DetEqOptions de;
    de.arrivals = std::min<std::uint64_t>(opt.arrivals, 5000);
    de.traces = 20;
    de.master_seed = opt.master_seed;
    de.workers = opt.workers;

    CeOptions ce;
    ce.rates = opt.rates.empty() ? std::vector<double>{0.5, 1.0, 2.0, 3.0, 4.0}
                                 : opt.rates;
    ce.arrivals = opt.arrivals;
    ce.seeds = opt.seeds;
    ce.master_seed = opt.master_seed;
    ce.workers = opt.workers;

    const DominanceReport dom = verify_dominance({pp, sc});
    std::vector<VerdictRow> rows = dom.rows();
    const DetEqReport deq = deterministic_equivalences(de);
    rows.insert(rows.end(), deq.rows.begin(), deq.rows.end());
    for (int id = 1; id <= 4; ++id) {
        const CeResult res = reproduce_counterexample(id, ce);
        rows.push_back({res.def.slug, "no_dominance",
                        res.crossing ? "PASS" : "FAIL", ce.master_seed});
    }

    std::ostringstream csv;
    write_verdicts_csv(csv, rows);
    sink.write_file("dominance.csv", csv.str());
    for (const VerdictRow& r : rows)
        out << r.relation << " [" << r.kind << "]: " << r.verdict << '\n';
    return 0;
}

} // namespace detail

inline int cmd_reproduce(const ReproduceOptions& opt, std::ostream& out,
                         std::ostream& err) {
    static const std::map<std::string, int> ce_figs = {
        {"fig1", 1}, {"fig6", 2}, {"fig7", 3}, {"fig8", 4}};
    static const std::map<std::string, int> conj_figs = {{"fig2", 1}, {"fig5", 2}};

    Timer timer;
    OutputSink sink(opt.out_dir);
    sink.manifest["master_seed"] = opt.master_seed;
    sink.manifest["config"] = {{"figure", opt.figure},
                               {"arrivals", opt.full ? 1000000 : opt.arrivals},
                               {"seeds", opt.full ? 1 : opt.seeds},
                               {"rates", opt.rates},
                               {"means", opt.means},
                               {"full", opt.full}};

    int rc = 0;
    if (auto it = ce_figs.find(opt.figure); it != ce_figs.end())
        rc = detail::reproduce_ce(it->second, opt.figure, opt, sink, out);
    else if (auto jt = conj_figs.find(opt.figure); jt != conj_figs.end())
        rc = detail::reproduce_conjecture(jt->second, opt.figure, opt, sink, out);
    else if (opt.figure == "dominance")
        rc = detail::reproduce_dominance(opt, sink, out);
    else {
        err << "error: unknown figure '" << opt.figure
            << "' (valid: fig1, fig2, fig5, fig6, fig7, fig8, dominance)\n";
        return 1;
    }
    sink.finish("reproduce", timer.seconds());
    return rc;
}

// ---------------------------------------------------------------------------

inline int cmd_verify(const std::optional<std::string>& config_path,
                      const std::optional<std::string>& out_dir, int workers,
                      std::ostream& out, std::ostream& err) {
    Timer timer;
    VerifyConfig cfg;
    try {
        if (config_path) cfg = verify_config_from_json(load_json_file(*config_path));
        else cfg = verify_config_from_json(json::object());
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code;
    }
    if (workers > 1) {
        cfg.stochastic.workers = workers;
        cfg.per_path.workers = workers;
        cfg.det_eq.workers = workers;
    }

    const DominanceReport dom = verify_dominance({cfg.per_path, cfg.stochastic});
    std::vector<VerdictRow> rows = dom.rows();
    const DetEqReport deq = deterministic_equivalences(cfg.det_eq);
    rows.insert(rows.end(), deq.rows.begin(), deq.rows.end());

    bool failed = false;
    for (const VerdictRow& r : rows) {
        out << r.relation << " [" << r.kind << "]: " << r.verdict << '\n';
        if (r.verdict == "FAIL" && verdict_gates_exit(r)) failed = true;
    }
    for (const PerPathViolation& v : dom.per_path.violations)
        out << "violation: " << v.relation << " seed=" << v.trace_seed
            << " minimal_prefix=" << v.shrunk_length << " (" << v.description
            << ")\n";
    for (const PerPathViolation& v : deq.violations)
        out << "violation: " << v.relation << " seed=" << v.trace_seed
            << " minimal_prefix=" << v.shrunk_length << '\n';

    OutputSink sink(out_dir);
    if (sink.enabled()) {
        sink.manifest["config"] = verify_config_to_json(cfg);
        sink.manifest["master_seed"] = cfg.stochastic.master_seed;
        std::ostringstream csv;
        write_verdicts_csv(csv, rows);
        sink.write_file("verify_verdicts.csv", csv.str());
        sink.finish("verify", timer.seconds());
    }
    return failed ? 1 : 0;
}

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
    CLI::App app{"firm real-time single-server queue simulator"};
    app.set_version_flag("--version", std::string(kVersion));

    std::string config_path;
    std::optional<std::string> out_dir;
    ReproduceOptions rep;
    int workers = 1;
    std::string rates_csv, means_csv;

    CLI::App* sim = app.add_subcommand("simulate", "run one (trace, policy) pair");
    sim->add_option("--config", config_path, "JSON run configuration")->required();
    sim->add_option("--out", out_dir, "output directory for manifest and CSV");

    CLI::App* repr = app.add_subcommand(
        "reproduce", "reproduce a sweep figure or the dominance table");
    repr->add_option("--figure", rep.figure,
                     "fig1, fig2, fig5, fig6, fig7, fig8, or dominance")
        ->required();
    repr->add_option("--out", rep.out_dir, "output directory");
    repr->add_option("--arrivals", rep.arrivals, "arrivals per run");
    repr->add_option("--seeds", rep.seeds, "independent seeds per grid point");
    repr->add_option("--seed", rep.master_seed, "master seed");
    repr->add_option("--rates", rates_csv, "comma-separated rate grid");
    repr->add_option("--means", means_csv, "comma-separated mean deadlines");
    repr->add_option("--workers", rep.workers, "worker threads");
    repr->add_flag("--full", rep.full, "one seed with a million arrivals");

    std::optional<std::string> verify_config;
    CLI::App* ver = app.add_subcommand("verify", "check the dominance relations");
    ver->add_option("--config", verify_config, "JSON harness configuration");
    ver->add_option("--out", out_dir, "output directory");
    ver->add_option("--workers", workers, "worker threads");

    app.require_subcommand(1);

    std::vector<const char*> argv;
    argv.push_back("rtq");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help / --version
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << '\n';
        return 64; // usage error
    }

    auto parse_list = [&](const std::string& s) {
        std::vector<double> vals;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            vals.push_back(std::stod(tok));
        }
        return vals;
    };

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir, out, err);
        if (repr->parsed()) {
            if (!rates_csv.empty()) rep.rates = parse_list(rates_csv);
            if (!means_csv.empty()) rep.means = parse_list(means_csv);
            return cmd_reproduce(rep, out, err);
        }
        if (ver->parsed()) return cmd_verify(verify_config, out_dir, workers, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 64;
}

} // namespace rtq::cli
