#pragma once

#include <cassert>
#include <cstdint>
#include <ostream>
#include <queue>
#include <span>
#include <vector>

#include "rtq/policy.hpp"
#include "rtq/trace.hpp"

namespace rtq {

enum class EventKind : std::uint8_t { Completion = 0, DeadlineExpiry = 1, Arrival = 2 };

/// Calendar entry. Simultaneous events are processed in (time, kind, job id)
/// order: a completion at exactly the deadline epoch succeeds, and a server
/// freed at time t is visible to an arrival at the same instant.
struct Event {
    double time;
    EventKind kind;
    std::uint32_t job;
    std::uint32_t seq; // grant generation; stale completions are skipped

    friend bool operator>(const Event& a, const Event& b) {
        if (a.time != b.time) return a.time > b.time;
        if (a.kind != b.kind) return a.kind > b.kind;
        return a.job > b.job;
    }
};

struct DisposalRecord {
    std::uint32_t id;
    JobStatus status;
    double epoch;
};

/// Per-run result. Every arrival reaches exactly one terminal status, so
/// completed + expired + discarded_edt + rejected_eac == arrivals.
struct SimOutcome {
    std::uint64_t arrivals = 0;
    std::uint64_t completed = 0;
    std::uint64_t expired = 0;
    std::uint64_t discarded_edt = 0;
    std::uint64_t rejected_eac = 0;
    double loss_ratio = 0.0;
    double busy_time = 0.0;
    std::vector<DisposalRecord> disposal_log; // indexed by job id

    std::uint64_t lost() const { return arrivals - completed; }
};

inline void write_disposal_csv(std::ostream& out, const SimOutcome& o) {
    out << "id,status,epoch\n";
    char buf[96];
    for (const DisposalRecord& r : o.disposal_log) {
        std::snprintf(buf, sizeof buf, "%u,%s,%.17g\n", r.id,
                      status_name(r.status), r.epoch);
        out << buf;
    }
}

/// No-op instrumentation; tests substitute observers to check grant order,
/// preemption accounting, and disposal side conditions.
struct NullObserver {
    void on_grant(double, const Job&, const ReadyQueue&) {}
    void on_preempt(double, const Job&) {}
    void on_dispose(double, const Job&, JobStatus, bool /*was_in_service*/) {}
    void on_dispatch_done(double, const ReadyQueue&) {}
};

struct DefaultEdtRule {
    bool operator()(const Job& j, double now) const { return edt_serve_ok(j, now); }
};

namespace detail {

template <class Observer, class EdtRule>
class Simulation {
public:
    Simulation(std::span<const TraceJob> trace, PolicySpec policy, Observer& obs,
               EdtRule edt)
        : trace_(trace), policy_(policy), obs_(obs), edt_(edt),
          queue_(policy.discipline, jobs_) {}

    SimOutcome run() {
        if (trace_.empty())
            throw std::invalid_argument("trace: needs at least one arrival");
        validate_trace(trace_);
        const std::size_t n = trace_.size();
        jobs_.resize(n);
        seq_.assign(n, 0);
        out_.arrivals = n;
        out_.disposal_log.resize(n);

        push({trace_[0].arrival, EventKind::Arrival, 0, 0});
        while (!calendar_.empty()) {
            const double now = calendar_.top().time;
            while (!calendar_.empty() && calendar_.top().time == now) {
                const Event ev = calendar_.top();
                calendar_.pop();
                handle(ev);
            }
            dispatch(now);
            obs_.on_dispatch_done(now, queue_);
        }

        assert(out_.completed + out_.expired + out_.discarded_edt +
                   out_.rejected_eac == out_.arrivals);
        out_.loss_ratio =
            1.0 - static_cast<double>(out_.completed) / static_cast<double>(n);
        return std::move(out_);
    }

private:
    void push(Event ev) { calendar_.push(ev); }

    void handle(const Event& ev) {
        switch (ev.kind) {
        case EventKind::Arrival: handle_arrival(ev); break;
        case EventKind::Completion: handle_completion(ev); break;
        case EventKind::DeadlineExpiry: handle_expiry(ev); break;
        }
    }

    void handle_arrival(const Event& ev) {
        const std::uint32_t id = ev.job;
        const TraceJob& tj = trace_[id];
        Job& j = jobs_[id];
        j.id = id;
        j.arrival = tj.arrival;
        j.service = tj.service;
        j.remaining = tj.service;
        j.deadline = tj.arrival + tj.rel_deadline;
        j.status = JobStatus::Waiting;

        if (id + 1 < trace_.size())
            push({trace_[id + 1].arrival, EventKind::Arrival, id + 1, 0});

        const ArrivalOutcome res = on_arrival(queue_, j, ev.time, policy_);
        if (!res.admitted) {
            dispose(id, JobStatus::RejectedEac, ev.time, false);
            return;
        }
        push({j.deadline, EventKind::DeadlineExpiry, id, 0});
        // Preemption itself happens in dispatch(), which re-derives the order;
        // res.preempt is only needed by callers of the policy layer directly.
    }

    void handle_completion(const Event& ev) {
        Job& j = jobs_[ev.job];
        if (j.status != JobStatus::InService || ev.seq != seq_[ev.job])
            return; // cancelled by a preemption or an earlier disposal
        const double delivered = ev.time - j.last_grant;
        out_.busy_time += delivered;
        j.remaining = 0.0;
        queue_.clear_in_service();
        dispose(ev.job, JobStatus::Completed, ev.time, true);
    }

    void handle_expiry(const Event& ev) {
        Job& j = jobs_[ev.job];
        if (is_terminal(j.status)) return; // completed or discarded earlier
        const bool in_service = j.status == JobStatus::InService;
        if (in_service) {
            const double delivered = ev.time - j.last_grant;
            out_.busy_time += delivered;
            j.remaining -= delivered;
            ++seq_[ev.job]; // cancel the pending completion
            queue_.clear_in_service();
        } else {
            queue_.erase_waiting(ev.job);
        }
        dispose(ev.job, JobStatus::Expired, ev.time, in_service);
    }

    void dispatch(double now) {
        // EDF preemption: a waiting job that precedes the running one takes
        // the server; the preempted job folds its remaining and re-queues.
        if (policy_.discipline == Discipline::Edf) {
            const auto running = queue_.in_service();
            const auto head = queue_.min_waiting_key();
            if (running && head && *head < queue_.key(jobs_[*running])) {
                Job& r = jobs_[*running];
                const double delivered = now - r.last_grant;
                out_.busy_time += delivered;
                r.remaining -= delivered;
                r.status = JobStatus::Waiting;
                ++seq_[*running];
                queue_.clear_in_service();
                queue_.insert_waiting(*running);
                obs_.on_preempt(now, r);
            }
        }
        while (!queue_.in_service()) {
            auto next = select_next(
                queue_, now, policy_,
                [&](std::uint32_t id) {
                    dispose(id, JobStatus::DiscardedEdt, now, false);
                },
                [&](const Job& j, double t) { return edt_(j, t); });
            if (!next) break;
            Job& j = jobs_[*next];
            queue_.erase_waiting(*next);
            queue_.set_in_service(*next);
            j.status = JobStatus::InService;
            j.last_grant = now;
            push({now + j.remaining, EventKind::Completion, *next, seq_[*next]});
            obs_.on_grant(now, j, queue_);
        }
    }

    void dispose(std::uint32_t id, JobStatus status, double epoch,
                 bool was_in_service) {
        Job& j = jobs_[id];
        assert(!is_terminal(j.status));
        j.status = status;
        out_.disposal_log[id] = {id, status, epoch};
        switch (status) {
        case JobStatus::Completed: ++out_.completed; break;
        case JobStatus::Expired: ++out_.expired; break;
        case JobStatus::DiscardedEdt: ++out_.discarded_edt; break;
        case JobStatus::RejectedEac: ++out_.rejected_eac; break;
        default: assert(false);
        }
        obs_.on_dispose(epoch, j, status, was_in_service);
    }

    std::span<const TraceJob> trace_;
    PolicySpec policy_;
    Observer& obs_;
    EdtRule edt_;
    std::vector<Job> jobs_;
    std::vector<std::uint32_t> seq_;
    ReadyQueue queue_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> calendar_;
    SimOutcome out_;
};

} // namespace detail

/// Simulates one trace under one policy until every arrived job is disposed
/// (the run continues past the last arrival until the system drains). A pure
/// function of (trace, policy).
template <class Observer, class EdtRule = DefaultEdtRule>
SimOutcome run_observed(std::span<const TraceJob> trace, PolicySpec policy,
                        Observer& obs, EdtRule edt = {}) {
    detail::Simulation<Observer, EdtRule> sim(trace, policy, obs, edt);
    return sim.run();
}

inline SimOutcome run(std::span<const TraceJob> trace, PolicySpec policy) {
    NullObserver obs;
    return run_observed(trace, policy, obs);
}

inline SimOutcome run(const Trace& trace, PolicySpec policy) {
    return run(std::span<const TraceJob>(trace.jobs), policy);
}

/// Runs several policies over the identical trace (common random numbers);
/// outputs align by job id for per-path set comparisons.
inline std::vector<SimOutcome> run_coupled(std::span<const TraceJob> trace,
                                           std::span<const PolicySpec> policies) {
    std::vector<SimOutcome> outs;
    outs.reserve(policies.size());
    for (const PolicySpec& p : policies) outs.push_back(run(trace, p));
    return outs;
}

inline std::vector<SimOutcome> run_coupled(const Trace& trace,
                                           std::span<const PolicySpec> policies) {
    return run_coupled(std::span<const TraceJob>(trace.jobs), policies);
}

} // namespace rtq
