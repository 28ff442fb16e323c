#pragma once

#include <array>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rtq/job.hpp"

namespace rtq {

enum class Discipline : std::uint8_t { Fcfs, Edf };
enum class Guard : std::uint8_t { None, Edt, Eac };

/// One of the six policies: discipline (queue order, preemption) composed
/// with an optional guard (early discard at grant, or admission at arrival).
struct PolicySpec {
    Discipline discipline = Discipline::Fcfs;
    Guard guard = Guard::None;

    bool operator==(const PolicySpec&) const = default;

    std::string name() const {
        std::string s = discipline == Discipline::Fcfs ? "fcfs" : "edf";
        if (guard == Guard::Edt) s += "-edt";
        if (guard == Guard::Eac) s += "-eac";
        return s;
    }

    static PolicySpec parse(const std::string& s) {
        for (const PolicySpec& p : all())
            if (p.name() == s) return p;
        throw std::invalid_argument("unknown policy '" + s + "' (valid: " +
                                    valid_names() + ")");
    }

    static const std::array<PolicySpec, 6>& all() {
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

    static std::string valid_names() {
        std::string s;
        for (const PolicySpec& p : all()) {
            if (!s.empty()) s += ", ";
            s += p.name();
        }
        return s;
    }
};

/// The live admitted jobs (waiting plus at most one in service), totally
/// ordered by arrival id under FCFS and by (absolute deadline, arrival id)
/// under EDF. The deadline tie-break by id is fixed for determinism.
class ReadyQueue {
public:
    using Key = std::pair<double, std::uint32_t>;

    ReadyQueue(Discipline d, const std::vector<Job>& jobs)
        : discipline_(d), jobs_(&jobs) {}

    Key key(const Job& j) const {
        return {discipline_ == Discipline::Edf ? j.deadline : 0.0, j.id};
    }

    bool precedes(const Job& a, const Job& b) const { return key(a) < key(b); }

    void insert_waiting(std::uint32_t id) { waiting_.insert(key(job(id))); }
    void erase_waiting(std::uint32_t id) { waiting_.erase(key(job(id))); }

    bool has_waiting() const { return !waiting_.empty(); }
    std::size_t waiting_count() const { return waiting_.size(); }

    std::optional<std::uint32_t> head_waiting() const {
        if (waiting_.empty()) return std::nullopt;
        return waiting_.begin()->second;
    }

    std::optional<Key> min_waiting_key() const {
        if (waiting_.empty()) return std::nullopt;
        return *waiting_.begin();
    }

    std::optional<std::uint32_t> in_service() const { return in_service_; }
    void set_in_service(std::uint32_t id) { in_service_ = id; }
    void clear_in_service() { in_service_.reset(); }

    std::size_t live_count() const {
        return waiting_.size() + (in_service_ ? 1 : 0);
    }

    /// Sum of remaining service over all live admitted jobs, valued at `now`.
    double total_remaining(double now) const {
        double sum = 0.0;
        if (in_service_) sum += job(*in_service_).current_remaining(now);
        for (const Key& k : waiting_) sum += job(k.second).remaining;
        return sum;
    }

    /// Visits every live job in queue order, merging the in-service job into
    /// the waiting order by its key.
    template <class Fn>
    void for_each_live_ordered(Fn&& fn) const {
        auto it = waiting_.begin();
        bool service_pending = in_service_.has_value();
        Key service_key{};
        if (service_pending) service_key = key(job(*in_service_));
        while (it != waiting_.end() || service_pending) {
            if (service_pending && (it == waiting_.end() || service_key < *it)) {
                fn(job(*in_service_));
                service_pending = false;
            } else {
                fn(job(it->second));
                ++it;
            }
        }
    }

    const Job& job(std::uint32_t id) const { return (*jobs_)[id]; }
    Discipline discipline() const { return discipline_; }

private:
    Discipline discipline_;
    const std::vector<Job>* jobs_;
    std::set<Key> waiting_;
    std::optional<std::uint32_t> in_service_;
};

/// Early-discard feasibility: a job may receive the server only if it can
/// still finish by its deadline. Completion exactly at the deadline counts.
inline bool edt_serve_ok(const Job& j, double now) {
    return now + j.remaining <= j.deadline;
}

/// FCFS admission: only the arriving job's own completion is at risk (tail
/// insertion cannot delay earlier jobs), so the test is a single backlog sum.
inline bool admit_fcfs_eac(const ReadyQueue& q, const Job& candidate, double now) {
    return now + q.total_remaining(now) + candidate.service <= candidate.deadline;
}

/// EDF admission: with the candidate inserted in deadline order, every live
/// job must still complete by its deadline when service proceeds in queue
/// order from `now`. Linear scan over the live set.
inline bool admit_edf_eac(const ReadyQueue& q, const Job& candidate, double now) {
    const ReadyQueue::Key cand_key{candidate.deadline, candidate.id};
    double cum = now;
    bool cand_pending = true;
    bool ok = true;
    auto visit = [&](double rem, double deadline) {
        cum += rem;
        if (cum > deadline) ok = false;
    };
    q.for_each_live_ordered([&](const Job& j) {
        if (!ok) return;
        if (cand_pending && cand_key < q.key(j)) {
            visit(candidate.service, candidate.deadline);
            cand_pending = false;
        }
        if (!ok) return;
        visit(j.current_remaining(now), j.deadline);
    });
    if (ok && cand_pending) visit(candidate.service, candidate.deadline);
    return ok;
}

struct ArrivalOutcome {
    bool admitted = false;
    bool preempt = false; // EDF only: the new job precedes the in-service one
};

/// Handles one arrival: runs the admission guard, inserts the job at its
/// order position, and reports whether it preempts the running job.
inline ArrivalOutcome on_arrival(ReadyQueue& q, const Job& job, double now,
                                 PolicySpec policy) {
    if (policy.guard == Guard::Eac) {
        const bool ok = policy.discipline == Discipline::Fcfs
                            ? admit_fcfs_eac(q, job, now)
                            : admit_edf_eac(q, job, now);
        if (!ok) return {false, false};
    }
    q.insert_waiting(job.id);
    bool preempt = false;
    if (policy.discipline == Discipline::Edf && q.in_service())
        preempt = q.precedes(job, q.job(*q.in_service()));
    return {true, preempt};
}

/// Picks the job to grant the server to. Under guard=EDT, infeasible heads
/// are removed (reported through `on_discard`) until a serviceable head or an
/// empty queue remains; the check reapplies at every grant, including
/// re-grants of previously preempted jobs.
template <class OnDiscard, class EdtRule>
std::optional<std::uint32_t> select_next(ReadyQueue& q, double now,
                                         PolicySpec policy, OnDiscard&& on_discard,
                                         EdtRule&& edt_ok) {
    while (auto head = q.head_waiting()) {
        if (policy.guard == Guard::Edt && !edt_ok(q.job(*head), now)) {
            q.erase_waiting(*head);
            on_discard(*head);
            continue;
        }
        return head;
    }
    return std::nullopt;
}

template <class OnDiscard>
std::optional<std::uint32_t> select_next(ReadyQueue& q, double now,
                                         PolicySpec policy, OnDiscard&& on_discard) {
    return select_next(q, now, policy, std::forward<OnDiscard>(on_discard),
                       [](const Job& j, double t) { return edt_serve_ok(j, t); });
}

} // namespace rtq
