#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rtq {

/// Disposal states are terminal and reached exactly once; Waiting/InService
/// alternate before that (preemption moves InService back to Waiting).
enum class JobStatus : std::uint8_t {
    Waiting,
    InService,
    Completed,
    Expired,      // firm deadline passed while the job was still in the system
    DiscardedEdt, // dropped at a server-grant epoch by the early-discard check
    RejectedEac,  // denied admission at arrival by the exact admission test
};

inline bool is_terminal(JobStatus s) { return s >= JobStatus::Completed; }

inline const char* status_name(JobStatus s) {
    switch (s) {
    case JobStatus::Waiting: return "waiting";
    case JobStatus::InService: return "in_service";
    case JobStatus::Completed: return "completed";
    case JobStatus::Expired: return "expired";
    case JobStatus::DiscardedEdt: return "discarded_edt";
    case JobStatus::RejectedEac: return "rejected_eac";
    }
    return "?";
}

/// One task instance inside a running simulation. `remaining` is folded down
/// only at event boundaries (preemption, expiry, completion); between those,
/// current_remaining() accounts for service delivered since the last grant.
struct Job {
    std::uint32_t id = 0;
    double arrival = 0.0;
    double service = 0.0;   // total requirement, known at arrival
    double deadline = 0.0;  // absolute: arrival + relative deadline
    double remaining = 0.0; // as of the last fold point
    double last_grant = 0.0;
    JobStatus status = JobStatus::Waiting;

    double current_remaining(double now) const {
        return status == JobStatus::InService ? remaining - (now - last_grant)
                                              : remaining;
    }
};

} // namespace rtq
