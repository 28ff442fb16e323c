#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtq/distribution.hpp"
#include "rtq/random.hpp"

namespace rtq {

/// One sampled task instance: everything the simulator needs to know about a
/// job is fixed at its arrival epoch.
struct TraceJob {
    double arrival;
    double service;
    double rel_deadline;
};

/// A finite realization of (inter-arrival, service, relative-deadline)
/// triples. Traces are immutable after generation and are the coupling unit
/// for common-random-numbers comparisons: every policy sees the same jobs.
struct Trace {
    std::vector<TraceJob> jobs;
    SeedTriple seeds;
    DistributionSpec arrival_spec;
    DistributionSpec service_spec;
    DistributionSpec deadline_spec;
};

/// Generates `n` jobs from three independent streams. Changing one spec
/// leaves the sequences drawn from the other two streams bit-identical.
inline Trace generate_trace(std::size_t n, const DistributionSpec& arrival,
                            const DistributionSpec& service,
                            const DistributionSpec& deadline, SeedTriple seeds) {
    if (n < 1) throw std::invalid_argument("trace needs at least one arrival");
    RandomStream arr(seeds.arrival), svc(seeds.service), dl(seeds.deadline);
    Trace t{{}, seeds, arrival, service, deadline};
    t.jobs.reserve(n);
    double clock = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double next = clock + arrival.sample(arr);
        // Cumulative sums can collide at ulp scale for very short gaps; keep
        // arrivals strictly increasing.
        if (next <= clock) next = std::nextafter(clock, 1e300);
        clock = next;
        t.jobs.push_back({clock, service.sample(svc), deadline.sample(dl)});
    }
    return t;
}

inline Trace generate_trace(std::size_t n, const DistributionSpec& arrival,
                            const DistributionSpec& service,
                            const DistributionSpec& deadline,
                            std::uint64_t master_seed) {
    return generate_trace(n, arrival, service, deadline,
                          SeedTriple::from_master(master_seed));
}

inline void validate_trace(std::span<const TraceJob> jobs) {
    double prev = -1.0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const TraceJob& j = jobs[i];
        if (!(j.arrival > prev))
            throw std::invalid_argument("trace: arrivals must be strictly "
                                        "increasing at job " + std::to_string(i));
        if (!(j.service > 0.0))
            throw std::invalid_argument("trace: service must be > 0 at job " +
                                        std::to_string(i));
        if (!(j.rel_deadline > 0.0))
            throw std::invalid_argument("trace: relative deadline must be > 0 "
                                        "at job " + std::to_string(i));
        prev = j.arrival;
    }
}

/// CSV fixture format: header `id,arrival,service,rel_deadline`, doubles with
/// 17 significant digits so import reproduces the exact bits.
inline void write_trace_csv(std::ostream& out, std::span<const TraceJob> jobs) {
    out << "id,arrival,service,rel_deadline\n";
    char buf[128];
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i,
                      jobs[i].arrival, jobs[i].service, jobs[i].rel_deadline);
        out << buf;
    }
}

inline std::vector<TraceJob> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("id,arrival,service,rel_deadline", 0) != 0)
        throw std::invalid_argument("trace csv: missing or bad header");
    std::vector<TraceJob> jobs;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        TraceJob j{};
        unsigned long id = 0;
        if (std::sscanf(line.c_str(), "%lu,%lg,%lg,%lg", &id, &j.arrival,
                        &j.service, &j.rel_deadline) != 4)
            throw std::invalid_argument("trace csv: malformed row at line " +
                                        std::to_string(lineno));
        if (id != jobs.size())
            throw std::invalid_argument("trace csv: ids must be consecutive "
                                        "from 0, line " + std::to_string(lineno));
        jobs.push_back(j);
    }
    validate_trace(jobs);
    return jobs;
}

} // namespace rtq
