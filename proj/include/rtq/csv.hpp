#pragma once

#include <cstdio>
#include <ostream>
#include <span>
#include <string>

#include "rtq/experiments.hpp"

namespace rtq {

// Doubles are written with 17 significant digits so that re-reading (or
// re-running) reproduces exact values.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_results_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "scenario,policy,family,rate,mean_deadline,seed,loss,ci\n";
    for (const SweepRow& r : rows) {
        out << r.scenario << ',' << r.policy << ',' << r.family << ','
            << fmt_double(r.rate) << ',' << fmt_double(r.mean_deadline) << ','
            << r.seed << ',' << fmt_double(r.loss) << ',' << fmt_double(r.ci)
            << '\n';
    }
}

inline void write_verdicts_csv(std::ostream& out, std::span<const VerdictRow> rows) {
    out << "relation,kind,verdict,evidence_seed\n";
    for (const VerdictRow& r : rows)
        out << r.relation << ',' << r.kind << ',' << r.verdict << ','
            << r.evidence_seed << '\n';
}

} // namespace rtq
