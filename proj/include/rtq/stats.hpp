#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtq/engine.hpp"

namespace rtq {

inline constexpr double kZ975 = 1.9599639845400545; // standard normal 97.5%

namespace detail {

// Regularized incomplete beta via Lentz continued fractions; used for the
// Student t CDF and its quantile.
inline double beta_cont_frac(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-16;
    constexpr double fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0))
        return bt * beta_cont_frac(a, b, x) / a;
    return 1.0 - bt * beta_cont_frac(b, a, 1.0 - x) / b;
}

} // namespace detail

/// P(T <= t) for Student t with `df` degrees of freedom.
inline double student_t_cdf(double t, double df) {
    const double x = df / (df + t * t);
    const double p = 0.5 * detail::incomplete_beta(0.5 * df, 0.5, x);
    return t >= 0.0 ? 1.0 - p : p;
}

/// Upper quantile t such that P(T <= t) = p, by bisection.
inline double student_t_quantile(double p, double df) {
    if (!(p > 0.5 && p < 1.0)) throw std::invalid_argument("quantile p in (0.5,1)");
    double lo = 0.0, hi = 1e3;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (student_t_cdf(mid, df) < p ? lo : hi) = mid;
        if (hi - lo < 1e-12 * hi) break;
    }
    return 0.5 * (lo + hi);
}

/// Loss-ratio point estimate over post-warm-up arrivals with a batch-means
/// 95% confidence interval (non-overlapping batches, normal quantile).
struct LossEstimate {
    double point = 0.0;
    double ci_half_width = 0.0;
    int batches = 0;
    std::uint64_t warmup_discarded = 0;
};

inline LossEstimate loss_estimate(const SimOutcome& outcome, std::uint64_t warmup,
                                  int batches) {
    if (batches < 2) throw std::invalid_argument("loss_estimate: batches >= 2");
    if (warmup >= outcome.arrivals)
        throw std::invalid_argument("loss_estimate: warmup must leave jobs");
    const std::uint64_t n = outcome.arrivals - warmup;
    if (n / static_cast<std::uint64_t>(batches) < 100)
        throw std::invalid_argument(
            "loss_estimate: fewer than 100 post-warm-up jobs per batch");

    std::uint64_t lost_total = 0;
    std::vector<double> batch_mean(static_cast<std::size_t>(batches), 0.0);
    const std::uint64_t base = n / batches, extra = n % batches;
    std::uint64_t idx = warmup;
    for (int b = 0; b < batches; ++b) {
        const std::uint64_t len = base + (static_cast<std::uint64_t>(b) < extra);
        std::uint64_t lost = 0;
        for (std::uint64_t k = 0; k < len; ++k, ++idx)
            lost += outcome.disposal_log[idx].status != JobStatus::Completed;
        lost_total += lost;
        batch_mean[b] = static_cast<double>(lost) / static_cast<double>(len);
    }

    LossEstimate est;
    est.point = static_cast<double>(lost_total) / static_cast<double>(n);
    est.batches = batches;
    est.warmup_discarded = warmup;
    double var = 0.0;
    for (double m : batch_mean) var += (m - est.point) * (m - est.point);
    var /= batches - 1;
    est.ci_half_width = kZ975 * std::sqrt(var / batches);
    return est;
}

enum class CompareVerdict { ALessThanB, BLessThanA, Indistinguishable };

inline const char* verdict_name(CompareVerdict v) {
    switch (v) {
    case CompareVerdict::ALessThanB: return "A<B";
    case CompareVerdict::BLessThanA: return "B<A";
    case CompareVerdict::Indistinguishable: return "indistinguishable";
    }
    return "?";
}

/// Mean per-trace difference loss(A) - loss(B) under common random numbers,
/// with a t-based 95% CI and a sign verdict.
struct PairedComparison {
    double mean_diff = 0.0;
    double ci_half_width = 0.0;
    int pairs = 0;
    CompareVerdict verdict = CompareVerdict::Indistinguishable;

    double lower() const { return mean_diff - ci_half_width; }
    double upper() const { return mean_diff + ci_half_width; }
};

inline PairedComparison paired_compare(std::span<const double> loss_a,
                                       std::span<const double> loss_b) {
    if (loss_a.size() != loss_b.size() || loss_a.empty())
        throw std::invalid_argument("paired_compare: length mismatch");
    PairedComparison r;
    r.pairs = static_cast<int>(loss_a.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < loss_a.size(); ++i) sum += loss_a[i] - loss_b[i];
    r.mean_diff = sum / r.pairs;
    if (r.pairs >= 2) {
        double var = 0.0;
        for (std::size_t i = 0; i < loss_a.size(); ++i) {
            const double d = loss_a[i] - loss_b[i] - r.mean_diff;
            var += d * d;
        }
        var /= r.pairs - 1;
        const double t = student_t_quantile(0.975, r.pairs - 1);
        r.ci_half_width = t * std::sqrt(var / r.pairs);
    }
    if (r.upper() < 0.0) r.verdict = CompareVerdict::ALessThanB;
    else if (r.lower() > 0.0) r.verdict = CompareVerdict::BLessThanA;
    else r.verdict = CompareVerdict::Indistinguishable;
    return r;
}

inline PairedComparison paired_compare(std::span<const SimOutcome> a,
                                       std::span<const SimOutcome> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("paired_compare: length mismatch");
    std::vector<double> la(a.size()), lb(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        la[i] = a[i].loss_ratio;
        lb[i] = b[i].loss_ratio;
    }
    return paired_compare(std::span<const double>(la), std::span<const double>(lb));
}

/// One sweep point for crossing detection: the loss difference A-B at `rate`
/// with its 95% half-width.
struct DiffPoint {
    double rate;
    double diff;
    double ci_half_width;

    bool significantly_negative() const { return diff + ci_half_width < 0.0; }
    bool significantly_positive() const { return diff - ci_half_width > 0.0; }
};

struct RatePoint {
    double rate;
    LossEstimate a;
    LossEstimate b;
};

struct CrossingInterval {
    double rate_lo = 0.0;
    double rate_hi = 0.0;
    int direction = 0; // +1: A-B goes negative->positive; -1: the reverse
};

/// Scans a rate-sorted sweep for a CI-significant sign change of the loss
/// difference; returns the bracketing rate interval, or nothing.
inline std::optional<CrossingInterval> find_crossing(std::span<const DiffPoint> sweep) {
    if (sweep.size() < 3)
        throw std::invalid_argument("find_crossing: need at least 3 points");
    for (std::size_t i = 1; i < sweep.size(); ++i)
        if (!(sweep[i].rate > sweep[i - 1].rate))
            throw std::invalid_argument("find_crossing: points must be sorted by rate");

    auto bracket = [&](auto first_sig, auto second_sig,
                       int dir) -> std::optional<CrossingInterval> {
        std::optional<std::size_t> hi;
        for (std::size_t i = 0; i < sweep.size(); ++i)
            if (second_sig(sweep[i])) { hi = i; break; }
        if (!hi) return std::nullopt;
        std::optional<std::size_t> lo;
        for (std::size_t i = 0; i < *hi; ++i)
            if (first_sig(sweep[i])) lo = i;
        if (!lo) return std::nullopt;
        return CrossingInterval{sweep[*lo].rate, sweep[*hi].rate, dir};
    };

    auto neg = [](const DiffPoint& p) { return p.significantly_negative(); };
    auto pos = [](const DiffPoint& p) { return p.significantly_positive(); };
    if (auto c = bracket(neg, pos, +1)) return c;
    return bracket(pos, neg, -1);
}

/// Convenience overload on paired loss estimates; the difference CI is the
/// conservative sum of the two half-widths.
inline std::optional<CrossingInterval> find_crossing(std::span<const RatePoint> sweep) {
    std::vector<DiffPoint> diffs;
    diffs.reserve(sweep.size());
    for (const RatePoint& p : sweep)
        diffs.push_back({p.rate, p.a.point - p.b.point,
                         p.a.ci_half_width + p.b.ci_half_width});
    return find_crossing(std::span<const DiffPoint>(diffs));
}

} // namespace rtq
