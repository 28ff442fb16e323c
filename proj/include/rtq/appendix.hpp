#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "rtq/random.hpp"

namespace rtq {

/// The remaining-service comparison scenario behind the EDF-EDT vs EDF-EAC
/// dominance argument: two jobs with exponential(mu) remaining service times
/// X and X', conditioned on the event E that the first completes in time
/// under the early-discard schedule while the second completes only under
/// the admission-controlled one.
///
///   a = min{d - tau, d + d* - tau - tau*},  b = d + d* + d' - tau - tau*
///
/// Conditioned on E, X is supported on (0, a] and X' on (b-a, b].
struct AppendixScenario {
    double tau = 0.0;
    double tau_star = 0.0;
    double d = 0.0;
    double d_star = 0.0;
    double d_prime = 0.0;
    double mu = 1.0;

    double a() const { return std::min(d - tau, d + d_star - tau - tau_star); }
    double b() const { return d + d_star + d_prime - tau - tau_star; }

    void validate() const {
        if (!(tau > 0.0 && tau_star > 0.0 && d > 0.0 && d_star > 0.0 &&
              d_prime > 0.0 && mu > 0.0))
            throw std::invalid_argument("appendix scenario: all parameters > 0");
        if (!(tau < d))
            throw std::invalid_argument("appendix scenario: requires tau < d");
        if (!(tau + tau_star < d + d_star))
            throw std::invalid_argument(
                "appendix scenario: requires tau + tau* < d + d*");
        if (!(a() <= b())) throw std::invalid_argument("appendix scenario: a <= b");
    }
};

namespace detail {
// g(z) = z - (1 - e^-z), the unnormalized CDF kernel; increasing, g(0) = 0.
inline double cdf_kernel(double z) { return z + std::expm1(-z); }
} // namespace detail

/// P(E) in closed form: the double integral of mu^2 e^{-mu(x+x')} over
/// {x <= a, x' <= b < x + x'} reduces to e^{-mu b} [mu a - (1 - e^{-mu a})].
inline double event_probability(const AppendixScenario& s) {
    return std::exp(-s.mu * s.b()) * detail::cdf_kernel(s.mu * s.a());
}

/// F_{X|E}(t) = (e^{-mu b}/P(E)) [mu t - (1 - e^{-mu t})] on 0 < t <= a.
inline double cdf_x_given_e(const AppendixScenario& s, double t) {
    if (t <= 0.0) return 0.0;
    if (t >= s.a()) return 1.0;
    return detail::cdf_kernel(s.mu * t) / detail::cdf_kernel(s.mu * s.a());
}

/// F_{X'|E}(t): zero up to b-a, then the same kernel shifted by b-a, one
/// beyond b.
inline double cdf_xprime_given_e(const AppendixScenario& s, double t) {
    const double shift = s.b() - s.a();
    if (t <= shift) return 0.0;
    if (t >= s.b()) return 1.0;
    return detail::cdf_kernel(s.mu * (t - shift)) / detail::cdf_kernel(s.mu * s.a());
}

/// f_{X|E}(x) = (mu/P(E)) e^{-mu b} (1 - e^{-mu x}) on 0 <= x <= a.
inline double pdf_x_given_e(const AppendixScenario& s, double x) {
    if (x < 0.0 || x > s.a()) return 0.0;
    return s.mu * (-std::expm1(-s.mu * x)) / detail::cdf_kernel(s.mu * s.a());
}

/// E[X | E] = [mu a^2/2 + a e^{-mu a} - (1 - e^{-mu a})/mu] / g(mu a).
inline double mean_x_given_e(const AppendixScenario& s) {
    const double mu = s.mu, a = s.a();
    const double num = 0.5 * mu * a * a + a * std::exp(-mu * a) +
                       std::expm1(-mu * a) / mu;
    return num / detail::cdf_kernel(mu * a);
}

/// X' | E is X | E shifted by b - a.
inline double mean_xprime_given_e(const AppendixScenario& s) {
    return mean_x_given_e(s) + s.b() - s.a();
}

/// Adaptive Simpson quadrature to a relative tolerance.
inline double adaptive_simpson(const std::function<double(double)>& f, double lo,
                               double hi, double rel_tol) {
    struct Impl {
        const std::function<double(double)>& f;
        double recurse(double a, double m, double b, double fa, double fm,
                       double fb, double whole, double tol, int depth) const {
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (depth <= 0 || std::abs(delta) <= 15.0 * std::max(tol, 1e-300))
                return left + right + delta / 15.0;
            return recurse(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
                   recurse(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }
    };
    const double m = 0.5 * (lo + hi);
    const double fa = f(lo), fm = f(m), fb = f(hi);
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    Impl impl{f};
    return impl.recurse(lo, m, hi, fa, fm, fb, whole,
                        rel_tol * std::max(std::abs(whole), 1e-30), 48);
}

/// P(E) by quadrature of the stated double integral (the inner x' integral is
/// exponential and taken in closed form, the outer by adaptive Simpson).
inline double event_probability_quadrature(const AppendixScenario& s,
                                           double rel_tol = 1e-10) {
    const double mu = s.mu, b = s.b();
    return adaptive_simpson(
        [mu, b](double x) {
            return mu * std::exp(-mu * x) *
                   (std::exp(-mu * (b - x)) - std::exp(-mu * b));
        },
        0.0, s.a(), rel_tol);
}

/// Samples (X, X') | E by rejection from i.i.d. Exp(mu) pairs.
struct RejectionSample {
    std::vector<double> x;
    std::vector<double> xprime;
    std::uint64_t total_draws = 0;
};

inline RejectionSample rejection_sample_event(const AppendixScenario& s,
                                              std::size_t accepted_target,
                                              std::uint64_t seed,
                                              std::uint64_t max_draws = 2'000'000'000ULL) {
    RandomStream stream(seed);
    RejectionSample out;
    out.x.reserve(accepted_target);
    out.xprime.reserve(accepted_target);
    const double a = s.a(), b = s.b(), inv_mu = 1.0 / s.mu;
    while (out.x.size() < accepted_target) {
        if (++out.total_draws > max_draws)
            throw std::runtime_error("rejection sampler: event probability too "
                                     "small for requested sample size");
        const double x = -inv_mu * std::log(stream.next_unit());
        const double xp = -inv_mu * std::log(stream.next_unit());
        if (x <= a && xp <= b && x + xp > b) {
            out.x.push_back(x);
            out.xprime.push_back(xp);
        }
    }
    return out;
}

/// Full numerical check of the appendix argument for one scenario. The Monte
/// Carlo gate compares the conditional means at 3 standard errors (the
/// canonical per-scenario estimate) and requires both empirical CDFs to stay
/// inside a 99.9% DKW band around the closed forms; the worst per-decile
/// z-score is reported for inspection but is a correlated 18-way statistic,
/// not a gate.
struct AppendixReport {
    double p_event = 0.0;
    double p_event_quadrature = 0.0;
    bool cdfs_valid = false;        // monotone, 0 at the left edge, reach 1
    bool dominance_holds = false;   // F_X >= F_X' pointwise on the grid
    double min_dominance_margin = 0.0;
    double mc_mean_sigma_x = 0.0;   // |sample mean - closed mean| / std.err.
    double mc_mean_sigma_xprime = 0.0;
    bool mc_dkw_ok = false;         // sup |ecdf - cdf| within the 99.9% band
    double mc_max_decile_sigma = 0.0;
    std::uint64_t mc_accepted = 0;
    bool sufficient_condition_holds = false; // e^{-mu(b-a)} >= 1 - mu(b-a)

    bool ok() const {
        return cdfs_valid && dominance_holds && sufficient_condition_holds &&
               mc_mean_sigma_x <= 3.0 && mc_mean_sigma_xprime <= 3.0 && mc_dkw_ok;
    }
};

struct AppendixCheckOptions {
    std::size_t grid_points = 1000;
    std::size_t mc_accepted = 1'000'000;
    std::uint64_t seed = 4242;
    double cdf_tolerance = 1e-12;
};

inline AppendixReport appendix_dominance_check(const AppendixScenario& s,
                                               const AppendixCheckOptions& opt = {}) {
    s.validate();
    AppendixReport rep;
    rep.p_event = event_probability(s);
    rep.p_event_quadrature = event_probability_quadrature(s);

    const double a = s.a(), b = s.b();
    const double tol = opt.cdf_tolerance;

    // CDF validity and pointwise dominance on a shared grid over (0, b].
    bool valid = cdf_x_given_e(s, 0.0) == 0.0 && cdf_xprime_given_e(s, b - a) == 0.0 &&
                 std::abs(cdf_x_given_e(s, a) - 1.0) <= tol &&
                 std::abs(cdf_xprime_given_e(s, b) - 1.0) <= tol;
    double prev_x = 0.0, prev_xp = 0.0;
    double min_margin = 1e300;
    for (std::size_t i = 1; i <= opt.grid_points; ++i) {
        const double t = b * static_cast<double>(i) / opt.grid_points;
        const double fx = cdf_x_given_e(s, t);
        const double fxp = cdf_xprime_given_e(s, t);
        if (fx < prev_x - tol || fxp < prev_xp - tol) valid = false;
        if (fx < 0.0 - tol || fx > 1.0 + tol || fxp < 0.0 - tol || fxp > 1.0 + tol)
            valid = false;
        min_margin = std::min(min_margin, fx - fxp);
        prev_x = fx;
        prev_xp = fxp;
    }
    rep.cdfs_valid = valid;
    rep.min_dominance_margin = min_margin;
    rep.dominance_holds = min_margin >= -tol;

    const double z = s.mu * (b - a);
    rep.sufficient_condition_holds = std::exp(-z) >= 1.0 - z;

    // Rejection-sampling oracle.
    const RejectionSample mc = rejection_sample_event(s, opt.mc_accepted, opt.seed);
    rep.mc_accepted = mc.x.size();
    std::vector<double> xs(mc.x), xps(mc.xprime);
    std::sort(xs.begin(), xs.end());
    std::sort(xps.begin(), xps.end());
    const double n = static_cast<double>(xs.size());
    auto ecdf = [n](const std::vector<double>& sorted, double t) {
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
        return static_cast<double>(it - sorted.begin()) / n;
    };

    // Conditional means against their closed forms.
    auto mean_sigma = [n](const std::vector<double>& sample, double closed) {
        double sum = 0.0, sum2 = 0.0;
        for (double v : sample) {
            sum += v;
            sum2 += v * v;
        }
        const double mean = sum / n;
        const double sd = std::sqrt(std::max(sum2 / n - mean * mean, 1e-300));
        return std::abs(mean - closed) / (sd / std::sqrt(n));
    };
    rep.mc_mean_sigma_x = mean_sigma(xs, mean_x_given_e(s));
    rep.mc_mean_sigma_xprime = mean_sigma(xps, mean_xprime_given_e(s));

    // Simultaneous band: P(sup |ecdf - cdf| > eps) <= 2 e^{-2 n eps^2} = 0.001.
    const double dkw_eps = std::sqrt(std::log(2.0 / 0.001) / (2.0 * n));
    double sup_x = 0.0, sup_xp = 0.0;
    double worst_decile = 0.0;
    for (std::size_t i = 1; i <= opt.grid_points; ++i) {
        const double t = b * static_cast<double>(i) / opt.grid_points;
        sup_x = std::max(sup_x, std::abs(ecdf(xs, t) - cdf_x_given_e(s, t)));
        sup_xp = std::max(sup_xp, std::abs(ecdf(xps, t) - cdf_xprime_given_e(s, t)));
    }
    rep.mc_dkw_ok = sup_x <= dkw_eps && sup_xp <= dkw_eps;
    for (int k = 1; k <= 9; ++k) {
        const double tx = a * k / 10.0;
        const double txp = (b - a) + a * k / 10.0;
        const double fx = cdf_x_given_e(s, tx);
        const double fxp = cdf_xprime_given_e(s, txp);
        const double se_x = std::sqrt(std::max(fx * (1.0 - fx), 1e-12) / n);
        const double se_xp = std::sqrt(std::max(fxp * (1.0 - fxp), 1e-12) / n);
        worst_decile = std::max(worst_decile, std::abs(ecdf(xs, tx) - fx) / se_x);
        worst_decile = std::max(worst_decile, std::abs(ecdf(xps, txp) - fxp) / se_xp);
    }
    rep.mc_max_decile_sigma = worst_decile;
    return rep;
}

} // namespace rtq
