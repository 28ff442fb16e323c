#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>

#include "rtq/random.hpp"

namespace rtq {

enum class Family { Deterministic, Exponential, Uniform, LogNormal, TwoPoint };

inline const char* family_name(Family f) {
    switch (f) {
    case Family::Deterministic: return "deterministic";
    case Family::Exponential: return "exponential";
    case Family::Uniform: return "uniform";
    case Family::LogNormal: return "lognormal";
    case Family::TwoPoint: return "twopoint";
    }
    return "?";
}

inline Family family_from_name(const std::string& s) {
    if (s == "deterministic") return Family::Deterministic;
    if (s == "exponential") return Family::Exponential;
    if (s == "uniform") return Family::Uniform;
    if (s == "lognormal") return Family::LogNormal;
    if (s == "twopoint") return Family::TwoPoint;
    throw std::invalid_argument("unknown distribution family: '" + s +
                                "' (valid: deterministic, exponential, uniform, "
                                "lognormal, twopoint)");
}

/// A validated, positively supported distribution of time values. Parameters
/// are checked once at construction; sampling never fails.
class DistributionSpec {
    struct Deterministic {
        double value;
    };
    struct Exponential {
        double mean;
    };
    struct Uniform {
        double lo, hi;
    };
    struct LogNormal {
        double mean, cv;
        double log_loc, log_scale; // cached transform parameters
    };
    struct TwoPoint {
        double x1, p1, x2, p2;
    };

public:
    static DistributionSpec deterministic(double value) {
        require(value > 0.0, "deterministic value must be > 0");
        return DistributionSpec(Deterministic{value});
    }

    static DistributionSpec exponential(double mean) {
        require(mean > 0.0, "exponential mean must be > 0");
        return DistributionSpec(Exponential{mean});
    }

    static DistributionSpec uniform(double lo, double hi) {
        require(lo >= 0.0, "uniform lower bound must be >= 0");
        require(hi > lo, "uniform upper bound must exceed lower bound");
        return DistributionSpec(Uniform{lo, hi});
    }

    /// Uniform on (0, 2*mean): the mean-matched parameterization used by the
    /// deadline sweeps. The support is configurable through uniform(lo, hi).
    static DistributionSpec uniform_with_mean(double mean) {
        require(mean > 0.0, "uniform mean must be > 0");
        return uniform(0.0, 2.0 * mean);
    }

    /// Log-normal given (mean, cv): log-scale variance ln(1+cv^2), log-scale
    /// location ln(mean) - variance/2.
    static DistributionSpec log_normal(double mean, double cv = 1.0) {
        require(mean > 0.0, "lognormal mean must be > 0");
        require(cv > 0.0, "lognormal cv must be > 0");
        const double var = std::log1p(cv * cv);
        return DistributionSpec(
            LogNormal{mean, cv, std::log(mean) - 0.5 * var, std::sqrt(var)});
    }

    static DistributionSpec two_point(double x1, double p1, double x2, double p2) {
        require(x1 > 0.0 && x2 > 0.0, "two-point support values must be > 0");
        require(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0,
                "two-point probabilities must lie in [0, 1]");
        require(std::abs(p1 + p2 - 1.0) <= 1e-9,
                "two-point probabilities must sum to 1");
        return DistributionSpec(TwoPoint{x1, p1, x2, p2});
    }

    /// Two-point distribution with mass 0.9 at (5/9)*mean and 0.1 at 5*mean;
    /// total mean is exactly `mean`.
    static DistributionSpec two_point_with_mean(double mean) {
        require(mean > 0.0, "two-point mean must be > 0");
        return two_point(5.0 * mean / 9.0, 0.9, 5.0 * mean, 0.1);
    }

    /// Mean-matched spec for a named family, using the sweep conventions
    /// above (uniform on (0,2m), lognormal cv 1, 0.9/0.1 two-point shape).
    static DistributionSpec with_mean(Family family, double mean) {
        switch (family) {
        case Family::Deterministic: return deterministic(mean);
        case Family::Exponential: return exponential(mean);
        case Family::Uniform: return uniform_with_mean(mean);
        case Family::LogNormal: return log_normal(mean, 1.0);
        case Family::TwoPoint: return two_point_with_mean(mean);
        }
        throw std::invalid_argument("bad family");
    }

    Family family() const {
        switch (v_.index()) {
        case 0: return Family::Deterministic;
        case 1: return Family::Exponential;
        case 2: return Family::Uniform;
        case 3: return Family::LogNormal;
        default: return Family::TwoPoint;
        }
    }

    /// Analytic mean of the parameterization.
    double mean() const {
        if (auto* d = std::get_if<Deterministic>(&v_)) return d->value;
        if (auto* e = std::get_if<Exponential>(&v_)) return e->mean;
        if (auto* u = std::get_if<Uniform>(&v_)) return 0.5 * (u->lo + u->hi);
        if (auto* l = std::get_if<LogNormal>(&v_)) return l->mean;
        auto& t = std::get<TwoPoint>(v_);
        return t.p1 * t.x1 + t.p2 * t.x2;
    }

    /// One positive variate; the stream advances by a fixed per-family number
    /// of uniform draws (0 for deterministic, 2 for lognormal, else 1).
    double sample(RandomStream& stream) const {
        if (auto* d = std::get_if<Deterministic>(&v_)) return d->value;
        if (auto* e = std::get_if<Exponential>(&v_))
            return -e->mean * std::log(stream.next_unit());
        if (auto* u = std::get_if<Uniform>(&v_))
            return u->lo + (u->hi - u->lo) * stream.next_unit();
        if (auto* l = std::get_if<LogNormal>(&v_)) {
            const double u1 = stream.next_unit();
            const double u2 = stream.next_unit();
            const double z = std::sqrt(-2.0 * std::log(u1)) *
                             std::cos(2.0 * std::numbers::pi * u2);
            return std::exp(l->log_loc + l->log_scale * z);
        }
        auto& t = std::get<TwoPoint>(v_);
        return stream.next_unit() < t.p1 ? t.x1 : t.x2;
    }

    std::string describe() const {
        char buf[128];
        if (auto* d = std::get_if<Deterministic>(&v_))
            std::snprintf(buf, sizeof buf, "deterministic(%g)", d->value);
        else if (auto* e = std::get_if<Exponential>(&v_))
            std::snprintf(buf, sizeof buf, "exponential(mean=%g)", e->mean);
        else if (auto* u = std::get_if<Uniform>(&v_))
            std::snprintf(buf, sizeof buf, "uniform(%g,%g)", u->lo, u->hi);
        else if (auto* l = std::get_if<LogNormal>(&v_))
            std::snprintf(buf, sizeof buf, "lognormal(mean=%g,cv=%g)", l->mean, l->cv);
        else {
            auto& t = std::get<TwoPoint>(v_);
            std::snprintf(buf, sizeof buf, "twopoint(%g@%g,%g@%g)", t.x1, t.p1,
                          t.x2, t.p2);
        }
        return buf;
    }

    // Parameter accessors used by the config layer.
    double uniform_lo() const { return std::get<Uniform>(v_).lo; }
    double uniform_hi() const { return std::get<Uniform>(v_).hi; }
    double log_normal_cv() const { return std::get<LogNormal>(v_).cv; }
    double two_point_x1() const { return std::get<TwoPoint>(v_).x1; }
    double two_point_p1() const { return std::get<TwoPoint>(v_).p1; }
    double two_point_x2() const { return std::get<TwoPoint>(v_).x2; }
    double two_point_p2() const { return std::get<TwoPoint>(v_).p2; }

private:
    template <class T>
    explicit DistributionSpec(T v) : v_(v) {}

    static void require(bool ok, const char* msg) {
        if (!ok) throw std::invalid_argument(msg);
    }

    std::variant<Deterministic, Exponential, Uniform, LogNormal, TwoPoint> v_;
};

} // namespace rtq
