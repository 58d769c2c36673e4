#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace zerocell {

// Running mean / variance (Chan et al. pairwise update), so that merging
// two partial estimates equals a single pass over both streams.
struct Estimate {
    double mean = 0.0;
    double m2 = 0.0; // sum of squared deviations
    std::int64_t count = 0;
    std::uint64_t seed = 0;

    void add(double x)
    {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }

    double variance() const
    {
        return count > 1 ? m2 / static_cast<double>(count - 1) : std::numeric_limits<double>::quiet_NaN();
    }

    double std_error() const { return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0; }

    static Estimate exact(double v)
    {
        Estimate e;
        e.mean = v;
        e.count = 1;
        return e;
    }

    static Estimate merge(const Estimate& a, const Estimate& b)
    {
        if (a.count == 0) return b;
        if (b.count == 0) return a;
        Estimate e;
        e.count = a.count + b.count;
        const double na = static_cast<double>(a.count), nb = static_cast<double>(b.count);
        const double d = b.mean - a.mean;
        e.mean = a.mean + d * nb / static_cast<double>(e.count);
        e.m2 = a.m2 + b.m2 + d * d * na * nb / static_cast<double>(e.count);
        e.seed = a.seed;
        return e;
    }
};

// |a - b| / sqrt(se_a^2 + se_b^2)
inline double z_score(double a, double se_a, double b, double se_b)
{
    const double s = std::sqrt(se_a * se_a + se_b * se_b);
    if (s == 0.0) return a == b ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(a - b) / s;
}

} // namespace zerocell
