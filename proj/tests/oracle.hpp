#pragma once

// Reference implementations used only by the tests. They share no code with the
// library: plain loops, textbook formulas, nothing clever.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace oracle {

enum class Kind { Zero, Finite, Unbounded };

struct Duration {
    Kind kind = Kind::Zero;
    double seconds = 0.0;
};

/// Forward-Euler integration of C dT/dt = P - (T - T_out) / R from T_in until T crosses
/// `limit` (upwards when rising, downwards otherwise). The crossing instant is linearly
/// interpolated inside the last step. No crossing within `horizon_tau` time constants
/// counts as Unbounded.
inline Duration euler_duration(double r, double c, double power, double outdoor, double indoor,
                               double limit, bool rising, double dt, double horizon_tau = 30.0) {
    if (rising ? indoor >= limit : indoor <= limit) {
        return {Kind::Zero, 0.0};
    }
    const double tau = r * c;
    const double t_end = horizon_tau * tau;
    double t = 0.0;
    double temp = indoor;
    while (t < t_end) {
        const double next = temp + dt * (power - (temp - outdoor) / r) / c;
        const bool crossed = rising ? next >= limit : next <= limit;
        if (crossed) {
            const double frac = (limit - temp) / (next - temp);
            return {Kind::Finite, t + frac * dt};
        }
        temp = next;
        t += dt;
    }
    return {Kind::Unbounded, 0.0};
}

/// Exact exponential solution written out longhand.
inline double exact_temperature(double r, double c, double power, double outdoor, double indoor,
                                double t) {
    const double settle = outdoor + power * r;
    return settle + (indoor - settle) * std::exp(-t / (r * c));
}

/// Standard normal CDF from erfc.
inline double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// P(X < x) for X ~ N(mean, sd) truncated to [low, high].
inline double truncated_normal_cdf(double x, double mean, double sd, double low, double high) {
    const double a = phi((low - mean) / sd);
    const double b = phi((high - mean) / sd);
    const double v = phi((std::clamp(x, low, high) - mean) / sd);
    return (v - a) / (b - a);
}

/// Percentile of a sample by sorting a copy. `nearest` picks the order statistic at
/// round-half-even((n - 1) p); otherwise linear interpolation at (n - 1) p.
inline double percentile(std::vector<double> values, double p, bool nearest) {
    std::sort(values.begin(), values.end());
    const double pos = (static_cast<double>(values.size()) - 1.0) * p;
    if (nearest) {
        double whole = std::floor(pos);
        const double rem = pos - whole;
        if (rem > 0.5 || (rem == 0.5 && std::fmod(whole, 2.0) != 0.0)) {
            whole += 1.0;
        }
        return values[static_cast<std::size_t>(whole)];
    }
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return values[lo] + w * (values[hi] - values[lo]);
}

struct Contribution {
    double power;                    ///< weight * |magnitude|
    std::optional<double> seconds;   ///< nullopt = unbounded; Zero samples are not listed
};

/// Available power at duration t, straight from the definition.
inline double envelope_power(const std::vector<Contribution>& items, double t) {
    double sum = 0.0;
    for (const auto& it : items) {
        if (!it.seconds || *it.seconds >= t) {
            sum += it.power;
        }
    }
    return sum;
}

}  // namespace oracle
