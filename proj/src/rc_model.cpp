#include "heatflex/rc_model.hpp"

#include <algorithm>
#include <cmath>

#include "heatflex/csv.hpp"
#include "heatflex/errors.hpp"

namespace heatflex {

RcDwelling RcDwelling::from_params(const ThermalParams& params) {
    if (!(params.heat_loss_kw_per_c > 0.0) || !(params.capacitance_kj_per_k > 0.0) ||
        !(params.hp_size_kw > 0.0)) {
        throw DomainError("thermal parameters must be positive");
    }
    RcDwelling d;
    d.resistance_c_per_w = 1.0 / (1000.0 * params.heat_loss_kw_per_c);
    d.capacitance_j_per_c = 1000.0 * params.capacitance_kj_per_k;
    d.hp_max_thermal_w = 1000.0 * params.hp_size_kw;
    return d;
}

CopCurve::CopCurve(std::vector<Point> points) : points_(std::move(points)) {
    if (points_.empty()) {
        throw ConfigError("COP curve needs at least one point");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!(points_[i].cop > 1.0) || !std::isfinite(points_[i].cop)) {
            throw ConfigError("COP values must be finite and greater than 1");
        }
        if (i > 0 && !(points_[i].outdoor_c > points_[i - 1].outdoor_c)) {
            throw ConfigError("COP curve temperatures must be strictly increasing");
        }
    }
}

CopCurve CopCurve::default_table() {
    return CopCurve({{-5.0, 2.0}, {0.0, 2.3}, {5.0, 2.4}, {10.0, 2.6}});
}

double CopCurve::at(double outdoor_c) const {
    if (outdoor_c <= points_.front().outdoor_c) {
        return points_.front().cop;
    }
    if (outdoor_c >= points_.back().outdoor_c) {
        return points_.back().cop;
    }
    const auto hi = std::upper_bound(points_.begin(), points_.end(), outdoor_c,
                                     [](double t, const Point& p) { return t < p.outdoor_c; });
    const auto lo = hi - 1;
    if (lo->outdoor_c == outdoor_c) {
        return lo->cop;
    }
    const double f = (outdoor_c - lo->outdoor_c) / (hi->outdoor_c - lo->outdoor_c);
    return lo->cop + f * (hi->cop - lo->cop);
}

double cop_at(const CopCurve& curve, double outdoor_c) { return curve.at(outdoor_c); }

void ComfortBand::validate() const {
    if (!(low_c < high_c)) {
        throw ConfigError("comfort band requires low < high");
    }
}

std::string_view to_string(Direction direction) {
    return direction == Direction::Positive ? "positive" : "negative";
}

Direction parse_direction(std::string_view text) {
    const std::string s = csv::to_lower(csv::trim(text));
    if (s == "pos" || s == "positive") return Direction::Positive;
    if (s == "neg" || s == "negative") return Direction::Negative;
    throw ConfigError("unknown direction '" + std::string(text) + "' (expected pos or neg)");
}

std::string_view to_string(ServiceDuration::Kind kind) {
    switch (kind) {
        case ServiceDuration::Kind::Zero: return "zero";
        case ServiceDuration::Kind::Finite: return "finite";
        case ServiceDuration::Kind::Unbounded: return "unbounded";
    }
    return "?";
}

double initial_heat_output(const RcDwelling& dwelling, double indoor_c, double outdoor_c,
                           OutputLimit limit) {
    const double balance = (indoor_c - outdoor_c) / dwelling.resistance_c_per_w;
    if (limit == OutputLimit::Unclamped) {
        return balance;
    }
    return std::clamp(balance, 0.0, dwelling.hp_max_thermal_w);
}

double flexibility_magnitude(const RcDwelling& dwelling, double indoor_c, double outdoor_c,
                             const CopCurve& curve, Direction direction) {
    const double iq = initial_heat_output(dwelling, indoor_c, outdoor_c);
    const double cop = curve.at(outdoor_c);
    if (direction == Direction::Positive) {
        return (dwelling.hp_max_thermal_w - iq) / cop;
    }
    return -iq / cop;
}

double steady_state_temp(const RcDwelling& dwelling, double outdoor_c, double power_thermal_w) {
    return outdoor_c + power_thermal_w * dwelling.resistance_c_per_w;
}

ServiceDuration service_duration(const RcDwelling& dwelling, double indoor_c, double outdoor_c,
                                 double power_thermal_w, const ComfortBand& band,
                                 Direction direction) {
    if (!(indoor_c >= kMinPlausibleIndoorC && indoor_c <= kMaxPlausibleIndoorC)) {
        throw DomainError("indoor temperature outside plausible range [-50, 60] degC");
    }
    const double t_ss = steady_state_temp(dwelling, outdoor_c, power_thermal_w);

    if (direction == Direction::Positive) {
        const double limit = band.high_c;
        if (indoor_c >= limit) {
            return ServiceDuration::zero();
        }
        if (t_ss <= limit + kLimitToleranceC) {
            return ServiceDuration::unbounded();
        }
        // indoor < limit < t_ss: both differences negative, ratio > 1
        return ServiceDuration::finite(dwelling.time_constant_s() *
                                       std::log((indoor_c - t_ss) / (limit - t_ss)));
    }

    const double limit = band.low_c;
    if (indoor_c <= limit) {
        return ServiceDuration::zero();
    }
    if (t_ss >= limit - kLimitToleranceC) {
        return ServiceDuration::unbounded();
    }
    return ServiceDuration::finite(dwelling.time_constant_s() *
                                   std::log((indoor_c - t_ss) / (limit - t_ss)));
}

FlexOutcome evaluate(const RcDwelling& dwelling, double indoor_c, double outdoor_c,
                     const CopCurve& curve, const ComfortBand& band, Direction direction) {
    const double power = direction == Direction::Positive ? dwelling.hp_max_thermal_w : 0.0;
    FlexOutcome out;
    out.direction = direction;
    out.duration = service_duration(dwelling, indoor_c, outdoor_c, power, band, direction);
    out.magnitude_w = out.duration.is_zero()
                          ? 0.0
                          : flexibility_magnitude(dwelling, indoor_c, outdoor_c, curve, direction);
    return out;
}

DiscreteStepCoefficients discrete_step_coefficients(const RcDwelling& dwelling, double outdoor_c,
                                                    double power_thermal_w) {
    const double rc = dwelling.time_constant_s();
    DiscreteStepCoefficients k;
    k.a = outdoor_c / rc + power_thermal_w / dwelling.capacitance_j_per_c;
    k.one_minus_b = 1.0 / rc;
    k.b = 1.0 - k.one_minus_b;
    return k;
}

double discrete_crossing_time(const RcDwelling& dwelling, double indoor_c, double outdoor_c,
                              double power_thermal_w, double limit_c) {
    const DiscreteStepCoefficients k =
        discrete_step_coefficients(dwelling, outdoor_c, power_thermal_w);
    const double eq = k.equilibrium();
    // ln B evaluated as log1p(-(1 - B)); plain log(B) loses most digits when R C ~ 1e5 s.
    const double ln_b = std::log1p(-k.one_minus_b);
    return (std::log(std::abs(limit_c - eq)) - std::log(std::abs(indoor_c - eq))) / ln_b;
}

}  // namespace heatflex
