#pragma once

// Single-node (1R1C) dwelling model:
//
//     P(t) - (T_in(t) - T_out) / R = C dT_in/dt
//
// With P and T_out held constant the indoor temperature relaxes exponentially
// toward T_ss = T_out + P R with time constant tau = R C (seconds, given R in
// degC/W and C in J/degC).

#include <string_view>
#include <utility>
#include <vector>

#include "heatflex/thermal_params.hpp"

namespace heatflex {

/// Indoor temperatures outside this range are rejected as implausible.
inline constexpr double kMinPlausibleIndoorC = -50.0;
inline constexpr double kMaxPlausibleIndoorC = 60.0;

/// A steady state this close to the comfort limit counts as not crossing it. MQ R at
/// the design temperature lands a few ulps either side of the limit after rounding; a
/// Finite duration there would be some 30 time constants long and meaningless.
inline constexpr double kLimitToleranceC = 1e-9;

struct RcDwelling {
    double resistance_c_per_w = 0.0;   ///< R_th = 1 / heat loss
    double capacitance_j_per_c = 0.0;  ///< C_th
    double hp_max_thermal_w = 0.0;     ///< MQ, maximum heat-pump output

    /// Converts kW/degC, kJ/K and kW to W-based SI units. Throws DomainError if any is
    /// not positive.
    static RcDwelling from_params(const ThermalParams& params);

    double time_constant_s() const noexcept { return resistance_c_per_w * capacitance_j_per_c; }

    bool operator==(const RcDwelling&) const = default;
};

/// Piecewise-linear COP versus outdoor temperature, flat beyond the end points.
class CopCurve {
public:
    struct Point {
        double outdoor_c;
        double cop;
        bool operator==(const Point&) const = default;
    };

    /// Throws ConfigError when empty, when temperatures are not strictly increasing,
    /// or when a COP is not above 1.
    explicit CopCurve(std::vector<Point> points);

    /// ASHP averages: -5 -> 2.0, 0 -> 2.3, +5 -> 2.4, +10 -> 2.6.
    static CopCurve default_table();

    double at(double outdoor_c) const;
    const std::vector<Point>& points() const noexcept { return points_; }

    bool operator==(const CopCurve&) const = default;

private:
    std::vector<Point> points_;
};

double cop_at(const CopCurve& curve, double outdoor_c);

struct ComfortBand {
    double low_c = 18.0;
    double high_c = 24.0;

    /// Throws ConfigError unless low < high.
    void validate() const;
    bool operator==(const ComfortBand&) const = default;
};

/// Positive: every heat pump ramps to MQ (demand increase).
/// Negative: every heat pump switches off (demand reduction).
enum class Direction { Positive, Negative };
std::string_view to_string(Direction direction);
/// "pos"/"positive", "neg"/"negative".
Direction parse_direction(std::string_view text);

/// How long a service can be held before the comfort limit is hit.
class ServiceDuration {
public:
    enum class Kind { Zero, Finite, Unbounded };

    static ServiceDuration zero() { return ServiceDuration(Kind::Zero, 0.0); }
    static ServiceDuration finite(double seconds) { return ServiceDuration(Kind::Finite, seconds); }
    static ServiceDuration unbounded() { return ServiceDuration(Kind::Unbounded, 0.0); }

    Kind kind() const noexcept { return kind_; }
    bool is_zero() const noexcept { return kind_ == Kind::Zero; }
    bool is_finite() const noexcept { return kind_ == Kind::Finite; }
    bool is_unbounded() const noexcept { return kind_ == Kind::Unbounded; }
    /// Seconds for Finite durations, 0 otherwise.
    double seconds() const noexcept { return seconds_; }

    bool operator==(const ServiceDuration&) const = default;

private:
    ServiceDuration(Kind kind, double seconds) : kind_(kind), seconds_(seconds) {}

    Kind kind_ = Kind::Zero;
    double seconds_ = 0.0;
};

std::string_view to_string(ServiceDuration::Kind kind);

struct FlexOutcome {
    Direction direction = Direction::Negative;
    /// Electrical W; positive means demand increase, negative demand reduction.
    double magnitude_w = 0.0;
    ServiceDuration duration = ServiceDuration::zero();

    bool operator==(const FlexOutcome&) const = default;
};

enum class OutputLimit { Clamped, Unclamped };

/// Heat output holding the indoor temperature steady: (T_in - T_out) / R.
/// Clamped to [0, MQ] by default since a real heat pump can neither exceed its rating
/// nor extract heat; Unclamped returns the raw steady-state balance.
double initial_heat_output(const RcDwelling& dwelling, double indoor_c, double outdoor_c,
                           OutputLimit limit = OutputLimit::Clamped);

/// Positive: (MQ - IQ) / COP >= 0. Negative: -IQ / COP <= 0.
double flexibility_magnitude(const RcDwelling& dwelling, double indoor_c, double outdoor_c,
                             const CopCurve& curve, Direction direction);

/// T_out + P R, the temperature the dwelling settles at under constant output P.
double steady_state_temp(const RcDwelling& dwelling, double outdoor_c, double power_thermal_w);

/// Time until the indoor temperature reaches the comfort limit in the direction of travel.
///
///   Zero       indoor already at/beyond the limit (>= high for Positive, <= low for Negative)
///   Unbounded  the steady state does not cross the limit (within kLimitToleranceC)
///   Finite     tau * ln((T_in - T_ss) / (T_limit - T_ss))
///
/// Positive service is evaluated against band.high, Negative against band.low.
/// Callers normally pass P = MQ for Positive and P = 0 for Negative.
/// Throws DomainError for implausible indoor temperatures.
ServiceDuration service_duration(const RcDwelling& dwelling, double indoor_c, double outdoor_c,
                                 double power_thermal_w, const ComfortBand& band,
                                 Direction direction);

/// Magnitude and duration of one dwelling's service. A Zero duration forces the
/// magnitude to 0: the dwelling cannot provide the service at all.
FlexOutcome evaluate(const RcDwelling& dwelling, double indoor_c, double outdoor_c,
                     const CopCurve& curve, const ComfortBand& band, Direction direction);

/// Discrete-step form of the relaxation with a 1 s step:
///   T[k+1] = A + B T[k],  A = T_out / (R C) + P / C,  B = 1 - 1 / (R C).
/// Kept alongside the closed form as a fidelity cross-check.
struct DiscreteStepCoefficients {
    double a = 0.0;
    double b = 0.0;
    double one_minus_b = 0.0;  ///< 1 / (R C), kept exact rather than recovered from b

    /// Fixed point A / (1 - B); algebraically T_out + P R.
    double equilibrium() const noexcept { return a / one_minus_b; }
};

DiscreteStepCoefficients discrete_step_coefficients(const RcDwelling& dwelling, double outdoor_c,
                                                    double power_thermal_w);

/// [ln|T_limit - A/(1-B)| - ln|T_in - A/(1-B)|] / ln B, in seconds.
/// Only meaningful when the closed form is Finite; the caller classifies first.
double discrete_crossing_time(const RcDwelling& dwelling, double indoor_c, double outdoor_c,
                              double power_thermal_w, double limit_c);

}  // namespace heatflex
