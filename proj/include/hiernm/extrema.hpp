// Extrema of the magnitude of a sampled signed function.

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hiernm {

enum class EventKind { min, max, endpoint };

struct ExtremumEvent {
    double time;
    double value;
    EventKind kind;
};

// Ordered extrema of |f|: an endpoint, alternating interior MIN/MAX events, an endpoint.
struct ExtremaList {
    std::vector<ExtremumEvent> events;

    std::size_t interior_count() const { return events.size() < 2 ? 0 : events.size() - 2; }
};

struct ExtremaOptions {
    double time_tol = 1e-6;      // refinement width for golden-section search
    double plateau_rel = 1e-13;  // |f_{i+1}| - |f_i| below this fraction of |f| is treated as flat
};

/// Finds the extrema of |f| from samples f(times[i]) = values[i].
///
/// Slope sign changes of |f| between samples are refined by golden-section search on
/// |refiner| over the neighbouring sample interval. A sign change of f is a MIN of |f|
/// with value exactly 0, located by bisection on the sign of refiner. Throws
/// std::invalid_argument on non-finite samples or non-increasing times.
ExtremaList find_extrema(std::span<const double> times, std::span<const double> values,
                         const std::function<double(double)>& refiner, const ExtremaOptions& opts = {});

/// Golden-section search for the maximum of f on [a, b]; returns {t, f(t)} of the best point probed.
std::pair<double, double> golden_max(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace hiernm
