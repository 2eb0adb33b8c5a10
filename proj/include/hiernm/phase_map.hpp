#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hiernm/nm_measure.hpp"
#include "hiernm/propagator.hpp"

namespace hiernm {

struct ThresholdResult {
    double kappa{0.0};       // midpoint of the final bracket
    double half_width{0.0};  // half the final bracket width
    double lo{0.0};          // Markovian end
    double hi{0.0};          // non-Markovian end
    bool below_floor{false}; // non-Markovian down to kThresholdFloor; kappa_T lies in (0, hi]
};

constexpr double kThresholdFloor = 1e-3;  // units of gamma

struct ThresholdOptions {
    std::optional<std::pair<double, double>> bracket;  // explicit bracket; no auto-expansion
    double tol = 1e-4;                                  // final bracket width, units of gamma
    double gamma = 1.0;
    Model model = Model::hierarchical;
};

/// Smallest kappa at which |G| stops being monotone, by bisection on is_markovian.
/// The default bracket [0.01, 1] gamma is widened until it straddles the transition,
/// down to kThresholdFloor and up to 64 gamma. If even the floor is non-Markovian the
/// result has below_floor set. An explicit bracket that does not straddle throws BracketError.
ThresholdResult threshold_kappa(double lambda, const ThresholdOptions& opts = {});

/// Inclusive grid a..b with n points, linear or logarithmic.
std::vector<double> make_axis(double a, double b, int n, bool log_spaced);

/// Default sweep axes: lambda log-spaced 0.05..100 gamma plus inf.
std::vector<double> default_lambda_axis(int n = 25, bool include_inf = true);

struct SweepOptions {
    double horizon = kDefaultHorizon;
    unsigned jobs = 1;
    double gamma = 1.0;
    Model model = Model::hierarchical;
    bool thresholds = true;
    double threshold_tol = 1e-4;
    NmOptions nm{};
};

struct ThresholdPoint {
    double lambda;
    double kappa_t;  // NaN if the threshold could not be located
    double half_width;
    bool below_floor{false};
};

struct PhaseDiagram {
    std::vector<double> kappa_axis;
    std::vector<double> lambda_axis;
    std::vector<std::vector<double>> nm_grid;  // nm_grid[i][j] at (kappa_axis[i], lambda_axis[j]); NaN on failure
    std::vector<ThresholdPoint> threshold_curve;
    std::vector<std::string> diagnostics;
};

/// NM at every grid point and the threshold per lambda column. Points are evaluated on
/// `jobs` worker threads and assembled by index, so the result does not depend on jobs.
/// Per-point failures become NaN plus a diagnostic; a column whose NM - eps pattern does
/// not change sign exactly once across kappa_T is also reported.
PhaseDiagram sweep(const std::vector<double>& kappa_axis, const std::vector<double>& lambda_axis,
                   const SweepOptions& opts = {});

}  // namespace hiernm
