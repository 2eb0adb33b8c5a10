// Trace-distance non-Markovianity of the qubit channel.
//
// Both evolved states share the amplitude G(t), so D(t) is an increasing function of |G(t)|
// for every initial pair: rises of D happen exactly where |G| rises. The measure is the sum
// of the trace-distance gains over those rise intervals.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hiernm/extrema.hpp"
#include "hiernm/model.hpp"
#include "hiernm/propagator.hpp"

namespace hiernm {

/// Classification threshold on the NM value.
inline constexpr double kNmEpsilon = 1e-8;

/// Default cap on the integration horizon, in units of 1/gamma.
inline constexpr double kDefaultHorizon = 200.0;

struct Rise {
    double t_start;
    double t_end;
    double gain;
};

struct NMResult {
    double nm_value{0.0};
    std::vector<Rise> rises;
    double horizon{0.0};
    double truncation_bound{0.0};  // bound on |G(t)| for all t beyond the horizon
    bool markovian{true};          // nm_value < kNmEpsilon
    std::optional<std::string> warning;
};

struct NmOptions {
    double max_step = 1e-2;          // sampling step cap, units of 1/gamma
    double decay_cutoff = 1e-6;      // stop once the modal envelope drops below this
    double witness_limit = 5000.0;   // furthest extension to reach a rise, units of 1/gamma
    double warn_bound = 1e-2;        // truncation bound above which a warning is attached
    ExtremaOptions extrema{};
};

// Outcome of the structural monotonicity test on |G| over [0, infinity).
struct MonotonicityReport {
    bool monotone{true};
    bool oscillatory_tail{false};  // slowest pole is complex: G changes sign forever
    double witness_time{0.0};      // a time where |G| increases (valid when !monotone and found)
    bool witness_found{false};
    double proven_from{0.0};       // |G| is provably decreasing for t >= proven_from
};

/// Adaptive sample times on [0, t_end]: steps resolve every pole that still matters,
/// capped at max_step.
std::vector<double> sample_times(const PropagatorModes& modes, double t_end, double max_step);

/// Decides whether |G| is non-increasing on [0, infinity).
///
/// If the slowest pole is complex, G oscillates through zero forever. Otherwise the slowest
/// real term dominates G and G' beyond a computable time T, where G G' < 0; on [0, T] the
/// log-derivative G'/G is sampled and its local maxima refined.
MonotonicityReport analyze_monotonicity(const PropagatorModes& modes, double gamma = 1.0,
                                        const NmOptions& opts = {});

/// Sums D(t_end) - D(t_start) over consecutive event pairs where the value increases.
NMResult nm_from_trace_distance(const ExtremaList& extrema);

/// Extrema of |G| sampled on the horizon chosen by the NM policy, with the horizon and
/// truncation bound that produced them.
struct GExtrema {
    ExtremaList extrema;
    double horizon{0.0};
    double truncation_bound{0.0};
    MonotonicityReport structure;
    std::optional<std::string> warning;
};

GExtrema g_extrema(const PhysParams& p, double horizon, Model model = Model::hierarchical,
                   const NmOptions& opts = {});

/// NM for an arbitrary initial pair, from the extrema of |G|.
NMResult nm_for_pair(const GExtrema& ge, const DensityMatrix2& rho1, const DensityMatrix2& rho2);

/// NM for rho1 = |+><+|, rho2 = |-><-|, where D(t) = |G(t)|.
///
/// The horizon is the earliest time the modal envelope falls below decay_cutoff, capped at
/// `horizon`; if |G| is not monotone but no rise lies inside, it is extended to the first rise.
NMResult nm_optimal_pair(const PhysParams& p, double horizon = kDefaultHorizon,
                         Model model = Model::hierarchical, const NmOptions& opts = {});

struct PairOptimum {
    DensityMatrix2 rho1;
    DensityMatrix2 rho2;
    NMResult result;
};

/// Maximizes NM over pure-state pairs on a Bloch-sphere grid (bloch_resolution polar
/// angles times bloch_resolution azimuths) and over the antipodal family, which
/// contains the supremum because D grows with both |da| and |db|.
PairOptimum optimize_pairs(const PhysParams& p, int bloch_resolution, double horizon = kDefaultHorizon,
                           Model model = Model::hierarchical, const NmOptions& opts = {});

/// True iff |G(t)| is non-increasing for all t >= 0 (structural test, no horizon).
bool is_markovian(const PhysParams& p, Model model = Model::hierarchical);

}  // namespace hiernm
