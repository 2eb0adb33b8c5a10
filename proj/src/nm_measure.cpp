#include "hiernm/nm_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hiernm {

namespace {

constexpr double kNegligibleGap = 40.0;  // exp(-40): a term this far below the slowest one is ignored
constexpr double kStepsPerRate = 0.05;   // step <= 0.05 / |p| for every active pole
constexpr double kSlopeTol = 1e-12;      // log-derivative above this (units of gamma) is a rise
constexpr double kUnderflow = 1e-290;

// Sampling step as a function of time: fine while fast poles still contribute.
class Stepper {
public:
    Stepper(const PropagatorModes& modes, double max_step) : max_step_(max_step) {
        const double slow = modes.slowest_rate();
        for (const auto& m : modes.terms) {
            const double speed = std::abs(m.exponent);
            if (m.residue == cplx(0.0, 0.0) || speed == 0.0) {
                continue;
            }
            const double gap = slow - m.exponent.real();
            const double until = gap > 0.0 ? kNegligibleGap / gap : std::numeric_limits<double>::infinity();
            limits_.push_back({until, kStepsPerRate / speed});
        }
    }

    double operator()(double t) const {
        double h = max_step_;
        for (const auto& [until, step] : limits_) {
            if (t < until) {
                h = std::min(h, step);
            }
        }
        return h;
    }

private:
    double max_step_;
    std::vector<std::pair<double, double>> limits_;
};

struct Sample {
    double t;
    double g;
    double q;  // G'/G, or NaN at an exact zero of G
};

Sample sample_at(const PropagatorModes& modes, double t) {
    const double g = modes.evaluate(t).real();
    const double gd = modes.derivative(t).real();
    return {t, g, g != 0.0 ? gd / g : std::numeric_limits<double>::quiet_NaN()};
}

// Scans (0, t_to] for a time where |G| increases. Stops early once G underflows.
std::optional<double> find_rise(const PropagatorModes& modes, double t_to, double max_step, double gamma) {
    const Stepper step(modes, max_step);
    const double q_tol = kSlopeTol * gamma;
    const auto log_slope = [&](double t) {
        const Sample s = sample_at(modes, t);
        return std::isnan(s.q) ? -std::numeric_limits<double>::infinity() : s.q;
    };

    Sample prev2 = sample_at(modes, 0.0);
    double t = step(0.0);
    Sample prev = sample_at(modes, t);
    if (prev.g * prev2.g < 0.0 || prev.q > q_tol) {
        return prev.t;
    }
    while (prev.t < t_to) {
        t = std::min(prev.t + step(prev.t), t_to);
        const Sample cur = sample_at(modes, t);
        if (cur.g * prev.g < 0.0 || (cur.g == 0.0 && prev.g != 0.0)) {
            return cur.t;
        }
        if (modes.envelope(cur.t) < kUnderflow) {
            return std::nullopt;
        }
        if (cur.q > q_tol) {
            return cur.t;
        }
        // Interior local maximum of the log-derivative: refine it.
        if (prev2.t > 0.0 && prev.q >= prev2.q && prev.q >= cur.q && prev2.g * cur.g > 0.0) {
            const auto [tm, qm] = golden_max(log_slope, prev2.t, cur.t, 1e-9 * std::max(1.0, cur.t));
            if (qm > q_tol) {
                return tm;
            }
        }
        prev2 = prev;
        prev = cur;
    }
    return std::nullopt;
}

// Earliest time after which the modal envelope stays below `level`.
double envelope_time(const PropagatorModes& modes, double level, double cap) {
    double mono = 0.0;
    for (const auto& m : modes.terms) {
        if (m.order > 0 && m.exponent.real() < 0.0) {
            mono = std::max(mono, m.order / -m.exponent.real());
        }
    }
    if (modes.envelope(mono) < level) {
        return mono;
    }
    double lo = mono;
    double hi = std::max(mono, 1.0);
    while (modes.envelope(hi) >= level) {
        lo = hi;
        hi *= 2.0;
        if (hi > cap) {
            return cap;
        }
    }
    for (int i = 0; i < 60 && hi - lo > 1e-9 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (modes.envelope(mid) < level ? hi : lo) = mid;
    }
    return std::min(hi, cap);
}

double dominant_frequency(const PropagatorModes& modes) {
    const double slow = modes.slowest_rate();
    double w = 0.0;
    for (const auto& m : modes.terms) {
        if (m.residue != cplx(0.0, 0.0) && m.exponent.real() == slow) {
            w = std::max(w, std::abs(m.exponent.imag()));
        }
    }
    return w;
}

bool is_constant(const PropagatorModes& modes) {
    return std::all_of(modes.terms.begin(), modes.terms.end(), [](const Mode& m) {
        return m.residue == cplx(0.0, 0.0) || m.exponent == cplx(0.0, 0.0);
    });
}

}  // namespace

std::vector<double> sample_times(const PropagatorModes& modes, double t_end, double max_step) {
    if (!(t_end > 0.0) || !(max_step > 0.0)) {
        throw std::invalid_argument("sample_times: need t_end > 0 and max_step > 0");
    }
    const Stepper step(modes, max_step);
    std::vector<double> out{0.0};
    double t = 0.0;
    while (t < t_end) {
        t = std::min(t + step(t), t_end);
        // Avoid a sliver interval at the end.
        if (t_end - t < 1e-3 * step(t)) {
            t = t_end;
        }
        out.push_back(t);
    }
    return out;
}

MonotonicityReport analyze_monotonicity(const PropagatorModes& modes, double gamma, const NmOptions& opts) {
    MonotonicityReport rep;
    if (is_constant(modes)) {
        return rep;
    }
    const double slow = modes.slowest_rate();
    const double max_step = opts.max_step / gamma;
    const double limit = opts.witness_limit / gamma;

    std::vector<Mode> dominant;
    std::vector<Mode> rest;
    for (const auto& m : modes.terms) {
        if (m.residue == cplx(0.0, 0.0)) {
            continue;
        }
        (m.exponent.real() == slow ? dominant : rest).push_back(m);
    }

    const bool oscillatory = std::any_of(dominant.begin(), dominant.end(),
                                         [](const Mode& m) { return m.exponent.imag() != 0.0; });
    if (oscillatory) {
        rep.monotone = false;
        rep.oscillatory_tail = true;
        rep.proven_from = std::numeric_limits<double>::infinity();
        if (const auto w = find_rise(modes, limit, max_step, gamma)) {
            rep.witness_found = true;
            rep.witness_time = *w;
        }
        return rep;
    }

    // Dominant part d(t) = (r + s t) exp(slow t) with real r, s.
    double r = 0.0;
    double s = 0.0;
    for (const auto& m : dominant) {
        (m.order == 0 ? r : s) += m.residue.real();
    }
    const auto dom = [&](double t) { return (r + s * t) * std::exp(slow * t); };
    const auto dom_dot = [&](double t) { return (slow * (r + s * t) + s) * std::exp(slow * t); };
    const auto rest_bound = [&](double t) {
        double e = 0.0;
        for (const auto& m : rest) {
            e += std::abs(m.residue) * std::pow(t, m.order) * std::exp(m.exponent.real() * t);
        }
        return e;
    };
    const auto rest_dot_bound = [&](double t) {
        double e = 0.0;
        for (const auto& m : rest) {
            const double poly = std::abs(m.exponent) * std::pow(t, m.order) + (m.order > 0 ? m.order * std::pow(t, m.order - 1) : 0.0);
            e += std::abs(m.residue) * poly * std::exp(m.exponent.real() * t);
        }
        return e;
    };

    // Beyond t_mono every ratio rest/dominant is decreasing.
    double t_mono = 1.0 / gamma;
    for (const auto& m : rest) {
        t_mono = std::max(t_mono, (m.order + 1.0) / (slow - m.exponent.real()));
    }
    if (s != 0.0) {
        t_mono = std::max(t_mono, 2.0 * (std::abs(r / s) + 1.0 / std::abs(slow)));
    }

    double t_star = t_mono;
    bool proven = false;
    while (t_star <= limit) {
        const double d = dom(t_star);
        const double dd = dom_dot(t_star);
        if (std::abs(d) > 2.0 * rest_bound(t_star) && std::abs(dd) > 2.0 * rest_dot_bound(t_star) && d * dd < 0.0) {
            proven = true;
            break;
        }
        t_star *= 1.5;
    }
    t_star = std::min(t_star, limit);

    if (const auto w = find_rise(modes, t_star, max_step, gamma)) {
        rep.monotone = false;
        rep.witness_found = true;
        rep.witness_time = *w;
        rep.proven_from = std::numeric_limits<double>::infinity();
        return rep;
    }
    rep.monotone = true;
    rep.proven_from = proven ? t_star : std::numeric_limits<double>::infinity();
    return rep;
}

NMResult nm_from_trace_distance(const ExtremaList& extrema) {
    NMResult res;
    const auto& ev = extrema.events;
    for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
        const double gain = ev[i + 1].value - ev[i].value;
        if (gain > 0.0) {
            res.rises.push_back({ev[i].time, ev[i + 1].time, gain});
            res.nm_value += gain;
        }
    }
    res.horizon = ev.empty() ? 0.0 : ev.back().time;
    res.markovian = res.nm_value < kNmEpsilon;
    return res;
}

GExtrema g_extrema(const PhysParams& p, double horizon, Model model, const NmOptions& opts) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("NM horizon must be finite and > 0");
    }
    const PropagatorModes modes = propagator_modes(p, model);
    GExtrema out;
    out.structure = analyze_monotonicity(modes, p.gamma, opts);

    if (is_constant(modes)) {
        // G = 1 forever.
        out.horizon = horizon;
        out.extrema.events = {{0.0, 1.0, EventKind::endpoint}, {horizon, 1.0, EventKind::endpoint}};
        return out;
    }

    double t_end = envelope_time(modes, opts.decay_cutoff, horizon);
    const auto& st = out.structure;
    if (!st.monotone && st.witness_found && st.witness_time >= 0.9 * t_end) {
        const double w = dominant_frequency(modes);
        const double extra = w > 0.0 ? std::numbers::pi / w : 2.0 / std::abs(modes.slowest_rate());
        t_end = std::min(st.witness_time + extra, opts.witness_limit / p.gamma);
        t_end = std::max(t_end, st.witness_time);
    }

    const auto times = sample_times(modes, t_end, opts.max_step / p.gamma);
    std::vector<double> values(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        values[i] = g_of_t(modes, times[i]);
    }
    const auto refiner = [&modes](double t) { return g_of_t(modes, t); };
    out.extrema = find_extrema(times, values, refiner, opts.extrema);
    out.horizon = t_end;

    const bool settled = st.monotone && t_end >= st.proven_from;
    out.truncation_bound = settled ? 0.0 : modes.envelope(t_end);
    if (out.truncation_bound > opts.warn_bound) {
        std::ostringstream os;
        os.precision(6);
        os << "horizon too short: |G| may still reach " << out.truncation_bound << " after t = " << t_end;
        out.warning = os.str();
    }
    return out;
}

NMResult nm_for_pair(const GExtrema& ge, const DensityMatrix2& rho1, const DensityMatrix2& rho2) {
    const double da = rho1.ee() - rho2.ee();
    const cplx db = rho1.eg() - rho2.eg();
    ExtremaList mapped = ge.extrema;
    for (auto& e : mapped.events) {
        e.value = trace_distance_model(e.value, da, db);
    }
    NMResult res = nm_from_trace_distance(mapped);
    res.horizon = ge.horizon;
    res.truncation_bound = ge.truncation_bound;
    res.warning = ge.warning;
    return res;
}

NMResult nm_optimal_pair(const PhysParams& p, double horizon, Model model, const NmOptions& opts) {
    const GExtrema ge = g_extrema(p, horizon, model, opts);
    NMResult res = nm_from_trace_distance(ge.extrema);
    res.horizon = ge.horizon;
    res.truncation_bound = ge.truncation_bound;
    res.warning = ge.warning;
    return res;
}

PairOptimum optimize_pairs(const PhysParams& p, int bloch_resolution, double horizon, Model model,
                           const NmOptions& opts) {
    if (bloch_resolution < 8) {
        throw std::invalid_argument("optimize_pairs: bloch_resolution must be >= 8");
    }
    const GExtrema ge = g_extrema(p, horizon, model, opts);

    PairOptimum best{DensityMatrix2::plus(), DensityMatrix2::minus(), nm_for_pair(ge, DensityMatrix2::plus(), DensityMatrix2::minus())};
    const auto consider = [&](const DensityMatrix2& a, const DensityMatrix2& b) {
        NMResult r = nm_for_pair(ge, a, b);
        if (r.nm_value > best.result.nm_value + 1e-15) {
            best = {a, b, std::move(r)};
        }
    };

    const int n = bloch_resolution;
    std::vector<DensityMatrix2> grid;
    for (int i = 0; i < n; ++i) {
        const double theta = std::numbers::pi * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double phi = 2.0 * std::numbers::pi * j / n;
            grid.push_back(DensityMatrix2::from_bloch(std::sin(theta) * std::cos(phi),
                                                      std::sin(theta) * std::sin(phi), std::cos(theta)));
        }
    }
    for (std::size_t a = 0; a < grid.size(); ++a) {
        for (std::size_t b = a + 1; b < grid.size(); ++b) {
            consider(grid[a], grid[b]);
        }
    }

    // Antipodal pairs +-(sin t, 0, cos t) realize every (|da|, |db|) on the unit circle.
    const auto antipodal = [](double theta) {
        const double x = std::sin(theta);
        const double z = std::cos(theta);
        return std::pair{DensityMatrix2::from_bloch(x, 0.0, z), DensityMatrix2::from_bloch(-x, 0.0, -z)};
    };
    const auto antipodal_nm = [&](double theta) {
        const auto [a, b] = antipodal(theta);
        return nm_for_pair(ge, a, b).nm_value;
    };
    constexpr int kScan = 2000;
    int best_k = 0;
    double best_v = -1.0;
    for (int k = 0; k <= kScan; ++k) {
        const double v = antipodal_nm(0.5 * std::numbers::pi * k / kScan);
        if (v > best_v) {
            best_v = v;
            best_k = k;
        }
    }
    const double h = 0.5 * std::numbers::pi / kScan;
    const double lo = std::max(0.0, (best_k - 1) * h);
    const double hi = std::min(0.5 * std::numbers::pi, (best_k + 1) * h);
    const auto [theta_star, v_star] = golden_max(antipodal_nm, lo, hi, 1e-10);
    const double theta = v_star >= best_v ? theta_star : best_k * h;
    const auto [a, b] = antipodal(theta);
    consider(a, b);
    return best;
}

bool is_markovian(const PhysParams& p, Model model) {
    return analyze_monotonicity(propagator_modes(p, model), p.gamma).monotone;
}

}  // namespace hiernm
