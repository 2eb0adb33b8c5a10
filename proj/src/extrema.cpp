#include "hiernm/extrema.hpp"

#include <cmath>
#include <stdexcept>

namespace hiernm {

namespace {

constexpr double kInvPhi = 0.6180339887498949;

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Bisection on the sign of f in (a, b) with f(a) f(b) < 0.
double bisect_root(const std::function<double(double)>& f, double a, double b) {
    int sa = sign_of(f(a));
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) {
            break;
        }
        const int sm = sign_of(f(m));
        if (sm == 0) {
            return m;
        }
        if (sm == sa) {
            a = m;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

std::pair<double, double> golden_max(const std::function<double(double)>& f, double a, double b, double tol) {
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c);
    double fd = f(d);
    double best_t = fc >= fd ? c : d;
    double best_f = std::max(fc, fd);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
            if (fc > best_f) {
                best_f = fc;
                best_t = c;
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
            if (fd > best_f) {
                best_f = fd;
                best_t = d;
            }
        }
    }
    return {best_t, best_f};
}

ExtremaList find_extrema(std::span<const double> times, std::span<const double> values,
                         const std::function<double(double)>& refiner, const ExtremaOptions& opts) {
    const std::size_t n = times.size();
    if (n < 2 || values.size() != n) {
        throw std::invalid_argument("find_extrema: need at least two samples with matching times");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(times[i]) || !std::isfinite(values[i])) {
            throw std::invalid_argument("find_extrema: non-finite sample");
        }
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw std::invalid_argument("find_extrema: times must be strictly increasing");
        }
    }

    const auto magnitude = [&](double t) { return std::abs(refiner(t)); };
    const auto neg_magnitude = [&](double t) { return -std::abs(refiner(t)); };

    ExtremaList out;
    out.events.push_back({times[0], std::abs(values[0]), EventKind::endpoint});

    auto push = [&](ExtremumEvent e) {
        // Keep events strictly ordered; refinement can land on a neighbouring event.
        if (e.time <= out.events.back().time) {
            e.time = std::nextafter(out.events.back().time, INFINITY);
        }
        out.events.push_back(e);
    };

    int dir = 0;                    // -1 falling, +1 rising, 0 unknown
    double bracket_lo = times[0];   // start of the last non-flat interval, or the last zero

    // Refines the extremum in [bracket_lo, hi]; the sample (ts, vs) wins if it is better.
    auto refine = [&](double hi, double ts, double vs, EventKind kind) {
        if (kind == EventKind::max) {
            const auto [t, v] = golden_max(magnitude, bracket_lo, hi, opts.time_tol);
            return v >= vs ? ExtremumEvent{t, v, kind} : ExtremumEvent{ts, vs, kind};
        }
        const auto [t, v] = golden_max(neg_magnitude, bracket_lo, hi, opts.time_tol);
        return -v <= vs ? ExtremumEvent{t, -v, kind} : ExtremumEvent{ts, vs, kind};
    };

    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double f0 = values[i];
        const double f1 = values[i + 1];

        // |f| touches zero inside the interval or at its right end.
        const bool crossing = sign_of(f0) * sign_of(f1) < 0;
        const bool touch = f1 == 0.0 && f0 != 0.0 && i + 2 < n;
        if (crossing || touch) {
            const double root = crossing ? bisect_root(refiner, times[i], times[i + 1]) : times[i + 1];
            if (dir == 1) {
                // Undersampled MAX just before the zero.
                push(refine(root, times[i], std::abs(f0), EventKind::max));
            }
            push({root, 0.0, EventKind::min});
            dir = 1;
            bracket_lo = root;
            continue;
        }

        const double m0 = std::abs(f0);
        const double m1 = std::abs(f1);
        const double diff = m1 - m0;
        if (std::abs(diff) <= opts.plateau_rel * std::max(m0, m1)) {
            continue;
        }
        const int s = sign_of(diff);
        if (dir == -1 && s == 1) {
            push(refine(times[i + 1], times[i], m0, EventKind::min));
        } else if (dir == 1 && s == -1) {
            push(refine(times[i + 1], times[i], m0, EventKind::max));
        }
        dir = s;
        bracket_lo = std::max(bracket_lo, times[i]);
    }

    push({times[n - 1], std::abs(values[n - 1]), EventKind::endpoint});
    return out;
}

}  // namespace hiernm
