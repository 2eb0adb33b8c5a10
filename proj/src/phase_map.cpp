#include "hiernm/phase_map.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hiernm/errors.hpp"

namespace hiernm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool markovian_at(double kappa, double lambda, const ThresholdOptions& o) {
    return is_markovian(make_params(kappa, lambda, o.gamma), o.model);
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

bool monotone_axis(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) {
            return false;
        }
    }
    return true;
}

// Runs task(i) for i in [0, count) on up to `jobs` threads.
template <class Task>
void parallel_for(std::size_t count, unsigned jobs, Task&& task) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                task(i);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
}

}  // namespace

ThresholdResult threshold_kappa(double lambda, const ThresholdOptions& opts) {
    if (!(opts.tol > 0.0)) {
        throw std::invalid_argument("threshold tolerance must be > 0");
    }
    double lo = 0.01 * opts.gamma;
    double hi = 1.0 * opts.gamma;
    if (opts.bracket) {
        std::tie(lo, hi) = *opts.bracket;
        if (!(lo >= 0.0) || !(hi > lo)) {
            throw BracketError("threshold bracket must satisfy 0 <= lo < hi");
        }
    }
    bool m_lo = markovian_at(lo, lambda, opts);
    bool m_hi = markovian_at(hi, lambda, opts);
    if (!opts.bracket) {
        while (!m_lo && lo > kThresholdFloor * opts.gamma) {
            hi = lo;
            m_hi = m_lo;
            lo = std::max(0.5 * lo, kThresholdFloor * opts.gamma);
            m_lo = markovian_at(lo, lambda, opts);
        }
        if (!m_lo) {
            // Non-Markovian for every kappa down to the floor.
            ThresholdResult r{0.5 * lo, 0.5 * lo, 0.0, lo};
            r.below_floor = true;
            return r;
        }
        while (m_hi && hi < 64.0 * opts.gamma) {
            lo = hi;
            m_lo = m_hi;
            hi *= 2.0;
            m_hi = markovian_at(hi, lambda, opts);
        }
    }
    if (!m_lo || m_hi) {
        throw BracketError("threshold bracket [" + fmt(lo) + ", " + fmt(hi) + "] at lambda = " + fmt(lambda) +
                           " does not straddle the transition: lo is " + (m_lo ? "Markovian" : "non-Markovian") +
                           ", hi is " + (m_hi ? "Markovian" : "non-Markovian"));
    }
    while (hi - lo > opts.tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;  // tol below the spacing of doubles
        }
        (markovian_at(mid, lambda, opts) ? lo : hi) = mid;
    }
    return {0.5 * (lo + hi), 0.5 * (hi - lo), lo, hi};
}

std::vector<double> make_axis(double a, double b, int n, bool log_spaced) {
    if (n < 1 || !std::isfinite(a) || !std::isfinite(b)) {
        throw std::invalid_argument("axis needs finite ends and n >= 1");
    }
    if (log_spaced && !(a > 0.0 && b > 0.0)) {
        throw std::invalid_argument("log-spaced axis needs positive ends");
    }
    if (n == 1) {
        return {a};
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double f = static_cast<double>(i) / (n - 1);
        out[i] = log_spaced ? std::exp(std::log(a) + f * (std::log(b) - std::log(a))) : a + f * (b - a);
    }
    out.front() = a;
    out.back() = b;
    return out;
}

std::vector<double> default_lambda_axis(int n, bool include_inf) {
    auto axis = make_axis(0.05, 100.0, n, true);
    if (include_inf) {
        axis.push_back(kInfinite);
    }
    return axis;
}

PhaseDiagram sweep(const std::vector<double>& kappa_axis, const std::vector<double>& lambda_axis,
                   const SweepOptions& opts) {
    if (kappa_axis.empty() || lambda_axis.empty()) {
        throw std::invalid_argument("sweep: axes must be non-empty");
    }
    if (!monotone_axis(kappa_axis) || !monotone_axis(lambda_axis)) {
        throw std::invalid_argument("sweep: axes must be strictly increasing");
    }
    const std::size_t nk = kappa_axis.size();
    const std::size_t nl = lambda_axis.size();

    PhaseDiagram pd;
    pd.kappa_axis = kappa_axis;
    pd.lambda_axis = lambda_axis;
    pd.nm_grid.assign(nk, std::vector<double>(nl, kNaN));
    std::vector<std::string> point_errors(nk * nl);

    parallel_for(nk * nl, opts.jobs, [&](std::size_t idx) {
        const std::size_t i = idx / nl;
        const std::size_t j = idx % nl;
        try {
            const auto p = make_params(kappa_axis[i], lambda_axis[j], opts.gamma);
            pd.nm_grid[i][j] = nm_optimal_pair(p, opts.horizon, opts.model, opts.nm).nm_value;
        } catch (const std::exception& e) {
            point_errors[idx] = "kappa=" + fmt(kappa_axis[i]) + " lambda=" + fmt(lambda_axis[j]) + ": " + e.what();
        }
    });
    for (auto& e : point_errors) {
        if (!e.empty()) {
            pd.diagnostics.push_back(std::move(e));
        }
    }

    if (opts.thresholds) {
        pd.threshold_curve.assign(nl, ThresholdPoint{0.0, kNaN, kNaN});
        std::vector<std::string> col_errors(nl);
        parallel_for(nl, opts.jobs, [&](std::size_t j) {
            pd.threshold_curve[j].lambda = lambda_axis[j];
            try {
                ThresholdOptions to;
                to.tol = opts.threshold_tol;
                to.gamma = opts.gamma;
                to.model = opts.model;
                const auto t = threshold_kappa(lambda_axis[j], to);
                pd.threshold_curve[j].kappa_t = t.kappa;
                pd.threshold_curve[j].half_width = t.half_width;
                pd.threshold_curve[j].below_floor = t.below_floor;
            } catch (const std::exception& e) {
                col_errors[j] = "threshold at lambda=" + fmt(lambda_axis[j]) + ": " + e.what();
            }
        });
        for (auto& e : col_errors) {
            if (!e.empty()) {
                pd.diagnostics.push_back(std::move(e));
            }
        }
    }

    // Single-transition guard: along kappa, NM - eps may change sign at most once, upward,
    // and never below the bisected threshold.
    for (std::size_t j = 0; j < nl; ++j) {
        int changes = 0;
        bool downward = false;
        for (std::size_t i = 1; i < nk; ++i) {
            const double a = pd.nm_grid[i - 1][j];
            const double b = pd.nm_grid[i][j];
            if (std::isnan(a) || std::isnan(b)) {
                continue;
            }
            if ((a >= kNmEpsilon) != (b >= kNmEpsilon)) {
                ++changes;
                downward = downward || a >= kNmEpsilon;
            }
        }
        if (changes > 1 || downward) {
            pd.diagnostics.push_back("lambda=" + fmt(lambda_axis[j]) + ": NM changes sign " + std::to_string(changes) +
                                     " times along kappa (expected a single Markovian -> non-Markovian transition)");
        }
        if (opts.thresholds && !std::isnan(pd.threshold_curve[j].kappa_t)) {
            const auto& tp = pd.threshold_curve[j];
            for (std::size_t i = 0; i < nk; ++i) {
                const double v = pd.nm_grid[i][j];
                if (kappa_axis[i] < tp.kappa_t - tp.half_width && v >= kNmEpsilon) {
                    pd.diagnostics.push_back("lambda=" + fmt(lambda_axis[j]) + ": NM >= eps at kappa=" +
                                             fmt(kappa_axis[i]) + " below kappa_T=" + fmt(tp.kappa_t));
                }
            }
        }
    }
    return pd;
}

}  // namespace hiernm
