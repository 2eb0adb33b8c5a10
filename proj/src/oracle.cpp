#include "hiernm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hiernm/errors.hpp"

namespace hiernm {

namespace {

constexpr cplx kI(0.0, 1.0);

AmplitudeState derivative(const AmplitudeState& s, const PhysParams& p) {
    return p.memoryless() ? rhs_memoryless(s, p) : rhs(s, p);
}

}  // namespace

std::vector<cplx> OracleTrajectory::amplitudes() const {
    std::vector<cplx> out;
    out.reserve(states.size());
    for (const auto& s : states) {
        out.push_back(s.a_amp);
    }
    return out;
}

AmplitudeState rhs(const AmplitudeState& s, const PhysParams& p) {
    if (p.memoryless()) {
        throw std::invalid_argument("rhs: lambda = inf has no memory variable; use rhs_memoryless");
    }
    AmplitudeState d;
    d.a_amp = -kI * p.kappa * s.b_amp;
    d.b_amp = -kI * p.kappa * s.a_amp - 0.5 * p.gamma * p.lambda * s.z_mem;
    d.z_mem = s.b_amp - p.lambda * s.z_mem;
    return d;
}

AmplitudeState rhs_memoryless(const AmplitudeState& s, const PhysParams& p) {
    if (!p.memoryless()) {
        throw std::invalid_argument("rhs_memoryless: requires lambda = inf");
    }
    AmplitudeState d;
    d.a_amp = -kI * p.kappa * s.b_amp;
    d.b_amp = -kI * p.kappa * s.a_amp - 0.5 * p.gamma * s.b_amp;
    d.z_mem = 0.0;
    return d;
}

AmplitudeState rk4_step(const AmplitudeState& s, const PhysParams& p, double dt) {
    const AmplitudeState k1 = derivative(s, p);
    const AmplitudeState k2 = derivative(s + (0.5 * dt) * k1, p);
    const AmplitudeState k3 = derivative(s + (0.5 * dt) * k2, p);
    const AmplitudeState k4 = derivative(s + dt * k3, p);
    return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

OracleTrajectory integrate_states(const PhysParams& p, const TimeGrid& grid) {
    p.validate();
    OracleTrajectory out;
    out.times = grid.times();
    out.states.reserve(grid.size());
    AmplitudeState s;
    out.states.push_back(s);
    for (std::size_t i = 0; i < grid.steps(); ++i) {
        s = rk4_step(s, p, grid.dt());
        out.states.push_back(s);
    }
    return out;
}

std::vector<cplx> integrate(const PhysParams& p, const TimeGrid& grid) {
    return integrate_states(p, grid).amplitudes();
}

double default_oracle_dt(const PhysParams& p) {
    const double unit = 1.0 / p.gamma;
    return p.lambda > 100.0 * p.gamma ? 1e-4 * unit : 1e-3 * unit;
}

double reservoir_population(const AmplitudeState& s) {
    const double pop = 1.0 - std::norm(s.a_amp) - std::norm(s.b_amp);
    if (!(pop >= -1e-8 && pop <= 1.0 + 1e-8)) {
        std::ostringstream os;
        os.precision(17);
        os << "reservoir_population: norm not conserved (population " << pop << ")";
        throw ConsistencyError(os.str());
    }
    return pop;
}

OrderCheck check_order(const PhysParams& p, double t_max, double dt) {
    const auto coarse = integrate(p, TimeGrid(t_max, dt));
    const auto mid = integrate(p, TimeGrid(t_max, 0.5 * dt));
    const auto fine = integrate(p, TimeGrid(t_max, 0.25 * dt));
    OrderCheck c{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        c.coarse_diff = std::max(c.coarse_diff, std::abs(coarse[i] - mid[2 * i]));
    }
    for (std::size_t i = 0; i < mid.size(); ++i) {
        c.fine_diff = std::max(c.fine_diff, std::abs(mid[i] - fine[2 * i]));
    }
    c.ratio = c.coarse_diff / c.fine_diff;
    if (!(c.ratio >= 8.0 && c.ratio <= 32.0)) {
        std::ostringstream os;
        os << "check_order: step-halving ratio " << c.ratio << " outside [8, 32]";
        throw ConsistencyError(os.str());
    }
    return c;
}

}  // namespace hiernm
