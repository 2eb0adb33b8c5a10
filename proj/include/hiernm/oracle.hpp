// Brute-force amplitude integration of the single-excitation
// Schrodinger equation, used to check the analytic propagator.
//
// With an exponential reservoir kernel the memory integral
//     dB/dt = -i kappa A - int_0^t alpha(t - s) B(s) ds
// is carried by z(t) = int_0^t exp(-lambda (t - s)) B(s) ds, which obeys dz/dt = B - lambda z.

#pragma once

#include <vector>

#include "hiernm/model.hpp"

namespace hiernm {

struct AmplitudeState {
    cplx a_amp{1.0, 0.0};  // excited qubit, cavity empty
    cplx b_amp{0.0, 0.0};  // ground qubit, one cavity photon
    cplx z_mem{0.0, 0.0};  // exponentially weighted history of b_amp

    AmplitudeState& operator+=(const AmplitudeState& o) {
        a_amp += o.a_amp;
        b_amp += o.b_amp;
        z_mem += o.z_mem;
        return *this;
    }
    friend AmplitudeState operator+(AmplitudeState x, const AmplitudeState& y) { return x += y; }
    friend AmplitudeState operator*(double s, AmplitudeState x) {
        x.a_amp *= s;
        x.b_amp *= s;
        x.z_mem *= s;
        return x;
    }
};

/// (-i kappa B, -i kappa A - (gamma lambda / 2) z, B - lambda z). Requires finite lambda.
AmplitudeState rhs(const AmplitudeState& s, const PhysParams& p);

/// Markovian cavity damping: (-i kappa B, -i kappa A - (gamma / 2) B, 0). Requires lambda = inf.
AmplitudeState rhs_memoryless(const AmplitudeState& s, const PhysParams& p);

/// Single classical RK4 step of size dt.
AmplitudeState rk4_step(const AmplitudeState& s, const PhysParams& p, double dt);

struct OracleTrajectory {
    std::vector<double> times;
    std::vector<AmplitudeState> states;

    std::vector<cplx> amplitudes() const;
};

/// Fixed-step RK4 from (1, 0, 0) over the grid; routes to rhs_memoryless for lambda = inf.
OracleTrajectory integrate_states(const PhysParams& p, const TimeGrid& grid);

/// A(t) on the grid (A(0) = 1).
std::vector<cplx> integrate(const PhysParams& p, const TimeGrid& grid);

/// Default oracle step: 1e-3/gamma, tightened to 1e-4/gamma for lambda > 100 gamma.
double default_oracle_dt(const PhysParams& p);

/// 1 - |A|^2 - |B|^2, the weight carried by the reservoir continuum.
/// Throws ConsistencyError if it leaves [-1e-8, 1 + 1e-8].
double reservoir_population(const AmplitudeState& s);

struct OrderCheck {
    double coarse_diff;  // max |A_dt - A_dt/2|
    double fine_diff;    // max |A_dt/2 - A_dt/4|
    double ratio;        // coarse_diff / fine_diff, ~16 for a fourth-order method
};

/// Step-halving smoke test on [0, t_max]. Throws ConsistencyError if the ratio leaves [8, 32].
OrderCheck check_order(const PhysParams& p, double t_max, double dt);

}  // namespace hiernm
