#include "hiernm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hiernm/errors.hpp"

namespace hiernm {

namespace {

void require_finite_lambda(const PhysParams& p, const char* what) {
    if (p.memoryless()) {
        throw std::invalid_argument(std::string(what) +
                                    ": undefined for a memoryless reservoir (lambda = inf); "
                                    "use the memoryless closed form g_memoryless instead");
    }
}

}  // namespace

void PhysParams::validate() const {
    std::ostringstream err;
    if (!std::isfinite(kappa) || kappa < 0.0) {
        err << "kappa must be finite and >= 0 (got " << kappa << ")";
    } else if (!std::isfinite(gamma) || gamma <= 0.0) {
        err << "gamma must be finite and > 0 (got " << gamma << ")";
    } else if (std::isnan(lambda) || lambda <= 0.0 || lambda == -kInfinite) {
        err << "lambda must be > 0 or inf (got " << lambda << ")";
    } else if (!std::isfinite(omega0)) {
        err << "omega0 must be finite (got " << omega0 << ")";
    }
    if (const auto msg = err.str(); !msg.empty()) {
        throw std::invalid_argument(msg);
    }
}

PhysParams make_params(double kappa, double lambda, double gamma, double omega0) {
    PhysParams p{kappa, lambda, gamma, omega0};
    p.validate();
    return p;
}

DensityMatrix2::DensityMatrix2(double ee, cplx eg) : ee_(ee), eg_(eg) {
    if (!std::isfinite(ee) || !std::isfinite(eg.real()) || !std::isfinite(eg.imag())) {
        throw std::invalid_argument("density matrix entries must be finite");
    }
    if (ee < -kPositivityTol || ee > 1.0 + kPositivityTol) {
        throw std::invalid_argument("rho_ee must lie in [0, 1]");
    }
    ee_ = std::clamp(ee, 0.0, 1.0);
    if (std::norm(eg) > ee_ * (1.0 - ee_) + kPositivityTol) {
        throw std::invalid_argument("density matrix is not positive: |rho_eg|^2 > rho_ee rho_gg");
    }
}

DensityMatrix2 DensityMatrix2::from_bloch(double x, double y, double z) {
    if (x * x + y * y + z * z > 1.0 + kPositivityTol) {
        throw std::invalid_argument("Bloch vector longer than 1");
    }
    return {0.5 * (1.0 + z), cplx(0.5 * x, -0.5 * y)};
}

TimeGrid::TimeGrid(double t_max, double dt) {
    if (!std::isfinite(t_max) || !std::isfinite(dt) || dt <= 0.0 || t_max <= 0.0) {
        throw std::invalid_argument("time grid needs finite t_max > 0 and dt > 0");
    }
    const double steps = std::round(t_max / dt);
    if (steps < 2.0) {
        throw std::invalid_argument("time grid needs at least two steps (t_max >= 2 dt)");
    }
    if (steps > 1e9) {
        throw std::invalid_argument("time grid too fine (more than 1e9 steps)");
    }
    n_ = static_cast<std::size_t>(steps);
    t_max_ = t_max;
    dt_ = t_max / steps;
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = time(i);
    }
    return out;
}

double lorentzian_spectrum(double omega, const PhysParams& p) {
    require_finite_lambda(p, "lorentzian_spectrum");
    const double detuning = p.omega0 - omega;
    const double l2 = p.lambda * p.lambda;
    return p.gamma / (2.0 * std::numbers::pi) * l2 / (detuning * detuning + l2);
}

double correlation_kernel(double delta_t, const PhysParams& p) {
    require_finite_lambda(p, "correlation_kernel");
    return 0.5 * p.gamma * p.lambda * std::exp(-p.lambda * std::abs(delta_t));
}

DensityMatrix2 evolve_qubit(const DensityMatrix2& rho0, cplx g) {
    const double mag = std::abs(g);
    if (!(mag <= 1.0 + 1e-9)) {
        std::ostringstream err;
        err.precision(17);
        err << "unphysical propagator: |G| = " << mag << " > 1";
        throw UnphysicalPropagator(err.str());
    }
    // Clamp the round-off excess so the result stays a valid state.
    const double shrink = mag > 1.0 ? 1.0 / mag : 1.0;
    const cplx gc = g * shrink;
    return {rho0.ee() * std::norm(gc), rho0.eg() * gc};
}

double trace_distance(const DensityMatrix2& rho1, const DensityMatrix2& rho2) {
    // Hermitian difference [[a, b], [conj(b), d]].
    const double a = rho1.ee() - rho2.ee();
    const double d = rho1.gg() - rho2.gg();
    const cplx b = rho1.eg() - rho2.eg();
    const double mean = 0.5 * (a + d);
    const double half_gap = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
    const double mu1 = mean + half_gap;
    const double mu2 = mean - half_gap;
    return 0.5 * (std::abs(mu1) + std::abs(mu2));
}

double trace_distance_model(cplx g, double delta_a, cplx delta_b) {
    const double mag = std::abs(g);
    return mag * std::sqrt(mag * mag * delta_a * delta_a + std::norm(delta_b));
}

}  // namespace hiernm
