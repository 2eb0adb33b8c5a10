// Parameters, reservoir functions and qubit state algebra for a
// qubit coupled to a cavity that leaks into a Lorentzian reservoir.
//
// Unit system: gamma (the reservoir decay scale) is the natural unit. Rates
// are expressed in units of gamma and times in units of 1/gamma.

#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

namespace hiernm {

using cplx = std::complex<double>;

/// Sentinel for a memoryless reservoir (lambda -> infinity).
inline constexpr double kInfinite = std::numeric_limits<double>::infinity();

/// Absolute tolerance for the 2x2 positivity check.
inline constexpr double kPositivityTol = 1e-12;

struct PhysParams {
    double kappa{0.0};     // qubit-cavity coupling
    double lambda{1.0};    // reservoir spectral width, or kInfinite
    double gamma{1.0};     // reservoir decay scale
    double omega0{0.0};    // resonance frequency; drops out in the interaction picture

    bool memoryless() const noexcept { return lambda == kInfinite; }

    /// Throws std::invalid_argument if any invariant is violated.
    void validate() const;
};

/// Validated factory; lambda may be kInfinite.
PhysParams make_params(double kappa, double lambda, double gamma = 1.0, double omega0 = 0.0);

// Qubit state in the {|e>, |g>} basis. Only rho_ee and rho_eg are stored;
// rho_gg = 1 - ee and rho_ge = conj(eg) follow.
class DensityMatrix2 {
public:
    DensityMatrix2() = default;

    /// Throws std::invalid_argument if the state is not positive.
    DensityMatrix2(double ee, cplx eg);

    static DensityMatrix2 excited() { return {1.0, 0.0}; }
    static DensityMatrix2 ground() { return {0.0, 0.0}; }
    static DensityMatrix2 plus() { return {0.5, 0.5}; }
    static DensityMatrix2 minus() { return {0.5, -0.5}; }

    /// rho = (I + x sx + y sy + z sz) / 2, requires |r| <= 1.
    static DensityMatrix2 from_bloch(double x, double y, double z);

    double ee() const noexcept { return ee_; }
    double gg() const noexcept { return 1.0 - ee_; }
    cplx eg() const noexcept { return eg_; }
    cplx ge() const noexcept { return std::conj(eg_); }

private:
    double ee_{0.0};
    cplx eg_{0.0, 0.0};
};

// Fixed-step time axis 0, dt, ..., t_max with n steps.
class TimeGrid {
public:
    /// Chooses n = round(t_max / dt) and rescales dt so that n * dt == t_max.
    TimeGrid(double t_max, double dt);

    double t_max() const noexcept { return t_max_; }
    double dt() const noexcept { return dt_; }
    std::size_t steps() const noexcept { return n_; }
    std::size_t size() const noexcept { return n_ + 1; }
    double time(std::size_t i) const noexcept { return i == n_ ? t_max_ : static_cast<double>(i) * dt_; }
    std::vector<double> times() const;

private:
    double t_max_;
    double dt_;
    std::size_t n_;
};

/// J(omega) = (gamma / 2pi) lambda^2 / ((omega0 - omega)^2 + lambda^2).
double lorentzian_spectrum(double omega, const PhysParams& p);

/// alpha(dt) = (gamma lambda / 2) exp(-lambda |dt|).
double correlation_kernel(double delta_t, const PhysParams& p);

/// rho_ee -> rho_ee |g|^2, rho_eg -> rho_eg g. Throws UnphysicalPropagator if |g| > 1 + 1e-9.
DensityMatrix2 evolve_qubit(const DensityMatrix2& rho0, cplx g);

/// Half the trace norm of rho1 - rho2, from the eigenvalues of the difference.
double trace_distance(const DensityMatrix2& rho1, const DensityMatrix2& rho2);

/// Closed form |g| sqrt(|g|^2 da^2 + |db|^2) for two states evolved by the same g,
/// where da and db are the initial differences in rho_ee and rho_eg.
double trace_distance_model(cplx g, double delta_a, cplx delta_b);

}  // namespace hiernm
