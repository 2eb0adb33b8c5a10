// Exact excited-state amplitude G(t) of the qubit.
//
// The Laplace transform of G is rational,
//
//     G(p) = (p (p + lambda) + gamma lambda / 2) / (p^3 + lambda p^2 + (kappa^2 + gamma lambda / 2) p + kappa^2 lambda),
//
// so G(t) is a finite sum of (possibly t-weighted) complex exponentials, one per pole.
// The memoryless reservoir and the cavity-free comparison model have two poles.

#pragma once

#include <array>
#include <vector>

#include "hiernm/cubic.hpp"
#include "hiernm/model.hpp"

namespace hiernm {

/// Which environment couples to the qubit.
enum class Model {
    hierarchical,  // qubit -> cavity -> Lorentzian reservoir
    direct,        // qubit -> reservoir with kernel kappa^2 exp(-lambda |t - s|), no cavity
};

// One term r t^order exp(p t) of G(t).
struct Mode {
    cplx exponent;
    cplx residue;
    int order{0};  // 0, or 1 for the t exp(pt) part of a double pole
};

struct PropagatorModes {
    std::vector<Mode> terms;

    /// Complex sum of the terms; the imaginary part vanishes up to round-off.
    cplx evaluate(double t) const;
    cplx derivative(double t) const;

    /// Sum |r| t^order exp(Re(p) t): an upper bound on |G(s)| for s >= t once
    /// every term has started to decay.
    double envelope(double t) const;

    /// Largest Re(p) among terms with nonzero residue.
    double slowest_rate() const;

    /// Sum of the order-0 residues; equals G(0) = 1.
    cplx residue_sum() const;
};

/// [1, lambda, kappa^2 + gamma lambda / 2, kappa^2 lambda]. Requires finite lambda.
std::array<double, 4> denominator_coeffs(const PhysParams& p);

/// Partial-fraction expansion of G(p) for finite lambda. kappa = 0 yields G = 1.
/// Throws UnsupportedDegeneracy on a triple pole.
PropagatorModes laplace_invert(const PhysParams& p);

/// Two-pole expansion of (p + b) / (p^2 + b p + c), the transform of the solution of
/// G'' + b G' + c G = 0 with G(0) = 1, G'(0) = 0.
PropagatorModes second_order_modes(double b, double c);

/// Modes for any parameter point: memoryless lambda routes to the two-pole form
/// (p + gamma/2) / (p^2 + gamma p / 2 + kappa^2).
PropagatorModes propagator_modes(const PhysParams& p, Model model = Model::hierarchical);

/// Re G(t). Throws ConsistencyError if |Im G| >= 1e-9 or |G| > 1 + 1e-9.
double g_of_t(const PropagatorModes& modes, double t);

/// dG/dt (real part).
double g_dot(const PropagatorModes& modes, double t);

/// Closed form for lambda -> infinity:
/// G(t) = exp(-gamma t/4) [(gamma/a) sinh(a t/4) + cosh(a t/4)], a = sqrt(gamma^2 - 16 kappa^2).
double g_memoryless(double kappa, double gamma, double t);

/// Cavity-free model: G'' + lambda G' + kappa^2 G = 0, G(0) = 1, G'(0) = 0.
double g_direct_model(double kappa, double lambda, double t);

/// Evaluates G(t) by the preferred route: closed form for memoryless or direct
/// parameters, modes otherwise.
double g_value(const PhysParams& p, double t, Model model = Model::hierarchical);

}  // namespace hiernm
