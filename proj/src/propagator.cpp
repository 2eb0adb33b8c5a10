#include "hiernm/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hiernm/errors.hpp"

namespace hiernm {

namespace {

constexpr double kImagTol = 1e-9;
constexpr double kMagnitudeTol = 1e-9;
constexpr double kBranchTol = 1e-10;

// Solution of G'' + b G' + c G = 0, G(0) = 1, G'(0) = 0, for b > 0, c >= 0.
double second_order_decay(double b, double c, double t) {
    const double disc = b * b - 4.0 * c;
    if (std::abs(disc) <= kBranchTol * b * b) {
        return std::exp(-0.5 * b * t) * (1.0 + 0.5 * b * t);
    }
    if (disc > 0.0) {
        const double d = std::sqrt(disc);
        const double x = 0.5 * d * t;
        // exp(-bt/2) [cosh x + (b/d) sinh x] written without overflowing terms.
        const double tail = std::exp(-2.0 * x);
        const double slow = std::exp(-(0.5 * b * t - x));
        return slow * (0.5 * (1.0 + tail) + 0.5 * (b / d) * -std::expm1(-2.0 * x));
    }
    const double w = std::sqrt(-disc);
    const double x = 0.5 * w * t;
    return std::exp(-0.5 * b * t) * (std::cos(x) + (b / w) * std::sin(x));
}

std::string describe(const PhysParams& p) {
    std::ostringstream os;
    os.precision(17);
    os << "kappa=" << p.kappa << ", lambda=" << p.lambda << ", gamma=" << p.gamma;
    return os.str();
}

}  // namespace

cplx PropagatorModes::evaluate(double t) const {
    cplx sum(0.0, 0.0);
    for (const auto& m : terms) {
        const cplx e = std::exp(m.exponent * t);
        sum += m.order == 0 ? m.residue * e : m.residue * t * e;
    }
    return sum;
}

cplx PropagatorModes::derivative(double t) const {
    cplx sum(0.0, 0.0);
    for (const auto& m : terms) {
        const cplx e = std::exp(m.exponent * t);
        sum += m.order == 0 ? m.residue * m.exponent * e : m.residue * (1.0 + m.exponent * t) * e;
    }
    return sum;
}

double PropagatorModes::envelope(double t) const {
    double sum = 0.0;
    for (const auto& m : terms) {
        const double e = std::exp(m.exponent.real() * t);
        sum += std::abs(m.residue) * (m.order == 0 ? e : t * e);
    }
    return sum;
}

double PropagatorModes::slowest_rate() const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& m : terms) {
        if (m.residue != cplx(0.0, 0.0)) {
            best = std::max(best, m.exponent.real());
        }
    }
    return best;
}

cplx PropagatorModes::residue_sum() const {
    cplx sum(0.0, 0.0);
    for (const auto& m : terms) {
        if (m.order == 0) {
            sum += m.residue;
        }
    }
    return sum;
}

std::array<double, 4> denominator_coeffs(const PhysParams& p) {
    p.validate();
    if (p.memoryless()) {
        throw std::invalid_argument("denominator_coeffs: lambda = inf has no cubic form; use g_memoryless");
    }
    const double k2 = p.kappa * p.kappa;
    return {1.0, p.lambda, k2 + 0.5 * p.gamma * p.lambda, k2 * p.lambda};
}

PropagatorModes laplace_invert(const PhysParams& p) {
    const auto coeffs = denominator_coeffs(p);
    if (p.kappa == 0.0) {
        // Numerator and denominator share p^2 + lambda p + gamma lambda / 2.
        return PropagatorModes{{Mode{cplx(0.0, 0.0), cplx(1.0, 0.0), 0}}};
    }

    const double lam = p.lambda;
    const double half_gl = 0.5 * p.gamma * lam;
    auto numer = [&](cplx s) { return s * (s + lam) + half_gl; };
    auto numer_slope = [&](cplx s) { return 2.0 * s + lam; };

    const CubicRoots cr = solve_cubic(coeffs);
    const auto& r = cr.roots;
    PropagatorModes out;

    switch (cr.multiplicity) {
        case Multiplicity::triple_root:
            throw UnsupportedDegeneracy("laplace_invert: triple pole at " + describe(p) +
                                        "; perturb lambda by ~1e-9 relative");
        case Multiplicity::double_root: {
            // N(s) / ((s - pd)^2 (s - ps)).
            const cplx pd = r[0];
            const cplx ps = r[2];
            const cplx gap = pd - ps;
            const cplx quad = numer(pd) / gap;
            const cplx lin = (numer_slope(pd) * gap - numer(pd)) / (gap * gap);
            const cplx simple = numer(ps) / (gap * gap);
            out.terms = {Mode{pd, cplx(lin.real(), 0.0), 0}, Mode{pd, cplx(quad.real(), 0.0), 1},
                         Mode{ps, cplx(simple.real(), 0.0), 0}};
            break;
        }
        case Multiplicity::distinct: {
            // Residues N(p_i) / prod_{j != i} (p_i - p_j). Real poles get real residues and a
            // conjugate pair gets conjugate residues, so Im G cancels term by term.
            std::array<cplx, 3> res;
            for (int i = 0; i < 3; ++i) {
                cplx denom(1.0, 0.0);
                for (int j = 0; j < 3; ++j) {
                    if (j != i) {
                        denom *= r[i] - r[j];
                    }
                }
                res[i] = numer(r[i]) / denom;
            }
            const bool pair = r[0].imag() != 0.0;
            for (int i = 0; i < 3; ++i) {
                cplx value = res[i];
                if (r[i].imag() == 0.0) {
                    value = cplx(value.real(), 0.0);
                } else if (pair && i == 1) {
                    value = std::conj(res[0]);
                }
                out.terms.push_back(Mode{r[i], value, 0});
            }
            break;
        }
    }

    const cplx total = out.residue_sum();
    double scale = 1.0;
    for (const auto& m : out.terms) {
        scale = std::max(scale, std::abs(m.residue));
    }
    if (std::abs(total - 1.0) > 1e-10 * scale) {
        std::ostringstream os;
        os.precision(17);
        os << "laplace_invert: residues sum to " << total << " instead of 1 at " << describe(p);
        throw ConsistencyError(os.str());
    }
    return out;
}

PropagatorModes second_order_modes(double b, double c) {
    if (!(b > 0.0) || !(c >= 0.0) || !std::isfinite(b) || !std::isfinite(c)) {
        throw std::invalid_argument("second_order_modes: need b > 0 and c >= 0");
    }
    if (c == 0.0) {
        return PropagatorModes{{Mode{cplx(0.0, 0.0), cplx(1.0, 0.0), 0}}};
    }
    const double disc = b * b - 4.0 * c;
    if (std::abs(disc) <= kBranchTol * b * b) {
        // (s + b) / (s - p0)^2 with p0 = -b/2.
        const cplx p0(-0.5 * b, 0.0);
        return PropagatorModes{{Mode{p0, cplx(1.0, 0.0), 0}, Mode{p0, cplx(0.5 * b, 0.0), 1}}};
    }
    if (disc > 0.0) {
        const double q = -0.5 * (b + std::sqrt(disc));
        const double p1 = c / q;  // slow pole
        const double p2 = q;      // fast pole
        const double r1 = (p1 + b) / (p1 - p2);
        const double r2 = (p2 + b) / (p2 - p1);
        return PropagatorModes{{Mode{cplx(p1, 0.0), cplx(r1, 0.0), 0}, Mode{cplx(p2, 0.0), cplx(r2, 0.0), 0}}};
    }
    const cplx p1(-0.5 * b, 0.5 * std::sqrt(-disc));
    const cplx r1 = (p1 + b) / (p1 - std::conj(p1));
    return PropagatorModes{{Mode{p1, r1, 0}, Mode{std::conj(p1), std::conj(r1), 0}}};
}

PropagatorModes propagator_modes(const PhysParams& p, Model model) {
    p.validate();
    const double k2 = p.kappa * p.kappa;
    if (model == Model::direct) {
        if (p.memoryless()) {
            throw std::invalid_argument("direct model needs a finite lambda");
        }
        return second_order_modes(p.lambda, k2);
    }
    if (p.memoryless()) {
        return second_order_modes(0.5 * p.gamma, k2);
    }
    return laplace_invert(p);
}

double g_of_t(const PropagatorModes& modes, double t) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("g_of_t: t must be >= 0");
    }
    const cplx g = modes.evaluate(t);
    if (!(std::abs(g.imag()) < kImagTol) || !(std::abs(g.real()) <= 1.0 + kMagnitudeTol)) {
        std::ostringstream os;
        os.precision(17);
        os << "g_of_t: inconsistent propagator value G(" << t << ") = " << g;
        throw ConsistencyError(os.str());
    }
    return g.real();
}

double g_dot(const PropagatorModes& modes, double t) {
    return modes.derivative(t).real();
}

double g_memoryless(double kappa, double gamma, double t) {
    if (!(t >= 0.0) || !(kappa >= 0.0) || !(gamma > 0.0)) {
        throw std::invalid_argument("g_memoryless: need t >= 0, kappa >= 0, gamma > 0");
    }
    return second_order_decay(0.5 * gamma, kappa * kappa, t);
}

double g_direct_model(double kappa, double lambda, double t) {
    if (!(t >= 0.0) || !(kappa >= 0.0) || !(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("g_direct_model: need t >= 0, kappa >= 0, finite lambda > 0");
    }
    return second_order_decay(lambda, kappa * kappa, t);
}

double g_value(const PhysParams& p, double t, Model model) {
    if (model == Model::direct) {
        return g_direct_model(p.kappa, p.lambda, t);
    }
    if (p.memoryless()) {
        return g_memoryless(p.kappa, p.gamma, t);
    }
    return g_of_t(laplace_invert(p), t);
}

}  // namespace hiernm
