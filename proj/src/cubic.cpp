#include "hiernm/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hiernm {

namespace {

using cplx = std::complex<double>;

struct Monic {
    double a, b, c;  // p^3 + a p^2 + b p + c

    cplx value(cplx p) const { return ((p + a) * p + b) * p + c; }
    cplx slope(cplx p) const { return (3.0 * p + 2.0 * a) * p + b; }
};

// Newton steps on the monic cubic, keeping the iterate with the smallest residual.
cplx polish(const Monic& m, cplx p, int min_steps = 2, int max_steps = 12) {
    cplx best = p;
    double best_res = std::abs(m.value(p));
    for (int i = 0; i < max_steps; ++i) {
        const cplx d = m.slope(p);
        if (d == cplx(0.0, 0.0)) {
            break;
        }
        p -= m.value(p) / d;
        const double res = std::abs(m.value(p));
        if (!std::isfinite(res)) {
            break;
        }
        if (res < best_res) {
            best = p;
            best_res = res;
        } else if (i + 1 >= min_steps) {
            break;
        }
        if (best_res == 0.0 && i + 1 >= min_steps) {
            break;
        }
    }
    return best;
}

double polish_real(const Monic& m, double x) {
    return polish(m, cplx(x, 0.0)).real();
}

}  // namespace

double cubic_residual(const std::array<double, 4>& c, std::complex<double> p) {
    return std::abs(((c[0] * p + c[1]) * p + c[2]) * p + c[3]);
}

CubicRoots solve_cubic(const std::array<double, 4>& coeffs) {
    for (double c : coeffs) {
        if (!std::isfinite(c)) {
            throw std::invalid_argument("solve_cubic: coefficients must be finite");
        }
    }
    if (coeffs[0] == 0.0) {
        throw std::invalid_argument("solve_cubic: leading coefficient must be nonzero");
    }
    const Monic m{coeffs[1] / coeffs[0], coeffs[2] / coeffs[0], coeffs[3] / coeffs[0]};

    // Depressed cubic y^3 + P y + Q with p = y - a/3.
    const double shift = m.a / 3.0;
    const double P = m.b - m.a * shift;
    const double Q = 2.0 * shift * shift * shift - m.b * shift + m.c;
    const double disc = -(4.0 * P * P * P + 27.0 * Q * Q);

    CubicRoots out;
    out.merge_tolerance = kRootMergeTol;
    std::array<cplx, 3> r;

    if (disc > 0.0) {
        // Three distinct real roots (P < 0 here).
        const double amp = 2.0 * std::sqrt(-P / 3.0);
        const double arg = std::clamp(3.0 * Q / (P * amp), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            const double y = amp * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0);
            r[k] = cplx(polish_real(m, y - shift), 0.0);
        }
        std::sort(r.begin(), r.end(), [](cplx x, cplx y) { return x.real() > y.real(); });
    } else {
        // One real root and a (possibly degenerate) conjugate pair.
        const double s = std::sqrt(std::max(0.0, 0.25 * Q * Q + P * P * P / 27.0));
        const double u = std::cbrt(-0.5 * Q - std::copysign(s, Q));
        const double v = (u == 0.0) ? 0.0 : -P / (3.0 * u);
        const double real_root = polish_real(m, u + v - shift);
        cplx pair(-0.5 * (u + v) - shift, 0.5 * std::sqrt(3.0) * std::abs(u - v));
        pair = polish(m, pair);
        if (pair.imag() < 0.0) {
            pair = std::conj(pair);
        }
        r = {pair, std::conj(pair), cplx(real_root, 0.0)};
    }

    // Repeated roots are only resolved to about sqrt(eps) by the closed form, so decide
    // multiplicity from the depressed cubic instead: a root cluster is merged when its
    // width implied by f and f' at the cluster centre is within tolerance, or when those
    // values vanish to rounding.
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double scale = std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2]), 1e-300});
    const double err_p = 8.0 * eps * (std::abs(m.b) + std::abs(m.a * shift));
    const double err_q = 8.0 * eps * (2.0 * std::abs(shift * shift * shift) + std::abs(m.b * shift) + std::abs(m.c));
    const double tol = kRootMergeTol * scale;

    if (std::abs(P) <= std::max(tol * tol, err_p) && std::abs(Q) <= std::max(tol * tol * tol, err_q)) {
        r = {cplx(-shift, 0.0), cplx(-shift, 0.0), cplx(-shift, 0.0)};
        out.multiplicity = Multiplicity::triple_root;
    } else {
        out.multiplicity = Multiplicity::distinct;
        if (P < 0.0) {
            // Critical points y = +-sqrt(-P/3); a double root sits at one of them.
            const double yc_abs = std::sqrt(-P / 3.0);
            for (const double yc : {yc_abs, -yc_abs}) {
                const double f = Q + yc * (2.0 * P / 3.0);
                const double f_err = 4.0 * (err_q + yc_abs * err_p) + 4.0 * eps * std::abs(Q);
                const double width = 2.0 * std::sqrt(2.0 * std::abs(f) / (6.0 * yc_abs));
                if (std::abs(f) <= f_err || width <= tol) {
                    const double repeated = yc - shift;
                    const double single = polish_real(m, -2.0 * yc - shift);
                    r = {cplx(repeated, 0.0), cplx(repeated, 0.0), cplx(single, 0.0)};
                    out.multiplicity = Multiplicity::double_root;
                    break;
                }
            }
        }
    }
    out.roots = r;
    return out;
}

}  // namespace hiernm
