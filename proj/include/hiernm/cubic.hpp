// Roots of real cubic polynomials.

#pragma once

#include <array>
#include <complex>

namespace hiernm {

enum class Multiplicity { distinct, double_root, triple_root };

struct CubicRoots {
    // For double_root, roots[0] == roots[1] is the repeated root and roots[2] the simple one.
    // For a complex pair, roots[1] == conj(roots[0]) exactly and roots[2] is real.
    std::array<std::complex<double>, 3> roots;
    Multiplicity multiplicity{Multiplicity::distinct};
    double merge_tolerance{0.0};  // relative tolerance used to merge close roots
};

/// Relative distance below which two roots are treated as one repeated root.
inline constexpr double kRootMergeTol = 1e-8;

/// Solves c[0] p^3 + c[1] p^2 + c[2] p + c[3] = 0.
/// Closed form (trigonometric or Cardano) followed by Newton polishing.
/// Throws std::invalid_argument for a zero leading coefficient or non-finite input.
CubicRoots solve_cubic(const std::array<double, 4>& coeffs);

/// |c0 p^3 + c1 p^2 + c2 p + c3|
double cubic_residual(const std::array<double, 4>& coeffs, std::complex<double> p);

}  // namespace hiernm
