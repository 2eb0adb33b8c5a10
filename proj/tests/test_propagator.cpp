#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hiernm/cubic.hpp"
#include "hiernm/errors.hpp"
#include "hiernm/propagator.hpp"

using namespace hiernm;

namespace {

double coeff_scale(const std::array<double, 4>& c) {
    double s = 1.0;
    for (double x : c) {
        s = std::max(s, std::abs(x));
    }
    return s;
}

// G(t) = e^{-gt/4} [ (g/a) sinh(at/4) + cosh(at/4) ], a = sqrt(g^2 - 16 k^2), written out branch by branch.
double memoryless_reference(double k, double g, double t) {
    const double a2 = g * g - 16.0 * k * k;
    if (a2 > 0.0) {
        const double a = std::sqrt(a2);
        return std::exp(-g * t / 4.0) * ((g / a) * std::sinh(a * t / 4.0) + std::cosh(a * t / 4.0));
    }
    if (a2 == 0.0) {
        return std::exp(-g * t / 4.0) * (1.0 + g * t / 4.0);
    }
    const double w = std::sqrt(-a2);
    return std::exp(-g * t / 4.0) * ((g / w) * std::sin(w * t / 4.0) + std::cos(w * t / 4.0));
}

double direct_reference(double k, double l, double t) {
    const double d2 = l * l - 4.0 * k * k;
    if (d2 > 0.0) {
        const double d = std::sqrt(d2);
        return std::exp(-l * t / 2.0) * (std::cosh(d * t / 2.0) + (l / d) * std::sinh(d * t / 2.0));
    }
    if (d2 == 0.0) {
        return std::exp(-l * t / 2.0) * (1.0 + l * t / 2.0);
    }
    const double w = std::sqrt(-d2);
    return std::exp(-l * t / 2.0) * (std::cos(w * t / 2.0) + (l / w) * std::sin(w * t / 2.0));
}

cplx raw_sum(const PropagatorModes& m, double t) {
    cplx s = 0.0;
    for (const auto& x : m.terms) {
        s += x.residue * std::pow(t, x.order) * std::exp(x.exponent * t);
    }
    return s;
}

}  // namespace

TEST(DenominatorCoeffs, Examples) {
    const auto a = denominator_coeffs(make_params(0.25, 1.0));
    EXPECT_EQ(a, (std::array<double, 4>{1.0, 1.0, 0.5625, 0.0625}));
    const auto b = denominator_coeffs(make_params(1.0, 1.0, 2.0));
    EXPECT_EQ(b, (std::array<double, 4>{1.0, 1.0, 2.0, 1.0}));
    const auto c = denominator_coeffs(make_params(0.0, 3.0));
    EXPECT_EQ(c, (std::array<double, 4>{1.0, 3.0, 1.5, 0.0}));
    EXPECT_THROW(denominator_coeffs(make_params(0.3, kInfinite)), std::invalid_argument);
}

TEST(SolveCubic, TripleRoot) {
    const auto r = solve_cubic({1.0, 3.0, 3.0, 1.0});
    EXPECT_EQ(r.multiplicity, Multiplicity::triple_root);
    for (const auto& x : r.roots) {
        EXPECT_NEAR(std::abs(x + 1.0), 0.0, 1e-12);
    }
}

TEST(SolveCubic, ImaginaryPairAndZero) {
    const auto r = solve_cubic({1.0, 0.0, 1.0, 0.0});
    EXPECT_EQ(r.multiplicity, Multiplicity::distinct);
    EXPECT_NEAR(std::abs(r.roots[0] - cplx(0.0, 1.0)), 0.0, 1e-14);
    EXPECT_EQ(r.roots[1], std::conj(r.roots[0]));
    EXPECT_NEAR(std::abs(r.roots[2]), 0.0, 1e-14);
}

TEST(SolveCubic, DoubleRoot) {
    const auto r = solve_cubic({1.0, 4.0, 5.0, 2.0});
    EXPECT_EQ(r.multiplicity, Multiplicity::double_root);
    EXPECT_NEAR(r.roots[0].real(), -1.0, 1e-12);
    EXPECT_EQ(r.roots[0], r.roots[1]);
    EXPECT_NEAR(r.roots[2].real(), -2.0, 1e-12);
    const auto q = solve_cubic({1.0, 5.0, 8.0, 4.0});
    EXPECT_EQ(q.multiplicity, Multiplicity::double_root);
    EXPECT_NEAR(q.roots[0].real(), -2.0, 1e-12);
    EXPECT_NEAR(q.roots[2].real(), -1.0, 1e-12);
}

TEST(SolveCubic, NearlyDoubleStaysDistinct) {
    // (p+1)(p+1+1e-6)(p+2)
    const double e = 1e-6;
    const auto r = solve_cubic({1.0, 4.0 + e, 5.0 + 3.0 * e, 2.0 + 2.0 * e});
    EXPECT_EQ(r.multiplicity, Multiplicity::distinct);
}

TEST(SolveCubic, PhysicalPointOneRealOnePair) {
    const auto c = denominator_coeffs(make_params(0.3, 0.5));
    const auto r = solve_cubic(c);
    EXPECT_EQ(r.multiplicity, Multiplicity::distinct);
    EXPECT_GT(std::abs(r.roots[0].imag()), 0.0);
    EXPECT_EQ(r.roots[1], std::conj(r.roots[0]));
    EXPECT_EQ(r.roots[2].imag(), 0.0);
    for (const auto& x : r.roots) {
        EXPECT_LT(cubic_residual(c, x), 1e-10 * coeff_scale(c));
    }
}

TEST(SolveCubic, Errors) {
    EXPECT_THROW(solve_cubic({0.0, 1.0, 1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(solve_cubic({1.0, std::nan(""), 1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(solve_cubic({1.0, 1.0, kInfinite, 1.0}), std::invalid_argument);
}

TEST(SolveCubic, RandomResidualsAndConjugacy) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int k = 0; k < 5000; ++k) {
        const std::array<double, 4> c{u(rng) + (k % 2 ? 11.0 : -11.0), u(rng), u(rng), u(rng)};
        const auto r = solve_cubic(c);
        for (const auto& x : r.roots) {
            EXPECT_LT(cubic_residual(c, x), 1e-10 * coeff_scale(c) * std::max(1.0, std::pow(std::abs(x), 3)));
        }
        if (r.roots[0].imag() != 0.0) {
            EXPECT_EQ(r.roots[1], std::conj(r.roots[0]));
        }
    }
}

TEST(LaplaceInvert, UncoupledIsIdentity) {
    const auto m = laplace_invert(make_params(0.0, 0.7));
    ASSERT_EQ(m.terms.size(), 1u);
    EXPECT_EQ(m.terms[0].exponent, cplx(0.0, 0.0));
    EXPECT_EQ(m.terms[0].residue, cplx(1.0, 0.0));
    for (double t : {0.0, 1.0, 100.0}) {
        EXPECT_EQ(g_of_t(m, t), 1.0);
        EXPECT_EQ(g_value(make_params(0.0, kInfinite), t), 1.0);
    }
}

TEST(LaplaceInvert, ResidueSumIsOne) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> k(0.01, 2.0);
    std::uniform_real_distribution<double> l(-3.0, 4.6);
    for (int i = 0; i < 500; ++i) {
        const auto m = laplace_invert(make_params(k(rng), std::exp(l(rng))));
        EXPECT_NEAR(std::abs(m.residue_sum() - 1.0), 0.0, 1e-10);
        EXPECT_NEAR(g_of_t(m, 0.0), 1.0, 1e-10);
    }
}

TEST(LaplaceInvert, TriplePoleRejected) {
    const double kappa = 9.0 / (16.0 * std::sqrt(3.0));
    EXPECT_THROW(laplace_invert(make_params(kappa, 27.0 / 16.0)), UnsupportedDegeneracy);
    EXPECT_NO_THROW(laplace_invert(make_params(kappa, 27.0 / 16.0 * (1.0 + 1e-4))));
}

TEST(LaplaceInvert, DoublePoleIsContinuous) {
    // Find kappa at lambda = 2 where the complex pair turns real, then compare both sides.
    const double lambda = 2.0;
    const auto is_pair = [&](double k) { return solve_cubic(denominator_coeffs(make_params(k, lambda))).roots[0].imag() != 0.0; };
    double lo = 0.05;
    double hi = 0.5;
    ASSERT_NE(is_pair(lo), is_pair(hi));
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (is_pair(mid) == is_pair(lo) ? lo : hi) = mid;
    }
    const auto merged = [&](double k) {
        return solve_cubic(denominator_coeffs(make_params(k, lambda))).multiplicity == Multiplicity::double_root;
    };
    EXPECT_TRUE(merged(lo) || merged(hi));
    for (double t : {0.5, 3.0, 10.0, 40.0}) {
        const double g_lo = g_value(make_params(lo, lambda), t);
        const double g_hi = g_value(make_params(hi, lambda), t);
        const double g_off = g_value(make_params(lo * (1.0 - 1e-6), lambda), t);
        EXPECT_NEAR(g_lo, g_hi, 1e-9);
        EXPECT_NEAR(g_lo, g_off, 1e-5);
    }
}

TEST(GOfT, SignChangeAtLargeLambda) {
    const auto m = propagator_modes(make_params(0.3, 5.0));
    bool negative = false;
    for (double t = 0.0; t <= 50.0; t += 0.01) {
        negative = negative || g_of_t(m, t) < 0.0;
    }
    EXPECT_TRUE(negative);
}

TEST(GOfT, NegativeTimeRejected) {
    const auto m = propagator_modes(make_params(0.3, 5.0));
    EXPECT_THROW(g_of_t(m, -1.0), std::invalid_argument);
}

TEST(Memoryless, CriticalPoint) {
    EXPECT_NEAR(g_memoryless(0.25, 1.0, 4.0), 2.0 / std::numbers::e, 1e-9);
    EXPECT_NEAR(g_memoryless(0.5, 2.0, 2.0), 2.0 / std::numbers::e, 1e-9);
    EXPECT_NEAR(g_of_t(propagator_modes(make_params(0.25, kInfinite)), 4.0), 2.0 / std::numbers::e, 1e-9);
}

TEST(Memoryless, MatchesClosedFormAllBranches) {
    for (double k : {0.0, 0.05, 0.2, 0.2499, 0.25, 0.2501, 0.3, 1.0, 2.0}) {
        const auto m = propagator_modes(make_params(k, kInfinite));
        for (double t = 0.0; t <= 40.0; t += 0.37) {
            const double ref = memoryless_reference(k, 1.0, t);
            EXPECT_NEAR(g_memoryless(k, 1.0, t), ref, 1e-12) << "k=" << k << " t=" << t;
            EXPECT_NEAR(g_of_t(m, t), ref, 1e-12) << "k=" << k << " t=" << t;
        }
    }
}

TEST(Memoryless, FirstZeroAboveThreshold) {
    const double k = 0.4;
    const double w = std::sqrt(16.0 * k * k - 1.0);
    // tan(w t / 4) = -w, first positive solution lies in (2 pi / w, 4 pi / w).
    const double t0 = 4.0 * (std::numbers::pi - std::atan(w)) / w;
    EXPECT_NEAR(g_memoryless(k, 1.0, t0), 0.0, 1e-13);
    EXPECT_GT(g_memoryless(k, 1.0, 0.9 * t0), 0.0);
    EXPECT_LT(g_memoryless(k, 1.0, 1.1 * t0), 0.0);
}

TEST(DirectModel, Branches) {
    EXPECT_EQ(g_direct_model(0.3, 1.0, 0.0), 1.0);
    for (double k : {0.1, 0.25, 0.3, 0.5, 0.6}) {
        const auto m = propagator_modes(make_params(k, 0.5), Model::direct);
        double prev = 1.0;
        bool monotone = true;
        bool negative = false;
        for (double t = 0.0; t <= 60.0; t += 0.05) {
            const double g = g_direct_model(k, 0.5, t);
            EXPECT_NEAR(g, direct_reference(k, 0.5, t), 1e-12);
            EXPECT_NEAR(g_of_t(m, t), g, 1e-12);
            monotone = monotone && g <= prev + 1e-15;
            negative = negative || g < 0.0;
            prev = g;
        }
        if (0.5 > 2.0 * k) {
            EXPECT_TRUE(monotone) << k;
            EXPECT_FALSE(negative) << k;
        } else if (0.5 < 2.0 * k) {
            EXPECT_TRUE(negative) << k;
        }
    }
}

TEST(Propagator, StabilityRealityBoundedness) {
    double worst_re = -1.0;
    double worst_im = 0.0;
    double worst_abs = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double k = 0.01 + (2.0 - 0.01) * i / 49.0;
        for (int j = 0; j < 50; ++j) {
            const double l = std::exp(std::log(0.05) + (std::log(100.0) - std::log(0.05)) * j / 49.0);
            const auto m = propagator_modes(make_params(k, l));
            for (const auto& x : m.terms) {
                worst_re = std::max(worst_re, x.exponent.real());
            }
            for (double t = 0.0; t <= 60.0; t += 0.25) {
                const cplx g = raw_sum(m, t);
                worst_im = std::max(worst_im, std::abs(g.imag()));
                worst_abs = std::max(worst_abs, std::abs(g));
                EXPECT_NO_THROW(g_of_t(m, t));
            }
        }
    }
    EXPECT_LE(worst_re, 1e-10);
    EXPECT_LT(worst_im, 1e-9);
    EXPECT_LE(worst_abs, 1.0 + 1e-9);
}

TEST(Propagator, LargeLambdaApproachesMemoryless) {
    const auto m = propagator_modes(make_params(0.3, 1e4));
    double worst = 0.0;
    for (double t = 0.0; t <= 20.0; t += 0.001) {
        worst = std::max(worst, std::abs(g_of_t(m, t) - g_memoryless(0.3, 1.0, t)));
    }
    EXPECT_LT(worst, 1e-3);
}

TEST(Propagator, ZeroInitialSlope) {
    for (const auto& p : {make_params(0.3, 0.5), make_params(1.0, 5.0), make_params(0.05, 50.0), make_params(0.3, kInfinite)}) {
        const auto m = propagator_modes(p);
        const auto fd = [&](double h) { return (g_of_t(m, h) - g_of_t(m, 0.0)) / h; };
        // The forward difference is O(h); one Richardson step removes that term.
        for (double h : {1e-2, 1e-3}) {
            EXPECT_LT(std::abs(2.0 * fd(0.5 * h) - fd(h)), 1e-6) << "h=" << h;
        }
        EXPECT_NEAR(g_dot(m, 0.0), 0.0, 1e-10);
    }
}
