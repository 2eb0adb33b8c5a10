#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hiernm/errors.hpp"
#include "hiernm/model.hpp"

using namespace hiernm;

namespace {

DensityMatrix2 random_pure(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
    const double z = u(rng);
    const double phi = ph(rng);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return DensityMatrix2::from_bloch(s * std::cos(phi), s * std::sin(phi), z);
}

cplx random_g(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> r(0.0, 1.0);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
    return std::polar(std::sqrt(r(rng)), ph(rng));
}

}  // namespace

TEST(PhysParams, Validation) {
    EXPECT_NO_THROW(make_params(0.0, 1.0));
    EXPECT_NO_THROW(make_params(0.3, kInfinite));
    EXPECT_THROW(make_params(-0.1, 1.0), std::invalid_argument);
    EXPECT_THROW(make_params(0.1, 0.0), std::invalid_argument);
    EXPECT_THROW(make_params(0.1, -kInfinite), std::invalid_argument);
    EXPECT_THROW(make_params(0.1, std::nan("")), std::invalid_argument);
    EXPECT_THROW(make_params(0.1, 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(make_params(kInfinite, 1.0), std::invalid_argument);
    EXPECT_TRUE(make_params(0.1, kInfinite).memoryless());
    EXPECT_FALSE(make_params(0.1, 1e12).memoryless());
}

TEST(DensityMatrix, Invariants) {
    const auto p = DensityMatrix2::plus();
    EXPECT_DOUBLE_EQ(p.ee(), 0.5);
    EXPECT_DOUBLE_EQ(p.gg(), 0.5);
    EXPECT_EQ(p.ge(), std::conj(p.eg()));
    EXPECT_THROW(DensityMatrix2(1.5, 0.0), std::invalid_argument);
    EXPECT_THROW(DensityMatrix2(0.5, cplx(0.6, 0.0)), std::invalid_argument);
    EXPECT_THROW(DensityMatrix2(std::nan(""), 0.0), std::invalid_argument);
    EXPECT_THROW(DensityMatrix2::from_bloch(1.0, 1.0, 0.0), std::invalid_argument);
    const auto b = DensityMatrix2::from_bloch(0.0, 1.0, 0.0);
    EXPECT_NEAR(b.eg().imag(), -0.5, 1e-15);
}

TEST(TimeGrid, Spacing) {
    const TimeGrid g(1.0, 0.3);
    EXPECT_EQ(g.steps(), 3u);
    EXPECT_DOUBLE_EQ(g.time(0), 0.0);
    EXPECT_DOUBLE_EQ(g.time(g.steps()), 1.0);
    EXPECT_NEAR(g.dt() * g.steps(), 1.0, 1e-15);
    EXPECT_THROW(TimeGrid(1.0, 0.9), std::invalid_argument);
    EXPECT_EQ(TimeGrid(1.0, 0.5).size(), 3u);
    EXPECT_THROW(TimeGrid(1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(TimeGrid(-1.0, 0.1), std::invalid_argument);
}

TEST(Spectrum, PeakAndHalfWidth) {
    const auto p = make_params(0.3, 1.0);
    EXPECT_NEAR(lorentzian_spectrum(0.0, p), 1.0 / (2.0 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(lorentzian_spectrum(1.0, p), 0.5 * lorentzian_spectrum(0.0, p), 1e-15);
    EXPECT_LT(lorentzian_spectrum(1e8, p), 1e-16);
    EXPECT_LT(lorentzian_spectrum(-1e8, p), 1e-16);
    EXPECT_THROW(lorentzian_spectrum(0.0, make_params(0.3, kInfinite)), std::invalid_argument);
}

TEST(Kernel, Values) {
    const auto p = make_params(0.3, 2.0);
    EXPECT_DOUBLE_EQ(correlation_kernel(0.0, p), 1.0);
    EXPECT_NEAR(correlation_kernel(0.5, p), 1.0 / std::numbers::e, 1e-15);
    EXPECT_DOUBLE_EQ(correlation_kernel(-0.5, p), correlation_kernel(0.5, p));
    try {
        correlation_kernel(0.0, make_params(0.3, kInfinite));
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("g_memoryless"), std::string::npos);
    }
}

TEST(Kernel, IntegratesToGamma) {
    for (double lambda : {0.05, 0.5, 1.0, 7.0, 100.0}) {
        for (double gamma : {1.0, 2.5}) {
            const auto p = make_params(0.3, lambda, gamma);
            const double half = 20.0 / lambda;
            const int n = 400000;
            const double h = 2.0 * half / n;
            double sum = 0.5 * (correlation_kernel(-half, p) + correlation_kernel(half, p));
            for (int i = 1; i < n; ++i) {
                sum += correlation_kernel(-half + i * h, p);
            }
            EXPECT_NEAR(sum * h, gamma, 1e-6 * gamma) << "lambda=" << lambda;
        }
    }
}

TEST(Evolve, Examples) {
    const auto g0 = evolve_qubit(DensityMatrix2::excited(), 0.0);
    EXPECT_DOUBLE_EQ(g0.ee(), 0.0);
    const auto r = DensityMatrix2::from_bloch(0.3, -0.2, 0.4);
    const auto same = evolve_qubit(r, 1.0);
    EXPECT_DOUBLE_EQ(same.ee(), r.ee());
    EXPECT_EQ(same.eg(), r.eg());
    const auto half = evolve_qubit(DensityMatrix2::plus(), 0.5);
    EXPECT_DOUBLE_EQ(half.ee(), 0.125);
    EXPECT_DOUBLE_EQ(half.eg().real(), 0.25);
    EXPECT_THROW(evolve_qubit(r, 1.0 + 1e-6), UnphysicalPropagator);
    EXPECT_NO_THROW(evolve_qubit(DensityMatrix2::excited(), 1.0 + 1e-10));
}

TEST(Evolve, PositivityPreserved) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        double x = u(rng), y = u(rng), z = u(rng);
        const double n = std::sqrt(x * x + y * y + z * z);
        if (n > 1.0) {
            x /= n;
            y /= n;
            z /= n;
        }
        const auto out = evolve_qubit(DensityMatrix2::from_bloch(x, y, z), random_g(rng));
        EXPECT_GE(out.ee(), 0.0);
        EXPECT_LE(out.ee(), 1.0);
        EXPECT_LE(std::norm(out.eg()), out.ee() * (1.0 - out.ee()) + 1e-12);
    }
}

TEST(TraceDistance, Examples) {
    EXPECT_NEAR(trace_distance(DensityMatrix2::excited(), DensityMatrix2::ground()), 1.0, 1e-15);
    EXPECT_NEAR(trace_distance(DensityMatrix2::plus(), DensityMatrix2::minus()), 1.0, 1e-15);
    const auto r = DensityMatrix2::from_bloch(0.1, 0.2, 0.3);
    EXPECT_EQ(trace_distance(r, r), 0.0);
    EXPECT_NEAR(trace_distance_model(std::polar(1.0, 0.7), 0.0, cplx(0.0, 1.0)), 1.0, 1e-15);
    EXPECT_EQ(trace_distance_model(0.0, 0.8, cplx(0.3, 0.1)), 0.0);
    EXPECT_DOUBLE_EQ(trace_distance_model(0.5, 1.0, 0.0), 0.25);
}

TEST(TraceDistance, ModelMatchesEigenvalueRoute) {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const auto a = random_pure(rng);
        const auto b = random_pure(rng);
        const cplx g = random_g(rng);
        const double direct = trace_distance(evolve_qubit(a, g), evolve_qubit(b, g));
        const double model = trace_distance_model(g, a.ee() - b.ee(), a.eg() - b.eg());
        worst = std::max(worst, std::abs(direct - model));
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(TraceDistance, MetricProperties) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 1000; ++k) {
        const auto a = evolve_qubit(random_pure(rng), random_g(rng));
        const auto b = evolve_qubit(random_pure(rng), random_g(rng));
        const auto c = evolve_qubit(random_pure(rng), random_g(rng));
        EXPECT_NEAR(trace_distance(a, b), trace_distance(b, a), 1e-12);
        EXPECT_LE(trace_distance(a, c), trace_distance(a, b) + trace_distance(b, c) + 1e-12);
        EXPECT_GE(trace_distance(a, b), 0.0);
        EXPECT_LE(trace_distance(a, b), 1.0 + 1e-12);
    }
}
