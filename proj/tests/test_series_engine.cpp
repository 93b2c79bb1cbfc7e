#include <gtest/gtest.h>

#include <shallowcv/series_engine.hpp>

using namespace shallowcv;

namespace {

constexpr double pi = std::numbers::pi;

struct ClosedKernel {
    cplx p, t1, t2, a0;
    // principal logarithms are single-valued on each side because |ζ/t| < 1 (inside) or |t/ζ| < 1 (outside)
    cplx inside(cplx z) const { return a0 * std::exp(p * std::log(1.0 - z / t1) + std::conj(p) * std::log(1.0 - z / t2)); }
    cplx outside(cplx z) const { return std::exp(p * std::log(1.0 - t1 / z) + std::conj(p) * std::log(1.0 - t2 / z)) / z; }
};

ClosedKernel closed(const AnnulusCoeffs& c) {
    return {cplx{-0.5, -c.lambda}, c.t1, c.t2, c.a(0)};
}

/// Taylor/Laurent coefficient of ζ^k by trapezoidal quadrature on |ζ| = r.
template <class F>
cplx coeff(F f, double r, int k, int P = 4096) {
    cplx s{};
    for (int j = 0; j < P; ++j) {
        const cplx z = std::polar(r, 2 * pi * j / P);
        s += f(z) * std::pow(z, -k);
    }
    return s / double(P);
}

}  // namespace

TEST(Kernel, LambdaFromKappa) {
    const AnnulusCoeffs c = kernel_coeffs(1.8, -1.35, 1.52, 40);
    EXPECT_NEAR(c.lambda, std::log(1.8) / (2 * pi), 1e-15);
    EXPECT_NEAR(c.lambda, 0.0935492, 1e-7);
}

TEST(Kernel, SeriesCoefficientsMatchClosedForm) {
    const AnnulusCoeffs c = kernel_coeffs(1.8, -1.35, 1.52, 60);
    const ClosedKernel X = closed(c);
    for (int k = 0; k <= 40; ++k) {
        const cplx ak = coeff([&](cplx z) { return X.inside(z); }, 0.8, k);
        const cplx bk = coeff([&](cplx z) { return X.outside(z); }, 1.25, -k);
        EXPECT_NEAR(std::abs(c.a(k) - ak), 0.0, 1e-11) << k;
        EXPECT_NEAR(std::abs(c.b(k) - bk), 0.0, 1e-11) << k;
    }
    EXPECT_EQ(c.b(0), cplx{});
    EXPECT_NEAR(std::abs(c.b(1) - 1.0), 0.0, 1e-15);
}

TEST(Kernel, JumpRelationsFixTheBranch) {
    const double kappa = 1.8;
    const AnnulusCoeffs c = kernel_coeffs(kappa, -1.35, 1.52, 40);
    const ClosedKernel X = closed(c);
    const double r = 1.0 - 1e-9;
    // free arc: X continuous
    for (double t : {pi, 2.0, -2.5, 1.7}) {
        const cplx s = std::polar(1.0, t);
        EXPECT_NEAR(std::abs(X.inside(r * s) - X.outside(s / r)), 0.0, 1e-6 * std::abs(X.outside(s / r))) << t;
    }
    // constrained arc: κX⁺ + X⁻ = 0
    for (double t : {0.0, 0.5, -0.9, 1.2}) {
        const cplx s = std::polar(1.0, t);
        EXPECT_NEAR(std::abs(kappa * X.inside(r * s) + X.outside(s / r)), 0.0, 1e-6 * std::abs(X.outside(s / r))) << t;
    }
}

TEST(Kernel, SeriesAgreeWithClosedFormOffTheCircle) {
    const AnnulusCoeffs c = kernel_coeffs(1.8, -0.2, 0.25, 360);
    const ClosedKernel X = closed(c);
    for (double t : {0.3, 2.0, -1.0}) {
        EXPECT_NEAR(std::abs(kernel_interior(c, std::polar(0.6, t)) - X.inside(std::polar(0.6, t))), 0.0, 1e-10);
        EXPECT_NEAR(std::abs(kernel_exterior(c, std::polar(1e3, t)) - X.outside(std::polar(1e3, t))), 0.0, 1e-15);
    }
    EXPECT_LE(branch_check(c, 1e7), 1e-6);
}

TEST(Kernel, RejectsBadAngles) {
    EXPECT_THROW((void)kernel_coeffs(1.8, 0.1, 1.0, 40), GeometryError);
    EXPECT_THROW((void)kernel_coeffs(1.0, -0.1, 1.0, 40), ConfigError);
}

TEST(Fourier, RecoversTrigPolynomial) {
    const int P = 41;
    std::vector<cplx> s(P);
    for (int j = 0; j < P; ++j) {
        const cplx z = std::polar(1.0, 2 * pi * j / P);
        s[std::size_t(j)] = 2.0 * z * z + cplx(0, 3) / z - 0.5;
    }
    const IndexedSeries c = fourier_coefficients(s, 10);
    EXPECT_NEAR(std::abs(c(2) - 2.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(c(-1) - cplx(0, 3)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(c(0) + 0.5), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(c(5)), 0.0, 1e-14);
    const cplx z = std::polar(1.0, 0.77);
    EXPECT_NEAR(std::abs(eval_series(c, z) - (2.0 * z * z + cplx(0, 3) / z - 0.5)), 0.0, 1e-13);
    EXPECT_THROW((void)fourier_coefficients(s, 30), ConfigError);
}

TEST(RingExpansion, ReconstructsOffGrid) {
    const CompositeMap m = compose(build_case_boundary(CompositeEllipse{}, 1.0), 1.2);
    const RingExpansion r = ring_expand(m, m.alpha(), 360);
    for (double t : {0.1234, 2.5, -1.9}) {
        const cplx s = std::polar(1.0, t);
        const cplx ref = ring_target(m, m.alpha(), s);
        EXPECT_NEAR(std::abs(eval_series(r.f, s) - ref), 0.0, 1e-8 * std::abs(ref)) << t;
    }
    EXPECT_THROW((void)ring_expand(m, 1.0, 360), GeometryError);
}

TEST(CavityRhs, K0EqualsMinusIWGammaForCircle) {
    const CompositeMap m = compose(build_case_boundary(AxisymmetricShape::circle(3.0, 10.0), 500.0), 1.2);
    MaterialParams mat;
    const CavityRhs r = cavity_rhs(m, mat, 360);
    const double W = 9.0 / 2.0;
    EXPECT_NEAR(std::abs(r.K0 - cplx(0, -W * mat.gamma)), 0.0, 1e-9 * W * mat.gamma);
}

TEST(CavityRhs, LinearInGammaAndIndependentOfK0ForK0) {
    const CompositeMap m = compose(build_case_boundary(CompositeEllipse{}, 1.0), 1.2);
    MaterialParams a, b;
    b.gamma = 2.0 * a.gamma;
    const CavityRhs ra = cavity_rhs(m, a, 360), rb = cavity_rhs(m, b, 360);
    EXPECT_EQ(rb.K0, 2.0 * ra.K0);
    for (int k = 1; k <= 360; ++k) EXPECT_EQ(rb.Ik(k), 2.0 * ra.Ik(k));
    MaterialParams c = a;
    c.k0 = 0.3;
    EXPECT_NEAR(std::abs(cavity_rhs(m, c, 360).K0 - ra.K0), 0.0, 1e-9 * std::abs(ra.K0));
    MaterialParams z = a;
    z.gamma = 0.0;
    EXPECT_EQ(cavity_rhs(m, z, 360).K0, cplx{});
}
