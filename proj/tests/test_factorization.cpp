#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "delaylab/factorization.hpp"
#include "delaylab/placement.hpp"
#include "generators.hpp"

using namespace delaylab;

namespace {

// z - 1 + e^{-z}: maximal multiplicity 2 at the origin.
Quasipolynomial first_order() { return {1, 0, {-1.0}, {1.0}, 1.0}; }

// z^2 - 2z + 2 - 2e^{-z}: maximal multiplicity 3 at the origin.
Quasipolynomial second_order() { return {2, 0, {2.0, -2.0}, {-2.0}, 1.0}; }

cplx integral_rhs(const FactorizedForm& f, cplx z) {
    return std::pow(z, f.multiplicity) * detail::weighted_laplace(f.weight_coeffs, z);
}

}  // namespace

TEST(Deflate, FirstOrderRemainder) {
    const TaylorRemainder r = deflate(first_order(), 0.0, 2);
    ASSERT_EQ(r.coeffs.size(), 16u);
    EXPECT_NEAR(r.coeffs[0], 0.5, 1e-15);
    EXPECT_NEAR(r.coeffs[1], -1.0 / 6.0, 1e-15);
    EXPECT_NEAR(r.coeffs[2], 1.0 / 24.0, 1e-15);
}

TEST(Deflate, GenericDesignMatchesDerivative) {
    const PlacementResult p = solve_generic_mid(2, 1, 0.7, -1.3);
    const TaylorRemainder r = deflate(p.qp, -1.3, 4);
    const Evaluation d4 = evaluate_derivative(r.normalized, 0.0, 4);
    EXPECT_NEAR(r.coeffs[0], d4.value.real() / 24.0, 1e-10);
}

TEST(Deflate, OverstatedMultiplicity) {
    try {
        (void)deflate(first_order(), 0.0, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::multiplicity_condition_violated);
    }
}

TEST(Deflate, OrderCap) {
    EXPECT_THROW((void)deflate(first_order(), 0.0, 2, kMaxTaylorOrder), Error);
}

TEST(IntegralForm, FirstOrderWeightIsOneMinusT) {
    const FactorizedForm f = integral_form(first_order(), 0.0);
    EXPECT_TRUE(f.beta_weight);
    EXPECT_EQ(f.multiplicity, 2);
    ASSERT_EQ(f.weight_coeffs.size(), 2u);
    EXPECT_NEAR(f.weight_coeffs[0], 1.0, 1e-14);
    EXPECT_NEAR(f.weight_coeffs[1], -1.0, 1e-14);
    EXPECT_LE(f.validation_residual, 1e-8);
    for (cplx z : factorization_probes()) {
        const cplx lhs = z - 1.0 + std::exp(-z);
        EXPECT_LT(std::abs(lhs - integral_rhs(f, z)), 1e-8) << z;
    }
}

TEST(IntegralForm, SecondOrderWeight) {
    const FactorizedForm f = integral_form(second_order(), 0.0);
    EXPECT_TRUE(f.beta_weight);
    ASSERT_EQ(f.weight_coeffs.size(), 3u);
    EXPECT_NEAR(f.weight_coeffs[0], 1.0, 1e-13);
    EXPECT_NEAR(f.weight_coeffs[1], -2.0, 1e-13);
    EXPECT_NEAR(f.weight_coeffs[2], 1.0, 1e-13);
    EXPECT_LE(f.validation_residual, 1e-8);
}

TEST(IntegralForm, WeightIntegratesToLeadingRemainder) {
    const FactorizedForm f = integral_form(second_order(), 0.0);
    double integral = 0.0;
    for (std::size_t k = 0; k < f.weight_coeffs.size(); ++k) integral += f.weight_coeffs[k] / (k + 1.0);
    EXPECT_NEAR(integral, deflate(second_order(), 0.0, 3).coeffs[0], 1e-14);
}

TEST(IntegralForm, RequiresMaximalMultiplicity) {
    const Quasipolynomial qp{2, 1, {1.0, 0.0}, {-2.0 / std::numbers::e, 0.0}, 1.0};
    EXPECT_THROW((void)integral_form(qp, -1.0), Error);
}

TEST(HypergeometricForm, FirstOrderParameters) {
    const FactorizedForm f = hypergeometric_form(first_order(), 0.0);
    ASSERT_TRUE(f.hyper.has_value());
    EXPECT_EQ(f.hyper->a, 1.0);
    EXPECT_EQ(f.hyper->b, 3.0);
    EXPECT_NEAR(f.hyper->c, 1.0, 1e-14);
    const cplx z = 1.0;
    const cplx lhs = kummer_M(1.0, 3.0, -z) * z * z * f.hyper->c * std::beta(1.0, 2.0);
    EXPECT_NEAR(std::abs(lhs - (z - 1.0 + std::exp(-z))), 0.0, 1e-8);
    EXPECT_NEAR(lhs.real(), 1.0 / std::numbers::e, 1e-12);
}

TEST(HypergeometricForm, RenderedText) {
    const PlacementResult p = solve_generic_mid(2, 1, 1.0, -1.0);
    const FactorizedForm f = hypergeometric_form(p.qp, -1.0);
    const std::string text = render_factorized(f, p.qp);
    EXPECT_NE(text.find("(s + 1)^4"), std::string::npos) << text;
    EXPECT_NE(text.find("M(2, 5, -(s + 1))"), std::string::npos) << text;
}

TEST(Kummer, AtZeroIsOne) {
    for (auto [a, b] : {std::pair{1.0, 1.0}, {0.5, 2.0}, {2.0, 4.0}, {3.0, 7.5}})
        EXPECT_EQ(kummer_M(a, b, 0.0), cplx(1.0, 0.0));
}

TEST(Kummer, ExponentialIdentity) {
    for (cplx z : {cplx{1, 0}, cplx{-1, 0}, cplx{0, 1}, cplx{0, -1}})
        EXPECT_LT(std::abs(kummer_M(1.0, 1.0, z) - std::exp(z)), 1e-12 * std::abs(std::exp(z))) << z;
}

TEST(Kummer, FirstIntegralIdentity) {
    for (cplx z : {cplx{1, 0}, cplx{-2, 0}, cplx{0, 1}}) {
        const cplx want = (std::exp(z) - 1.0) / z;
        EXPECT_LT(std::abs(kummer_M(1.0, 2.0, z) - want), 1e-12) << z;
    }
}

TEST(Kummer, MatchesIntegralRepresentation) {
    // M(2, 4, 1) = 6 * int_0^1 e^t t (1 - t) dt = 6 (3 - e).
    const cplx v = kummer_M(2.0, 4.0, 1.0);
    const cplx q = 6.0 * detail::gauss64([](double t) { return std::exp(t) * t * (1.0 - t); });
    EXPECT_LT(std::abs(v - q), 1e-10);
    EXPECT_NEAR(v.real(), 6.0 * (3.0 - std::numbers::e), 1e-12);
}

TEST(Kummer, SeriesRegimeCap) {
    try {
        (void)kummer_M(1.0, 2.0, 51.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::argument_outside_series_regime);
    }
    EXPECT_THROW((void)kummer_M(0.0, 2.0, 1.0), Error);
}

TEST(FactorizationProperty, FormEquivalenceAtRandomProbes) {
    gen::Rng rng(401);
    for (int c = 0; c < gen::kCases; ++c) {
        const int n = rng.integer(1, 3);
        const int m = rng.integer(0, n);
        const double tau = rng.uniform(0.3, 2.0), s0 = rng.uniform(-3.0, 1.0);
        const PlacementResult p = solve_generic_mid(n, m, tau, s0);
        const FactorizedForm f = integral_form(p.qp, s0);
        const Quasipolynomial qn = normalize(p.qp, s0);
        for (int k = 0; k < 50; ++k) {
            const cplx z = std::polar(rng.uniform(0.0, 5.0), rng.uniform(-3.2, 3.2));
            const Evaluation e = evaluate(qn, z);
            ASSERT_LE(std::abs(e.value - integral_rhs(f, z)), 1e-8 * e.scale) << "case " << c << " z " << z;
        }
    }
}

TEST(FactorizationProperty, HypergeometricAgreesWithIntegral) {
    gen::Rng rng(402);
    for (int c = 0; c < gen::kCases; ++c) {
        const int n = rng.integer(1, 3);
        const int m = rng.integer(0, n);
        const double tau = rng.uniform(0.3, 2.0), s0 = rng.uniform(-3.0, 1.0);
        const PlacementResult p = solve_generic_mid(n, m, tau, s0);
        const FactorizedForm f = hypergeometric_form(p.qp, s0);
        ASSERT_TRUE(f.hyper.has_value());
        const double pref = f.hyper->c * std::beta(m + 1.0, n + 1.0);
        for (cplx z : factorization_probes()) {
            const cplx h = std::pow(z, f.multiplicity) * pref * kummer_M(f.hyper->a, f.hyper->b, -z);
            const cplx i = integral_rhs(f, z);
            ASSERT_LE(std::abs(h - i), 1e-10 * std::max(1.0, std::abs(i))) << "case " << c << " z " << z;
        }
    }
}

TEST(FactorizationProperty, DeflationMatchesNearOrigin) {
    gen::Rng rng(403);
    for (int c = 0; c < gen::kCases; ++c) {
        const int n = rng.integer(1, 3);
        const int m = rng.integer(0, n);
        const double tau = rng.uniform(0.3, 2.0), s0 = rng.uniform(-3.0, 1.0);
        const PlacementResult p = solve_generic_mid(n, m, tau, s0);
        const int M = n + m + 1;
        const TaylorRemainder r = deflate(p.qp, s0, M);
        const cplx z = std::polar(0.05, rng.uniform(-3.2, 3.2));
        cplx series = 0.0;
        for (std::size_t k = r.coeffs.size(); k-- > 0;) series = series * z + r.coeffs[k];
        const Evaluation e = evaluate(r.normalized, z);
        ASSERT_LE(std::abs(e.value - std::pow(z, M) * series), 1e-14 * e.scale + std::pow(0.05, M + 16)) << c;
    }
}
