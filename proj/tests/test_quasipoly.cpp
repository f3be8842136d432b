#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "delaylab/quasipoly.hpp"
#include "delaylab/spectrum.hpp"
#include "generators.hpp"

using namespace delaylab;

namespace {

const double kE = std::numbers::e;

Quasipolynomial oscillator(double b0) { return {2, 1, {1.0, 0.0}, {b0, 0.0}, 1.0}; }

Quasipolynomial s_minus_one_plus_exp() { return {1, 0, {-1.0}, {1.0}, 1.0}; }

}  // namespace

TEST(Evaluate, OscillatorDesignVanishesAtMinusOne) {
    // Five-digit gain; the four-digit -0.7358 leaves |Delta(-1)| at 1.2e-4.
    EXPECT_LT(std::abs(evaluate(oscillator(-0.73576), -1.0).value), 5e-5);
    EXPECT_LT(std::abs(evaluate(oscillator(-2.0 / kE), -1.0).value), 1e-15);
}

TEST(Evaluate, ZeroDelayedPartReducesToP) {
    const Quasipolynomial qp{2, 1, {1.0, 0.0}, {0.0, 0.0}, 1.0};
    EXPECT_LT(std::abs(evaluate(qp, {0.0, 1.0}).value), 1e-15);
    EXPECT_LT(std::abs(evaluate(qp, {0.0, -1.0}).value), 1e-15);
}

TEST(Evaluate, AtOriginGivesA0PlusB0) {
    gen::Rng rng(11);
    for (int k = 0; k < 20; ++k) {
        const Quasipolynomial qp = rng.any();
        const Evaluation e = evaluate(qp, 0.0);
        EXPECT_NEAR(e.value.real(), qp.a[0] + qp.b[0], 1e-14);
        EXPECT_EQ(e.value.imag(), 0.0);
    }
}

TEST(Evaluate, ScaleBoundsValue) {
    gen::Rng rng(12);
    for (int k = 0; k < 50; ++k) {
        const Quasipolynomial qp = rng.any();
        const Evaluation e = evaluate(qp, rng.complex_in(-3, 3, 10));
        EXPECT_LE(std::abs(e.value), e.scale * (1 + 1e-12));
    }
}

TEST(Evaluate, RejectsNonFiniteArgument) {
    try {
        (void)evaluate(oscillator(-0.7), {std::nan(""), 0.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::non_finite_argument);
        EXPECT_STREQ(e.what(), "non-finite argument");
    }
    EXPECT_THROW((void)evaluate(oscillator(-0.7), {0.0, INFINITY}), Error);
}

TEST(EvaluateDerivative, OscillatorFirstDerivativeVanishes) {
    EXPECT_LT(std::abs(evaluate_derivative(oscillator(-0.73576), -1.0, 1).value), 5e-5);
    EXPECT_LT(std::abs(evaluate_derivative(oscillator(-2.0 / kE), -1.0, 1).value), 1e-15);
}

TEST(EvaluateDerivative, OrderZeroIsEvaluate) {
    gen::Rng rng(13);
    for (int k = 0; k < 20; ++k) {
        const Quasipolynomial qp = rng.any();
        const cplx s = rng.complex_in(-4, 4, 10);
        EXPECT_EQ(evaluate_derivative(qp, s, 0).value, evaluate(qp, s).value);
    }
}

TEST(EvaluateDerivative, SecondDerivativeOfSMinusOnePlusExp) {
    const Evaluation e = evaluate_derivative(s_minus_one_plus_exp(), 0.0, 2);
    EXPECT_NEAR(e.value.real(), 1.0, 1e-15);
    EXPECT_EQ(e.value.imag(), 0.0);
}

TEST(EvaluateDerivative, MatchesHandDerivativesOfGenericDesign) {
    // Delta(s) = s^2 - 4s + 6 + (-2s - 6) e^{-s}; derivatives at 1 by hand.
    const Quasipolynomial qp{2, 1, {6.0, -4.0}, {-6.0, -2.0}, 1.0};
    const double e1 = std::exp(-1.0);
    EXPECT_NEAR(evaluate_derivative(qp, 1.0, 0).value.real(), 3.0 - 8.0 * e1, 1e-14);
    EXPECT_NEAR(evaluate_derivative(qp, 1.0, 1).value.real(), -2.0 + 6.0 * e1, 1e-14);
    EXPECT_NEAR(evaluate_derivative(qp, 1.0, 2).value.real(), 2.0 - 4.0 * e1, 1e-14);
    EXPECT_NEAR(evaluate_derivative(qp, 1.0, 5).value.real(), -2.0 * e1, 1e-13);
}

TEST(EvaluateDerivative, OrderCap) {
    const Quasipolynomial qp = oscillator(-0.7);
    EXPECT_EQ(qp.max_derivative_order(), 9);
    EXPECT_NO_THROW((void)evaluate_derivative(qp, 0.0, 9));
    try {
        (void)evaluate_derivative(qp, 0.0, 10);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::derivative_order_too_large);
        EXPECT_STREQ(e.what(), "derivative order too large");
    }
}

TEST(Normalize, IdentityAtOriginWithUnitDelay) {
    gen::Rng rng(14);
    for (int k = 0; k < 20; ++k) {
        Quasipolynomial qp = rng.any();
        qp.tau = 1.0;
        const Quasipolynomial out = normalize(qp, 0.0);
        EXPECT_EQ(out.n, qp.n);
        EXPECT_EQ(out.m, qp.m);
        for (std::size_t i = 0; i < qp.a.size(); ++i) EXPECT_NEAR(out.a[i], qp.a[i], 1e-14);
        for (std::size_t i = 0; i < qp.b.size(); ++i) EXPECT_NEAR(out.b[i], qp.b[i], 1e-14);
        EXPECT_EQ(out.tau, 1.0);
    }
}

TEST(Normalize, OscillatorTripleRootMovesToOrigin) {
    const Quasipolynomial qn = normalize(oscillator(-2.0 / kE), -1.0);
    for (int k = 0; k <= 2; ++k) {
        const Evaluation e = evaluate_derivative(qn, 0.0, k);
        EXPECT_LT(std::abs(e.value), 1e-8 * e.scale) << k;
    }
    const Evaluation e3 = evaluate_derivative(qn, 0.0, 3);
    EXPECT_GT(std::abs(e3.value), 1e-3 * e3.scale);
}

TEST(Normalize, RootsMapBetweenVariables) {
    const Quasipolynomial qp = s_minus_one_plus_exp();
    const double s0 = 1.0;
    const Quasipolynomial qn = normalize(qp, s0);
    const Spectrum sp = compute_spectrum(qp, {-6.0, 1.0, 40.0});
    ASSERT_GE(sp.roots.size(), 6u);
    int checked = 0;
    for (const RootEstimate& r : sp.roots) {
        const cplx z = qp.tau * (r.value - s0);
        EXPECT_LT(evaluate(qn, z).relative(), 1e-10);
        ++checked;
    }
    // Conjugates count as separate roots of the map.
    EXPECT_GE(2 * checked - 1, 10);
}

TEST(Classify, RetardedAndNeutral) {
    EXPECT_EQ(classify({2, 1, {1, 0}, {0, 0}, 1}), DelayType::Retarded);
    EXPECT_EQ(classify({1, 1, {1}, {0, 0.5}, 1}), DelayType::Neutral);
    EXPECT_EQ(classify({3, 2, {1, 2, 3}, {0, 0, 0}, 1}), DelayType::Retarded);
}

TEST(Degree, IsNPlusMPlusOne) {
    EXPECT_EQ(degree({2, 1, {1, 0}, {0, 0}, 1}), 4);
    EXPECT_EQ(degree({1, 0, {1}, {0}, 1}), 2);
    EXPECT_EQ(degree({3, 2, {1, 2, 3}, {0, 0, 0}, 1}), 6);
}

TEST(Validate, RejectsBadShapes) {
    auto code = [](const Quasipolynomial& qp) {
        try {
            qp.validate();
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::not_found;
    };
    EXPECT_EQ(code({0, 0, {}, {1}, 1}), Errc::invalid_argument);
    EXPECT_EQ(code({1, 2, {1}, {1, 1, 1}, 1}), Errc::invalid_argument);
    EXPECT_EQ(code({2, 1, {1}, {1, 1}, 1}), Errc::invalid_argument);
    EXPECT_EQ(code({2, 1, {1, 0}, {1}, 1}), Errc::invalid_argument);
    EXPECT_EQ(code({2, 1, {1, 0}, {1, 0}, 0}), Errc::invalid_argument);
    EXPECT_EQ(code({2, 1, {1, NAN}, {1, 0}, 1}), Errc::non_finite_argument);
    EXPECT_EQ(code({2, 1, {1, 0}, {1, 0}, 1}), Errc::not_found);
}
