#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/ellint_2.hpp>
#include <boost/math/special_functions/jacobi_elliptic.hpp>

#include "oracles.hpp"
#include "pelastica/elliptic.hpp"
#include "pelastica/errors.hpp"

using namespace pelastica;
using oracle::kPi;

namespace {
const double kGridP[] = {6.0 / 5.0, 4.0 / 3.0, 1.5, 2.0, 3.0, 4.0, 6.0};
}

TEST_SUITE("elliptic") {

TEST_CASE("trivial values") {
    CHECK(integral(IntegralKind::F1, 1.5, 0.0, 0.5) == 0.0);
    CHECK(integral(IntegralKind::F1, 2.0, kPi / 2, 0.0) == doctest::Approx(kPi / 2).epsilon(1e-15));
    CHECK(complete(IntegralKind::F1, 2.0, 0.0) == doctest::Approx(kPi / 2).epsilon(1e-15));
    CHECK(std::isinf(complete(IntegralKind::F1, 1.5, 1.0)));
    CHECK(amplitude(1, 3.0, 0.0, 0.4) == 0.0);
    const auto sc = sn_cn(3.0, 0.0, 0.5);
    CHECK(sc.sn == 0.0);
    CHECK(sc.cn == 1.0);
    CHECK(dn(4.0, 0.0, 0.9) == 1.0);
    CHECK(sech(3.0, 0.0) == 1.0);
    CHECK(tanh(4.0, 0.0) == 0.0);
}

TEST_CASE("values frozen from a 30-digit quadrature") {
    CHECK(integral(IntegralKind::F1, 1.5, kPi / 2, 0.5) == doctest::Approx(2.2907929713347016).epsilon(1e-13));
    CHECK(amplitude(2, 1.5, 2.0, 0.6) == doctest::Approx(1.7064773083638143).epsilon(1e-12));
    CHECK(sech(1.5, 10.0) == doctest::Approx(0.0036078657388614886).epsilon(1e-10));
    CHECK(integral(IntegralKind::E2, 3.0, kPi + 0.3, 0.7) == doctest::Approx(3.1419479835167893).epsilon(1e-13));
    CHECK(integral(IntegralKind::F1, 3.0, 1.2, 0.4) == doctest::Approx(1.12579802280788).epsilon(1e-13));
    CHECK(integral(IntegralKind::E1, 1.2, 1.0, 0.9) == doctest::Approx(0.98530330181505985).epsilon(1e-13));
}

TEST_CASE("complete values against the Beta identity") {
    for (double p : {2.5, 3.0, 4.0, 6.0, 10.0}) {
        CAPTURE(p);
        CHECK(kp1(p) == doctest::Approx(oracle::beta_cos_power(-2.0 / p)).epsilon(1e-13));
        CHECK(complete(IntegralKind::E1, p, 1.0) == doctest::Approx(oracle::beta_cos_power(2.0 - 2.0 / p)).epsilon(1e-13));
    }
    for (double p : kGridP) {
        CAPTURE(p);
        CHECK(complete(IntegralKind::F1, p, 0.0) == doctest::Approx(oracle::beta_cos_power(1.0 - 2.0 / p)).epsilon(1e-13));
        CHECK(complete(IntegralKind::E2, p, 1.0) == doctest::Approx(oracle::beta_cos_power(2.0 / p)).epsilon(1e-13));
    }
    CHECK(kp1(4.0) == doctest::Approx(2.6220575542921198).epsilon(1e-14));
}

TEST_CASE("tanh_p at and beyond the quarter period") {
    const double K = kp1(4.0);
    CHECK(tanh(4.0, K) == doctest::Approx(complete(IntegralKind::E1, 4.0, 1.0)).epsilon(1e-14));
    CHECK(tanh(4.0, 2.0 * K) == tanh(4.0, K));
    CHECK(tanh(4.0, K) == doctest::Approx(0.87401918476403994).epsilon(1e-13));
    CHECK(sech(3.0, kp1(3.0)) == 0.0);
    CHECK(sech(3.0, 5.0) == 0.0);
}

TEST_CASE("p = 2 reduces to the classical functions (AGM oracle)") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(-6.0, 6.0), uq(0.0, 0.99);
    for (int i = 0; i < 50; ++i) {
        const double x = ux(rng), q = uq(rng);
        CAPTURE(x);
        CAPTURE(q);
        const auto ref = oracle::agm_incomplete(x, q);
        CHECK(integral(IntegralKind::F1, 2.0, x, q) == doctest::Approx(ref.F).epsilon(1e-12));
        CHECK(integral(IntegralKind::F2, 2.0, x, q) == doctest::Approx(ref.F).epsilon(1e-12));
        CHECK(integral(IntegralKind::E1, 2.0, x, q) == doctest::Approx(ref.E).epsilon(1e-12));
        CHECK(integral(IntegralKind::E2, 2.0, x, q) == doctest::Approx(ref.E).epsilon(1e-12));
        const auto j = oracle::agm_jacobi(x, q);
        const auto sc = sn_cn(2.0, x, q);
        CHECK(std::abs(sc.sn - j.sn) < 1e-12);
        CHECK(std::abs(sc.cn - j.cn) < 1e-12);
        CHECK(std::abs(dn(2.0, x, q) - j.dn) < 1e-12);
        CHECK(std::abs(sc.cn - boost::math::jacobi_cn(q, x)) < 1e-12);
    }
    for (double x : {0.5, 3.0, 10.0}) {
        CHECK(sech(2.0, x) == doctest::Approx(1.0 / std::cosh(x)).epsilon(1e-12));
        CHECK(tanh(2.0, x) == doctest::Approx(std::tanh(x)).epsilon(1e-12));
    }
}

TEST_CASE("tanh-sinh path agrees with Gauss-Kronrod on a 100-point grid") {
    const IntegralKind kinds[] = {IntegralKind::F1, IntegralKind::F2, IntegralKind::E1, IntegralKind::E2};
    const double ps[] = {1.2, 1.5, 2.5, 4.0, 6.0};
    const double qs[] = {0.0, 0.5, 0.9, 0.999, 1.0};
    int n = 0;
    double worst = 0.0;
    for (auto kind : kinds)
        for (double p : ps)
            for (double q : qs) {
                const double x = (n % 4 == 3) ? kPi / 2 : 0.3 + 0.4 * (n % 4);
                ++n;
                if (q == 1.0 && (kind == IntegralKind::F1 || kind == IntegralKind::F2) && p <= 2.0 && x == kPi / 2)
                    continue;
                const double ref = oracle::gk_integral(kind, p, q, x);
                worst = std::max(worst, std::abs(integral(kind, p, x, q) - ref) / std::max(1.0, std::abs(ref)));
            }
    CHECK(n == 100);
    CHECK(worst < 1e-9);
}

TEST_CASE("Pythagorean identity on the 7x5x41 grid") {
    double worst = 0.0;
    for (double p : kGridP)
        for (double q : {0.0, 0.3, 0.6, 0.9, 0.99})
            for (int i = 0; i <= 40; ++i) {
                const double x = -10.0 + 0.5 * i;
                const auto sc = sn_cn(p, x, q);
                worst = std::max(worst, std::abs(sc.sn * sc.sn + std::pow(std::abs(sc.cn), p) - 1.0));
            }
    CHECK(worst < 1e-10);
}

TEST_CASE("amplitude inverts the integrals") {
    for (double p : kGridP)
        for (double q : {0.0, 0.4, 0.95})
            for (double x : {-7.0, -0.2, 0.9, 3.3, 12.0}) {
                CAPTURE(p);
                CAPTURE(q);
                CAPTURE(x);
                const double a1 = amplitude(1, p, x, q);
                CHECK(integral(IntegralKind::F1, p, a1, q) == doctest::Approx(x).epsilon(1e-10));
                const double a2 = amplitude(2, p, x, q);
                CHECK(integral(IntegralKind::F2, p, a2, q) == doctest::Approx(x).epsilon(1e-10));
            }
    CHECK(amplitude(1, 2.5, complete(IntegralKind::F1, 2.5, 0.3), 0.3) == doctest::Approx(kPi / 2).epsilon(1e-14));
}

TEST_CASE("q = 1 amplitude") {
    // p <= 2: a bijection onto (-pi/2, pi/2).
    for (double p : {1.2, 1.5, 2.0}) {
        double prev = 0.0;
        for (double x : {0.5, 2.0, 8.0, 30.0}) {
            const double a = amplitude(1, p, x, 1.0);
            CHECK(a > prev);
            CHECK(a < kPi / 2);
            prev = a;
        }
    }
    CHECK(amplitude(1, 3.0, kp1(3.0), 1.0) == kPi / 2);
    CHECK_THROWS_AS(amplitude(1, 3.0, kp1(3.0) * 1.01, 1.0), DomainError);
}

TEST_CASE("periodicity and symmetry") {
    const double x0 = 0.37;
    for (double p : {1.5, 2.5}) {
        const double q = 0.7;
        const double K1 = complete(IntegralKind::F1, p, q);
        const auto a = sn_cn(p, x0, q);
        const auto b = sn_cn(p, x0 + 2.0 * K1, q);
        CHECK(b.sn == doctest::Approx(-a.sn).epsilon(1e-12));
        CHECK(b.cn == doctest::Approx(-a.cn).epsilon(1e-12));
        const double K2 = complete(IntegralKind::F2, p, 0.6);
        CHECK(dn(p, x0 + 2.0 * K2, 0.6) == doctest::Approx(dn(p, x0, 0.6)).epsilon(1e-12));
        CHECK(integral(IntegralKind::F1, p, -1.1, q) == -integral(IntegralKind::F1, p, 1.1, q));
        const double E2 = complete(IntegralKind::E2, p, q);
        CHECK(integral(IntegralKind::E2, p, kPi + 0.3, q) ==
              doctest::Approx(integral(IntegralKind::E2, p, 0.3, q) + 2.0 * E2).epsilon(1e-13));
    }
    const auto k = sn_cn(3.0, complete(IntegralKind::F1, 3.0, 0.5), 0.5);
    CHECK(k.sn == doctest::Approx(1.0));
    CHECK(std::abs(k.cn) < 1e-15);
    CHECK(dn(4.0, complete(IntegralKind::F2, 4.0, 0.9), 0.9) == doctest::Approx(std::pow(0.19, 0.25)).epsilon(1e-13));
}

TEST_CASE("monotonicity") {
    for (double p : {1.2, 3.0}) {
        double prev = -1.0;
        for (int i = 0; i < 50; ++i) {
            const double x = 0.1 * i;
            const double v = integral(IntegralKind::F1, p, x, 0.8);
            CHECK(v > prev);
            prev = v;
        }
    }
    double prev = 2.0;
    for (double x = 0.0; x < 2.5; x += 0.1) {
        const double v = sech(1.5, x);
        CHECK(v < prev);
        CHECK(v > 0.0);
        prev = v;
    }
}

TEST_CASE("zero of cn_p has the predicted local order") {
    // |cn_p(K - d)| ~ d^{1/(p-1)}
    for (double p : {1.2, 1.5, 3.0}) {
        const double K = complete(IntegralKind::F1, p, 0.6);
        const double r = std::abs(sn_cn(p, K - 1e-6, 0.6).cn) / std::abs(sn_cn(p, K - 2e-6, 0.6).cn);
        CHECK(std::log2(1.0 / r) == doctest::Approx(1.0 / (p - 1.0)).epsilon(1e-4));
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(integral(IntegralKind::F1, 1.0, 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(integral(IntegralKind::F1, 2.0, 0.5, 1.5), DomainError);
    CHECK_THROWS_AS(integral(IntegralKind::F1, 2.0, NAN, 0.5), DomainError);
    CHECK_THROWS_AS(amplitude(3, 2.0, 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(pparams(0.5), DomainError);
}

TEST_CASE("p-dependent constants") {
    const auto a = pparams(4.0 / 3.0);
    CHECK(a.m_p == 3);
    const auto b = pparams(3.0);
    REQUIRE(b.M_p.has_value());
    CHECK(*b.M_p == 2);
}

}
