#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "sbr/constitutive.hpp"
#include "sbr/error.hpp"

using namespace sbr;

namespace {

// Independent transcription of the settling law for oracles.
double vhs_ref(double X) { return 1.76e-3 / (1.0 + std::pow(X / 3.87, 3.58)); }
double d_ref(double X) { return X <= 5.0 ? 0.0 : vhs_ref(X) * 1050.0 * 0.2 / (9.81 * X * 52.0); }
// Right limit at the critical concentration, for integrating over [5, b].
double d_right(double X) { return vhs_ref(X) * 1050.0 * 0.2 / (9.81 * X * 52.0); }

template <class F>
double trapezoid(F f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) s += f(a + i * h);
    return s * h;
}

}  // namespace

TEST_CASE("hindered settling velocity") {
    const SettlingModel m{MaterialParams{}};
    CHECK(m.v_hs(0.0) == 1.76e-3);
    CHECK(m.v_hs(3.87) == doctest::Approx(8.8e-4).epsilon(1e-12));
    CHECK(m.v_hs(6.0) == doctest::Approx(3.03e-4).epsilon(5e-3));
    CHECK(m.v_hs(6.0) == doctest::Approx(vhs_ref(6.0)).epsilon(1e-14));
    for (double X = 0.0; X < 30.0; X += 0.25) CHECK(m.v_hs(X + 0.25) < m.v_hs(X));
    CHECK_THROWS_AS(m.v_hs(-1e-9), DomainError);
    CHECK_THROWS_AS(m.v_hs(30.0 + 1e-9), DomainError);
}

TEST_CASE("compression coefficient is degenerate below the critical concentration") {
    const SettlingModel m{MaterialParams{}};
    CHECK(m.d_compress(4.0) == 0.0);
    CHECK(m.d_compress(5.0) == 0.0);
    CHECK(m.d_compress(5.0 + 1e-9) > 0.0);
    CHECK(m.d_compress(6.0) == doctest::Approx(2.08e-5).epsilon(5e-3));
    CHECK(m.d_compress(6.0) == doctest::Approx(d_ref(6.0)).epsilon(1e-13));
    for (double X = 0.0; X <= 30.0; X += 0.1) CHECK(m.d_compress(X) >= 0.0);
}

TEST_CASE("D primitive against quadrature and a trapezoid oracle") {
    const SettlingModel m{MaterialParams{}};
    CHECK(m.D(5.0) == 0.0);
    CHECK(m.D(2.0) == 0.0);

    const double oracle = trapezoid(d_right, 5.0, 7.0, 2'000'000);
    CHECK(m.D(7.0) > 0.0);
    CHECK(std::fabs(m.D(7.0) - oracle) <= 1e-12);
    CHECK(std::fabs(m.D_quadrature(7.0) - oracle) <= 1e-12);

    double prev = 0.0;
    for (double X = 5.0; X <= 30.0; X += 0.0137) {
        const double D = m.D(X);
        CHECK(std::fabs(D - m.D_quadrature(X)) <= 1e-12);
        CHECK(D >= prev);
        prev = D;
    }
}

TEST_CASE("solids compression flux primitive") {
    const SettlingModel m{MaterialParams{}};
    CHECK(m.D_flux(4.0) == 0.0);
    const double oracle = trapezoid([](double X) { return X * d_right(X); }, 5.0, 12.0, 2'000'000);
    CHECK(std::fabs(m.D_flux(12.0) - oracle) <= 1e-12);
    for (double X = 5.0; X <= 30.0; X += 0.173) {
        CHECK(std::fabs(m.D_flux(X) - m.D_flux_quadrature(X)) <= 1e-12 * std::max(1.0, m.D_flux(X)));
        CHECK(m.d_flux(X) == doctest::Approx(X * m.d_compress(X)).epsilon(1e-14));
    }
}

TEST_CASE("velocity coefficients") {
    const SettlingModel m{MaterialParams{}};
    const double q = 1e-4;
    auto c = m.velocity_coefficients(0.0, q, 1);
    CHECK(c.F_C == doctest::Approx(q + 1.76e-3));
    CHECK(c.F_S == doctest::Approx(q));
    c = m.velocity_coefficients(12.0, q, 0);
    CHECK(c.F_C == q);
    CHECK(c.F_S == doctest::Approx(q).epsilon(1e-14));
    c = m.velocity_coefficients(3.87, 0.0, 1);
    CHECK(c.F_C == doctest::Approx(8.8e-4));
    CHECK(c.F_S == doctest::Approx(-3.87 * 8.8e-4 / (1050.0 - 3.87)));
}

TEST_CASE("phase velocities and volume-average consistency") {
    const SettlingModel m{MaterialParams{}};
    auto p = m.phase_velocities(0.0, 0.0, 2e-4, 1);
    CHECK(p.v_X == doctest::Approx(2e-4 + 1.76e-3));
    CHECK(p.v_L == doctest::Approx(2e-4));
    p = m.phase_velocities(3.87, 0.0, 0.0, 1);
    CHECK(p.v_X == doctest::Approx(8.8e-4));
    CHECK(m.phase_velocities(12.0, 5.0, 0.0, 1).v_X < m.phase_velocities(12.0, 0.0, 0.0, 1).v_X);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> X(0.0, 30.0), g(-50.0, 50.0), q(-1e-3, 1e-3);
    for (int i = 0; i < 1000; ++i) {
        const double x = X(rng), qq = q(rng);
        const int gam = static_cast<int>(i % 2);
        const auto v = m.phase_velocities(x, g(rng), qq, gam);
        const double phi = x / 1050.0;
        const double avg = phi * v.v_X + (1.0 - phi) * v.v_L;
        CHECK(std::fabs(avg - qq) <= 1e-12 * std::max(std::fabs(qq), std::fabs(v.v_X)));
    }
}

TEST_CASE("Godunov flux") {
    const SettlingModel m{MaterialParams{}};
    for (double X : {0.0, 2.0, 5.5, 17.0, 30.0}) CHECK(m.godunov_flux(X, X) == doctest::Approx(m.batch_flux(X)));
    for (double X : {0.5, 3.0, 12.0, 30.0}) CHECK(m.godunov_flux(0.0, X) == 0.0);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 30.0);
    for (int i = 0; i < 200; ++i) {
        const double a = u(rng), b = u(rng);
        const double lo = std::min(a, b), hi = std::max(a, b);
        double fmin = INFINITY, fmax = -INFINITY;
        const int n = 20000;
        for (int k = 0; k <= n; ++k) {
            const double x = lo + (hi - lo) * k / n;
            const double f = x * vhs_ref(x);
            fmin = std::min(fmin, f);
            fmax = std::max(fmax, f);
        }
        CHECK(std::fabs(m.godunov_flux(a, b) - (a <= b ? fmin : fmax)) <= 1e-8);
    }
}
