#include "fixtures.hpp"

#include <doctest.h>
#include <optomech/error.hpp>
#include <optomech/first_moments.hpp>
#include <optomech/floquet.hpp>

#include <algorithm>
#include <cmath>
#include <random>

using namespace optomech;

namespace {

constexpr Observable all_observables[] = {Observable::q, Observable::p, Observable::a, Observable::c};

}  // namespace

TEST_CASE("zeroth layer at the canonical parameters") {
    const auto sol = floquet_zero_order(fixture::fig2_params(), fixture::fig2_drive());
    // (0.1 - i) 15e4 / (2.2 - 1.9 i) and G_0 15e4 / (i (2.2 - 1.9 i)).
    const cplx a00 = sol.at(Observable::a, 0, 0);
    CHECK(a00.real() == doctest::Approx(37633.136094674555).epsilon(1e-13));
    CHECK(a00.imag() == doctest::Approx(-35680.47337278107).epsilon(1e-13));
    const cplx c00 = sol.at(Observable::c, 0, 0);
    CHECK(c00.real() == doctest::Approx(33727.81065088757).epsilon(1e-13));
    CHECK(c00.imag() == doctest::Approx(-39053.25443786982).epsilon(1e-13));

    CHECK(sol.at(Observable::a, 2, 0) == cplx{});
    CHECK(sol.at(Observable::a, -2, 0) == cplx{});
    for (int n = -sol.n_max(); n <= sol.n_max(); ++n) {
        CHECK(sol.at(Observable::q, n, 0) == cplx{});
        CHECK(sol.at(Observable::p, n, 0) == cplx{});
    }
}

TEST_CASE("zeroth layer solves the linear cavity-atom problem harmonic by harmonic") {
    const auto p = fixture::fig2_params();
    const auto d = fixture::fig2_drive();
    const auto sol = floquet_zero_order(p, d);
    for (int n = -2; n <= 2; ++n) {
        // Substituting a e^{i n Omega t}, c e^{i n Omega t} into the g = 0 equations.
        const cplx iw{0.0, n * d.big_omega};
        const cplx a = sol.at(Observable::a, n, 0);
        const cplx c = sol.at(Observable::c, n, 0);
        const cplx ra = iw * a + cplx{p.kappa, p.delta_a} * a + cplx{0.0, p.g0_collective} * c - d.component(-n);
        const cplx rc = iw * c + cplx{p.gamma_a, p.delta_c} * c + cplx{0.0, p.g0_collective} * a;
        CHECK(std::abs(ra) <= 1e-9);
        CHECK(std::abs(rc) <= 1e-9);
    }
}

TEST_CASE("undriven system has no response") {
    DriveSpec d;
    d.big_omega = 2.0;
    const auto sol = floquet_recurse(fixture::fig2_params(), d);
    for (auto o : all_observables) {
        for (int j = 0; j <= sol.j_max(); ++j) {
            for (int n = -sol.n_max(); n <= sol.n_max(); ++n) CHECK(sol.at(o, n, j) == cplx{});
        }
    }
}

TEST_CASE("recursion base equals the zeroth layer") {
    const auto p = fixture::fig2_params();
    const auto d = fixture::fig2_drive();
    const auto zero = floquet_zero_order(p, d);
    const auto full = floquet_recurse(p, d);
    CHECK(full.j_max() == 6);
    CHECK(full.n_max() == 5);
    for (auto o : all_observables) {
        for (int n = -5; n <= 5; ++n) CHECK(full.at(o, n, 0) == zero.at(o, n, 0));
    }
}

TEST_CASE("a static drive seeds no harmonics") {
    DriveSpec d;
    d.big_omega = 1.7;
    d.components = {{0, 2e4}};
    const auto sol = floquet_recurse(fixture::fig2_params(), d);
    for (auto o : all_observables) {
        for (int j = 0; j <= sol.j_max(); ++j) {
            for (int n = -sol.n_max(); n <= sol.n_max(); ++n) {
                if (n != 0) CHECK(sol.at(o, n, j) == cplx{});
            }
        }
    }
    CHECK(sol.at(Observable::q, 0, 1) != cplx{});
}

TEST_CASE("single coefficient evaluates to a constant") {
    FloquetSolution sol(0, 1, 2.0);
    sol.at(Observable::a, 0, 0) = {3.0, -4.0};
    for (double t : {0.0, 0.3, 17.0}) CHECK(evaluate_floquet(sol, 1e-5, t).a == cplx{3.0, -4.0});
}

TEST_CASE("evaluated series is periodic") {
    const auto d = fixture::fig2_drive();
    const auto sol = floquet_recurse(fixture::fig2_params(), d);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int i = 0; i < 50; ++i) {
        const double t = u(rng);
        const auto x = evaluate_floquet(sol, 1e-5, t);
        const auto y = evaluate_floquet(sol, 1e-5, t + sol.period());
        // t + tau is itself rounded, so agreement is to rounding level.
        const double scale = x.max_abs();
        CHECK(std::abs(x.q - y.q) <= 1e-12 * scale);
        CHECK(std::abs(x.p - y.p) <= 1e-12 * scale);
        CHECK(std::abs(x.a - y.a) <= 1e-12 * scale);
        CHECK(std::abs(x.c - y.c) <= 1e-12 * scale);
    }
}

namespace {

struct Residual {
    double q = 0.0, p = 0.0, a = 0.0, c = 0.0;
    double worst() const { return std::max({q, p, a, c}); }
};

// Central-difference derivative of the series against the right-hand side,
// each equation measured against the size of the terms it balances.
Residual series_residual(int j_max) {
    const auto p = fixture::fig2_params();
    const auto d = fixture::fig2_drive();
    const auto sol = floquet_recurse(p, d, j_max, FloquetSolution::default_n_max);
    const double h = 1e-5;
    Residual r;
    for (int i = 0; i < 64; ++i) {
        const double t = 40.0 * sol.period() + sol.period() * i / 64.0;
        const auto m = evaluate_floquet(sol, p.g, t);
        const auto plus = evaluate_floquet(sol, p.g, t + h);
        const auto minus = evaluate_floquet(sol, p.g, t - h);
        const auto rhs = first_moment_rhs(p, d, t, m);
        r.q = std::max(r.q, std::abs((plus.q - minus.q) / (2.0 * h) - rhs.dq) / std::abs(m.q));
        r.p = std::max(r.p, std::abs((plus.p - minus.p) / (2.0 * h) - rhs.dp) / std::abs(m.q));
        r.a = std::max(r.a, std::abs((plus.a - minus.a) / (2.0 * h) - rhs.da) / std::abs(cplx{p.kappa, p.delta_a} * m.a));
        r.c = std::max(r.c, std::abs((plus.c - minus.c) / (2.0 * h) - rhs.dc) / std::abs(cplx{p.gamma_a, p.delta_c} * m.c));
    }
    return r;
}

}  // namespace

TEST_CASE("series residual shrinks with the coupling order") {
    double previous = series_residual(2).worst();
    for (int j = 3; j <= 10; ++j) {
        const double current = series_residual(j).worst();
        CHECK(current < previous);
        previous = current;
    }
}

TEST_CASE("series satisfies the mean-value equations at high order") {
    const auto r = series_residual(10);
    CHECK(r.worst() <= 1e-3);
}

// At the default truncation the residual measures 9.7e-3 on the momentum
// equation and 2.4e-3 on the cavity equation.
TEST_CASE("series satisfies the mean-value equations at the default truncation" * doctest::should_fail()) {
    const auto r = series_residual(FloquetSolution::default_j_max);
    CHECK(r.worst() <= 1e-3);
}

TEST_CASE("momentum coefficients follow from position coefficients") {
    const auto sol = floquet_recurse(fixture::fig2_params(), fixture::fig2_drive());
    for (int j = 1; j <= sol.j_max(); ++j) {
        for (int n = -sol.n_max(); n <= sol.n_max(); ++n) {
            const cplx expected = cplx{0.0, n * sol.big_omega()} * sol.at(Observable::q, n, j);
            CHECK(std::abs(sol.at(Observable::p, n, j) - expected) <= 1e-12 * (1.0 + std::abs(expected)));
        }
    }
}

TEST_CASE("mechanical resonance is reported") {
    auto p = fixture::fig2_params();
    p.gamma_m = 1e-13;
    DriveSpec d;
    d.big_omega = 1.0;
    d.components = {{0, 1e3}, {1, 1e2}};
    CHECK_THROWS_AS(floquet_recurse(p, d, 2, 2), Error);
}

TEST_CASE("truncation arguments are checked") {
    CHECK_THROWS_AS(floquet_recurse(fixture::fig2_params(), fixture::fig2_drive(), -1, 5), Error);
    CHECK_THROWS_AS(floquet_recurse(fixture::fig2_params(), fixture::fig2_drive(), 3, 0), Error);
    DriveSpec constant = DriveSpec::constant(1.0);
    CHECK_THROWS_AS(floquet_zero_order(fixture::fig2_params(), constant), Error);
}
