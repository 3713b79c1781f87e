#include "fixtures.hpp"

#include <doctest.h>
#include <optomech/model.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace optomech;

TEST_CASE("canonical parameter set validates cleanly") {
    CHECK(validate_params(fixture::fig2_params(), fixture::fig2_drive()).ok());
}

TEST_CASE("sign violations are reported") {
    auto p = fixture::fig2_params();
    p.kappa = -1.0;
    const auto report = validate_params(p, fixture::fig2_drive());
    CHECK_FALSE(report.ok());
    CHECK(report.mentions("kappa must be positive"));

    p = fixture::fig2_params();
    p.n_th = -0.1;
    p.gamma_m = 0.0;
    const auto r2 = validate_params(p);
    CHECK(r2.mentions("n_th"));
    CHECK(r2.mentions("gamma_m"));
}

TEST_CASE("constant drive may not carry harmonics") {
    DriveSpec d;
    d.components = {{0, 1.0}, {1, 1.0}};
    const auto report = validate_params(fixture::fig2_params(), d);
    CHECK(report.mentions("drive consistency"));
}

TEST_CASE("harmonic bound is enforced") {
    DriveSpec d;
    d.big_omega = 1.5;
    d.components = {{9, 1.0}};
    CHECK(validate_params(fixture::fig2_params(), d).mentions("harmonic bound"));
}

TEST_CASE("drive values") {
    CHECK(drive_value(DriveSpec::constant(5.0), 17.3) == cplx{5.0, 0.0});

    DriveSpec cosine;
    cosine.big_omega = 2.0;
    cosine.components = {{1, 1.0}, {-1, 1.0}};
    CHECK(std::abs(drive_value(cosine, 0.0) - 2.0) < 1e-15);
    CHECK(std::abs(drive_value(cosine, std::numbers::pi / 2.0) + 2.0) < 1e-15);

    // Quarter period: E_1 e^{-i pi/2} + E_-1 e^{+i pi/2} = i (E_-1 - E_1) = 0.
    const cplx v = drive_value(fixture::fig2_drive(), std::numbers::pi / 4.0);
    CHECK(v.real() == doctest::Approx(15e4).epsilon(1e-15));
    CHECK(std::abs(v.imag()) <= 1e-11);
}

TEST_CASE("drive values are periodic and real for conjugate-symmetric maps") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        DriveSpec d;
        d.big_omega = 0.5 + std::abs(u(rng)) * 3.0;
        const int harmonics = 1 + trial % 4;
        d.components[0] = u(rng);
        for (int n = 1; n <= harmonics; ++n) {
            const cplx z{u(rng), u(rng)};
            d.components[n] = z;
            d.components[-n] = std::conj(z);
        }
        const double t = 10.0 * std::abs(u(rng));
        const cplx here = drive_value(d, t);
        const cplx later = drive_value(d, t + d.period());
        double scale = 0.0;
        for (const auto& [n, e] : d.components) scale += std::abs(e);
        CHECK(std::abs(later - here) <= 1e-12 * scale);
        CHECK(std::abs(here.imag()) <= 1e-12 * scale);
    }
}

TEST_CASE("engineered coupling evaluates the two-tone target") {
    const EngineeredCoupling t = fixture::fig6_target();
    CHECK(std::abs(t.value(0.0) - 1.3) < 1e-15);
    CHECK(std::abs(t.value(t.period() / 2.0) - 1.1) < 1e-14);
    CHECK(t.period() == doctest::Approx(std::numbers::pi));
}

TEST_CASE("first-moment finiteness") {
    FirstMoments m;
    CHECK(m.is_finite());
    m.c = {0.0, std::nan("")};
    CHECK_FALSE(m.is_finite());
}
