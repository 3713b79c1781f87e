#pragma once

// Independent transcription of the linearized fluctuation equations, used to
// check the library's quadrature drift matrix.

#include <optomech/model.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>

namespace oracle {

struct Transcription {
    Eigen::Matrix<double, 6, 6> drift;
    double imag_residual = 0.0;  // largest imaginary entry left after the change of basis
};

// Linearized Langevin equations over (dq, dp, da, da^+, dc, dc^+), rewritten in
// quadratures through u = T w.
inline Transcription transcribed_drift(const optomech::SystemParams& p, double q, std::complex<double> a) {
    using CMat6 = Eigen::Matrix<std::complex<double>, 6, 6>;
    const std::complex<double> i{0.0, 1.0};
    const double det = p.delta_a - p.g * q;
    const double g0 = p.g0_collective;
    CMat6 m = CMat6::Zero();
    m(0, 1) = p.omega_m;
    m(1, 0) = -p.omega_m;
    m(1, 1) = -p.gamma_m;
    m(1, 2) = p.g * std::conj(a);
    m(1, 3) = p.g * a;
    m(2, 0) = i * p.g * a;
    m(2, 2) = -(p.kappa + i * det);
    m(2, 4) = -i * g0;
    m(3, 0) = -i * p.g * std::conj(a);
    m(3, 3) = -(p.kappa - i * det);
    m(3, 5) = i * g0;
    m(4, 2) = -i * g0;
    m(4, 4) = -(p.gamma_a + i * p.delta_c);
    m(5, 3) = i * g0;
    m(5, 5) = -(p.gamma_a - i * p.delta_c);

    const double r = 1.0 / std::sqrt(2.0);
    CMat6 t = CMat6::Zero();
    t(0, 0) = 1.0;
    t(1, 1) = 1.0;
    for (int k : {2, 4}) {
        t(k, k) = r;
        t(k, k + 1) = r;
        t(k + 1, k) = r / i;
        t(k + 1, k + 1) = -r / i;
    }
    const CMat6 quad = t * m * t.inverse();
    return {quad.real(), quad.imag().cwiseAbs().maxCoeff()};
}

inline optomech::SystemParams random_system_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    optomech::SystemParams p;
    p.delta_a = 4.0 * u(rng) - 2.0;
    p.kappa = 0.05 + 10.0 * u(rng);
    p.gamma_m = 1e-6 + 0.1 * u(rng);
    p.g = 1e-3 * u(rng);
    p.delta_c = 4.0 * u(rng) - 2.0;
    p.gamma_a = 0.5 * u(rng);
    p.g0_collective = 5.0 * u(rng);
    p.n_th = 100.0 * u(rng);
    return p;
}

}  // namespace oracle
