#pragma once

// Physical parameters, drive descriptions and state containers shared by every
// stage of the pipeline. All rates and detunings are expressed in units of the
// mechanical frequency; time is measured in 1/omega_m.

#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace optomech {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct SystemParams {
    double omega_m = 1.0;        // mechanical frequency (the unit)
    double delta_a = 0.0;        // cavity-laser detuning
    double kappa = 1.0;          // cavity decay rate
    double gamma_m = 1e-3;       // mechanical damping
    double g = 0.0;              // single-photon radiation-pressure coupling
    double delta_c = 0.0;        // atom-laser detuning
    double gamma_a = 0.0;        // atomic decay rate
    double g0_collective = 0.0;  // sqrt(N) g_0
    double n_th = 0.0;           // thermal phonon occupation of the mechanical bath
};

/// Finite Fourier description of the drive amplitude,
/// E(t) = sum_n E_n exp(-i n Omega t).
struct DriveSpec {
    static constexpr int default_max_harmonic = 8;

    double big_omega = 0.0;
    std::map<int, cplx> components;
    int max_harmonic = default_max_harmonic;

    static DriveSpec constant(cplx e0) { return DriveSpec{0.0, {{0, e0}}}; }

    cplx component(int n) const {
        auto it = components.find(n);
        return it == components.end() ? cplx{} : it->second;
    }

    /// Period of the modulation; zero for a constant drive.
    double period() const { return big_omega > 0.0 ? two_pi / big_omega : 0.0; }
};

/// Any time-dependent complex drive amplitude. DriveSpec is the common case, but
/// the exact drive synthesized for an engineered coupling is not a finite series.
using DriveSignal = std::function<cplx(double)>;

cplx drive_value(const DriveSpec& drive, double t);
DriveSignal as_signal(const DriveSpec& drive);

struct FirstMoments {
    double q = 0.0;
    double p = 0.0;
    cplx a{};
    cplx c{};

    bool is_finite() const;
    double max_abs() const;
};

/// Target coupling G(t) = G1 + G2 exp(-i Omega t).
struct EngineeredCoupling {
    double g1 = 0.0;
    double g2 = 0.0;
    double big_omega = 0.0;

    double period() const { return two_pi / big_omega; }
    cplx value(double t) const { return g1 + g2 * std::polar(1.0, -big_omega * t); }
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
    bool mentions(const std::string& needle) const;
};

ValidationReport validate_params(const SystemParams& params, const DriveSpec& drive);
ValidationReport validate_params(const SystemParams& params);

}  // namespace optomech
