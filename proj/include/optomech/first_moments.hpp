#pragma once

// Classical mean-value dynamics of the hybrid atom-cavity-mirror system.

#include "optomech/model.hpp"
#include "optomech/ode.hpp"

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

namespace optomech {

struct FirstMomentsRate {
    double dq = 0.0;
    double dp = 0.0;
    cplx da{};
    cplx dc{};
};

struct TrajectorySample {
    double t = 0.0;
    FirstMoments state;
};

/// Real interleaving used by the integrators: (q, p, Re a, Im a, Re c, Im c).
inline constexpr std::size_t first_moment_dim = 6;
void pack(const FirstMoments& m, std::span<double> out);
FirstMoments unpack(std::span<const double> in);

FirstMomentsRate first_moment_rhs(const SystemParams& params, cplx drive, const FirstMoments& state);
FirstMomentsRate first_moment_rhs(const SystemParams& params, const DriveSpec& drive, double t,
                                  const FirstMoments& state);

/// Vector field of the mean-value equations for use with the generic steppers.
VectorField first_moment_field(const SystemParams& params, DriveSignal drive);

std::vector<TrajectorySample> integrate_first_moments(const SystemParams& params, const DriveSignal& drive,
                                                      const FirstMoments& init, double t_end,
                                                      std::span<const double> sample_times,
                                                      const StepperConfig& cfg);

std::vector<TrajectorySample> integrate_first_moments(const SystemParams& params, const DriveSpec& drive,
                                                      const FirstMoments& init, double t_end,
                                                      std::span<const double> sample_times,
                                                      const StepperConfig& cfg);

/// G(t) = sqrt(2) g <a(t)>; real part G_x, imaginary part G_y.
cplx effective_coupling(double g, cplx a_mean);

/// Delta_a(t) = delta_a - g <q(t)>.
double effective_detuning(const SystemParams& params, double q_mean);

struct SteadyState {
    FirstMoments moments;
    double effective_detuning = 0.0;
    std::size_t iterations = 0;
    bool from_integration = false;
};

/// Constant-drive stationary point reached from q = 0 by damped fixed-point
/// iteration on q; falls back to long-time integration if the iteration
/// does not settle.
SteadyState steady_state(const SystemParams& params, cplx e0, const StepperConfig& cfg = {});

/// Stationary point when the effective detuning Delta_a is prescribed instead of
/// delta_a. The returned params carry the back-computed delta_a = Delta_a + g q.
struct PrescribedDetuningState {
    SteadyState state;
    SystemParams params;
};
PrescribedDetuningState steady_state_for_detuning(const SystemParams& params, cplx e0, double effective_detuning);

void write_trajectory_csv(std::ostream& os, std::span<const TrajectorySample> samples);

}  // namespace optomech
