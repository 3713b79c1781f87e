#pragma once

// Linearized fluctuation dynamics: drift and diffusion matrices and the
// Lyapunov equation dV/dt = A(t) V + V A(t)^T + D for the 6x6 covariance
// matrix over (dq, dp, dX, dY, dx, dy).

#include "optomech/linalg.hpp"
#include "optomech/model.hpp"
#include "optomech/ode.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

namespace optomech {

struct CovarianceMatrix {
    Mat6 v = Mat6::Identity() * 0.5;

    /// Thermal mechanics, cavity and atoms in vacuum.
    static CovarianceMatrix initial(const SystemParams& params);
    static CovarianceMatrix vacuum() { return {}; }

    void symmetrize() { v = 0.5 * (v + v.transpose()).eval(); }
    double asymmetry() const { return max_norm(v - v.transpose()); }

    /// Upper triangle, row-major: v11, v12, ..., v16, v22, ..., v66.
    std::array<double, 21> upper() const;
    static CovarianceMatrix from_upper(std::span<const double> packed);
};

struct DriftMatrix {
    Mat6 a = Mat6::Zero();
};

struct DiffusionMatrix {
    Mat6 d = Mat6::Zero();
};

/// A V + V A^T + D.
Mat6 lyapunov_rate(const Mat6& a, const Mat6& v, const Mat6& d);

/// Lyapunov flow for a fixed drift on the packed upper triangle (see CovarianceMatrix::upper).
VectorField constant_lyapunov_field(const DriftMatrix& a, const DiffusionMatrix& d);

DriftMatrix build_drift(const SystemParams& params, double q_mean, cplx a_mean);
DiffusionMatrix build_diffusion(const SystemParams& params);

/// Mean values integrated together with the covariance matrix.
struct IntegratedMoments {
    DriveSignal drive;
    FirstMoments init;
};

/// Mean values given in closed form (Floquet series, engineered solution, ...).
using AnalyticMoments = std::function<FirstMoments(double)>;

using MomentSource = std::variant<IntegratedMoments, AnalyticMoments>;

struct CovarianceSample {
    double t = 0.0;
    CovarianceMatrix v;
    FirstMoments moments;
};

using CovarianceObserver = std::function<void(const CovarianceSample&)>;

/// Propagates V from t = 0 to t_end, reporting at `sample_times`.
/// Throws Error{Diverged} when an entry exceeds the overflow guard and
/// Error{Unphysical} when a sampled V has a symplectic eigenvalue below
/// 1/2 - 1e-6.
void integrate_lyapunov(const SystemParams& params, const MomentSource& source, const CovarianceMatrix& v0,
                        double t_end, std::span<const double> sample_times, const StepperConfig& cfg,
                        const CovarianceObserver& on_sample);

std::vector<CovarianceSample> integrate_lyapunov(const SystemParams& params, const MomentSource& source,
                                                 const CovarianceMatrix& v0, double t_end,
                                                 std::span<const double> sample_times, const StepperConfig& cfg);

/// Algebraic solution of A V + V A^T + D = 0. Throws Error{NotStable} unless
/// every eigenvalue of A has a negative real part.
CovarianceMatrix steady_state_lyapunov(const DriftMatrix& a, const DiffusionMatrix& d);

struct RelaxationResult {
    CovarianceMatrix v;
    double t = 0.0;
};

/// Integrates the constant-drift Lyapunov flow until ||dV/dt||_max falls
/// below rate_tol * ||D||_max. Throws Error{NoConvergence} past t_max.
RelaxationResult relax_lyapunov(const DriftMatrix& a, const DiffusionMatrix& d, const CovarianceMatrix& v0,
                                const StepperConfig& cfg, double t_max, double rate_tol = 1e-8);

struct StabilityReport {
    bool stable = false;
    double margin = 0.0;  // largest real part of any eigenvalue over the samples
    double worst_time = 0.0;
    std::size_t samples = 0;
};

/// Eigenvalues of A(t) at `samples` equally spaced times over [t_start, t_start + period).
StabilityReport stability_check(const SystemParams& params, const AnalyticMoments& moments, double t_start,
                                double period, std::size_t samples = 64);

/// Same criterion over an explicit list of mean values.
StabilityReport stability_check(const SystemParams& params, std::span<const double> times,
                                std::span<const FirstMoments> moments);

void write_covariance_csv_header(std::ostream& os);
void write_covariance_csv_row(std::ostream& os, double t, const CovarianceMatrix& v);

}  // namespace optomech
