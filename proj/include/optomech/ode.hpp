#pragma once

// Adaptive Dormand-Prince 5(4) integration with the 4th-order continuous
// extension used for resampling onto caller-provided time grids.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace optomech {

struct StepperConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = 0.1;
    double overflow_guard = 1e12;
    double initial_step = 0.0;  // 0 selects a step automatically
    std::size_t max_steps = 100'000'000;

    /// Default cap for a modulated problem: a fiftieth of the period.
    static StepperConfig for_period(double tau);
    void validate() const;
};

using VectorField = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Sample callback; `y` is only valid for the duration of the call.
using SampleObserver = std::function<void(double t, std::span<const double> y)>;

struct StepResult {
    double t_next = 0.0;
    std::vector<double> y_next;
    double error = 0.0;  // scaled error norm of the accepted step, <= 1
    double h_used = 0.0;
};

class DormandPrince {
public:
    DormandPrince(VectorField f, double t0, std::vector<double> y0, StepperConfig cfg);

    /// Advances one accepted step, never stepping past `t_limit`.
    /// Throws Error{StepFailure} on step underflow and Error{Diverged} when a
    /// component leaves the overflow guard.
    void step(double t_limit);

    /// Dense output inside the last accepted step, t in [t_prev(), t()].
    void interpolate(double t, std::span<double> out) const;

    double t() const { return t_; }
    double t_prev() const { return t_prev_; }
    const std::vector<double>& y() const { return y_; }
    double last_error() const { return last_error_; }
    double last_step() const { return t_ - t_prev_; }
    std::size_t accepted_steps() const { return accepted_; }
    std::size_t rejected_steps() const { return rejected_; }

private:
    double initial_step() const;
    double error_norm(std::span<const double> y_new) const;

    VectorField f_;
    StepperConfig cfg_;
    std::size_t n_;
    double t_;
    double t_prev_;
    double h_;
    std::vector<double> y_;
    std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_;
    std::vector<double> y_stage_, y_new_, err_;
    std::vector<double> r1_, r2_, r3_, r4_, r5_;
    double last_error_ = 0.0;
    double fac_old_ = 1e-4;
    std::size_t accepted_ = 0;
    std::size_t rejected_ = 0;
};

/// One adaptive step from (t, y): retries with smaller steps until the local
/// error estimate is accepted.
StepResult ode_step(const VectorField& f, double t, std::span<const double> y, const StepperConfig& cfg);

/// Integrates from t0 to t_end and reports the solution at every time of
/// `sample_times` (sorted, inside [t0, t_end]) through dense interpolation.
/// Returns the state at t_end.
std::vector<double> integrate(const VectorField& f, double t0, std::vector<double> y0, double t_end,
                              std::span<const double> sample_times, const StepperConfig& cfg,
                              const SampleObserver& on_sample);

/// n equally spaced times covering [t0, t1] inclusive (n >= 2), or {t0} for n == 1.
std::vector<double> uniform_grid(double t0, double t1, std::size_t n);

}  // namespace optomech
