#include "optomech/first_moments.hpp"

#include "optomech/csv.hpp"
#include "optomech/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace optomech {

void pack(const FirstMoments& m, std::span<double> out) {
    out[0] = m.q;
    out[1] = m.p;
    out[2] = m.a.real();
    out[3] = m.a.imag();
    out[4] = m.c.real();
    out[5] = m.c.imag();
}

FirstMoments unpack(std::span<const double> in) {
    return FirstMoments{in[0], in[1], {in[2], in[3]}, {in[4], in[5]}};
}

FirstMomentsRate first_moment_rhs(const SystemParams& params, cplx drive, const FirstMoments& s) {
    constexpr cplx i{0.0, 1.0};
    const double wm = params.omega_m;
    FirstMomentsRate r;
    r.dq = wm * s.p;
    r.dp = -wm * s.q - params.gamma_m * s.p + params.g * std::norm(s.a);
    r.da = -(params.kappa + i * (params.delta_a - params.g * s.q)) * s.a - i * params.g0_collective * s.c + drive;
    r.dc = -(params.gamma_a + i * params.delta_c) * s.c - i * params.g0_collective * s.a;
    return r;
}

FirstMomentsRate first_moment_rhs(const SystemParams& params, const DriveSpec& drive, double t,
                                  const FirstMoments& state) {
    return first_moment_rhs(params, drive_value(drive, t), state);
}

VectorField first_moment_field(const SystemParams& params, DriveSignal drive) {
    return [params, drive = std::move(drive)](double t, std::span<const double> y, std::span<double> dy) {
        const auto r = first_moment_rhs(params, drive(t), unpack(y));
        dy[0] = r.dq;
        dy[1] = r.dp;
        dy[2] = r.da.real();
        dy[3] = r.da.imag();
        dy[4] = r.dc.real();
        dy[5] = r.dc.imag();
    };
}

std::vector<TrajectorySample> integrate_first_moments(const SystemParams& params, const DriveSignal& drive,
                                                      const FirstMoments& init, double t_end,
                                                      std::span<const double> sample_times,
                                                      const StepperConfig& cfg) {
    if (!(t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "integrate_first_moments: t_end must be positive");
    std::vector<double> y0(first_moment_dim);
    pack(init, y0);

    std::vector<TrajectorySample> out;
    out.reserve(sample_times.size());
    integrate(first_moment_field(params, drive), 0.0, std::move(y0), t_end, sample_times, cfg,
              [&](double t, std::span<const double> y) { out.push_back({t, unpack(y)}); });
    return out;
}

std::vector<TrajectorySample> integrate_first_moments(const SystemParams& params, const DriveSpec& drive,
                                                      const FirstMoments& init, double t_end,
                                                      std::span<const double> sample_times,
                                                      const StepperConfig& cfg) {
    return integrate_first_moments(params, as_signal(drive), init, t_end, sample_times, cfg);
}

cplx effective_coupling(double g, cplx a_mean) { return std::sqrt(2.0) * g * a_mean; }

double effective_detuning(const SystemParams& params, double q_mean) { return params.delta_a - params.g * q_mean; }

namespace {

cplx atomic_response(const SystemParams& params) {
    const cplx atom{params.gamma_a, params.delta_c};
    if (std::abs(atom) < 1e-12) {
        throw Error(ErrorKind::SingularDenominator, "steady state: gamma_a + i Delta_c vanishes");
    }
    return atom;
}

FirstMoments stationary_moments(const SystemParams& params, cplx e0, double detuning) {
    const cplx atom = atomic_response(params);
    const double g0 = params.g0_collective;
    const cplx denom = cplx{params.kappa, detuning} + g0 * g0 / atom;
    FirstMoments m;
    m.a = e0 / denom;
    m.c = cplx{0.0, -g0} * m.a / atom;
    m.q = params.g * std::norm(m.a) / params.omega_m;
    m.p = 0.0;
    return m;
}

}  // namespace

SteadyState steady_state(const SystemParams& params, cplx e0, const StepperConfig& cfg) {
    SteadyState out;
    double q = 0.0;
    double lambda = 0.5;
    double last_change = std::numeric_limits<double>::infinity();
    constexpr std::size_t max_iterations = 20000;
    for (std::size_t k = 1; k <= max_iterations; ++k) {
        const FirstMoments m = stationary_moments(params, e0, params.delta_a - params.g * q);
        const double change = m.q - q;
        if (std::abs(change) <= 1e-13 * std::max(1.0, std::abs(q))) {
            out.moments = stationary_moments(params, e0, params.delta_a - params.g * m.q);
            out.effective_detuning = effective_detuning(params, out.moments.q);
            out.iterations = k;
            return out;
        }
        // Shrink the relaxation when the map overshoots (oscillating iterates).
        if (std::abs(change) > last_change) lambda = std::max(lambda * 0.5, 1e-6);
        last_change = std::abs(change);
        q += lambda * change;
    }

    // Fixed point did not settle; follow the dynamics instead.
    const double slowest = std::min(params.gamma_m, params.kappa);
    const double horizon = 40.0 / slowest;
    std::vector<double> y0(first_moment_dim, 0.0);
    auto y = integrate(first_moment_field(params, [e0](double) { return e0; }), 0.0, y0, horizon, {}, cfg, {});
    out.moments = unpack(y);
    out.effective_detuning = effective_detuning(params, out.moments.q);
    out.iterations = max_iterations;
    out.from_integration = true;
    return out;
}

PrescribedDetuningState steady_state_for_detuning(const SystemParams& params, cplx e0, double detuning) {
    PrescribedDetuningState out;
    out.state.moments = stationary_moments(params, e0, detuning);
    out.state.effective_detuning = detuning;
    out.params = params;
    out.params.delta_a = detuning + params.g * out.state.moments.q;
    return out;
}

void write_trajectory_csv(std::ostream& os, std::span<const TrajectorySample> samples) {
    write_csv_header(os, "t,q,p,re_a,im_a,re_c,im_c");
    for (const auto& s : samples) {
        write_csv_row(os, {s.t, s.state.q, s.state.p, s.state.a.real(), s.state.a.imag(), s.state.c.real(),
                           s.state.c.imag()});
    }
}

}  // namespace optomech
