#include "optomech/covariance.hpp"

#include "optomech/csv.hpp"
#include "optomech/error.hpp"
#include "optomech/first_moments.hpp"
#include "optomech/measures.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace optomech {
namespace {

constexpr std::size_t packed_dim = 21;
constexpr double physicality_slack = 1e-6;

void pack_upper(const Mat6& v, std::span<double> out) {
    std::size_t idx = 0;
    for (int k = 0; k < 6; ++k) {
        for (int l = k; l < 6; ++l) out[idx++] = v(k, l);
    }
}

Mat6 unpack_upper(std::span<const double> in) {
    Mat6 v;
    std::size_t idx = 0;
    for (int k = 0; k < 6; ++k) {
        for (int l = k; l < 6; ++l) {
            v(k, l) = in[idx];
            v(l, k) = in[idx];
            ++idx;
        }
    }
    return v;
}

void check_physical(double t, const CovarianceMatrix& cm) {
    const auto nu = symplectic_eigenvalues(cm.v);
    if (nu.front() < 0.5 - physicality_slack) {
        std::ostringstream os;
        os << "symplectic eigenvalue " << nu.front() << " below 1/2 at t = " << t;
        throw Error(ErrorKind::Unphysical, os.str());
    }
}

}  // namespace

Mat6 lyapunov_rate(const Mat6& a, const Mat6& v, const Mat6& d) {
    Mat6 av = a * v;
    return av + av.transpose() + d;
}

VectorField constant_lyapunov_field(const DriftMatrix& drift, const DiffusionMatrix& diffusion) {
    return [a = drift.a, d = diffusion.d](double, std::span<const double> y, std::span<double> dy) {
        pack_upper(lyapunov_rate(a, unpack_upper(y), d), dy);
    };
}

CovarianceMatrix CovarianceMatrix::initial(const SystemParams& params) {
    CovarianceMatrix cm;
    cm.v(0, 0) = params.n_th + 0.5;
    cm.v(1, 1) = params.n_th + 0.5;
    return cm;
}

std::array<double, 21> CovarianceMatrix::upper() const {
    std::array<double, 21> out{};
    pack_upper(v, out);
    return out;
}

CovarianceMatrix CovarianceMatrix::from_upper(std::span<const double> packed) {
    if (packed.size() != packed_dim) throw Error(ErrorKind::InvalidArgument, "expected 21 packed entries");
    return CovarianceMatrix{unpack_upper(packed)};
}

DriftMatrix build_drift(const SystemParams& params, double q_mean, cplx a_mean) {
    const double wm = params.omega_m;
    const double detuning = effective_detuning(params, q_mean);
    const cplx coupling = effective_coupling(params.g, a_mean);
    const double gx = coupling.real();
    const double gy = coupling.imag();
    const double g0 = params.g0_collective;
    const double k = params.kappa;
    const double ga = params.gamma_a;
    const double dc = params.delta_c;

    DriftMatrix drift;
    // clang-format off
    drift.a <<
        0.0,  wm,              0.0,       0.0,       0.0,  0.0,
        -wm,  -params.gamma_m, gx,        gy,        0.0,  0.0,
        -gy,  0.0,             -k,        detuning,  0.0,  g0,
        gx,   0.0,             -detuning, -k,        -g0,  0.0,
        0.0,  0.0,             0.0,       g0,        -ga,  dc,
        0.0,  0.0,             -g0,       0.0,       -dc,  -ga;
    // clang-format on
    return drift;
}

DiffusionMatrix build_diffusion(const SystemParams& params) {
    DiffusionMatrix diff;
    diff.d.diagonal() << 0.0, params.gamma_m * (2.0 * params.n_th + 1.0), params.kappa, params.kappa,
        params.gamma_a, params.gamma_a;
    return diff;
}

void integrate_lyapunov(const SystemParams& params, const MomentSource& source, const CovarianceMatrix& v0,
                        double t_end, std::span<const double> sample_times, const StepperConfig& cfg,
                        const CovarianceObserver& on_sample) {
    if (!(t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "integrate_lyapunov: t_end must be positive");
    check_physical(0.0, v0);
    const Mat6 d = build_diffusion(params).d;

    if (const auto* integrated = std::get_if<IntegratedMoments>(&source)) {
        // Mean values and covariance share one state vector so that A(t) is
        // always evaluated from the same accurate trajectory.
        const VectorField moments_field = first_moment_field(params, integrated->drive);
        VectorField field = [&](double t, std::span<const double> y, std::span<double> dy) {
            moments_field(t, y.first(first_moment_dim), dy.first(first_moment_dim));
            const FirstMoments m = unpack(y.first(first_moment_dim));
            const Mat6 a = build_drift(params, m.q, m.a).a;
            const Mat6 rate = lyapunov_rate(a, unpack_upper(y.subspan(first_moment_dim)), d);
            pack_upper(rate, dy.subspan(first_moment_dim));
        };
        std::vector<double> y0(first_moment_dim + packed_dim);
        pack(integrated->init, std::span<double>(y0).first(first_moment_dim));
        pack_upper(v0.v, std::span<double>(y0).subspan(first_moment_dim));
        integrate(field, 0.0, std::move(y0), t_end, sample_times, cfg, [&](double t, std::span<const double> y) {
            CovarianceSample s{t, CovarianceMatrix{unpack_upper(y.subspan(first_moment_dim))},
                               unpack(y.first(first_moment_dim))};
            check_physical(t, s.v);
            if (on_sample) on_sample(s);
        });
        return;
    }

    const auto& moments = std::get<AnalyticMoments>(source);
    VectorField field = [&](double t, std::span<const double> y, std::span<double> dy) {
        const FirstMoments m = moments(t);
        const Mat6 a = build_drift(params, m.q, m.a).a;
        pack_upper(lyapunov_rate(a, unpack_upper(y), d), dy);
    };
    std::vector<double> y0(packed_dim);
    pack_upper(v0.v, y0);
    integrate(field, 0.0, std::move(y0), t_end, sample_times, cfg, [&](double t, std::span<const double> y) {
        CovarianceSample s{t, CovarianceMatrix{unpack_upper(y)}, moments(t)};
        check_physical(t, s.v);
        if (on_sample) on_sample(s);
    });
}

std::vector<CovarianceSample> integrate_lyapunov(const SystemParams& params, const MomentSource& source,
                                                 const CovarianceMatrix& v0, double t_end,
                                                 std::span<const double> sample_times, const StepperConfig& cfg) {
    std::vector<CovarianceSample> out;
    out.reserve(sample_times.size());
    integrate_lyapunov(params, source, v0, t_end, sample_times, cfg,
                       [&](const CovarianceSample& s) { out.push_back(s); });
    return out;
}

CovarianceMatrix steady_state_lyapunov(const DriftMatrix& drift, const DiffusionMatrix& diffusion) {
    const Mat6& a = drift.a;
    const double margin = max_real_part(a);
    if (!(margin < 0.0)) {
        std::ostringstream os;
        os << "drift matrix has an eigenvalue with real part " << margin;
        throw Error(ErrorKind::NotStable, os.str());
    }

    // Columns: image of each symmetric basis matrix under V -> A V + V A^T.
    Eigen::MatrixXd system(packed_dim, packed_dim);
    std::size_t col = 0;
    for (int k = 0; k < 6; ++k) {
        for (int l = k; l < 6; ++l) {
            Mat6 basis = Mat6::Zero();
            basis(k, l) = 1.0;
            basis(l, k) = 1.0;
            std::array<double, packed_dim> image{};
            pack_upper(lyapunov_rate(a, basis, Mat6::Zero()), image);
            for (std::size_t row = 0; row < packed_dim; ++row) system(row, col) = image[row];
            ++col;
        }
    }
    Eigen::VectorXd rhs(packed_dim);
    std::array<double, packed_dim> d_packed{};
    pack_upper(diffusion.d, d_packed);
    for (std::size_t i = 0; i < packed_dim; ++i) rhs(i) = -d_packed[i];

    const Eigen::VectorXd x = solve_linear(system, rhs);
    CovarianceMatrix cm{unpack_upper(std::span<const double>(x.data(), packed_dim))};

    // One step of iterative refinement keeps the residual at rounding level.
    const Mat6 residual = lyapunov_rate(a, cm.v, diffusion.d);
    std::array<double, packed_dim> r_packed{};
    pack_upper(residual, r_packed);
    Eigen::VectorXd r(packed_dim);
    for (std::size_t i = 0; i < packed_dim; ++i) r(i) = -r_packed[i];
    const Eigen::VectorXd dx = solve_linear(system, r);
    const Eigen::VectorXd refined = x + dx;
    return CovarianceMatrix{unpack_upper(std::span<const double>(refined.data(), packed_dim))};
}

RelaxationResult relax_lyapunov(const DriftMatrix& drift, const DiffusionMatrix& diffusion,
                                const CovarianceMatrix& v0, const StepperConfig& cfg, double t_max,
                                double rate_tol) {
    const Mat6& a = drift.a;
    const Mat6& d = diffusion.d;
    std::vector<double> y0(packed_dim);
    pack_upper(v0.v, y0);
    const double threshold = rate_tol * max_norm(d);

    DormandPrince stepper(constant_lyapunov_field(drift, diffusion), 0.0, std::move(y0), cfg);
    while (stepper.t() < t_max) {
        stepper.step(t_max);
        const Mat6 v = unpack_upper(stepper.y());
        if (max_norm(lyapunov_rate(a, v, d)) < threshold) return {CovarianceMatrix{v}, stepper.t()};
    }
    throw Error(ErrorKind::NoConvergence, "Lyapunov flow did not settle before t_max");
}

StabilityReport stability_check(const SystemParams& params, std::span<const double> times,
                                std::span<const FirstMoments> moments) {
    if (times.size() != moments.size() || times.empty()) {
        throw Error(ErrorKind::InvalidArgument, "stability_check: need matching, non-empty samples");
    }
    StabilityReport report;
    report.margin = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double m = max_real_part(build_drift(params, moments[i].q, moments[i].a).a);
        if (m > report.margin) {
            report.margin = m;
            report.worst_time = times[i];
        }
    }
    report.samples = times.size();
    report.stable = report.margin < -1e-10;
    return report;
}

StabilityReport stability_check(const SystemParams& params, const AnalyticMoments& moments, double t_start,
                                double period, std::size_t samples) {
    if (samples == 0) throw Error(ErrorKind::InvalidArgument, "stability_check: samples must be positive");
    std::vector<double> times(samples);
    std::vector<FirstMoments> values(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        times[i] = t_start + period * static_cast<double>(i) / static_cast<double>(samples);
        values[i] = moments(times[i]);
    }
    return stability_check(params, times, values);
}

void write_covariance_csv_header(std::ostream& os) {
    os << 't';
    for (int k = 1; k <= 6; ++k) {
        for (int l = k; l <= 6; ++l) os << ",v" << k << l;
    }
    os << '\n';
}

void write_covariance_csv_row(std::ostream& os, double t, const CovarianceMatrix& v) {
    os << format_number(t);
    for (double x : v.upper()) os << ',' << format_number(x);
    os << '\n';
}

}  // namespace optomech
