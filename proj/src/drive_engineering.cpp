#include "optomech/drive_engineering.hpp"

#include "optomech/error.hpp"

#include <cmath>
#include <sstream>

namespace optomech {
namespace {

constexpr cplx I{0.0, 1.0};

void require_distinct(const LaplaceCoefficients& lc, int first, int last) {
    for (int i = first; i <= last; ++i) {
        for (int j = i + 1; j <= last; ++j) {
            if (std::abs(lc.s[i] - lc.s[j]) < 1e-10) {
                std::ostringstream os;
                os << "exponents s_" << i + 1 << " and s_" << j + 1 << " coincide";
                throw Error(ErrorKind::DegenerateExponents, os.str());
            }
        }
    }
}

double detuned_mechanics(const SystemParams& params, double big_omega) {
    const double d = big_omega * big_omega - params.omega_m * params.omega_m;
    if (std::abs(d) < 1e-9) {
        throw Error(ErrorKind::SingularDenominator, "Omega^2 - omega_m^2 vanishes");
    }
    return d;
}

}  // namespace

LaplaceCoefficients laplace_coefficients(const SystemParams& params, const EngineeredCoupling& target) {
    const double big_omega = target.big_omega;
    if (!(big_omega > 0.0)) throw Error(ErrorKind::InvalidArgument, "engineered coupling needs Omega > 0");

    const double gm = params.gamma_m;
    const double wm = params.omega_m;
    const double g = params.g;
    const double g0 = params.g0_collective;
    const double g1 = target.g1;
    const double g2 = target.g2;
    if (!(g > 0.0)) throw Error(ErrorKind::InvalidArgument, "engineered coupling needs g > 0");

    LaplaceCoefficients lc;
    auto& s = lc.s;
    auto& k = lc.k;
    const cplx root = std::sqrt(cplx{gm * gm - 4.0 * wm * wm, 0.0});
    s[0] = (-gm + root) / 2.0;
    s[1] = (-gm - root) / 2.0;
    s[2] = -I * big_omega;
    s[3] = I * big_omega;
    s[4] = 0.0;
    s[5] = s[2];
    s[6] = -cplx{params.gamma_a, params.delta_c};
    require_distinct(lc, 0, 3);
    require_distinct(lc, 4, 6);

    const double sum_sq = (g1 + g2) * (g1 + g2);
    const double sq_sum = g1 * g1 + g2 * g2;
    for (int i = 0; i < 4; ++i) {
        cplx denom = 2.0 * g;
        for (int j = 0; j < 4; ++j) {
            if (j != i) denom *= s[i] - s[j];
        }
        k[i] = (sum_sq * s[i] * s[i] + sq_sum * big_omega * big_omega) / denom;
    }
    for (int i = 4; i < 7; ++i) {
        cplx denom = std::sqrt(2.0) * g;
        for (int j = 4; j < 7; ++j) {
            if (j != i) denom *= s[i] - s[j];
        }
        k[i] = (-I * g0 * (g1 + g2) * s[i] + g0 * g1 * big_omega) / denom;
    }
    return lc;
}

FirstMoments transient_first_moments(const SystemParams& params, const LaplaceCoefficients& lc,
                                     const EngineeredCoupling& target, double t) {
    cplx p{}, dp{}, c{};
    for (int i = 0; i < 4; ++i) {
        const cplx term = lc.k[i] * std::exp(lc.s[i] * t);
        p += term;
        dp += lc.s[i] * term;
    }
    for (int i = 4; i < 7; ++i) c += lc.k[i] * std::exp(lc.s[i] * t);

    FirstMoments m;
    m.a = target.value(t) / (std::sqrt(2.0) * params.g);
    m.p = p.real();
    m.q = ((-dp - params.gamma_m * p).real() + params.g * std::norm(m.a)) / params.omega_m;
    m.c = c;
    return m;
}

FirstMoments transient_first_moments(const SystemParams& params, const EngineeredCoupling& target, double t) {
    return transient_first_moments(params, laplace_coefficients(params, target), target, t);
}

FirstMoments asymptotic_first_moments(const SystemParams& params, const EngineeredCoupling& target, double t) {
    const double wm = params.omega_m;
    const double g = params.g;
    const double g0 = params.g0_collective;
    const double g1 = target.g1;
    const double g2 = target.g2;
    const double big_omega = target.big_omega;
    const double detune = detuned_mechanics(params, big_omega);
    const cplx e_minus = std::polar(1.0, -big_omega * t);
    const cplx e_plus = std::conj(e_minus);
    const double sqrt2 = std::sqrt(2.0);

    FirstMoments m;
    m.a = (g1 + g2 * e_minus) / (sqrt2 * g);
    m.p = (I * g1 * g2 * big_omega / (2.0 * g * detune) * (e_minus - e_plus)).real();
    m.q = ((g1 * g1 + g2 * g2) / (2.0 * g * wm) - g1 * g2 * wm / (2.0 * g * detune) * (e_minus + e_plus)).real();
    m.c = -I * g0 * g1 / (sqrt2 * g * cplx{params.gamma_a, params.delta_c}) +
          g0 * g2 / (sqrt2 * I * g * cplx{params.gamma_a, params.delta_c - big_omega}) * e_minus;
    return m;
}

DriveSpec modulation_components(const SystemParams& params, const EngineeredCoupling& target) {
    const double wm = params.omega_m;
    const double g = params.g;
    const double g0 = params.g0_collective;
    const double g1 = target.g1;
    const double g2 = target.g2;
    const double big_omega = target.big_omega;
    if (!(big_omega > 0.0)) throw Error(ErrorKind::InvalidArgument, "engineered coupling needs Omega > 0");
    if (!(g > 0.0)) throw Error(ErrorKind::InvalidArgument, "engineered coupling needs g > 0");
    const double detune = detuned_mechanics(params, big_omega);
    const double sqrt2 = std::sqrt(2.0);
    const double w2 = big_omega * big_omega;

    DriveSpec drive;
    drive.big_omega = big_omega;
    drive.components[2] = I * g1 * g2 * g2 * wm / (2.0 * sqrt2 * g * detune);
    drive.components[-1] = I * g1 * g1 * g2 * wm / (2.0 * sqrt2 * g * detune);
    drive.components[1] = g2 / (sqrt2 * g) * cplx{params.kappa, params.delta_a - big_omega} -
                          I * g2 / (2.0 * sqrt2 * g * wm) * (2.0 * g1 * g1 + g2 * g2 - g1 * g1 * w2 / detune) +
                          g0 * g0 * g2 / (sqrt2 * g * cplx{params.gamma_a, params.delta_c - big_omega});
    drive.components[0] = g1 / (sqrt2 * g) * cplx{params.kappa, params.delta_a} -
                          I * g1 / (2.0 * sqrt2 * g * wm) * (g1 * g1 + 2.0 * g2 * g2 - g2 * g2 * w2 / detune) +
                          g0 * g0 * g1 / (sqrt2 * g * cplx{params.gamma_a, params.delta_c});
    return drive;
}

DriveSignal exact_drive(const SystemParams& params, const EngineeredCoupling& target) {
    const LaplaceCoefficients lc = laplace_coefficients(params, target);
    return [params, lc, target](double t) {
        const FirstMoments m = transient_first_moments(params, lc, target, t);
        const cplx da = -I * target.big_omega * target.g2 * std::polar(1.0, -target.big_omega * t) /
                        (std::sqrt(2.0) * params.g);
        return da + cplx{params.kappa, params.delta_a} * m.a - I * params.g * m.a * m.q +
               I * params.g0_collective * m.c;
    };
}

}  // namespace optomech
