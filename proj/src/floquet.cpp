#include "optomech/floquet.hpp"

#include "optomech/error.hpp"

#include <cmath>
#include <sstream>

namespace optomech {
namespace {

constexpr cplx I{0.0, 1.0};
constexpr double denominator_floor = 1e-12;

// [kappa + i(delta_a + n Omega)] [gamma_a + i(Delta_c + n Omega)] + G_0^2
cplx optical_denominator(const SystemParams& p, double n_omega) {
    const cplx d = cplx{p.kappa, p.delta_a + n_omega} * cplx{p.gamma_a, p.delta_c + n_omega} +
                   p.g0_collective * p.g0_collective;
    if (std::abs(d) < denominator_floor) {
        std::ostringstream os;
        os << "cavity-atom response is singular at n Omega = " << n_omega;
        throw Error(ErrorKind::SingularDenominator, os.str());
    }
    return d;
}

// omega_m^2 - (n Omega)^2 + i gamma_m n Omega
cplx mechanical_denominator(const SystemParams& p, double n_omega) {
    const cplx d{p.omega_m * p.omega_m - n_omega * n_omega, p.gamma_m * n_omega};
    if (std::abs(d) < denominator_floor) {
        std::ostringstream os;
        os << "mechanical resonance at n Omega = " << n_omega;
        throw Error(ErrorKind::SingularDenominator, os.str());
    }
    return d;
}

void require_modulated(double big_omega) {
    if (!(big_omega > 0.0)) throw Error(ErrorKind::InvalidArgument, "Floquet expansion needs Omega > 0");
}

}  // namespace

FloquetSolution::FloquetSolution(int j_max, int n_max, double big_omega)
    : j_max_(j_max), n_max_(n_max), big_omega_(big_omega) {
    if (j_max < 0) throw Error(ErrorKind::InvalidArgument, "j_max must be >= 0");
    if (n_max < 0) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 0");
    coeffs_.assign(static_cast<std::size_t>(4 * (j_max + 1) * (2 * n_max + 1)), cplx{});
}

std::size_t FloquetSolution::index(Observable o, int n, int j) const {
    if (j < 0 || j > j_max_ || n < -n_max_ || n > n_max_) {
        throw Error(ErrorKind::InvalidArgument, "Floquet coefficient index out of range");
    }
    const int width = 2 * n_max_ + 1;
    return static_cast<std::size_t>((static_cast<int>(o) * (j_max_ + 1) + j) * width + (n + n_max_));
}

cplx& FloquetSolution::at(Observable o, int n, int j) { return coeffs_[index(o, n, j)]; }
cplx FloquetSolution::at(Observable o, int n, int j) const { return coeffs_[index(o, n, j)]; }

FloquetSolution floquet_zero_order(const SystemParams& params, const DriveSpec& drive, int n_max) {
    require_modulated(drive.big_omega);
    FloquetSolution sol(0, n_max, drive.big_omega);
    for (int n = -n_max; n <= n_max; ++n) {
        const double n_omega = n * drive.big_omega;
        const cplx e = drive.component(-n);
        const cplx denom = optical_denominator(params, n_omega);
        sol.at(Observable::a, n, 0) = cplx{params.gamma_a, n_omega + params.delta_c} * e / denom;
        sol.at(Observable::c, n, 0) = params.g0_collective * e / (I * denom);
    }
    return sol;
}

FloquetSolution floquet_recurse(const SystemParams& params, const DriveSpec& drive, int j_max, int n_max) {
    if (j_max < 0) throw Error(ErrorKind::InvalidArgument, "j_max must be >= 0");
    if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");
    require_modulated(drive.big_omega);

    const FloquetSolution base = floquet_zero_order(params, drive, n_max);
    FloquetSolution sol(j_max, n_max, drive.big_omega);
    for (int n = -n_max; n <= n_max; ++n) {
        sol.at(Observable::a, n, 0) = base.at(Observable::a, n, 0);
        sol.at(Observable::c, n, 0) = base.at(Observable::c, n, 0);
    }

    const double wm = params.omega_m;
    const double big_omega = drive.big_omega;
    auto in_range = [n_max](int k) { return k >= -n_max && k <= n_max; };

    for (int j = 1; j <= j_max; ++j) {
        // Mechanics at order j from |a|^2 at total order j - 1.
        for (int n = -n_max; n <= n_max; ++n) {
            cplx source{};
            for (int k = 0; k <= j - 1; ++k) {
                for (int m = -n_max; m <= n_max; ++m) {
                    if (!in_range(n + m)) continue;
                    source += std::conj(sol.at(Observable::a, m, k)) * sol.at(Observable::a, n + m, j - k - 1);
                }
            }
            const double n_omega = n * big_omega;
            const cplx q = wm * source / mechanical_denominator(params, n_omega);
            sol.at(Observable::q, n, j) = q;
            sol.at(Observable::p, n, j) = I * n_omega / wm * q;
        }
        // Cavity and atoms at order j from the product a q at total order j - 1.
        for (int n = -n_max; n <= n_max; ++n) {
            cplx source{};
            for (int k = 0; k <= j - 1; ++k) {
                for (int m = -n_max; m <= n_max; ++m) {
                    if (!in_range(n - m)) continue;
                    source += sol.at(Observable::a, m, k) * sol.at(Observable::q, n - m, j - k - 1);
                }
            }
            const double n_omega = n * big_omega;
            const cplx denom = optical_denominator(params, n_omega);
            sol.at(Observable::a, n, j) = I * cplx{params.gamma_a, params.delta_c + n_omega} * source / denom;
            sol.at(Observable::c, n, j) = params.g0_collective * source / denom;
        }
    }
    return sol;
}

FirstMoments evaluate_floquet(const FloquetSolution& sol, double g, double t) {
    cplx q{}, p{}, a{}, c{};
    const int n_max = sol.n_max();
    // Reduce the phase to one period first so that t and t + tau evaluate the
    // same harmonics bit for bit.
    const double tau = sol.period();
    const double phase_t = t - std::floor(t / tau) * tau;
    std::vector<cplx> harmonics(static_cast<std::size_t>(2 * n_max + 1));
    for (int n = -n_max; n <= n_max; ++n) {
        harmonics[static_cast<std::size_t>(n + n_max)] = std::polar(1.0, n * sol.big_omega() * phase_t);
    }
    double gj = 1.0;
    for (int j = 0; j <= sol.j_max(); ++j) {
        for (int n = -n_max; n <= n_max; ++n) {
            const cplx w = harmonics[static_cast<std::size_t>(n + n_max)] * gj;
            q += sol.at(Observable::q, n, j) * w;
            p += sol.at(Observable::p, n, j) * w;
            a += sol.at(Observable::a, n, j) * w;
            c += sol.at(Observable::c, n, j) * w;
        }
        gj *= g;
    }
    return FirstMoments{q.real(), p.real(), a, c};
}

}  // namespace optomech
