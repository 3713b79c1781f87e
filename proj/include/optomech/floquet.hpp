#pragma once

// Perturbative periodic solution of the mean-value equations: a double series
// in powers of the radiation-pressure coupling g and in harmonics of the
// modulation frequency,
//
//   <O(t)> = sum_{j <= j_max} sum_{|n| <= n_max} O_{n,j} exp(+i n Omega t) g^j,
//
// while the drive is expanded as E(t) = sum_n E_n exp(-i n Omega t). Both sign
// conventions are kept as is; a zero-order cavity coefficient is therefore
// proportional to E_{-n}.

#include "optomech/model.hpp"

#include <vector>

namespace optomech {

enum class Observable { q = 0, p = 1, a = 2, c = 3 };

class FloquetSolution {
public:
    static constexpr int default_j_max = 6;
    static constexpr int default_n_max = 5;

    FloquetSolution(int j_max, int n_max, double big_omega);

    cplx& at(Observable o, int n, int j);
    cplx at(Observable o, int n, int j) const;

    int j_max() const { return j_max_; }
    int n_max() const { return n_max_; }
    double big_omega() const { return big_omega_; }
    double period() const { return two_pi / big_omega_; }

private:
    std::size_t index(Observable o, int n, int j) const;

    int j_max_;
    int n_max_;
    double big_omega_;
    std::vector<cplx> coeffs_;
};

/// j = 0 layer. Requires Omega > 0; throws Error{SingularDenominator} when the
/// linear cavity-atom response is resonant.
FloquetSolution floquet_zero_order(const SystemParams& params, const DriveSpec& drive,
                                   int n_max = FloquetSolution::default_n_max);

/// All layers up to j_max by the recursion in the coupling order; inner
/// harmonic sums are truncated to |index| <= n_max. Throws
/// Error{SingularDenominator} at a mechanical resonance n Omega ~ omega_m.
FloquetSolution floquet_recurse(const SystemParams& params, const DriveSpec& drive,
                                int j_max = FloquetSolution::default_j_max,
                                int n_max = FloquetSolution::default_n_max);

FirstMoments evaluate_floquet(const FloquetSolution& sol, double g, double t);

}  // namespace optomech
