#pragma once

// Gaussian-state diagnostics. Quadratures carry a vacuum variance of 1/2.

#include "optomech/covariance.hpp"
#include "optomech/linalg.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace optomech {

/// Symplectic eigenvalues (ascending) of a 2N x 2N covariance matrix ordered
/// as (x_1, p_1, ..., x_N, p_N).
std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& cm);

/// Atom-mirror block [[A, C], [C^T, B]] over (dq, dp, dx, dy).
struct ReducedCM {
    Mat2 a = Mat2::Zero();  // mechanical
    Mat2 b = Mat2::Zero();  // collective atomic
    Mat2 c = Mat2::Zero();  // cross correlations

    Mat4 full() const;
};

ReducedCM reduce_atom_mirror(const CovarianceMatrix& v);

/// Smallest symplectic eigenvalue of the partially transposed state.
/// Throws Error{NonPhysical} on a negative discriminant.
double partial_transpose_min_eigenvalue(const ReducedCM& rcm);

/// E_N = max(0, -ln(2 eta^-)).
double log_negativity(const ReducedCM& rcm);

struct VarianceReading {
    double value = 0.0;
    bool squeezed = false;  // below the vacuum level 1/2
};

VarianceReading position_variance(const CovarianceMatrix& v);
VarianceReading momentum_variance(const CovarianceMatrix& v);

/// n_eff = (V_11 + V_22 - 1) / 2.
double mean_phonon_number(const CovarianceMatrix& v);

struct SqueezingReading {
    double lambda = 0.0;  // smallest eigenvalue of the 2x2 block
    double r_raw = 0.0;   // -10 log10(lambda)
    double r_db = 0.0;    // -10 log10(2 lambda); zero for vacuum
};

/// Throws Error{NonPositive} unless det > 0 (and the block is positive definite).
SqueezingReading squeezing_parameter(const Mat2& mode_cm);

/// Orientation of the squeezing ellipse as the doubled angle
/// atan2(2 s12, s11 - s22) in (-pi, pi]. The principal axis is defined modulo
/// pi, so this is the natural single-valued phase of the quadratic form.
double squeezing_phase(const Mat2& mode_cm);

/// Mechanical 2x2 block of the full covariance matrix.
Mat2 mechanical_block(const CovarianceMatrix& v);

/// Zero-mean Gaussian Wigner density W(R) = exp(-R^T V^{-1} R / 2) / ((2 pi)^N sqrt(det V)).
/// Throws Error{SingularCM} when det V < 1e-300.
double wigner_density(const Eigen::MatrixXd& cm, const Eigen::VectorXd& point);

struct WignerGridSpec {
    double half_width_sigmas = 6.0;
    std::size_t points = 201;
};

struct WignerGrid {
    std::vector<double> x;       // first coordinate axis
    std::vector<double> y;       // second coordinate axis
    std::vector<double> values;  // row-major, values[i * y.size() + j] = W(x[i], y[j])

    double at(std::size_t i, std::size_t j) const { return values[i * y.size() + j]; }
    double trapezoid_integral() const;
};

/// Single-mode Wigner function on a grid spanning +-half_width_sigmas
/// standard deviations along each axis.
WignerGrid wigner(const Mat2& mode_cm, const WignerGridSpec& spec = {});

void write_wigner_csv(std::ostream& os, const WignerGrid& grid);

}  // namespace optomech
