#include "optomech/measures.hpp"

#include "optomech/csv.hpp"
#include "optomech/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace optomech {

std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& cm) {
    const auto dim = cm.rows();
    if (dim != cm.cols() || dim % 2 != 0 || dim == 0) {
        throw Error(ErrorKind::InvalidArgument, "symplectic_eigenvalues: need a 2N x 2N matrix");
    }
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; k += 2) {
        omega(k, k + 1) = 1.0;
        omega(k + 1, k) = -1.0;
    }
    // The spectrum of Omega V is {+-i nu_k}; each nu_k appears twice in |.|.
    std::vector<double> moduli;
    for (const auto& z : eigenvalues_real(omega * cm)) moduli.push_back(std::abs(z));
    std::sort(moduli.begin(), moduli.end());
    std::vector<double> nu;
    for (std::size_t k = 0; k < moduli.size(); k += 2) nu.push_back(0.5 * (moduli[k] + moduli[k + 1]));
    return nu;
}

Mat4 ReducedCM::full() const {
    Mat4 m;
    m.topLeftCorner<2, 2>() = a;
    m.topRightCorner<2, 2>() = c;
    m.bottomLeftCorner<2, 2>() = c.transpose();
    m.bottomRightCorner<2, 2>() = b;
    return m;
}

ReducedCM reduce_atom_mirror(const CovarianceMatrix& v) {
    ReducedCM r;
    r.a = v.v.block<2, 2>(0, 0);
    r.b = v.v.block<2, 2>(4, 4);
    r.c = v.v.block<2, 2>(0, 4);
    return r;
}

double partial_transpose_min_eigenvalue(const ReducedCM& rcm) {
    // The invariants cancel heavily for strongly entangled states (det ~ 1/16
    // from entries ~ cosh(2r)), so they are formed in extended precision.
    using Ext4 = Eigen::Matrix<long double, 4, 4>;
    using Ext2 = Eigen::Matrix<long double, 2, 2>;
    const Ext2 a = rcm.a.cast<long double>();
    const Ext2 b = rcm.b.cast<long double>();
    const Ext2 c = rcm.c.cast<long double>();
    const long double sigma = a.determinant() + b.determinant() - 2.0L * c.determinant();
    const Ext4 full = rcm.full().cast<long double>();
    const long double det_full = full.determinant();
    long double disc = sigma * sigma - 4.0L * det_full;
    if (disc < 0.0L) {
        if (disc < -1e-12L * std::max(1.0L, sigma * sigma)) {
            std::ostringstream os;
            os << "negative discriminant " << static_cast<double>(disc) << " in the partially transposed spectrum";
            throw Error(ErrorKind::NonPhysical, os.str());
        }
        disc = 0.0L;
    }
    // Smaller root of x^2 - sigma x + det = 0 without cancelling sigma against the square root.
    const long double denom = sigma + std::sqrt(disc);
    if (!(denom > 0.0L) || det_full < 0.0L) {
        if (det_full < -1e-12L * std::max(1.0L, sigma * sigma)) {
            throw Error(ErrorKind::NonPhysical, "negative partially transposed eigenvalue squared");
        }
        return 0.0;
    }
    return static_cast<double>(std::sqrt(2.0L * det_full / denom));
}

double log_negativity(const ReducedCM& rcm) {
    const double eta = partial_transpose_min_eigenvalue(rcm);
    if (eta <= 0.0) throw Error(ErrorKind::NonPhysical, "vanishing partially transposed eigenvalue");
    return std::max(0.0, -std::log(2.0 * eta));
}

VarianceReading position_variance(const CovarianceMatrix& v) {
    const double x = v.v(0, 0);
    return {x, x < 0.5};
}

VarianceReading momentum_variance(const CovarianceMatrix& v) {
    const double x = v.v(1, 1);
    return {x, x < 0.5};
}

double mean_phonon_number(const CovarianceMatrix& v) { return (v.v(0, 0) + v.v(1, 1) - 1.0) / 2.0; }

Mat2 mechanical_block(const CovarianceMatrix& v) { return v.v.block<2, 2>(0, 0); }

SqueezingReading squeezing_parameter(const Mat2& s) {
    const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
    const double mean = 0.5 * (s(0, 0) + s(1, 1));
    if (!(det > 0.0) || !(mean > 0.0)) throw Error(ErrorKind::NonPositive, "squeezing_parameter: block not positive definite");
    // Smallest root of x^2 - 2 m x + det; the product form avoids cancellation.
    const double root = std::sqrt(std::max(0.0, mean * mean - det));
    const double lambda = det / (mean + root);
    return {lambda, -10.0 * std::log10(lambda), -10.0 * std::log10(2.0 * lambda)};
}

double squeezing_phase(const Mat2& s) { return std::atan2(2.0 * s(0, 1), s(0, 0) - s(1, 1)); }

double wigner_density(const Eigen::MatrixXd& cm, const Eigen::VectorXd& point) {
    const auto dim = cm.rows();
    if (dim != cm.cols() || dim % 2 != 0 || point.size() != dim) {
        throw Error(ErrorKind::InvalidArgument, "wigner_density: dimension mismatch");
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(cm);
    const double det = lu.determinant();
    if (!(det >= 1e-300)) throw Error(ErrorKind::SingularCM, "wigner_density: det V below 1e-300");
    const double modes = static_cast<double>(dim / 2);
    const double quad = point.dot(lu.solve(point));
    return std::exp(-0.5 * quad) / (std::pow(2.0 * std::numbers::pi, modes) * std::sqrt(det));
}

double WignerGrid::trapezoid_integral() const {
    auto weights = [](const std::vector<double>& axis) {
        std::vector<double> w(axis.size(), 0.0);
        for (std::size_t i = 0; i + 1 < axis.size(); ++i) {
            const double h = axis[i + 1] - axis[i];
            w[i] += 0.5 * h;
            w[i + 1] += 0.5 * h;
        }
        return w;
    };
    const auto wx = weights(x);
    const auto wy = weights(y);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < y.size(); ++j) sum += wx[i] * wy[j] * at(i, j);
    }
    return sum;
}

WignerGrid wigner(const Mat2& mode_cm, const WignerGridSpec& spec) {
    if (spec.points < 2) throw Error(ErrorKind::InvalidArgument, "wigner grid needs at least 2 points per axis");
    const double det = mode_cm.determinant();
    if (!(det >= 1e-300)) throw Error(ErrorKind::SingularCM, "wigner: det V below 1e-300");
    const Mat2 inv = mode_cm.inverse();
    const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));

    WignerGrid grid;
    const double sx = std::sqrt(mode_cm(0, 0));
    const double sy = std::sqrt(mode_cm(1, 1));
    for (std::size_t i = 0; i < spec.points; ++i) {
        const double u = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(spec.points - 1);
        grid.x.push_back(u * spec.half_width_sigmas * sx);
        grid.y.push_back(u * spec.half_width_sigmas * sy);
    }
    grid.values.resize(spec.points * spec.points);
    for (std::size_t i = 0; i < spec.points; ++i) {
        for (std::size_t j = 0; j < spec.points; ++j) {
            const Eigen::Vector2d r(grid.x[i], grid.y[j]);
            grid.values[i * spec.points + j] = norm * std::exp(-0.5 * r.dot(inv * r));
        }
    }
    return grid;
}

void write_wigner_csv(std::ostream& os, const WignerGrid& grid) {
    write_csv_header(os, "x,y,w");
    for (std::size_t i = 0; i < grid.x.size(); ++i) {
        for (std::size_t j = 0; j < grid.y.size(); ++j) write_csv_row(os, {grid.x[i], grid.y[j], grid.at(i, j)});
    }
}

}  // namespace optomech
