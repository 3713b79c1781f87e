#include "optomech/linalg.hpp"

#include "optomech/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace optomech {

std::vector<std::complex<double>> eigenvalues_real(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw Error(ErrorKind::InvalidArgument, "eigenvalues_real: matrix not square");
    if (m.rows() > 16) throw Error(ErrorKind::InvalidArgument, "eigenvalues_real: dimension above 16");
    if (m.rows() == 0) return {};

    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::NoConvergence, "eigenvalues_real: QR iteration did not converge");
    }
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

double max_real_part(const Eigen::MatrixXd& m) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& z : eigenvalues_real(m)) best = std::max(best, z.real());
    return best;
}

double max_norm(const Eigen::MatrixXd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Eigen::VectorXd solve_linear(const Eigen::MatrixXd& m, const Eigen::VectorXd& b) {
    if (m.rows() != m.cols()) throw Error(ErrorKind::InvalidArgument, "solve_linear: matrix not square");
    if (m.rows() != b.size()) throw Error(ErrorKind::InvalidArgument, "solve_linear: dimension mismatch");

    const double scale = max_norm(m);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    if (scale == 0.0 || pivots.minCoeff() < 1e-14 * scale) {
        throw Error(ErrorKind::Singular, "solve_linear: pivot below 1e-14 * ||m||");
    }
    return lu.solve(b);
}

}  // namespace optomech
