#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hymlab/errors.hpp"

namespace hymlab {

using Eigen::Matrix2cd;
using Eigen::Matrix4cd;
using Eigen::MatrixXcd;
using Eigen::RowVector4cd;
using Eigen::Vector2cd;
using Eigen::Vector4cd;
using Eigen::Vector4d;

inline double hermitian_defect(const MatrixXcd& m) {
    double scale = m.norm();
    if (scale == 0.0) return 0.0;
    return (m - m.adjoint()).norm() / scale;
}

/// n x n complex matrix declared Hermitian (n in {1,2,4} in practice).
/// Construction checks self-adjointness to 1e-12 relative; positive
/// definiteness is checked on demand where the matrix acts as a metric.
struct HermitianMatrix {
    MatrixXcd entries;

    static HermitianMatrix from(const MatrixXcd& m, double tol = 1e-12) {
        if (hermitian_defect(m) > tol)
            throw PreconditionError("matrix is not Hermitian within tolerance");
        return HermitianMatrix{m};
    }

    static HermitianMatrix diagonal(const Eigen::VectorXd& d) {
        return HermitianMatrix{d.cast<std::complex<double>>().asDiagonal()};
    }

    double smallest_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(entries, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    bool positive_definite() const { return smallest_eigenvalue() > 0.0; }
};

}  // namespace hymlab
