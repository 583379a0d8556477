#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "hymlab/hermitian.hpp"
#include "hymlab/point.hpp"

namespace hymlab {

// Conventions, fixed once for the whole library:
//
//   * A curvature tensor stores the coefficients of the real (1,1)-form
//     sqrt(-1) * Theta, where Theta = dbar(h^-1 dh) is the Chern curvature:
//     F = sum_{j,k} F[j][k] dz_j ^ dzbar_k, F[j][k] 2x2 in an orthonormal
//     fiber basis. Metric compatibility then reads F[k][j] = -F[j][k]^dag.
//   * Lambda(dz_j ^ dzbar_k) = -2i delta_jk, so the Euclidean Kaehler form
//     omega = (i/2) sum dz ^ dzbar has Lambda(omega) = 3 on C^3, and
//     ASD/HYM connections have lambda_trace == 0.
//   * |F|^2 = c_norm * sum_jk tr(F[j][k] F[j][k]^dag) with c_norm calibrated
//     so a charge-1 instanton on R^4 has total energy 8 pi^2 (c_norm = 4 with
//     these conventions; the calibration run pins it numerically).
struct CurvatureTensor {
    std::array<std::array<Matrix2cd, 3>, 3> coeff{};
    int base_dim = 3;  // 2 for C^2 (ADHM), 3 for C^3/Z
    // Relative size of F[k][j] + F[j][k]^dag. Violations above 1e-8 are the
    // primary numerical-health signal; they are reported, never symmetrized.
    double symmetry_defect = 0.0;

    CurvatureTensor() {
        for (auto& row : coeff)
            for (auto& m : row) m.setZero();
    }

    explicit CurvatureTensor(int dim) : CurvatureTensor() { base_dim = dim; }

    const Matrix2cd& operator()(int j, int k) const { return coeff[j][k]; }
    Matrix2cd& operator()(int j, int k) { return coeff[j][k]; }

    double frobenius_sq() const {
        double s = 0.0;
        for (int j = 0; j < base_dim; ++j)
            for (int k = 0; k < base_dim; ++k) s += coeff[j][k].squaredNorm();
        return s;
    }

    void update_symmetry_defect() {
        double num = 0.0;
        for (int j = 0; j < base_dim; ++j)
            for (int k = 0; k < base_dim; ++k)
                num += (coeff[k][j] + coeff[j][k].adjoint()).squaredNorm();
        double den = frobenius_sq();
        symmetry_defect = den > 0.0 ? std::sqrt(num / den) : 0.0;
    }
};

/// Mean curvature: Lambda F = -2i sum_j F[j][j].
inline Matrix2cd lambda_trace(const CurvatureTensor& f) {
    Matrix2cd acc = Matrix2cd::Zero();
    for (int j = 0; j < f.base_dim; ++j) acc += f(j, j);
    return cplx(0.0, -2.0) * acc;
}

struct NormConvention {
    double c_norm = 4.0;
};

/// |F|^2 under the calibrated norm; valid in an orthonormal fiber basis.
inline double norm_sq(const CurvatureTensor& f, const NormConvention& nc = {}) {
    return nc.c_norm * f.frobenius_sq();
}

/// Pointwise tr(F ^ F) integrand: sum_{j<k} tr(F[j][j]F[k][k] - F[j][k]F[k][j]).
/// On C^2 the topological charge density is this divided by pi^2.
inline double chern_weil_density(const CurvatureTensor& f) {
    cplx acc(0.0, 0.0);
    for (int j = 0; j < f.base_dim; ++j)
        for (int k = j + 1; k < f.base_dim; ++k)
            acc += (f(j, j) * f(k, k) - f(j, k) * f(k, j)).trace();
    return acc.real();
}

inline double charge_density(const CurvatureTensor& f) {
    return chern_weil_density(f) / (kPi * kPi);
}

/// Conjugate all coefficients by a fixed unitary change of the fiber basis.
inline CurvatureTensor change_basis(const CurvatureTensor& f, const Matrix2cd& u) {
    CurvatureTensor g(f.base_dim);
    const Matrix2cd u_inv = u.inverse();
    for (int j = 0; j < f.base_dim; ++j)
        for (int k = 0; k < f.base_dim; ++k) g(j, k) = u_inv * f(j, k) * u;
    g.update_symmetry_defect();
    return g;
}

}  // namespace hymlab
