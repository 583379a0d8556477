#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <string>

#include "hymlab/curvature.hpp"
#include "hymlab/errors.hpp"
#include "hymlab/hermitian.hpp"
#include "hymlab/point.hpp"
#include "hymlab/wirtinger.hpp"

namespace hymlab::monad {

using FrameMatrix = Eigen::Matrix<cplx, 4, 2>;

// Pointwise monad C -> C^4 -> C with a diagonal ambient Hermitian structure.
// alpha is fiberwise injective (a nonzero column), beta fiberwise surjective
// (a nonzero row), and beta * alpha == 0 wherever both are evaluated.
//
// Inner-product convention on C^4: <u,v> = v^dag H u with H = diag(ambient),
// so alpha^dag = conj(alpha)^t H and beta^dag = H^-1 conj(beta)^t.
struct MonadSpec {
    std::function<Vector4cd(const C3Point&)> alpha;
    std::function<RowVector4cd(const C3Point&)> beta;
    std::function<Vector4d(const C3Point&)> ambient;  // diagonal, positive
    int base_dim = 3;                                 // 2 for C^2, 3 for C^3/Z
    bool periodic = false;
};

struct Adjoints {
    RowVector4cd alpha_dag;
    Vector4cd beta_dag;
    double alpha_dag_alpha = 0.0;
    double beta_beta_dag = 0.0;
};

namespace detail {

inline RowVector4cd adjoint_of_column(const Vector4cd& c, const Vector4d& h) {
    return c.conjugate().transpose() * h.cast<cplx>().asDiagonal();
}

inline Vector4cd adjoint_of_row(const RowVector4cd& r, const Vector4d& h) {
    return h.cwiseInverse().cast<cplx>().asDiagonal() * r.conjugate().transpose();
}

}  // namespace detail

inline constexpr double kDegenerateFloor = 1e-300;
inline constexpr double kRankTol = 1e-10;

/// Adjoint maps of the monad at p, w.r.t. the ambient structure on C^4 and
/// the standard structure on the end terms. The scalars alpha^dag alpha and
/// beta beta^dag are the pointwise Gram values; both must be positive at a
/// nondegenerate point.
inline Adjoints adjoints(const MonadSpec& spec, const C3Point& p) {
    const Vector4cd a = spec.alpha(p);
    const RowVector4cd b = spec.beta(p);
    const Vector4d h = spec.ambient(p);

    Adjoints out;
    out.beta_beta_dag = (b.cwiseAbs2().transpose().cwiseQuotient(h)).sum();
    if (!(out.beta_beta_dag > kDegenerateFloor) || !std::isfinite(out.beta_beta_dag))
        throw DegeneratePointError("monad degenerate: beta beta^dag vanishes");
    out.alpha_dag_alpha = (a.cwiseAbs2().cwiseProduct(h)).sum();
    if (!(out.alpha_dag_alpha > kDegenerateFloor) || !std::isfinite(out.alpha_dag_alpha))
        throw DegeneratePointError("monad degenerate: alpha^dag alpha vanishes");
    out.alpha_dag = detail::adjoint_of_column(a, h);
    out.beta_dag = detail::adjoint_of_row(b, h);
    return out;
}

/// Harmonic representatives of the cohomology fiber at a point:
/// an ambient-orthonormal basis of ker(beta) \cap ker(alpha^dag).
struct FiberBasis {
    C3Point point;
    std::array<Vector4cd, 2> vectors;
};

namespace detail {

inline void fix_phase(Vector4cd& v) {
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < 4; ++i) {
        if (std::abs(v[i]) > best + 1e-15) {
            best = std::abs(v[i]);
            imax = i;
        }
    }
    const cplx c = v[imax];
    if (std::abs(c) > 0.0) v *= std::conj(c) / std::abs(c);
}

// Sort key: descending |v3|, then |v4|, then |v1|, |v2| (tie-break).
inline bool basis_order(const Vector4cd& a, const Vector4cd& b) {
    const int order[4] = {2, 3, 0, 1};
    for (int idx : order) {
        const double da = std::abs(a[idx]), db = std::abs(b[idx]);
        if (std::abs(da - db) > 1e-12) return da > db;
    }
    return false;
}

}  // namespace detail

inline FiberBasis harmonic_basis(const MonadSpec& spec, const C3Point& p) {
    const Adjoints adj = adjoints(spec, p);
    const Vector4d h = spec.ambient(p);

    Eigen::Matrix<cplx, 2, 4> stacked;
    stacked.row(0) = spec.beta(p);
    stacked.row(1) = adj.alpha_dag;
    // Rows live on different scales; normalize before the rank decision.
    for (int r = 0; r < 2; ++r) {
        const double n = stacked.row(r).norm();
        if (!(n > kDegenerateFloor))
            throw DegeneratePointError("harmonic_basis: zero monad map");
        stacked.row(r) /= n;
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(1) < kRankTol * sv(0))
        throw DegeneratePointError("harmonic_basis: stacked system has rank != 2");

    Eigen::Matrix<cplx, 4, 2> kernel = svd.matrixV().rightCols<2>();

    // Ambient-orthonormalize (SVD kernel is only Euclidean-orthonormal).
    const Matrix2cd gram =
        kernel.adjoint() * h.cast<cplx>().asDiagonal() * kernel;
    Eigen::LLT<Matrix2cd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw DegeneratePointError("harmonic_basis: Gram not positive definite");
    const Matrix2cd lower = llt.matrixL();
    kernel = kernel * Matrix2cd(lower.adjoint().inverse());

    FiberBasis out;
    out.point = p;
    out.vectors[0] = kernel.col(0);
    out.vectors[1] = kernel.col(1);
    detail::fix_phase(out.vectors[0]);
    detail::fix_phase(out.vectors[1]);
    if (detail::basis_order(out.vectors[1], out.vectors[0]))
        std::swap(out.vectors[0], out.vectors[1]);
    return out;
}

// --- Curvature of the induced connection ------------------------------------
//
// In an orthonormal harmonic frame {e_a} the coefficient matrices are
// assembled from three pieces:
//
//   Theta[j][k](b,a) = <F_E1 e_a, e_b>_jk
//                      - (beta beta^dag)^-1 (B_j e_a) conj(B_k e_b)
//                      + (alpha^dag alpha)^-1 (A_k e_a) conj(A_j e_b)
//
// where F_E1 = dbar(dh h^-1) of the diagonal ambient metric, B_j is the dz_j
// component of nabla beta = (dbar beta^dag)^dag and A_k the dzbar_k component
// of nabla alpha^dag = dbar alpha^dag. The index placement (and in particular
// the sign flip on the alpha term, which comes from reordering the (0,1)
// pairing into dz ^ dzbar) is validated against the finite-difference Chern
// oracle below and against c_1 additivity for sub/quotient bundles.
// The stored tensor is sqrt(-1) * Theta, per the library convention.

inline CurvatureTensor curvature_lemma1(const MonadSpec& spec, const C3Point& p,
                                        double step = 1e-3) {
    const Adjoints adj = adjoints(spec, p);
    const FiberBasis basis = harmonic_basis(spec, p);
    const Vector4d h = spec.ambient(p);
    const int dim = spec.base_dim;

    // nabla beta (1,0)-components: B[j] = (dbar_j beta^dag)^dag at p.
    auto beta_dag_field = [&](const C3Point& q) -> Vector4cd {
        return detail::adjoint_of_row(spec.beta(q), spec.ambient(q));
    };
    std::array<RowVector4cd, 3> b_form;
    for (int j = 0; j < dim; ++j) {
        const Vector4cd d =
            wirtinger_partial(beta_dag_field, p, j, Wirtinger::Antiholomorphic, step);
        b_form[j] = detail::adjoint_of_column(d, h);
    }

    // nabla alpha^dag (0,1)-components: A[k] = dbar_k alpha^dag at p.
    auto alpha_dag_field = [&](const C3Point& q) -> RowVector4cd {
        return detail::adjoint_of_column(spec.alpha(q), spec.ambient(q));
    };
    std::array<RowVector4cd, 3> a_form;
    for (int k = 0; k < dim; ++k)
        a_form[k] =
            wirtinger_partial(alpha_dag_field, p, k, Wirtinger::Antiholomorphic, step);

    // Ambient Chern curvature, diagonal: (F_E1)_jk = -dbar_k d_j log h, per entry.
    auto log_ambient = [&](const C3Point& q) -> Vector4cd {
        const Vector4d la = spec.ambient(q).array().log();
        return la.cast<cplx>();
    };
    std::array<std::array<Vector4cd, 3>, 3> f_e1;
    for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k)
            f_e1[j][k] = -wirtinger_del_delbar(log_ambient, p, j, k, step);

    CurvatureTensor out(dim);
    const double inv_bb = 1.0 / adj.beta_beta_dag;
    const double inv_aa = 1.0 / adj.alpha_dag_alpha;
    for (int j = 0; j < dim; ++j) {
        for (int k = 0; k < dim; ++k) {
            Matrix2cd theta;
            for (int a = 0; a < 2; ++a) {
                const Vector4cd& ea = basis.vectors[a];
                const cplx bj_a = (b_form[j] * ea).value();  // B_j e_a
                const cplx ak_a = (a_form[k] * ea).value();  // A_k e_a
                for (int b = 0; b < 2; ++b) {
                    const Vector4cd& eb = basis.vectors[b];
                    cplx ambient_term(0.0, 0.0);
                    for (int i = 0; i < 4; ++i)
                        ambient_term +=
                            std::conj(eb[i]) * h[i] * f_e1[j][k][i] * ea[i];
                    const cplx bk_b = (b_form[k] * eb).value();
                    const cplx aj_b = (a_form[j] * eb).value();
                    theta(b, a) = ambient_term - inv_bb * bj_a * std::conj(bk_b) +
                                  inv_aa * ak_a * std::conj(aj_b);
                }
            }
            out(j, k) = cplx(0.0, 1.0) * theta;
        }
    }
    out.update_symmetry_defect();
    return out;
}

// --- Finite-difference Chern oracle ------------------------------------------
//
// Independent route: take a holomorphic frame of ker(beta) projecting to a
// basis of the cohomology, form the induced metric Gram matrix through the
// ambient-orthogonal projection off im(alpha), and differentiate it twice.
// Frames differ from the harmonic frame by a gauge transform, so only
// gauge-invariant scalars are comparable between the two routes.

using HolomorphicFrame = std::function<FrameMatrix(const C3Point&)>;

namespace detail {

inline FrameMatrix project_off_alpha(const MonadSpec& spec, const C3Point& q,
                                     const FrameMatrix& f) {
    const Vector4cd a = spec.alpha(q);
    const Vector4d h = spec.ambient(q);
    const double aa = (a.cwiseAbs2().cwiseProduct(h)).sum();
    if (!(aa > kDegenerateFloor) || !std::isfinite(aa))
        throw DegeneratePointError("projection: alpha^dag alpha vanishes");
    const RowVector4cd a_dag = adjoint_of_column(a, h);
    FrameMatrix out;
    for (int c = 0; c < 2; ++c)
        out.col(c) = f.col(c) - a * ((a_dag * f.col(c)).value() / aa);
    return out;
}

inline Matrix2cd induced_gram(const MonadSpec& spec, const C3Point& q,
                              const HolomorphicFrame& frame) {
    const FrameMatrix pf = project_off_alpha(spec, q, frame(q));
    const Vector4d h = spec.ambient(q);
    return pf.adjoint() * h.cast<cplx>().asDiagonal() * pf;
}

}  // namespace detail

inline CurvatureTensor curvature_fd_oracle(const MonadSpec& spec, const C3Point& p,
                                           const HolomorphicFrame& frame,
                                           double step = 1e-3) {
    const int dim = spec.base_dim;
    auto gram = [&](const C3Point& q) -> Matrix2cd {
        return detail::induced_gram(spec, q, frame);
    };

    const Matrix2cd g0 = gram(p);
    const double norm_scale = (g0(0, 0) * g0(1, 1)).real();
    if (!(std::abs(g0.determinant()) > 1e-10 * std::max(norm_scale, kDegenerateFloor)))
        throw DegeneratePointError("fd oracle: frame degenerate near p");

    // Theta_jk = -dbar_k (G^-1 d_j G) in frame coordinates (columns).
    CurvatureTensor out(dim);
    for (int j = 0; j < dim; ++j) {
        auto connection_j = [&](const C3Point& q) -> Matrix2cd {
            const Matrix2cd g = gram(q);
            const Matrix2cd dg =
                wirtinger_partial(gram, q, j, Wirtinger::Holomorphic, step);
            return g.inverse() * dg;
        };
        for (int k = 0; k < dim; ++k) {
            const Matrix2cd theta =
                -wirtinger_partial(connection_j, p, k, Wirtinger::Antiholomorphic, step);
            out(j, k) = cplx(0.0, 1.0) * theta;
        }
    }

    // Express in the Gram-orthonormalized frame so norms read standardly;
    // this is a gauge transform within the same fiber.
    Eigen::LLT<Matrix2cd> llt(g0);
    if (llt.info() != Eigen::Success)
        throw DegeneratePointError("fd oracle: Gram not positive definite");
    const Matrix2cd lower = llt.matrixL();
    const Matrix2cd lt = lower.adjoint();  // G = L L^dag
    const Matrix2cd lt_inv = lt.inverse();
    for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k) out(j, k) = lt * out(j, k) * lt_inv;
    out.update_symmetry_defect();
    return out;
}

/// Default holomorphic frame for the oracle: parametrize ker(beta) by solving
/// for the coordinate whose beta-coefficient has largest modulus at the
/// center, then pick the generator pair whose projection has the best Gram
/// determinant there. The returned frame is holomorphic in q.
inline HolomorphicFrame pivot_frame(const MonadSpec& spec, const C3Point& center) {
    const RowVector4cd b0 = spec.beta(center);
    int piv = 0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(b0[i]) > std::abs(b0[piv])) piv = i;

    std::array<int, 3> gens{};
    int g = 0;
    for (int i = 0; i < 4; ++i)
        if (i != piv) gens[g++] = i;

    auto generator = [spec, piv](const C3Point& q, int i) -> Vector4cd {
        const RowVector4cd b = spec.beta(q);
        Vector4cd v = Vector4cd::Zero();
        v[i] = 1.0;
        v[piv] = -b[i] / b[piv];
        return v;
    };

    // Choose the best-conditioned generator pair at the center.
    double best = -1.0;
    std::array<int, 2> pick{gens[0], gens[1]};
    for (int u = 0; u < 3; ++u) {
        for (int v = u + 1; v < 3; ++v) {
            FrameMatrix f;
            f.col(0) = generator(center, gens[u]);
            f.col(1) = generator(center, gens[v]);
            try {
                const FrameMatrix pf = detail::project_off_alpha(spec, center, f);
                const Vector4d h = spec.ambient(center);
                const Matrix2cd gram =
                    pf.adjoint() * h.cast<cplx>().asDiagonal() * pf;
                const double score =
                    std::abs(gram.determinant()) /
                    std::max(kDegenerateFloor, (gram(0, 0) * gram(1, 1)).real());
                if (score > best) {
                    best = score;
                    pick = {gens[u], gens[v]};
                }
            } catch (const DegeneratePointError&) {
            }
        }
    }
    if (best < 1e-10)
        throw DegeneratePointError("pivot_frame: no nondegenerate generator pair");

    return [spec, generator, pick](const C3Point& q) -> FrameMatrix {
        FrameMatrix f;
        f.col(0) = generator(q, pick[0]);
        f.col(1) = generator(q, pick[1]);
        return f;
    };
}

}  // namespace hymlab::monad
