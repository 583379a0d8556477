#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "hymlab/curvature.hpp"
#include "hymlab/errors.hpp"
#include "hymlab/monad.hpp"
#include "hymlab/powerlaw.hpp"
#include "hymlab/quadrature.hpp"

namespace hymlab::adhm {

// Framed charge-1 instantons on C^2 from the monad
//   C --(x, y, a1, a2)^t--> C^4 --(-y, x, b1, b2)--> C
// with Euclidean ambient structure. The parameters satisfy the constraints
//   a1 b1 + a2 b2 = 0  and  |a1|^2 + |a2|^2 = |b1|^2 + |b2|^2 > 0.
struct ADHMData {
    cplx a1, a2, b1, b2;

    double scale_sq() const { return std::norm(a1) + std::norm(a2); }
    /// curvature scale ~ sqrt(|a1|^2 + |a2|^2)
    double curvature_scale() const { return std::sqrt(scale_sq()); }
};

struct Validation {
    bool valid = false;
    bool degenerate_zero = false;  // a = b = 0, a distinct flag, not valid data
    std::string reason;
    ADHMData data{};
};

inline Validation validate(cplx a1, cplx a2, cplx b1, cplx b2, double tol = 1e-12) {
    Validation out;
    const double scale = std::max(
        1.0, std::norm(a1) + std::norm(a2) + std::norm(b1) + std::norm(b2));
    if (std::abs(a1 * b1 + a2 * b2) > tol * scale) {
        out.reason = "ADHM constraint a1*b1+a2*b2=0 violated";
        return out;
    }
    const double na = std::norm(a1) + std::norm(a2);
    const double nb = std::norm(b1) + std::norm(b2);
    if (std::abs(na - nb) > tol * scale) {
        out.reason = "ADHM constraint |a|^2=|b|^2 violated";
        return out;
    }
    if (na + nb <= tol) {
        out.degenerate_zero = true;
        out.reason = "degenerate case a=b=0";
        return out;
    }
    out.valid = true;
    out.data = ADHMData{a1, a2, b1, b2};
    return out;
}

inline ADHMData require_valid(cplx a1, cplx a2, cplx b1, cplx b2) {
    const Validation v = validate(a1, a2, b1, b2);
    if (!v.valid) throw PreconditionError(v.reason);
    return v.data;
}

// --- Moduli map ---------------------------------------------------------------

/// Point of C^2_{u,v} / Z_2, (u,v) ~ (-u,-v). The canonical representative
/// makes the first nonzero of (u, v) have argument in [0, pi).
struct ModuliPoint {
    cplx u, v;
};

namespace detail {

inline bool needs_flip(cplx w) {
    const double arg = std::arg(w);
    // arg in [0, pi) kept; [-pi, 0) and exactly pi flipped.
    return arg < 0.0 || arg >= kPi - 1e-15;
}

}  // namespace detail

inline ModuliPoint canonical(ModuliPoint m, double tol = 1e-12) {
    const double scale = std::max(std::abs(m.u), std::abs(m.v));
    if (scale <= tol) return ModuliPoint{0.0, 0.0};
    const cplx lead = std::abs(m.u) > tol * scale ? m.u : m.v;
    if (detail::needs_flip(lead)) return ModuliPoint{-m.u, -m.v};
    return m;
}

inline bool same_point(const ModuliPoint& a, const ModuliPoint& b, double tol = 1e-9) {
    const ModuliPoint ca = canonical(a), cb = canonical(b);
    return std::abs(ca.u - cb.u) <= tol && std::abs(ca.v - cb.v) <= tol;
}

/// Moduli identification u^2 = a1 b2, v^2 = -a2 b1, uv = a1 b1. The branch of
/// u is principal; v is then forced by uv when u != 0, avoiding inconsistent
/// independent root choices.
inline ModuliPoint moduli_point(const ADHMData& d) {
    const cplx u2 = d.a1 * d.b2;
    const cplx v2 = -d.a2 * d.b1;
    const cplx uv = d.a1 * d.b1;

    const double scale = std::max({std::abs(u2), std::abs(v2), std::abs(uv), 1e-30});
    cplx u = std::sqrt(u2);
    cplx v;
    if (std::abs(u) > 1e-12 * std::sqrt(scale))
        v = uv / u;
    else
        v = std::sqrt(v2);

    // (uv)^2 = u^2 v^2 holds identically for valid data; anything else means
    // the inputs were corrupted.
    if (std::abs(uv * uv - u2 * v2) > 1e-9 * scale * scale)
        throw ComputeError("moduli_point: inconsistent square roots");
    if (std::abs(v * v - v2) > 1e-9 * scale)
        throw ComputeError("moduli_point: inconsistent square roots");
    return canonical(ModuliPoint{u, v});
}

// --- Curvature, ASD defect, charge --------------------------------------------

inline monad::MonadSpec instanton_monad(const ADHMData& d) {
    monad::MonadSpec spec;
    spec.base_dim = 2;
    spec.periodic = false;
    spec.alpha = [d](const C3Point& p) -> Vector4cd {
        Vector4cd a;
        a << p.x, p.y, d.a1, d.a2;
        return a;
    };
    spec.beta = [d](const C3Point& p) -> RowVector4cd {
        RowVector4cd b;
        b << -p.y, p.x, d.b1, d.b2;
        return b;
    };
    spec.ambient = [](const C3Point&) -> Vector4d { return Vector4d::Ones(); };
    return spec;
}

inline double fd_step(const ADHMData& d, const C3Point& p) {
    return 1e-3 * std::max(d.curvature_scale(), 0.5 * (std::abs(p.x) + std::abs(p.y)) + 1e-6);
}

inline CurvatureTensor instanton_curvature(const ADHMData& d, const C3Point& p) {
    return monad::curvature_lemma1(instanton_monad(d), p, fd_step(d, p));
}

/// |F^+| / |F|. On C^2 the self-dual part of a (1,1) curvature reduces to its
/// omega-component, so the defect is |Lambda F| / |F| up to normalization.
inline double asd_defect(const ADHMData& d, const C3Point& p) {
    const CurvatureTensor f = instanton_curvature(d, p);
    const double fnorm = std::sqrt(f.frobenius_sq());
    if (fnorm < 1e-14)
        throw ComputeError("asd_defect undefined: |F| vanishes");
    return lambda_trace(f).norm() / fnorm;
}

// --- Quadrature over R^4 = C^2 ------------------------------------------------
//
// Hopf coordinates: x = s cos(t) e^{i p1}, y = s sin(t) e^{i p2},
// dVol = s^3 cos(t) sin(t) ds dt dp1 dp2; t in [0, pi/2], phases in [0, 2 pi).

namespace detail {

template <class Density>
double shell_integral(const Density& f, double s_lo, double s_hi, int n_rad,
                      int n_ang) {
    static thread_local std::vector<std::pair<double, double>> gl_cache;
    static thread_local int gl_cache_n = -1;
    if (gl_cache_n != n_ang) {
        gl_cache = gauss_legendre(n_ang);
        gl_cache_n = n_ang;
    }
    const auto radial = gauss_legendre(n_rad);

    double acc = 0.0;
    for (const auto& [xr, wr] : radial) {
        const double s = 0.5 * (s_hi + s_lo) + 0.5 * (s_hi - s_lo) * xr;
        const double ws = 0.5 * (s_hi - s_lo) * wr;
        for (const auto& [xt, wt] : gl_cache) {
            const double t = 0.25 * kPi * (xt + 1.0);
            const double wtt = 0.25 * kPi * wt;
            // Phase averages: the integrands used here are invariant under
            // independent phase rotations of x and y (checked in tests), so
            // the phase integrals contribute (2 pi)^2 exactly.
            const double val = f(s * std::cos(t), s * std::sin(t));
            acc += ws * wtt * val * s * s * s * std::cos(t) * std::sin(t) *
                   (2.0 * kPi) * (2.0 * kPi);
        }
    }
    return acc;
}

}  // namespace detail

struct ChargeResult {
    double charge = 0.0;
    double energy = 0.0;  // int |F|^2 under the calibrated norm
    double tail_charge = 0.0;
    double tail_energy = 0.0;
};

/// (1/8 pi^2) int tr(F ^ F) over |p| < cutoff_radius plus an O(R^-4) tail
/// estimate fitted on the outermost annulus. Expected value 1 for valid data.
inline ChargeResult charge(const ADHMData& d, double cutoff_radius,
                           const NormConvention& nc = {}) {
    if (cutoff_radius < 20.0 * d.curvature_scale())
        throw PreconditionError("charge: cutoff radius below 20 curvature scales");

    auto charge_density_at = [&](double ax, double ay) {
        const C3Point p(cplx(ax, 0.0), cplx(ay, 0.0), 0.0);
        return charge_density(instanton_curvature(d, p));
    };
    auto energy_density_at = [&](double ax, double ay) {
        const C3Point p(cplx(ax, 0.0), cplx(ay, 0.0), 0.0);
        return norm_sq(instanton_curvature(d, p), nc);
    };

    // Geometric shells resolve the concentration scale; refinement must move
    // the total by < 1e-3 relative or the quadrature has not converged.
    const double s0 = 0.05 * d.curvature_scale();
    std::vector<double> edges{0.0, s0};
    while (edges.back() < cutoff_radius)
        edges.push_back(std::min(cutoff_radius, edges.back() * 1.6));

    ChargeResult out;
    double charge_coarse = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        out.charge += detail::shell_integral(charge_density_at, edges[i],
                                             edges[i + 1], 6, 6);
        out.energy += detail::shell_integral(energy_density_at, edges[i],
                                             edges[i + 1], 6, 6);
        charge_coarse += detail::shell_integral(charge_density_at, edges[i],
                                                edges[i + 1], 3, 4);
    }
    if (std::abs(out.charge - charge_coarse) > 1e-3 * std::max(1.0, std::abs(out.charge)))
        throw ComputeError("charge: quadrature not converged under refinement");

    // Far field: |F| ~ c rho^-4, so the charge/energy densities fall like
    // rho^-8; fit the constant on the last annulus and integrate the tail.
    const double s_fit = 0.5 * (edges[edges.size() - 2] + edges.back());
    const double q_fit = std::abs(charge_density_at(s_fit / std::sqrt(2.0),
                                                    s_fit / std::sqrt(2.0)));
    const double e_fit = energy_density_at(s_fit / std::sqrt(2.0),
                                           s_fit / std::sqrt(2.0));
    const double area_s3 = 2.0 * kPi * kPi;  // |S^3|
    // int_R^inf c rho^-8 rho^3 drho * |S^3| = c |S^3| / (4 R^4)
    out.tail_charge = q_fit * std::pow(s_fit, 8) * area_s3 /
                      (4.0 * std::pow(cutoff_radius, 4));
    out.tail_energy = e_fit * std::pow(s_fit, 8) * area_s3 /
                      (4.0 * std::pow(cutoff_radius, 4));
    out.charge += out.tail_charge;
    out.energy += out.tail_energy;
    return out;
}

}  // namespace hymlab::adhm
