#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "hymlab/adhm.hpp"
#include "hymlab/calibration.hpp"
#include "hymlab/errors.hpp"
#include "hymlab/monad.hpp"
#include "hymlab/point.hpp"

namespace hymlab::ansatz {

// Periodic construction on D_N = { |x|+|y| < N, |Im z| < N } in C^3/Z:
//   C --(x, y, eps^2, 0)^t--> C^4 --(-y, x, 0, sin z)--> C
// with ambient structure diag(eps^2/r, eps^2/r, 1, 1). Everything here feeds
// on one concrete choice of the weight r; the envelope constants downstream
// are tied to that choice.

// Operational smallness threshold for eps^2 e^N. 1/16 admits the whole
// desk-scale parameter matrix (N up to 3 with eps = 0.05) while keeping
// eps*r well below 1 inside D_N.
inline constexpr double kSmallness = 0.0625;

struct AnsatzParams {
    int N = 1;
    double epsilon = 0.01;

    double eps_sq_eN() const { return epsilon * epsilon * std::exp(double(N)); }
};

inline AnsatzParams make_params(int N, double epsilon) {
    if (N < 1) throw PreconditionError("AnsatzParams: N must be >= 1");
    if (!(epsilon > 0.0)) throw PreconditionError("AnsatzParams: epsilon must be > 0");
    AnsatzParams p{N, epsilon};
    if (p.eps_sq_eN() > kSmallness)
        throw PreconditionError("AnsatzParams: eps^2 e^N exceeds smallness threshold");
    return p;
}

// --- smooth cutoffs -----------------------------------------------------------

namespace detail {

inline double mollifier(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

/// 0 for t <= 0, 1 for t >= 1, C^inf monotone in between.
inline double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = mollifier(t);
    const double b = mollifier(1.0 - t);
    return a / (a + b);
}

/// == 1 for u <= lo, == 0 for u >= hi.
inline double cutoff(double u, double lo, double hi) {
    return smoothstep((hi - u) / (hi - lo));
}

inline double dist_to_pi_lattice(double re) {
    return std::abs(std::remainder(re, kPi));
}

// z-cutoff: 1 on {|Im z| <= 1/2, dist(Re z, pi Z) <= 1/2},
//           0 on {|Im z| >= 1 or dist(Re z, pi Z) >= 3/4}.
inline double phi_z(cplx z) {
    return cutoff(std::abs(z.imag()), 0.5, 1.0) *
           cutoff(dist_to_pi_lattice(z.real()), 0.5, 0.75);
}

// Saturating transverse profile: g(t) = t for t <= 1, == 2 for t >= 4.
// The saturation (rather than a plain cutoff of t) keeps r of order one at
// large |x|+|y| where sin z vanishes, which the middle-region bounds
// 1/10 <= r <= 10 require.
inline double g_sat(double t) {
    if (t <= 1.0) return t;
    const double s = smoothstep((t - 1.0) / 3.0);
    return t * (1.0 - s) + 2.0 * s;
}

}  // namespace detail

/// r^2 = phi_z(z) * g(|x|^2+|y|^2) + |sin z|^2. Wherever phi_z == 0 this is
/// |sin z|^2 bitwise, which downstream cancellation identities rely on.
inline double r_weight_sq(const C3Point& p) {
    const double t = std::norm(p.x) + std::norm(p.y);
    const double phi = detail::phi_z(p.z);
    const double sin_sq = std::norm(std::sin(p.z));
    if (phi == 0.0) return sin_sq;
    return phi * detail::g_sat(t) + sin_sq;
}

inline double r_weight(const C3Point& p) { return std::sqrt(r_weight_sq(p)); }

/// Curvature concentration scale: ell = |x| + |y| + eps |sin z|^{1/2}.
inline double ell(const C3Point& p, const AnsatzParams& params) {
    return std::abs(p.x) + std::abs(p.y) +
           params.epsilon * std::sqrt(std::abs(std::sin(p.z)));
}

/// Regularity-scale weight, uniformly equivalent to 1 / ell / r in the three
/// zones; seams are blended smoothly over a factor-2 window.
inline double rho_weight(const C3Point& p, const AnsatzParams& params) {
    const double r = r_weight(p);
    const double l = ell(p, params);
    const double e2 = params.epsilon * params.epsilon;
    // r <= eps^2 -> r; r >= 2 eps^2 -> ell.
    const double w = detail::smoothstep((r - e2) / e2);
    const double inner = (1.0 - w) * r + w * l;
    // saturate at 1: identity below 1/2, == 1 above 1.
    if (inner >= 1.0) return 1.0;
    const double s = detail::smoothstep((inner - 0.5) / 0.5);
    return inner + (1.0 - inner) * s;
}

// --- the monad ----------------------------------------------------------------

inline monad::MonadSpec build_ansatz_monad(const AnsatzParams& params) {
    const double eps = params.epsilon;
    monad::MonadSpec spec;
    spec.base_dim = 3;
    spec.periodic = true;
    spec.alpha = [eps](const C3Point& p) -> Vector4cd {
        Vector4cd a;
        a << p.x, p.y, eps * eps, 0.0;
        return a;
    };
    spec.beta = [](const C3Point& p) -> RowVector4cd {
        RowVector4cd b;
        b << -p.y, p.x, 0.0, std::sin(p.z);
        return b;
    };
    spec.ambient = [eps](const C3Point& p) -> Vector4d {
        const double w = eps * eps / r_weight(p);
        Vector4d h;
        h << w, w, 1.0, 1.0;
        return h;
    };
    return spec;
}

inline double fd_step(const C3Point& p, const AnsatzParams& params) {
    return 1e-3 * rho_weight(p, params);
}

/// |eps^4 r^-2 (alpha^dag alpha)^-1 - (beta beta^dag)^-1|, evaluated through
/// the algebraic form so that it vanishes bitwise where r^2 == |sin z|^2:
///   gap = eps^4 |sin^2 z - r^2| / ((t r + eps^2 r^2)(t r + eps^2 sin^2 z)),
/// t = |x|^2 + |y|^2 (both factors positive at nondegenerate points).
inline double cancellation_gap(const C3Point& p, const AnsatzParams& params) {
    const double e2 = params.epsilon * params.epsilon;
    const double t = std::norm(p.x) + std::norm(p.y);
    const double r2 = r_weight_sq(p);
    const double r = std::sqrt(r2);
    const double sin_sq = std::norm(std::sin(p.z));
    const double d1 = t * r + e2 * r2;
    const double d2 = t * r + e2 * sin_sq;
    if (!(d1 > 0.0) || !(d2 > 0.0))
        throw DegeneratePointError("cancellation_gap: degenerate point");
    return e2 * e2 * std::abs(sin_sq - r2) / (d1 * d2);
}

/// Mean curvature Lambda F_{h_0} of the ansatz metric (valid for r >= eps^2).
inline Matrix2cd mean_curvature_h0(const C3Point& p, const AnsatzParams& params) {
    if (r_weight(p) < params.epsilon * params.epsilon)
        throw PreconditionError("mean_curvature_h0: below the lemma's validity region");
    const auto f = monad::curvature_lemma1(build_ansatz_monad(params), p,
                                           fd_step(p, params));
    return lambda_trace(f);
}

inline CurvatureTensor curvature_h0(const C3Point& p, const AnsatzParams& params) {
    return monad::curvature_lemma1(build_ansatz_monad(params), p, fd_step(p, params));
}

// --- regions ------------------------------------------------------------------

enum class Region { Core, Glue, Concentrated, Flat };

/// Labels partition D_N up to factor-2 overlap windows at the boundaries;
/// points in a window carry both labels.
struct RegionLabel {
    Region primary = Region::Flat;
    bool core = false;
    bool glue = false;
    bool concentrated = false;
    bool flat = false;
    double r = 0.0, ell = 0.0, rho = 0.0;
};

inline RegionLabel region_classify(const C3Point& p, const AnsatzParams& params) {
    RegionLabel out;
    out.r = r_weight(p);
    out.ell = ell(p, params);
    out.rho = rho_weight(p, params);
    const double eps = params.epsilon;
    const double e2 = eps * eps;
    const double glue_r = 2.0 * std::pow(eps, 2.0 / 3.0);
    const double s = std::abs(p.x) + std::abs(p.y);
    const double tube = eps * std::sqrt(out.r);

    if (out.r <= e2) out.primary = Region::Core;
    else if (out.r <= glue_r) out.primary = Region::Glue;
    else if (s >= tube) out.primary = Region::Flat;
    else out.primary = Region::Concentrated;

    out.core = out.r <= 2.0 * e2;
    out.glue = out.r <= 2.0 * glue_r;
    out.concentrated = out.r > glue_r && s <= 2.0 * tube;
    out.flat = out.r > glue_r && s >= tube;
    return out;
}

// --- estimate envelopes ---------------------------------------------------------
//
// Piecewise upper-bound functions standing in for the glued metric h_1 (and,
// inside the glue/core region, for the model metric whose exact form is out
// of reach here). In r > 2 eps^{2/3} the gluing bump vanishes, h_1 == h_0,
// and the bounds carry the calibrated constants; inside they carry env_inner.

struct EnvelopeBounds {
    double mean_bound = 0.0;       // upper bound for |nabla^k Lambda F_{h_1}|
    double curvature_bound = 0.0;  // upper bound for |nabla^k F_{h_1}|
};

inline EnvelopeBounds envelope_h1(const C3Point& p, const AnsatzParams& params,
                                  int k = 0, const Calibration& cal = {}) {
    const double eps = params.epsilon;
    const double e2 = eps * eps;
    const double e23 = std::pow(eps, 2.0 / 3.0);
    const double r = r_weight(p);
    const double l = ell(p, params);
    const double rho = rho_weight(p, params);
    const double lg = std::max(1.0, std::log(r / l));

    EnvelopeBounds out;
    if (r <= e2) {
        out.mean_bound = cal.env_inner * std::pow(r, -double(k));
        out.curvature_bound = cal.env_inner * std::pow(r, -2.0 - k);
    } else if (r <= e23) {
        out.mean_bound = cal.env_inner * r * r * std::pow(l, -2.0 - k);
        out.curvature_bound = cal.env_inner * e2 * r * std::pow(l, -4.0 - k);
    } else if (r <= 2.0 * e23) {
        out.mean_bound = cal.env_inner * e2 * std::pow(l, -2.0 - k) / r * lg;
        out.curvature_bound = cal.env_inner * e2 * r * std::pow(l, -4.0 - k);
    } else {
        const double radial = r >= 1.0 / 3.0 ? r : 1.0 / r;
        const double c_mean = k == 0 ? cal.env_mean : cal.env_mean_k1;
        out.mean_bound = c_mean * e2 * radial / (l * l) * std::pow(rho, -double(k));
        out.curvature_bound = cal.env_curv * e2 * r *
                              std::max(std::pow(l, -4.0), std::pow(l, -2.0)) *
                              std::pow(rho, -double(k));
    }
    return out;
}

// --- region-III twisted local monads -------------------------------------------

/// Local model near (0, 0, zeta): after the U(1) twist and basis rescaling the
/// monad has constant third/fourth entries eps sin^{1/2}(zeta) and the ambient
/// structure diag(1, 1, r/|sin zeta|, |sin zeta| r / |sin z|^2), which is
/// exactly Euclidean at the center when |Im zeta| > 1.
struct TwistedMonad {
    monad::MonadSpec spec;
    adhm::ADHMData reference;  // moduli point (eps sin^{1/2} zeta, 0)
    cplx sqrt_sin_zeta;        // principal branch, recorded
};

inline TwistedMonad twisted_local_monad(cplx zeta, const AnsatzParams& params) {
    const cplx sz = std::sin(zeta);
    if (std::abs(sz) < 1e-14)
        throw DegeneratePointError("twisted_local_monad: zero bubble parameter (sin zeta = 0)");
    const C3Point center(0.0, 0.0, zeta, true);
    if (r_weight(center) <= 2.0 * std::pow(params.epsilon, 2.0 / 3.0))
        throw PreconditionError("twisted_local_monad: center inside the glue region");

    const cplx sq = std::sqrt(sz);  // principal branch
    const cplx param = params.epsilon * sq;
    const double abs_sz = std::abs(sz);

    TwistedMonad out;
    out.sqrt_sin_zeta = sq;
    out.reference = adhm::ADHMData{param, 0.0, 0.0, param};
    out.spec.base_dim = 3;
    out.spec.periodic = true;
    out.spec.alpha = [param](const C3Point& p) -> Vector4cd {
        Vector4cd a;
        a << p.x, p.y, param, 0.0;
        return a;
    };
    out.spec.beta = [param](const C3Point& p) -> RowVector4cd {
        RowVector4cd b;
        b << -p.y, p.x, 0.0, param;
        return b;
    };
    out.spec.ambient = [abs_sz](const C3Point& p) -> Vector4d {
        const double r = r_weight(p);
        const double sin_sq = std::norm(std::sin(p.z));
        Vector4d h;
        h << 1.0, 1.0, r / abs_sz, abs_sz * r / sin_sq;
        return h;
    };
    return out;
}

}  // namespace hymlab::ansatz
