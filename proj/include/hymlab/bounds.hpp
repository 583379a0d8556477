#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hymlab/ansatz.hpp"
#include "hymlab/calibration.hpp"
#include "hymlab/parallel.hpp"
#include "hymlab/powerlaw.hpp"
#include "hymlab/rng.hpp"

namespace hymlab::bounds {

// Verification machinery for the mean-curvature and curvature estimates on
// the exactly computable region r > 2 eps^{2/3} (where the glued metric
// coincides with the ansatz metric): measured/bound suprema, envelope
// calibration, and log-log exponent fits along one-parameter slices.

/// Bound forms without constants; the calibrated envelope multiplies these.
inline double mean_bound_form(const C3Point& p, const ansatz::AnsatzParams& params,
                              int k = 0) {
    const double e2 = params.epsilon * params.epsilon;
    const double r = ansatz::r_weight(p);
    const double l = ansatz::ell(p, params);
    const double rho = ansatz::rho_weight(p, params);
    const double radial = r >= 1.0 / 3.0 ? r : 1.0 / r;
    return e2 * radial / (l * l) * std::pow(rho, -double(k));
}

inline double curvature_bound_form(const C3Point& p, const ansatz::AnsatzParams& params,
                                   int k = 0) {
    const double e2 = params.epsilon * params.epsilon;
    const double r = ansatz::r_weight(p);
    const double l = ansatz::ell(p, params);
    const double rho = ansatz::rho_weight(p, params);
    return e2 * r * std::max(std::pow(l, -4.0), std::pow(l, -2.0)) *
           std::pow(rho, -double(k));
}

/// Deterministic stratified sample of {r > 2 eps^{2/3}} inside D_N: log-spaced
/// heights against log-spaced transverse offsets, covering the concentrated
/// tube, the cutoff transition bands of the weight r (where the constants
/// peak), and the flat bulk.
inline std::vector<C3Point> stratified_points(const ansatz::AnsatzParams& params,
                                              int count, std::uint64_t seed) {
    const double eps = params.epsilon;
    const double glue_r = 2.0 * std::pow(eps, 2.0 / 3.0);
    CounterRng rng(seed, 99);
    std::vector<C3Point> pts;
    pts.reserve(count);
    int guard = 0;
    while (static_cast<int>(pts.size()) < count && guard < 100 * count) {
        ++guard;
        cplx z;
        const double mode = rng.uniform();
        if (mode < 0.25) {
            // transition band of the Re z cutoff, both signs around pi Z
            const double d = rng.uniform(0.40, 0.85);
            const double base = rng.uniform() < 0.5 ? 0.0 : kPi;
            const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
            z = cplx(base + sign * d, rng.uniform(-1.1, 1.1));
        } else if (mode < 0.55) {
            z = cplx(rng.uniform(-kPi, kPi), rng.uniform(-1.0, 1.0));
        } else {
            z = cplx(rng.uniform(-kPi, kPi),
                     (rng.uniform() < 0.5 ? -1.0 : 1.0) *
                         rng.uniform(1.0, 0.95 * params.N));
        }
        const double r0 = ansatz::r_weight(C3Point(0, 0, z, true));
        // transverse offset log-spaced from deep inside the tube to the bulk
        const double tube = eps * std::sqrt(std::max(r0, 1e-12));
        const double s_lo = 0.05 * tube;
        const double s_hi = 0.9 * params.N;
        const double s = s_lo * std::pow(s_hi / s_lo, rng.uniform());
        const double frac = rng.uniform();
        const C3Point p(s * frac, s * (1.0 - frac), z, true);
        if (ansatz::r_weight(p) <= glue_r) continue;
        if (std::abs(p.x) + std::abs(p.y) >= params.N) continue;
        pts.push_back(p);
    }
    return pts;
}

/// |grad |Lambda F_{h_0}|| by central differences over the six real
/// directions; a gauge-invariant surrogate for the first covariant
/// derivative (Kato: |grad |T|| <= |nabla T|, with comparable magnitude away
/// from critical points).
inline double mean_curvature_gradient_norm(const C3Point& p,
                                           const ansatz::AnsatzParams& params) {
    const double h = 1e-3 * ansatz::rho_weight(p, params);
    auto value = [&](const C3Point& q) {
        return ansatz::mean_curvature_h0(q, params).norm();
    };
    double acc = 0.0;
    for (int var = 0; var < 3; ++var) {
        for (cplx dir : {cplx(1, 0), cplx(0, 1)}) {
            const double d =
                (value(p.offset(var, dir * h)) - value(p.offset(var, -dir * h))) /
                (2.0 * h);
            acc += d * d;
        }
    }
    return std::sqrt(acc);
}

struct SupMeasurement {
    double sup_mean_k0 = 0.0;
    double sup_mean_k1 = 0.0;
    double sup_curv_k0 = 0.0;
    int samples = 0;
};

inline SupMeasurement measure_sups(const ansatz::AnsatzParams& params,
                                   const std::vector<C3Point>& pts,
                                   bool with_gradient = false, int workers = 0) {
    struct Row {
        double m0 = 0.0, m1 = 0.0, c0 = 0.0;
    };
    std::vector<Row> rows(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        const C3Point& p = pts[i];
        const auto f = ansatz::curvature_h0(p, params);
        rows[i].m0 = lambda_trace(f).norm() / mean_bound_form(p, params, 0);
        rows[i].c0 = std::sqrt(norm_sq(f)) / curvature_bound_form(p, params, 0);
        if (with_gradient && i % 2 == 0)
            rows[i].m1 = mean_curvature_gradient_norm(p, params) /
                         mean_bound_form(p, params, 1);
    }, workers);

    SupMeasurement out;
    out.samples = static_cast<int>(pts.size());
    for (const auto& r : rows) {
        out.sup_mean_k0 = std::max(out.sup_mean_k0, r.m0);
        out.sup_mean_k1 = std::max(out.sup_mean_k1, r.m1);
        out.sup_curv_k0 = std::max(out.sup_curv_k0, r.c0);
    }
    return out;
}

// --- calibration ----------------------------------------------------------------

struct CalibrationOptions {
    std::vector<std::pair<int, double>> matrix = {
        {1, 0.05}, {2, 0.05}, {3, 0.05}, {1, 0.02}, {2, 0.02}, {3, 0.02}, {2, 0.01}};
    // Calibration must over-sample relative to verification runs: the
    // envelope is a supremum estimate and max statistics grow with the sample.
    int samples_per_cell = 700;
    std::uint64_t seed = 7;
    int workers = 0;
};

/// Pins c_norm from the charge-1 instanton energy (norm-free charge breaks
/// the circularity) and the envelope constants as 2x the measured suprema
/// over the exactly computable region, across the desk-scale matrix.
Calibration calibrate(const CalibrationOptions& opt = {});

inline Calibration calibrate_impl(const CalibrationOptions& opt) {
    Calibration cal;

    // c_norm: energy of the unit charge-1 instanton under c_norm = 1.
    {
        const auto d = adhm::require_valid(1.0, 0.0, 0.0, 1.0);
        const auto cr = adhm::charge(d, 50.0, NormConvention{1.0});
        cal.c_norm = 8.0 * kPi * kPi * cr.charge / cr.energy;
    }

    double sup_mean = 0.0, sup_mean_k1 = 0.0, sup_curv = 0.0;
    for (auto [n, eps] : opt.matrix) {
        ansatz::AnsatzParams params;
        try {
            params = ansatz::make_params(n, eps);
        } catch (const PreconditionError&) {
            continue;
        }
        const auto pts = stratified_points(params, opt.samples_per_cell, opt.seed);
        const auto sup = measure_sups(params, pts, true, opt.workers);
        sup_mean = std::max(sup_mean, sup.sup_mean_k0);
        sup_mean_k1 = std::max(sup_mean_k1, sup.sup_mean_k1);
        sup_curv = std::max(sup_curv, sup.sup_curv_k0);
    }
    cal.env_mean = 2.0 * sup_mean;
    cal.env_mean_k1 = 2.0 * sup_mean_k1;
    cal.env_curv = 2.0 * sup_curv;
    cal.env_inner = 10.0;
    cal.source = "calibrated";
    cal.file_hash = fnv1a(serialize(cal));
    return cal;
}

inline Calibration calibrate(const CalibrationOptions& opt) { return calibrate_impl(opt); }

// --- exponent fits ----------------------------------------------------------------

struct SliceFit {
    std::string name;
    double expected_exponent = 0.0;
    double tolerance = 0.15;
    PowerLawFit fit;
    bool pass = false;
};

namespace detail {

inline SliceFit make_fit(std::string name, double expected,
                         const std::vector<std::pair<double, double>>& samples,
                         double tol = 0.15) {
    SliceFit out;
    out.name = std::move(name);
    out.expected_exponent = expected;
    out.tolerance = tol;
    out.fit = fit_power_law(samples);
    out.pass = std::abs(out.fit.exponent - expected) <= tol;
    return out;
}

}  // namespace detail

/// Log-log fits along one-parameter slices recovering the predicted
/// exponents: -2 in ell, +1 and -1 in r, -k in rho (via the composite
/// ell-exponent -2-k where rho ~ ell). r-slices compensate the residual
/// drift of ell along the slice by fitting measured * ell^2 against r; the
/// ell-exponent itself is pinned independently by the ell-slices.
inline std::vector<SliceFit> exponent_fits(const ansatz::AnsatzParams& params,
                                           int workers = 0) {
    const double eps = params.epsilon;
    std::vector<SliceFit> out;

    // ell-slice at fixed height with r ~ 1, crossing region III into II as
    // ell grows. The estimate is pointwise, so the slice is allowed to run
    // across the periodic slab past |x|+|y| = N.
    {
        const cplx z(0.5, 1.2);
        const double l0 = eps * std::sqrt(std::abs(std::sin(z)));
        const int n = 10;
        std::vector<std::pair<double, double>> k0(n);
        parallel_for(n, [&](std::size_t i) {
            const double s = 4.0 * l0 * std::pow(1.55, double(i));
            const C3Point q(0.5 * s, 0.5 * s, z, true);
            k0[i] = {ansatz::ell(q, params),
                     ansatz::mean_curvature_h0(q, params).norm()};
        }, workers);
        out.push_back(detail::make_fit("mean k=0: ell-slice at r~1", -2.0, k0));
    }

    // k=1 ell-slice on the strip Re z = pi/4 (where r == |sin z| identically),
    // capped at ell ~ 0.7 so the regularity weight stays rho = ell throughout.
    {
        const cplx z(0.25 * kPi, 0.0);
        const double l0 = eps * std::sqrt(std::abs(std::sin(z)));
        const int n = 9;
        std::vector<std::pair<double, double>> k1(n);
        parallel_for(n, [&](std::size_t i) {
            const double s =
                4.0 * l0 * std::pow(0.7 / (4.0 * l0), double(i) / (n - 1));
            const C3Point q(0.5 * s, 0.5 * s, z, true);
            k1[i] = {ansatz::ell(q, params),
                     mean_curvature_gradient_norm(q, params)};
        }, workers);
        out.push_back(
            detail::make_fit("mean k=1: ell-slice at r~0.7 (rho~ell)", -3.0, k1));
    }

    // r-slice, outer branch r >= 1/3: slope +1. Heights on the strip
    // Re z = pi/4 where the weight equals |sin z| identically (so the
    // cancellation is exact and the residual curvature scales cleanly),
    // sweeping Im z through what |Im z| < N admits.
    {
        const double s0 = 0.35;
        const double im_max = 0.93 * params.N;
        const int n = 9;
        std::vector<std::pair<double, double>> samples(n);
        parallel_for(n, [&](std::size_t i) {
            const cplx z(0.25 * kPi, 0.3 + (im_max - 0.3) * double(i) / (n - 1));
            const C3Point q(0.5 * s0, 0.5 * s0, z, true);
            const double l = ansatz::ell(q, params);
            samples[i] = {ansatz::r_weight(q),
                          ansatz::mean_curvature_h0(q, params).norm() * l * l /
                              (eps * eps)};
        }, workers);
        out.push_back(detail::make_fit("mean k=0: r-slice, r >= 1/3", 1.0, samples));
    }

    // r-slice in the inner branch eps^2 << r < 1/3: slope -1. The height is
    // frozen (so the cos z factor in nabla beta cannot masquerade as an
    // r-power) and r sweeps through the transverse offset.
    {
        const double sin_z = 0.02;
        const cplx z(std::asin(sin_z), 0.0);
        const double s_lo = 3.0 * sin_z * std::sqrt(2.0), s_hi = 0.45;
        const int n = 9;
        std::vector<std::pair<double, double>> samples(n);
        parallel_for(n, [&](std::size_t i) {
            const double s = s_lo * std::pow(s_hi / s_lo, double(i) / (n - 1));
            const C3Point q(0.5 * s, 0.5 * s, z, true);
            const double l = ansatz::ell(q, params);
            samples[i] = {ansatz::r_weight(q),
                          ansatz::mean_curvature_h0(q, params).norm() * l * l /
                              (eps * eps)};
        }, workers);
        out.push_back(detail::make_fit("mean k=0: r-slice, eps^2 < r < 1/3", -1.0, samples));
    }

    return out;
}

}  // namespace hymlab::bounds
