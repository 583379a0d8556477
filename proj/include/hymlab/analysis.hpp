#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hymlab/adhm.hpp"
#include "hymlab/ansatz.hpp"
#include "hymlab/calibration.hpp"
#include "hymlab/errors.hpp"
#include "hymlab/parallel.hpp"
#include "hymlab/powerlaw.hpp"

namespace hymlab::analysis {

// --- slice energies -------------------------------------------------------------
//
// The pointwise energy density of the ansatz is invariant under independent
// phase rotations of x and y (the rotations act by constant diagonal unitaries
// commuting with the ambient structure), so 4-plane integrals reduce to the
// moduli plane (|x|, |y|) with weight (2 pi)^2 |x| |y|.

struct EnergySlice {
    cplx zeta;
    double energy = 0.0;
    double quadrature_error = 0.0;
    double excluded_core_radius = 0.0;
};

struct SliceOptions {
    int theta_nodes = 8;
    int radial_gl = 4;
    double radial_factor = 1.7;
    int workers = 0;
};

namespace detail {

struct SliceQuadrature {
    double total = 0.0;
    double concentrated = 0.0;  // portion with |x|+|y| <= 2 eps r^{1/2}
    double error = 0.0;
};

template <class Density>
SliceQuadrature slice_integral(const Density& f, cplx zeta,
                               const ansatz::AnsatzParams& params, double core_radius,
                               const SliceOptions& opt) {
    const double n_dom = params.N;
    const double ell0 =
        std::max(ansatz::ell(C3Point(0, 0, zeta, true), params), 1e-4 * params.epsilon);
    const auto theta = gauss_legendre(opt.theta_nodes);

    struct Contribution {
        double full = 0.0, conc = 0.0, half = 0.0;
    };
    std::vector<Contribution> per_theta(theta.size());

    parallel_for(theta.size(), [&](std::size_t ti) {
        const double t = 0.25 * kPi * (theta[ti].first + 1.0);
        const double wt = 0.25 * kPi * theta[ti].second;
        const double ct = std::cos(t), st = std::sin(t);
        const double sigma_max = n_dom / (ct + st);

        // Geometric radial panels concentrated at the bubble scale ell0.
        std::vector<double> edges{std::min(core_radius, sigma_max)};
        if (edges[0] < ell0 / 8.0 && ell0 / 8.0 < sigma_max)
            edges.push_back(ell0 / 8.0);
        while (edges.back() < sigma_max)
            edges.push_back(std::min(sigma_max, std::max(edges.back() * opt.radial_factor,
                                                         ell0 / 8.0)));

        auto panel = [&](double lo, double hi, int n_gl, Contribution& c) {
            const auto nodes = gauss_legendre(n_gl);
            for (const auto& [xs, ws] : nodes) {
                const double sigma = 0.5 * (hi + lo) + 0.5 * (hi - lo) * xs;
                const double w = 0.5 * (hi - lo) * ws;
                const double s1 = sigma * ct, s2 = sigma * st;
                const double val = f(s1, s2);
                const double weight = w * wt * std::pow(2.0 * kPi, 2) * sigma * sigma *
                                      sigma * ct * st;
                c.full += weight * val;
                const C3Point q(s1, s2, zeta, true);
                if (s1 + s2 <= 2.0 * params.epsilon * std::sqrt(ansatz::r_weight(q)))
                    c.conc += weight * val;
            }
        };

        Contribution c;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i)
            panel(edges[i], edges[i + 1], opt.radial_gl, c);
        // Halved radial resolution for the Richardson error estimate.
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            Contribution tmp;
            panel(edges[i], edges[i + 1], std::max(2, opt.radial_gl / 2), tmp);
            c.half += tmp.full;
        }
        per_theta[ti] = c;
    }, opt.workers);

    SliceQuadrature out;
    double half = 0.0;
    for (const auto& c : per_theta) {
        out.total += c.full;
        out.concentrated += c.conc;
        half += c.half;
    }
    out.error = std::abs(out.total - half);
    return out;
}

}  // namespace detail

/// L^2 energy of the ansatz curvature on the 4-plane {z = zeta, |x|+|y| < N},
/// optionally excluding |(x,y)| < core_radius (needed when the slice crosses
/// the glue ball).
inline EnergySlice slice_energy(cplx zeta, const ansatz::AnsatzParams& params,
                                double core_radius = 0.0, const Calibration& cal = {},
                                const SliceOptions& opt = {}) {
    const C3Point center(0, 0, zeta, true);
    const double glue_r = 2.0 * std::pow(params.epsilon, 2.0 / 3.0);
    if (ansatz::r_weight(center) <= glue_r && core_radius <= 0.0)
        throw PreconditionError(
            "slice_energy: slice crosses the glue ball; pass a core exclusion radius");

    const auto spec = ansatz::build_ansatz_monad(params);
    const NormConvention nc = cal.norm();
    auto density = [&](double s1, double s2) -> double {
        const C3Point q(s1, s2, zeta, true);
        return norm_sq(monad::curvature_lemma1(spec, q, ansatz::fd_step(q, params)), nc);
    };
    const auto quad = detail::slice_integral(density, zeta, params, core_radius, opt);

    EnergySlice out;
    out.zeta = zeta;
    out.energy = quad.total;
    out.quadrature_error = quad.error;
    out.excluded_core_radius = core_radius;
    return out;
}

// --- total energy over D_N -------------------------------------------------------

struct TotalEnergy {
    double total = 0.0;
    double concentrated = 0.0;    // portion from the concentration stratum
    double glue_envelope = 0.0;   // envelope bound integral over the glue balls
    double quadrature_error = 0.0;
    std::vector<EnergySlice> slices;
};

namespace detail {

// Envelope-bound contribution int |F|^2 over {r <= 2 eps^{2/3}}: a 4D grid in
// (|x|, |y|, Re z, Im z) around each singular point, weight (2 pi)^2 |x||y|.
inline double glue_envelope_energy(const ansatz::AnsatzParams& params,
                                   const Calibration& cal) {
    const double eps = params.epsilon;
    const double glue_r = 2.0 * std::pow(eps, 2.0 / 3.0);
    const double lim = 1.2 * glue_r;
    const int n = 14;
    double acc = 0.0;
    for (double zc : {0.0, kPi}) {
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2)
                for (int j1 = 0; j1 < n; ++j1)
                    for (int j2 = 0; j2 < n; ++j2) {
                        const double s1 = (i1 + 0.5) / n * lim;
                        const double s2 = (i2 + 0.5) / n * lim;
                        const double zr = zc + (j1 + 0.5 - 0.5 * n) / n * 2.0 * lim;
                        const double zi = (j2 + 0.5 - 0.5 * n) / n * 2.0 * lim;
                        const C3Point q(s1, s2, cplx(zr, zi), true);
                        if (ansatz::r_weight(q) > glue_r) continue;
                        const double b =
                            ansatz::envelope_h1(q, params, 0, cal).curvature_bound;
                        const double cell = (lim / n) * (lim / n) *
                                            (2.0 * lim / n) * (2.0 * lim / n);
                        acc += std::pow(2.0 * kPi, 2) * s1 * s2 * b * b * cell;
                    }
    }
    return acc;
}

}  // namespace detail

/// Energy over D_N: trapezoid in (Re z, Im z) of slice energies plus the
/// envelope contribution of the glue balls. slice_count is the number of
/// z-grid nodes per dimension.
inline TotalEnergy total_energy(const ansatz::AnsatzParams& params, int slice_count,
                                const Calibration& cal = {}, const SliceOptions& opt = {}) {
    if (slice_count < 3) throw PreconditionError("total_energy: slice_count < 3");
    const double n_dom = params.N;
    const double glue_r = 2.0 * std::pow(params.epsilon, 2.0 / 3.0);
    const auto spec = ansatz::build_ansatz_monad(params);
    const NormConvention nc = cal.norm();

    struct Node {
        cplx zeta;
        double weight = 0.0;
    };
    std::vector<Node> nodes;
    const int m = slice_count;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const double re = -kPi + 2.0 * kPi * i / (m - 1);
            const double im = -n_dom + 2.0 * n_dom * j / (m - 1);
            double w = (2.0 * kPi / (m - 1)) * (2.0 * n_dom / (m - 1));
            if (i == 0 || i == m - 1) w *= 0.5;
            if (j == 0 || j == m - 1) w *= 0.5;
            nodes.push_back({cplx(re, im), w});
        }
    }

    TotalEnergy out;
    out.slices.resize(nodes.size());
    std::vector<detail::SliceQuadrature> quads(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t i) {
        const cplx zeta = nodes[i].zeta;
        const C3Point center(0, 0, zeta, true);
        // Slices crossing the glue ball integrate outside it; the envelope
        // term below covers the excluded core.
        const double core =
            ansatz::r_weight(center) <= 2.0 * glue_r ? 2.0 * glue_r : 0.0;
        auto density = [&](double s1, double s2) -> double {
            const C3Point q(s1, s2, zeta, true);
            return norm_sq(monad::curvature_lemma1(spec, q, ansatz::fd_step(q, params)),
                           nc);
        };
        quads[i] = detail::slice_integral(density, zeta, params, core, opt);
        out.slices[i] =
            EnergySlice{zeta, quads[i].total, quads[i].error, core};
    }, opt.workers);

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        out.total += nodes[i].weight * quads[i].total;
        out.concentrated += nodes[i].weight * quads[i].concentrated;
        out.quadrature_error += nodes[i].weight * quads[i].error;
    }
    out.glue_envelope = detail::glue_envelope_energy(params, cal);
    out.total += out.glue_envelope;
    return out;
}

// --- transverse bubbles -----------------------------------------------------------

struct BubbleComparison {
    cplx zeta;
    std::vector<double> epsilons;
    std::vector<double> sup_differences;  // sup |  |F_resc|^2 - |F_ADHM|^2 | / peak
    adhm::ModuliPoint reference;          // moduli of the comparison instanton
};

/// Rescale by lambda_{zeta,eps}: v -> (0,0,zeta) + eps v and compare |F|^2 of
/// the ansatz against the reference instanton of the twisted local monad
/// (pulled back trivially in the third direction) on a fixed grid in the
/// rescaled ball of radius 3.
inline BubbleComparison bubble_compare(cplx zeta,
                                       const std::vector<ansatz::AnsatzParams>& lst,
                                       const Calibration& cal = {}, int workers = 0) {
    if (std::abs(std::sin(zeta)) < 1e-14)
        throw DegeneratePointError("bubble_compare: degenerate bubble (sin zeta = 0)");

    // Reference instanton in rescaled coordinates: moduli (sin^{1/2} zeta, 0).
    const cplx sq = std::sqrt(std::sin(zeta));
    const adhm::ADHMData ref{sq, 0.0, 0.0, sq};
    const NormConvention nc = cal.norm();

    // Fixed grid: radii in the moduli plane plus a few transverse offsets.
    struct GridPoint {
        double s1, s2;
        cplx v3;
    };
    std::vector<GridPoint> grid;
    const std::vector<cplx> v3s = {cplx(0, 0), cplx(1.2, 0), cplx(-1.2, 0),
                                   cplx(0, 1.2), cplx(0, -1.2)};
    for (double s1 : {0.0, 0.6, 1.2, 1.8, 2.4})
        for (double s2 : {0.0, 0.6, 1.2, 1.8, 2.4})
            for (const cplx& v3 : v3s)
                if (s1 * s1 + s2 * s2 + std::norm(v3) <= 9.0)
                    grid.push_back({s1, s2, v3});

    std::vector<double> ref_density(grid.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const C3Point v(grid[i].s1, grid[i].s2, 0.0);
        ref_density[i] = norm_sq(adhm::instanton_curvature(ref, v), nc);
        peak = std::max(peak, ref_density[i]);
    }

    BubbleComparison out;
    out.zeta = zeta;
    out.reference = adhm::moduli_point(ref);
    out.epsilons.reserve(lst.size());
    out.sup_differences.assign(lst.size(), 0.0);
    for (const auto& params : lst) out.epsilons.push_back(params.epsilon);

    parallel_for(lst.size(), [&](std::size_t pi) {
        const auto& params = lst[pi];
        const auto spec = ansatz::build_ansatz_monad(params);
        const double eps = params.epsilon;
        double sup = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const C3Point q(eps * grid[i].s1, eps * grid[i].s2,
                            zeta + eps * grid[i].v3, true);
            const double rescaled =
                std::pow(eps, 4) *
                norm_sq(monad::curvature_lemma1(spec, q, ansatz::fd_step(q, params)), nc);
            sup = std::max(sup, std::abs(rescaled - ref_density[i]) / peak);
        }
        out.sup_differences[pi] = sup;
    }, workers);
    return out;
}

// --- Fueter map and singular points ------------------------------------------------

/// zeta -> (sin^{1/2}(N zeta), 0) in C^2/Z_2; the quotient makes the branch
/// immaterial.
inline adhm::ModuliPoint fueter_map(cplx zeta, int n) {
    return adhm::canonical(adhm::ModuliPoint{std::sqrt(std::sin(double(n) * zeta)), 0.0});
}

/// Number of zeros of the rescaled Fueter map in B_{1/2}: integers k with
/// |pi k / N| < 1/2, by direct enumeration.
inline int singular_count(int n) {
    if (n < 1) throw PreconditionError("singular_count: N >= 1");
    int count = 1;  // k = 0
    for (int k = 1; kPi * k / n < 0.5; ++k) count += 2;
    return count;
}

// --- Theorem-level report -----------------------------------------------------------

struct TheoremReport {
    int N = 0;
    double epsilon = 0.0;
    double total_energy = 0.0;
    double b1_energy = 0.0;  // total * N^-2 * (copies = c N)
    double copy_constant = 1.0;
    int singular_points = 0;
    double per_slice_mean = 0.0;
    double per_slice_spread = 0.0;  // max/min over interior slices
    double concentrated_fraction = 0.0;
    double glue_fraction = 0.0;
};

inline TheoremReport rescale_to_unit_ball(const ansatz::AnsatzParams& params,
                                          int slice_count, const Calibration& cal = {},
                                          double copy_constant = 1.0,
                                          const SliceOptions& opt = {}) {
    const TotalEnergy te = total_energy(params, slice_count, cal, opt);
    TheoremReport rep;
    rep.N = params.N;
    rep.epsilon = params.epsilon;
    rep.total_energy = te.total;
    rep.copy_constant = copy_constant;
    rep.b1_energy = te.total / (params.N * params.N) * (copy_constant * params.N);
    rep.singular_points = singular_count(params.N);
    rep.concentrated_fraction = te.concentrated / te.total;
    rep.glue_fraction = te.glue_envelope / te.total;

    double mean = 0.0, lo = 0.0, hi = 0.0;
    int n_interior = 0;
    for (const auto& s : te.slices) {
        if (s.excluded_core_radius > 0.0) continue;
        mean += s.energy;
        if (n_interior == 0) lo = hi = s.energy;
        lo = std::min(lo, s.energy);
        hi = std::max(hi, s.energy);
        ++n_interior;
    }
    if (n_interior > 0) {
        rep.per_slice_mean = mean / n_interior;
        rep.per_slice_spread = lo > 0.0 ? hi / lo : 0.0;
    }
    return rep;
}

struct TheoremSuite {
    std::vector<TheoremReport> reports;
    double uniformity = 0.0;  // max/min of B1 energies
    bool pass_energy_uniform = false;
    bool pass_singular_count = false;
};

inline TheoremSuite theorem_suite(const std::vector<ansatz::AnsatzParams>& matrix,
                                  int slice_count, const Calibration& cal = {},
                                  double copy_constant = 1.0, const SliceOptions& opt = {},
                                  double uniformity_band = 1.3) {
    TheoremSuite suite;
    for (const auto& params : matrix)
        suite.reports.push_back(
            rescale_to_unit_ball(params, slice_count, cal, copy_constant, opt));

    double lo = suite.reports.front().b1_energy, hi = lo;
    for (const auto& r : suite.reports) {
        lo = std::min(lo, r.b1_energy);
        hi = std::max(hi, r.b1_energy);
    }
    suite.uniformity = lo > 0.0 ? hi / lo : 0.0;
    suite.pass_energy_uniform = suite.uniformity <= uniformity_band;

    suite.pass_singular_count = true;
    for (const auto& r : suite.reports) {
        const int closed_form = 2 * static_cast<int>(r.N / (2.0 * kPi)) + 1;
        if (std::abs(r.singular_points - closed_form) > 1)
            suite.pass_singular_count = false;
    }
    return suite;
}

}  // namespace hymlab::analysis
