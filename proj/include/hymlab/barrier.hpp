#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "hymlab/ansatz.hpp"
#include "hymlab/calibration.hpp"
#include "hymlab/errors.hpp"
#include "hymlab/parallel.hpp"
#include "hymlab/point.hpp"
#include "hymlab/powerlaw.hpp"
#include "hymlab/rng.hpp"

namespace hymlab::barrier {

/// Value with rigorous truncation bound (series tail) and Monte-Carlo
/// standard error (0 for series evaluations).
struct PotentialValue {
    double value = 0.0;
    double truncation_error = 0.0;
    double sample_error = 0.0;
};

// --- periodic Newtonian potential ----------------------------------------------
//
// Gamma(x) = sum_n |(x, y, z + 2 pi n)|^-4 on C^3/Z = R^6/(2 pi Z). The tail
// beyond |n| = M is bounded by the integral test: 2 / (3 (2 pi)^4 (M-1)^3),
// valid once the representative has |Re z| <= pi.

inline double gamma_tail_bound(int m) {
    const double two_pi_4 = std::pow(2.0 * kPi, 4);
    return 2.0 / (3.0 * two_pi_4 * std::pow(double(m - 1), 3));
}

inline PotentialValue periodic_newtonian(C3Point p, double tol) {
    if (!(tol > 0.0)) throw PreconditionError("periodic_newtonian: tol must be > 0");
    p.periodic = true;
    p.canonicalize();
    const double transverse = std::norm(p.x) + std::norm(p.y) + p.z.imag() * p.z.imag();

    int m = 2;
    while (gamma_tail_bound(m) >= tol) ++m;

    double sum = 0.0, comp = 0.0;  // Kahan
    for (int n = -m; n <= m; ++n) {
        const double zr = p.z.real() + 2.0 * kPi * n;
        const double d2 = transverse + zr * zr;
        if (d2 < 1e-28)
            throw PreconditionError("periodic_newtonian: lattice singularity");
        const double term = 1.0 / (d2 * d2);
        const double t = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return PotentialValue{sum + comp, gamma_tail_bound(m), 0.0};
}

// --- barrier integral -----------------------------------------------------------
//
// U(x) = int_{D_N} |Lambda F_{h_1}|(x') Gamma(x - x') dVol(x'). The integrand
// uses the mean-curvature envelope (the exact glued metric is out of reach in
// the glue/core region, and the envelope dominates everywhere, so U is an
// upper barrier; the comparison argument only consumes upper bounds anyway).
//
// Stratified Monte Carlo. Four strata, matching where the integrand lives:
//   near:  |x' - x| < 1/6, importance-sampled with density ~ |x'-x|^-4
//   tube:  |x'| + |y'| < eps r^{1/2} (curvature concentration)
//   glue:  r < 2 eps^{2/3} around either singular point
//   bulk:  the rest of D_N
// Each sampler covers a superset of its stratum; membership indicators with
// the priority near > glue > tube > bulk make the decomposition exact.

namespace detail {

inline constexpr double kNearRadius = 1.0 / 6.0;
inline constexpr double kGammaTol = 1e-8;

struct Membership {
    bool near = false, glue = false, tube = false;
};

inline Membership classify(const C3Point& q, const C3Point& center,
                           const ansatz::AnsatzParams& params) {
    Membership m;
    m.near = dist(q, center) < kNearRadius;
    const double r = ansatz::r_weight(q);
    m.glue = r < 2.0 * std::pow(params.epsilon, 2.0 / 3.0);
    m.tube = std::abs(q.x) + std::abs(q.y) < params.epsilon * std::sqrt(r);
    return m;
}

inline bool in_domain(const C3Point& q, const ansatz::AnsatzParams& params) {
    return std::abs(q.x) + std::abs(q.y) < double(params.N) &&
           std::abs(q.z.imag()) < double(params.N);
}

// Direction uniform on S^5 via normalized Gaussian.
inline std::array<double, 6> unit_direction(CounterRng& rng) {
    std::array<double, 6> v{};
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (int i = 0; i < 6; ++i) {
            // Box-Muller
            const double u1 = std::max(rng.uniform(), 1e-300);
            const double u2 = rng.uniform();
            v[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
            n2 += v[i] * v[i];
        }
    } while (n2 < 1e-12);
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& c : v) c *= inv;
    return v;
}

inline C3Point from_offset(const C3Point& center, const std::array<double, 6>& d,
                           double radius) {
    return C3Point(center.x + cplx(d[0], d[1]) * radius,
                   center.y + cplx(d[2], d[3]) * radius,
                   center.z + cplx(d[4], d[5]) * radius, true);
}

// (|x|, |y|) uniform over the 4-ball {|x|+|y| < R} (density s1 s2 in moduli).
inline bool sample_xy_disc(CounterRng& rng, double radius, double& s1, double& s2) {
    for (int tries = 0; tries < 400; ++tries) {
        s1 = radius * std::sqrt(rng.uniform());
        s2 = radius * std::sqrt(rng.uniform());
        if (s1 + s2 < radius) return true;
    }
    return false;
}

inline cplx with_phase(CounterRng& rng, double modulus) {
    const double phi = 2.0 * kPi * rng.uniform();
    return modulus * cplx(std::cos(phi), std::sin(phi));
}

struct StratumAccumulator {
    double sum = 0.0, comp = 0.0, sum_sq = 0.0;
    std::uint64_t n = 0;

    void add(double v) {
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
        sum_sq += v * v;
        ++n;
    }
    double mean() const { return n ? (sum + comp) / double(n) : 0.0; }
    double stderr_of_mean() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double var = std::max(0.0, sum_sq / double(n) - m * m);
        return std::sqrt(var / double(n));
    }
};

}  // namespace detail

/// Deterministic stratified Monte-Carlo estimate of the barrier U at p.
/// `budget` samples are split across strata; identical (p, params, budget,
/// seed) reproduce bit-identical values.
inline PotentialValue barrier_U(const C3Point& p_in, const ansatz::AnsatzParams& params,
                                std::uint64_t budget, std::uint64_t seed,
                                const Calibration& cal = {}) {
    using namespace detail;
    C3Point p = p_in;
    p.periodic = true;
    p.canonicalize();

    const double n_dom = params.N;
    const double eps = params.epsilon;
    const double z_area = 2.0 * kPi * 2.0 * n_dom;
    const double vol_domain = kPi * kPi * std::pow(n_dom, 4) / 6.0 * z_area;
    const double glue_radius = 4.0 * std::pow(eps, 2.0 / 3.0);
    const double vol_glue_ball = std::pow(kPi, 3) * std::pow(glue_radius, 6) / 6.0;
    const std::array<C3Point, 2> sing = {C3Point(0, 0, 0, true),
                                         C3Point(0, 0, kPi, true)};

    auto integrand = [&](const C3Point& q) -> double {
        if (!in_domain(q, params)) return 0.0;
        const double env = ansatz::envelope_h1(q, params, 0, cal).mean_bound;
        C3Point d(p.x - q.x, p.y - q.y, p.z - q.z, true);
        return env * periodic_newtonian(d, kGammaTol).value;
    };

    const std::uint64_t n_near = budget * 3 / 10;
    const std::uint64_t n_tube = budget * 3 / 10;
    const std::uint64_t n_glue = budget / 10;
    const std::uint64_t n_bulk = budget - n_near - n_tube - n_glue;

    std::array<StratumAccumulator, 4> acc;

    parallel_for(4, [&](std::size_t stratum) {
        CounterRng rng(seed, stratum);
        switch (stratum) {
            case 0: {  // near ball, importance density q = 2 d^-4 / (pi^3 R^2)
                const double R = kNearRadius;
                for (std::uint64_t i = 0; i < n_near; ++i) {
                    const auto dir = unit_direction(rng);
                    const double d = R * std::sqrt(rng.uniform());
                    const C3Point q = from_offset(p, dir, d);
                    const auto m = classify(q, p, params);
                    double val = 0.0;
                    if (m.near) {
                        const double density = 2.0 / (std::pow(kPi, 3) * R * R *
                                                      std::pow(d, 4));
                        val = integrand(q) / density;
                    }
                    acc[0].add(val);
                }
                break;
            }
            case 1: {  // concentration tube
                for (std::uint64_t i = 0; i < n_tube; ++i) {
                    const cplx z(rng.uniform(-kPi, kPi), rng.uniform(-n_dom, n_dom));
                    const double rad =
                        2.0 * eps * std::sqrt(ansatz::r_weight(C3Point(0, 0, z, true)));
                    double s1, s2, val = 0.0;
                    if (rad > 0.0 && sample_xy_disc(rng, rad, s1, s2)) {
                        const C3Point q(with_phase(rng, s1), with_phase(rng, s2), z, true);
                        const auto m = classify(q, p, params);
                        if (!m.near && !m.glue && m.tube) {
                            const double vol_xy = kPi * kPi * std::pow(rad, 4) / 6.0;
                            val = integrand(q) * vol_xy * z_area;
                        }
                    }
                    acc[1].add(val);
                }
                break;
            }
            case 2: {  // glue balls around the two singular points
                for (std::uint64_t i = 0; i < n_glue; ++i) {
                    const auto& c = sing[rng.next() & 1];
                    const auto dir = unit_direction(rng);
                    const double d = glue_radius * std::pow(rng.uniform(), 1.0 / 6.0);
                    const C3Point q = from_offset(c, dir, d);
                    const auto m = classify(q, p, params);
                    double val = 0.0;
                    if (!m.near && m.glue) val = integrand(q) * 2.0 * vol_glue_ball;
                    acc[2].add(val);
                }
                break;
            }
            default: {  // bulk
                for (std::uint64_t i = 0; i < n_bulk; ++i) {
                    const cplx z(rng.uniform(-kPi, kPi), rng.uniform(-n_dom, n_dom));
                    double s1, s2, val = 0.0;
                    if (sample_xy_disc(rng, n_dom, s1, s2)) {
                        const C3Point q(with_phase(rng, s1), with_phase(rng, s2), z, true);
                        const auto m = classify(q, p, params);
                        if (!m.near && !m.glue && !m.tube) val = integrand(q) * vol_domain;
                    }
                    acc[3].add(val);
                }
                break;
            }
        }
    }, 4);

    PotentialValue out;
    double var = 0.0;
    for (const auto& a : acc) {
        out.value += a.mean();
        const double se = a.stderr_of_mean();
        var += se * se;
    }
    out.sample_error = std::sqrt(var);
    out.truncation_error = detail::kGammaTol;
    return out;
}

// --- Lemma 4.2 regimes ----------------------------------------------------------

// Regime bound forms. log N and -log ell are guarded below by 1 (both can be
// nonpositive at desk scale where the asymptotic reading breaks down).
inline double regime_bound(const C3Point& p, const ansatz::AnsatzParams& params) {
    const double eps = params.epsilon;
    const double e2 = eps * eps;
    const double e23 = std::pow(eps, 2.0 / 3.0);
    const double eN = std::exp(double(params.N));
    const double logN = std::max(std::log(double(params.N)), 1.0);
    const double r = ansatz::r_weight(p);
    const double l = ansatz::ell(p, params);
    const double lg = std::max(1.0, std::log(r / l));

    if (r >= 0.1) return e2 * eN * std::max(logN, -std::log(l));
    if (r >= 4.0 * e23) return e2 * eN * logN + e2 / r * lg;
    if (r >= 0.5 * e23) return e2 * eN * logN + e2 / r * lg * lg;
    return e2 * eN * logN + std::pow(eps, 4.0 / 3.0) + r * r * lg;
}

enum class Regime { Outer, Middle, GlueRing, Inner };

inline Regime regime_of(const C3Point& p, const ansatz::AnsatzParams& params) {
    const double r = ansatz::r_weight(p);
    const double e23 = std::pow(params.epsilon, 2.0 / 3.0);
    if (r >= 0.1) return Regime::Outer;
    if (r >= 4.0 * e23) return Regime::Middle;
    if (r >= 0.5 * e23) return Regime::GlueRing;
    return Regime::Inner;
}

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Outer: return "r >= 1/10";
        case Regime::Middle: return "4 eps^{2/3} <= r < 1/10";
        case Regime::GlueRing: return "eps^{2/3}/2 <= r < 4 eps^{2/3}";
        default: return "r < eps^{2/3}/2";
    }
}

struct RegimeSample {
    C3Point point;
    PotentialValue u;
    double bound = 0.0;
};

struct RegimeReport {
    Regime regime;
    std::string name;
    double sup_ratio = 0.0;
    double max_stderr_rel = 0.0;
    std::vector<RegimeSample> samples;
};

struct SamplePlan {
    int points_per_regime = 12;
    std::uint64_t budget = 40000;
    std::uint64_t seed = 1;
    int workers = 0;
};

/// Draws deterministic sample points in each Lemma 4.2 regime and reports the
/// supremum of U / bound.
inline std::vector<RegimeReport> regime_report(const ansatz::AnsatzParams& params,
                                               const SamplePlan& plan,
                                               const Calibration& cal = {}) {
    using ansatz::r_weight;
    const double eps = params.epsilon;
    const double e23 = std::pow(eps, 2.0 / 3.0);

    // Radial anchors per regime; points are placed at (s/2, s/2, z) with a
    // deterministic spread of directions and heights.
    std::vector<RegimeReport> reports;
    CounterRng rng(plan.seed, 777);
    for (int reg = 0; reg < 4; ++reg) {
        RegimeReport rep;
        rep.regime = static_cast<Regime>(reg);
        rep.name = regime_name(rep.regime);
        std::vector<C3Point> pts;
        while (static_cast<int>(pts.size()) < plan.points_per_regime) {
            C3Point q;
            switch (rep.regime) {
                case Regime::Outer: {
                    const double s = rng.uniform(0.0, 0.45 * params.N);
                    q = C3Point(cplx(s, 0), cplx(0, s * rng.uniform()),
                                cplx(rng.uniform(-kPi, kPi),
                                     rng.uniform(-0.9 * params.N, 0.9 * params.N)),
                                true);
                    if (r_weight(q) < 0.1) continue;
                    break;
                }
                case Regime::Middle: {
                    const double r_target = rng.uniform(4.2 * e23, 0.095);
                    const double th = rng.uniform(0.0, 1.0);
                    q = C3Point(r_target * th * 0.7, r_target * (1.0 - th) * 0.7,
                                r_target * 0.6, true);
                    const double r = r_weight(q);
                    if (r < 4.0 * e23 || r >= 0.1) continue;
                    break;
                }
                case Regime::GlueRing: {
                    const double r_target = rng.uniform(0.6 * e23, 3.8 * e23);
                    const double th = rng.uniform(0.0, 1.0);
                    q = C3Point(r_target * th * 0.7, r_target * (1.0 - th) * 0.7,
                                r_target * 0.6, true);
                    const double r = r_weight(q);
                    if (r < 0.5 * e23 || r >= 4.0 * e23) continue;
                    break;
                }
                default: {
                    const double r_target = rng.uniform(0.02 * e23, 0.45 * e23);
                    const double th = rng.uniform(0.0, 1.0);
                    q = C3Point(r_target * th * 0.7, r_target * (1.0 - th) * 0.7,
                                r_target * 0.6, true);
                    if (r_weight(q) >= 0.5 * e23) continue;
                    break;
                }
            }
            pts.push_back(q);
        }

        rep.samples.resize(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) {
            RegimeSample s;
            s.point = pts[i];
            s.u = barrier_U(pts[i], params, plan.budget, plan.seed + i, cal);
            s.bound = regime_bound(pts[i], params);
            rep.samples[i] = s;
        }, plan.workers);

        for (const auto& s : rep.samples) {
            rep.sup_ratio = std::max(rep.sup_ratio, s.u.value / s.bound);
            if (s.u.value > 0.0)
                rep.max_stderr_rel =
                    std::max(rep.max_stderr_rel, s.u.sample_error / s.u.value);
        }
        reports.push_back(std::move(rep));
    }
    return reports;
}

}  // namespace hymlab::barrier
