#pragma once

#include <cmath>
#include <complex>

namespace hymlab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Point of C^3 (or of the periodic quotient C^3/Z with z ~ z + 2*pi).
/// The canonical representative of a periodic point has |Re z| <= pi.
struct C3Point {
    cplx x{0.0, 0.0};
    cplx y{0.0, 0.0};
    cplx z{0.0, 0.0};
    bool periodic = false;

    C3Point() = default;
    C3Point(cplx x_, cplx y_, cplx z_, bool periodic_ = false)
        : x(x_), y(y_), z(z_), periodic(periodic_) {
        if (periodic) canonicalize();
    }

    cplx coord(int var) const { return var == 0 ? x : (var == 1 ? y : z); }

    C3Point offset(int var, cplx delta) const {
        C3Point q = *this;
        // Keep the representative while differencing: stencils must not jump sheets.
        q.periodic = false;
        if (var == 0) q.x += delta;
        else if (var == 1) q.y += delta;
        else q.z += delta;
        q.periodic = periodic;
        return q;
    }

    // Fold Re z into [-pi, pi).
    void canonicalize() {
        double re = std::remainder(z.real(), 2.0 * kPi);
        if (re >= kPi) re -= 2.0 * kPi;
        z = cplx(re, z.imag());
    }

    double norm_sq() const { return std::norm(x) + std::norm(y) + std::norm(z); }
    double norm() const { return std::sqrt(norm_sq()); }
};

/// Squared distance; on the quotient the z-difference is taken modulo 2*pi.
inline double dist_sq(const C3Point& a, const C3Point& b) {
    double dz_re = a.z.real() - b.z.real();
    if (a.periodic || b.periodic) dz_re = std::remainder(dz_re, 2.0 * kPi);
    double dz_im = a.z.imag() - b.z.imag();
    return std::norm(a.x - b.x) + std::norm(a.y - b.y) + dz_re * dz_re + dz_im * dz_im;
}

inline double dist(const C3Point& a, const C3Point& b) { return std::sqrt(dist_sq(a, b)); }

}  // namespace hymlab
