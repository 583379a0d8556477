#pragma once

#include <complex>
#include <utility>

#include "hymlab/point.hpp"

namespace hymlab {

enum class Wirtinger { Holomorphic, Antiholomorphic };

namespace detail {

// Central difference along one real direction of z_var, with one Richardson
// level: (4 D(h/2) - D(h)) / 3 over the 4-point stencil {±h, ±h/2}. Error O(h^4).
template <class F>
auto real_derivative(const F& f, const C3Point& p, int var, cplx dir, double h)
    -> decltype(f(p)) {
    auto d_at = [&](double hh) -> decltype(f(p)) {
        return (f(p.offset(var, dir * hh)) - f(p.offset(var, -dir * hh))) / (2.0 * hh);
    };
    auto coarse = d_at(h);
    auto fine = d_at(0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

}  // namespace detail

/// Numerical Wirtinger derivative d f / d z_var or d f / d conj(z_var) at p.
/// f may return any scalar or Eigen matrix type closed under +,-,*double.
/// Evaluation failures of f at stencil points propagate as exceptions.
template <class F>
auto wirtinger_partial(const F& f, const C3Point& p, int var, Wirtinger kind,
                       double step) -> decltype(f(p)) {
    auto du = detail::real_derivative(f, p, var, cplx(1.0, 0.0), step);
    auto dv = detail::real_derivative(f, p, var, cplx(0.0, 1.0), step);
    const cplx i(0.0, 1.0);
    if (kind == Wirtinger::Holomorphic) return 0.5 * (du - i * dv);
    return 0.5 * (du + i * dv);
}

/// Nested second derivative d/d conj(z_k) of d/d z_j.
template <class F>
auto wirtinger_del_delbar(const F& f, const C3Point& p, int j, int k, double step)
    -> decltype(f(p)) {
    auto inner = [&](const C3Point& q) {
        return wirtinger_partial(f, q, j, Wirtinger::Holomorphic, step);
    };
    return wirtinger_partial(inner, p, k, Wirtinger::Antiholomorphic, step);
}

}  // namespace hymlab
