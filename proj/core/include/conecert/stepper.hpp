#pragma once

#include <Eigen/Dense>

namespace conecert {

/// Explicit steppers on dx/dt = f(t, x), templated on the scalar so
/// convergence studies can instantiate them in extended precision while the
/// production path uses double. Both simulate() and the transition
/// factorization call these, which is what makes their endpoints agree
/// bit for bit on a shared grid.

template <typename Real, typename Field>
Eigen::Vector<Real, Eigen::Dynamic> euler_step(Field&& f, Real t,
                                               const Eigen::Vector<Real, Eigen::Dynamic>& x,
                                               Real h) {
    return x + h * f(t, x);
}

template <typename Real, typename Field>
Eigen::Vector<Real, Eigen::Dynamic> rk4_step(Field&& f, Real t,
                                             const Eigen::Vector<Real, Eigen::Dynamic>& x,
                                             Real h) {
    using VecR = Eigen::Vector<Real, Eigen::Dynamic>;
    const Real half = h / Real(2);
    const VecR k1 = f(t, x);
    const VecR k2 = f(t + half, (x + half * k1).eval());
    const VecR k3 = f(t + half, (x + half * k2).eval());
    const VecR k4 = f(t + h, (x + h * k3).eval());
    return x + h / Real(6) * (k1 + Real(2) * k2 + Real(2) * k3 + k4);
}

} // namespace conecert
