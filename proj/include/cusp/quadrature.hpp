#pragma once

#include <boost/math/quadrature/gauss.hpp>

namespace cusp::quad {

/// Fixed 30-point Gauss-Legendre rule.  The result is a smooth function of the
/// endpoints, which matters when the integral is later finite-differenced.
template <class F>
double gauss_legendre(const F& f, double a, double b) {
    if (a == b)
        return 0.0;
    return boost::math::quadrature::gauss<double, 30>::integrate(f, a, b);
}

} // namespace cusp::quad
