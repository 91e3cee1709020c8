#pragma once

#include <functional>

namespace densel {

// Adaptive Gauss-Kronrod (15-point) on [a, b]. The interval is first cut into
// `pieces` equal parts, which helps with oscillatory integrands. Throws
// NumericError when the accumulated error estimate exceeds abs_tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, int pieces = 1);

}  // namespace densel
