#include "densel/quadrature.hpp"

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "densel/errors.hpp"
#include "densel/format.hpp"

namespace densel {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

// Plain bisection on the one-shot |K15 - G7| estimate. Boost's own adaptive
// driver can stall on estimates far above the true error when an endpoint
// moves by one ulp, so the recursion is kept here where it is predictable.
double adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth,
             double& err_sum, int& budget) {
  double err = 0.0, l1 = 0.0;
  const double v = GK::integrate(f, a, b, 0, 0.0, &err, &l1);
  const double m = 0.5 * (a + b);
  // Below ~100 eps of the local L1 norm the estimate is roundoff, not error.
  if (err <= tol || err <= 2e-14 * l1 || depth >= 40 || budget <= 0 || !(a < m && m < b)) {
    err_sum += err;
    return v;
  }
  --budget;
  return adapt(f, a, m, 0.5 * tol, depth + 1, err_sum, budget) +
         adapt(f, m, b, 0.5 * tol, depth + 1, err_sum, budget);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 int pieces) {
  if (pieces < 1) pieces = 1;
  if (a == b) return 0.0;
  const double width = (b - a) / pieces;
  const double piece_tol = abs_tol / pieces;
  double total = 0.0, err_sum = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double lo = a + i * width;
    const double hi = (i + 1 == pieces) ? b : a + (i + 1) * width;
    // A tolerance under the integrand's own noise would otherwise split forever.
    int budget = 2000;
    total += adapt(f, lo, hi, piece_tol, 0, err_sum, budget);
  }
  if (err_sum > abs_tol) {
    throw NumericError("quadrature did not converge on [" + format_real(a) + ", " + format_real(b) +
                           "], error estimate " + format_real(err_sum),
                       err_sum);
  }
  return total;
}

}  // namespace densel
