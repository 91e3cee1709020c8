#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "densel/rng.hpp"

namespace densel {

enum class DensityKind { PowerLaw, Uniform, PiecewiseConstant };

/// A probability density on [0, 1] with exact cdf, quantile and L2 norm.
///
/// PowerLaw is s(x) = 3/4 x^(-1/4), unbounded at 0. PiecewiseConstant takes
/// breaks 0 = b_0 < ... < b_k = 1 and k non-negative heights integrating to 1.
class Density {
 public:
  static Density power_law();
  static Density uniform();
  static Density piecewise_constant(std::vector<double> breaks, std::vector<double> heights);

  DensityKind kind() const noexcept { return kind_; }
  const std::vector<double>& breaks() const noexcept { return breaks_; }
  const std::vector<double>& heights() const noexcept { return heights_; }

  /// Throws DomainError outside [0, 1] and UnboundedPoint for the power law at 0.
  double pdf(double x) const;
  double cdf(double x) const;
  /// Inverse cdf on (0, 1]; quantile(0) is 0.
  double quantile(double u) const;
  /// P(a <= X < b) from cdf differences.
  double mass(double a, double b) const { return cdf(b) - cdf(a); }
  double l2_norm_sq() const;

  /// Integral of s(x) f(x) over [a, b] by adaptive quadrature. The power law is
  /// integrated after the substitution x = u^4, which removes the singularity.
  double integrate_against(const std::function<double(double)>& f, double a = 0.0,
                           double b = 1.0, double abs_tol = 1e-10, int pieces = 1) const;

  /// Canonical text form, e.g. "power-law" or "piecewise:0,0.5,1:2,0".
  std::string describe() const;

 private:
  explicit Density(DensityKind kind) : kind_(kind) {}

  DensityKind kind_;
  std::vector<double> breaks_;
  std::vector<double> heights_;
  std::vector<double> cum_mass_;  // cdf at each break
};

/// Observations on [0, 1]. Builders keep the points sorted.
struct Sample {
  std::vector<double> points;
  bool sorted = false;

  std::size_t size() const noexcept { return points.size(); }

  /// Validates that every point lies in [0, 1], then sorts.
  static Sample from_points(std::vector<double> points);
};

/// n inverse-cdf draws from `rng`, returned sorted. Throws ArgumentError for n = 0.
Sample sample(const Density& d, std::size_t n, RngStream& rng);

}  // namespace densel
