#include "densel/density.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "densel/errors.hpp"
#include "densel/format.hpp"
#include "densel/quadrature.hpp"

namespace densel {

namespace {

void check_support(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(std::string(what) + ": x = " + format_real(x) + " outside [0, 1]");
  }
}

}  // namespace

Density Density::power_law() { return Density(DensityKind::PowerLaw); }

Density Density::uniform() { return Density(DensityKind::Uniform); }

Density Density::piecewise_constant(std::vector<double> breaks, std::vector<double> heights) {
  if (breaks.size() < 2 || heights.size() + 1 != breaks.size()) {
    throw ArgumentError("piecewise density needs k+1 breaks for k heights");
  }
  if (breaks.front() != 0.0 || breaks.back() != 1.0) {
    throw ArgumentError("piecewise density breaks must start at 0 and end at 1");
  }
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i] < breaks[i + 1])) {
      throw ArgumentError("piecewise density breaks must be strictly increasing");
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < heights.size(); ++i) {
    if (!(heights[i] >= 0.0) || !std::isfinite(heights[i])) {
      throw ArgumentError("piecewise density heights must be finite and non-negative");
    }
    total += heights[i] * (breaks[i + 1] - breaks[i]);
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ArgumentError("piecewise density does not integrate to 1 (total mass " +
                        format_real(total) + ")");
  }
  Density d(DensityKind::PiecewiseConstant);
  d.cum_mass_.assign(breaks.size(), 0.0);
  for (std::size_t i = 0; i < heights.size(); ++i) {
    d.cum_mass_[i + 1] = d.cum_mass_[i] + heights[i] * (breaks[i + 1] - breaks[i]);
  }
  d.breaks_ = std::move(breaks);
  d.heights_ = std::move(heights);
  return d;
}

double Density::pdf(double x) const {
  check_support(x, "pdf");
  switch (kind_) {
    case DensityKind::PowerLaw:
      if (x == 0.0) throw UnboundedPoint("pdf: power-law density is unbounded at 0");
      return 0.75 * std::pow(x, -0.25);
    case DensityKind::Uniform:
      return 1.0;
    case DensityKind::PiecewiseConstant: {
      // Cells are [b_i, b_{i+1}) except the last, which is closed.
      auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
      std::size_t cell = static_cast<std::size_t>(it - breaks_.begin());
      cell = std::min(cell == 0 ? 0 : cell - 1, heights_.size() - 1);
      return heights_[cell];
    }
  }
  return 0.0;
}

double Density::cdf(double x) const {
  check_support(x, "cdf");
  switch (kind_) {
    case DensityKind::PowerLaw:
      return std::pow(x, 0.75);
    case DensityKind::Uniform:
      return x;
    case DensityKind::PiecewiseConstant: {
      if (x >= 1.0) return 1.0;
      auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
      const std::size_t cell = static_cast<std::size_t>(it - breaks_.begin()) - 1;
      return cum_mass_[cell] + heights_[cell] * (x - breaks_[cell]);
    }
  }
  return 0.0;
}

double Density::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("quantile: u outside [0, 1]");
  switch (kind_) {
    case DensityKind::PowerLaw:
      return std::pow(u, 4.0 / 3.0);
    case DensityKind::Uniform:
      return u;
    case DensityKind::PiecewiseConstant: {
      if (u == 0.0) return 0.0;
      // First cell whose upper cumulative mass reaches u; zero-height cells are skipped.
      auto it = std::lower_bound(cum_mass_.begin() + 1, cum_mass_.end(), u);
      std::size_t cell = static_cast<std::size_t>(it - cum_mass_.begin()) - 1;
      cell = std::min(cell, heights_.size() - 1);
      while (heights_[cell] == 0.0 && cell + 1 < heights_.size()) ++cell;
      const double x = breaks_[cell] + (u - cum_mass_[cell]) / heights_[cell];
      return std::clamp(x, breaks_[cell], breaks_[cell + 1]);
    }
  }
  return 0.0;
}

double Density::l2_norm_sq() const {
  switch (kind_) {
    case DensityKind::PowerLaw:
      return 9.0 / 8.0;
    case DensityKind::Uniform:
      return 1.0;
    case DensityKind::PiecewiseConstant: {
      double total = 0.0;
      for (std::size_t i = 0; i < heights_.size(); ++i) {
        total += heights_[i] * heights_[i] * (breaks_[i + 1] - breaks_[i]);
      }
      return total;
    }
  }
  return 0.0;
}

double Density::integrate_against(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int pieces) const {
  check_support(a, "integrate_against");
  check_support(b, "integrate_against");
  switch (kind_) {
    case DensityKind::PowerLaw: {
      // x = u^4: s(x) dx = 3/4 u^-1 * 4u^3 du = 3u^2 du.
      auto g = [&f](double u) {
        const double u2 = u * u;
        return 3.0 * u2 * f(u2 * u2);
      };
      return integrate(g, std::pow(a, 0.25), std::pow(b, 0.25), abs_tol, pieces);
    }
    case DensityKind::Uniform:
      return integrate(f, a, b, abs_tol, pieces);
    case DensityKind::PiecewiseConstant: {
      double total = 0.0;
      for (std::size_t i = 0; i < heights_.size(); ++i) {
        const double lo = std::max(a, breaks_[i]);
        const double hi = std::min(b, breaks_[i + 1]);
        if (lo >= hi || heights_[i] == 0.0) continue;
        total += heights_[i] * integrate(f, lo, hi, abs_tol / heights_.size(), pieces);
      }
      return total;
    }
  }
  return 0.0;
}

std::string Density::describe() const {
  switch (kind_) {
    case DensityKind::PowerLaw:
      return "power-law";
    case DensityKind::Uniform:
      return "uniform";
    case DensityKind::PiecewiseConstant: {
      std::ostringstream os;
      os << "piecewise:";
      for (std::size_t i = 0; i < breaks_.size(); ++i) os << (i ? "," : "") << format_real(breaks_[i]);
      os << ':';
      for (std::size_t i = 0; i < heights_.size(); ++i) os << (i ? "," : "") << format_real(heights_[i]);
      return os.str();
    }
  }
  return {};
}

Sample Sample::from_points(std::vector<double> points) {
  for (double x : points) check_support(x, "sample");
  std::sort(points.begin(), points.end());
  return Sample{std::move(points), true};
}

Sample sample(const Density& d, std::size_t n, RngStream& rng) {
  if (n == 0) throw ArgumentError("sample: n must be at least 1");
  std::vector<double> points(n);
  for (auto& x : points) x = d.quantile(rng.uniform());
  std::sort(points.begin(), points.end());
  return Sample{std::move(points), true};
}

}  // namespace densel
