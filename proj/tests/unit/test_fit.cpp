#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "densel/errors.hpp"
#include "densel/exact.hpp"
#include "densel/fit.hpp"
#include "densel/quadrature.hpp"

using namespace densel;
using doctest::Approx;

namespace {

// Direct quadrature of (s - s^)^2 with the estimator evaluated from its
// coefficients; the power law is handled by x = u^4 to tame the singularity.
double direct_loss(const FittedModel& f, const Density& d) {
  auto est = [&](double x) {
    double v = 0.0;
    for (std::size_t l = 0; l < f.coeffs.size(); ++l) v += f.coeffs[l] * f.model.basis_eval(l, x);
    return v;
  };
  auto sq = [&](double x) {
    const double r = d.pdf(x) - est(x);
    return r * r;
  };
  if (d.kind() != DensityKind::PowerLaw) {
    // Split at cell edges and density breaks so every piece is smooth.
    double total = 0.0;
    std::vector<double> e = f.model.is_histogram() ? f.model.edges() : std::vector<double>{0.0, 1.0};
    e.insert(e.end(), d.breaks().begin(), d.breaks().end());
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    for (std::size_t c = 0; c + 1 < e.size(); ++c) {
      const double lo = e[c], hi = e[c + 1];
      total += integrate([&](double x) { return sq(std::min(x, std::nextafter(hi, lo))); }, lo, hi, 1e-12, 4);
    }
    return total;
  }
  if (f.model.is_histogram()) {
    double total = 0.0;
    const auto e = f.model.edges();
    for (std::size_t c = 0; c + 1 < e.size(); ++c) {
      const double lo = std::pow(e[c], 0.25), hi = std::pow(e[c + 1], 0.25);
      const double top = std::nextafter(e[c + 1], e[c]);
      total += integrate(
          [&](double u) {
            const double x = std::max(std::min(u * u * u * u, top), e[c] == 0.0 ? 1e-300 : e[c]);
            return 4.0 * u * u * u * sq(x);
          },
          lo, hi, 1e-12, 4);
    }
    return total;
  }
  return integrate(
      [&](double u) { return u == 0.0 ? 0.0 : 4.0 * u * u * u * sq(u * u * u * u); }, 0.0, 1.0,
      1e-11, 64);
}

}  // namespace

TEST_CASE("fitted coefficients") {
  const auto f = fit_model(ModelSpec::regular_histogram(2), Sample::from_points({0.1, 0.2, 0.6, 0.9}));
  CHECK(f.coeffs[0] == Approx(std::sqrt(2.0) / 2.0));
  CHECK(f.coeffs[1] == Approx(std::sqrt(2.0) / 2.0));
  CHECK(empirical_contrast(f) == Approx(-1.0));
  CHECK(f.emp_contrast == Approx(-1.0));

  const auto c = fit_model(ModelSpec::regular_histogram(1), Sample::from_points({0.3, 0.8}));
  CHECK(c.coeffs[0] == Approx(1.0));
  CHECK(c.emp_contrast == Approx(-1.0));

  const auto fo = fit_model(ModelSpec::fourier(1), Sample::from_points({0.25, 0.75}));
  CHECK(fo.coeffs[0] == Approx(1.0));
  CHECK(fo.coeffs[1] == Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(fo.coeffs[2]) < 1e-15);

  CHECK_THROWS_AS(fit_model(ModelSpec::regular_histogram(2), Sample{}), ArgumentError);
}

TEST_CASE("bin counts with the last cell closed at one") {
  const auto m = ModelSpec::regular_histogram(4);
  const std::vector<double> pts{0.0, 0.25, 0.5, 0.5, 0.99, 1.0};
  CHECK(bin_counts(m, pts) == std::vector<std::size_t>{1, 1, 2, 2});
  // Same counts as cell_of, point by point.
  RngStream r(2, 0, "bins");
  const auto s = sample(Density::power_law(), 500, r);
  const auto tb = ModelSpec::two_block(50, 17, 5, 9);
  std::vector<std::size_t> ref(tb.dim(), 0);
  for (double x : s.points) ++ref[tb.cell_of(x)];
  CHECK(bin_counts(tb, s.points) == ref);
}

TEST_CASE("exact loss via Pythagoras") {
  const auto d = Density::power_law();
  const auto m = ModelSpec::regular_histogram(2);
  const auto q = exact_quantities(m, d, 2);
  const auto f = fit_model(m, Sample::from_points({0.25, 0.75}));
  CHECK(p_term(f, q) == Approx(0.035799332367652925).epsilon(1e-12));
  CHECK(q.bias_sq == Approx(0.08920066763234713).epsilon(1e-12));
  // The fit is the constant 1 here, so the loss is ||s||^2 - 1.
  CHECK(exact_loss(f, q, d) == Approx(0.125).epsilon(1e-12));
  CHECK(std::abs(exact_loss(f, q, d) - direct_loss(f, d)) < 1e-8);

  FittedModel perfect = f;
  perfect.coeffs = q.pop_coeffs;
  CHECK(p_term(perfect, q) == 0.0);
  CHECK(exact_loss(perfect, q, d) == Approx(q.bias_sq));

  const auto one = ModelSpec::regular_histogram(1);
  const auto f1 = fit_model(one, Sample::from_points({0.01, 0.3, 0.99}));
  CHECK(exact_loss(f1, exact_quantities(one, d, 3), d) == Approx(0.125));

  const auto other = exact_quantities(ModelSpec::regular_histogram(3), d, 2);
  CHECK_THROWS_AS(p_term(f, other), ArgumentError);
}

TEST_CASE("exact loss matches quadrature for Fourier and two-block fits") {
  const auto pw = Density::piecewise_constant({0.0, 0.4, 1.0}, {1.75, 0.5});
  RngStream r(9, 0, "fit");
  const auto s = sample(pw, 40, r);
  for (const auto& m : {ModelSpec::fourier(3), ModelSpec::two_block(40, 13, 3, 4)}) {
    const auto f = fit_model(m, s);
    const auto q = exact_quantities(m, pw, 40);
    CHECK(std::abs(exact_loss(f, q, pw) - direct_loss(f, pw)) < 1e-8);
  }
}
