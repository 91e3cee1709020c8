#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>

#include "densel/density.hpp"
#include "densel/errors.hpp"
#include "densel/quadrature.hpp"

using namespace densel;
using doctest::Approx;

namespace {

// tanh-sinh handles the x^(-1/4) endpoint singularity without substitution,
// so it is independent of the library's own integration path.
double ts_integral(const std::function<double(double)>& f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, a, b);
}

}  // namespace

TEST_CASE("pdf values") {
  const auto pl = Density::power_law();
  CHECK(pl.pdf(1.0) == Approx(0.75).epsilon(1e-15));
  CHECK(pl.pdf(0.0625) == Approx(1.5).epsilon(1e-15));
  CHECK(Density::uniform().pdf(0.3) == 1.0);
  CHECK_THROWS_AS(pl.pdf(0.0), UnboundedPoint);
  CHECK_THROWS_AS(pl.pdf(-0.1), DomainError);
  CHECK_THROWS_AS(Density::uniform().pdf(1.5), DomainError);
}

TEST_CASE("cdf values agree with quadrature of the pdf") {
  const auto pl = Density::power_law();
  CHECK(pl.cdf(1.0) == 1.0);
  CHECK(pl.cdf(0.5) == Approx(std::pow(0.5, 0.75)).epsilon(1e-15));
  const double q = ts_integral([&](double x) { return pl.pdf(x); }, 0.0, 0.5);
  CHECK(std::abs(pl.cdf(0.5) - q) < 1e-10);
  CHECK(Density::uniform().cdf(0.25) == 0.25);
  CHECK_THROWS_AS(pl.cdf(-1.0), DomainError);
  CHECK_THROWS_AS(pl.cdf(2.0), DomainError);
}

TEST_CASE("quantile inverts the cdf") {
  const auto pl = Density::power_law();
  CHECK(pl.quantile(0.5) == Approx(std::pow(0.5, 4.0 / 3.0)).epsilon(1e-14));
  CHECK(Density::uniform().quantile(0.7) == Approx(0.7));
  const auto pw = Density::piecewise_constant({0.0, 0.25, 0.5, 1.0}, {2.0, 0.0, 1.0});
  for (double u : {0.01, 0.2, 0.49, 0.5, 0.51, 0.8, 0.999}) {
    CHECK(std::abs(pl.cdf(pl.quantile(u)) - u) < 1e-12);
    CHECK(std::abs(pw.cdf(pw.quantile(u)) - u) < 1e-12);
  }
  // Zero-height cells are never hit.
  CHECK(pw.quantile(0.5) <= 0.25);
  CHECK(pw.quantile(0.5000001) >= 0.5);
}

TEST_CASE("l2 norms") {
  CHECK(Density::uniform().l2_norm_sq() == 1.0);
  CHECK(Density::power_law().l2_norm_sq() == Approx(1.125).epsilon(1e-15));
  const auto pl = Density::power_law();
  const double q = ts_integral([&](double x) { return pl.pdf(x) * pl.pdf(x); }, 0.0, 1.0);
  CHECK(std::abs(q - 1.125) < 1e-8);
  const auto pw = Density::piecewise_constant({0.0, 0.5, 1.0}, {2.0, 0.0});
  CHECK(pw.l2_norm_sq() == Approx(2.0));
}

TEST_CASE("integrate_against matches an independent quadrature") {
  const auto pl = Density::power_law();
  auto f = [](double x) { return std::cos(6.0 * x) + x * x; };
  const double mine = pl.integrate_against(f, 0.0, 1.0, 1e-11);
  const double ref = ts_integral([&](double x) { return pl.pdf(x) * f(x); }, 0.0, 1.0);
  CHECK(std::abs(mine - ref) < 1e-10);
  const double part = pl.integrate_against(f, 0.2, 0.7, 1e-11);
  CHECK(std::abs(part - ts_integral([&](double x) { return pl.pdf(x) * f(x); }, 0.2, 0.7)) < 1e-10);
}

TEST_CASE("adaptive quadrature") {
  CHECK(integrate([](double x) { return x * x; }, 0.0, 3.0) == Approx(9.0).epsilon(1e-13));
  CHECK(integrate([](double x) { return std::sin(40.0 * x); }, 0.0, M_PI, 1e-10, 8) ==
        doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("piecewise construction is validated") {
  CHECK_THROWS_AS(Density::piecewise_constant({0.0, 0.5, 1.0}, {1.0, 0.5}), ArgumentError);
  CHECK_THROWS_AS(Density::piecewise_constant({0.0, 0.5}, {2.0}), ArgumentError);
  CHECK_THROWS_AS(Density::piecewise_constant({0.0, 0.6, 0.5, 1.0}, {1.0, 1.0, 1.0}), ArgumentError);
  CHECK_THROWS_AS(Density::piecewise_constant({0.0, 0.5, 1.0}, {-1.0, 3.0}), ArgumentError);
  CHECK(Density::piecewise_constant({0.0, 0.5, 1.0}, {1.5, 0.5}).describe() ==
        "piecewise:0,0.5,1:1.5,0.5");
  CHECK(Density::power_law().describe() == "power-law");
}

TEST_CASE("samples are sorted, reproducible and distributed as the density") {
  const auto pl = Density::power_law();
  RngStream r1(42, 0, "data"), r2(42, 0, "data");
  const auto a = sample(pl, 50, r1);
  const auto b = sample(pl, 50, r2);
  CHECK(a.points == b.points);
  CHECK(a.sorted);
  CHECK(std::is_sorted(a.points.begin(), a.points.end()));

  RngStream r(5, 0, "ks");
  const std::size_t N = 100000;
  const auto s = sample(pl, N, r);
  double ks = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double F = pl.cdf(s.points[i]);
    ks = std::max({ks, std::abs(F - double(i) / N), std::abs(F - double(i + 1) / N)});
  }
  CHECK(ks < 0.01);

  RngStream r3(1, 0, "data");
  CHECK_THROWS_AS(sample(pl, 0, r3), ArgumentError);
}

TEST_CASE("Sample::from_points validates and sorts") {
  const auto s = Sample::from_points({0.9, 0.1, 0.5});
  CHECK(s.points == std::vector<double>{0.1, 0.5, 0.9});
  CHECK_THROWS_AS(Sample::from_points({0.1, 1.2}), DomainError);
  CHECK_THROWS(Sample::from_points({0.1, std::nan("")}));
}
