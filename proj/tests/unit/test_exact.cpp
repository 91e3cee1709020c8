#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

#include "densel/errors.hpp"
#include "densel/exact.hpp"
#include "densel/fit.hpp"

using namespace densel;
using doctest::Approx;

namespace {

// Histogram quantities from the cdf directly: sum P / mu and sum P^2 / mu.
std::pair<double, double> hist_sums(const ModelSpec& m, const Density& d) {
  double lin = 0.0, sq = 0.0;
  const auto e = m.edges();
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    const double P = d.cdf(e[i + 1]) - d.cdf(e[i]);
    const double mu = e[i + 1] - e[i];
    lin += P / mu;
    sq += P * P / mu;
  }
  return {lin, sq};
}

}  // namespace

TEST_CASE("constant model") {
  const auto q = exact_quantities(ModelSpec::regular_histogram(1), Density::power_law(), 100);
  CHECK(q.D == Approx(0.0).epsilon(1e-15));
  CHECK(q.sm_norm_sq == Approx(1.0));
  CHECK(q.bias_sq == Approx(0.125));
}

TEST_CASE("two-cell histogram under the power law") {
  const auto m = ModelSpec::regular_histogram(2);
  const auto q = exact_quantities(m, Density::power_law(), 100);
  const double P1 = std::pow(0.5, 0.75), P2 = 1.0 - P1;
  CHECK(q.D == Approx(2.0 - 2.0 * (P1 * P1 + P2 * P2)).epsilon(1e-13));
  CHECK(q.D == Approx(0.9642006676323471).epsilon(1e-13));
  CHECK(q.sm_norm_sq == Approx(1.0357993323676529).epsilon(1e-13));
  CHECK(q.pop_coeffs[0] == Approx(P1 * std::sqrt(2.0)));
  CHECK(q.pop_coeffs[0] == Approx(0.8408964152537146).epsilon(1e-13));
  CHECK(q.pop_coeffs[1] == Approx(0.5733171471193805).epsilon(1e-13));
  CHECK(q.R == Approx(100 * q.bias_sq + q.D));
}

TEST_CASE("D_m is n times the expected squared estimation error (Monte Carlo)") {
  const auto m = ModelSpec::regular_histogram(2);
  const auto d = Density::power_law();
  const std::size_t n = 20, R = 100000;
  const auto q = exact_quantities(m, d, n);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    RngStream rng(3, r, "mc");
    const auto f = fit_model(m, sample(d, n, rng));
    const double v = n * p_term(f, q);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / R;
  const double se = std::sqrt((sum_sq / R - mean * mean) / R);
  CHECK(std::abs(mean - q.D) < 4.0 * se);
}

TEST_CASE("Fourier quantities") {
  const auto u = exact_quantities(ModelSpec::fourier(1), Density::uniform(), 10);
  CHECK(u.sm_norm_sq == Approx(1.0));
  CHECK(u.D == Approx(2.0));

  // Power-law Fourier moments against tanh-sinh quadrature of the raw pdf.
  const auto pl = Density::power_law();
  const auto fc = FourierCoefficients::compute(pl, 6);
  boost::math::quadrature::tanh_sinh<double> ts;
  for (std::size_t k = 1; k <= 6; ++k) {
    const double w = 2.0 * std::numbers::pi * k;
    const double a = ts.integrate([&](double x) { return 0.75 * std::pow(x, -0.25) * std::cos(w * x); }, 0.0, 1.0);
    const double b = ts.integrate([&](double x) { return 0.75 * std::pow(x, -0.25) * std::sin(w * x); }, 0.0, 1.0);
    CHECK(std::abs(fc.cos_moment(k) - a) < 1e-8);
    CHECK(std::abs(fc.sin_moment(k) - b) < 1e-8);
  }
  const auto q = exact_quantities(ModelSpec::fourier(3), pl, 100);
  double sm = 1.0;
  for (std::size_t k = 1; k <= 3; ++k) sm += 2.0 * (fc.cos_moment(k) * fc.cos_moment(k) + fc.sin_moment(k) * fc.sin_moment(k));
  CHECK(q.sm_norm_sq == Approx(sm).epsilon(1e-12));
  CHECK(q.D == Approx(7.0 - sm).epsilon(1e-12));
  CHECK(q.bias_sq == Approx(1.125 - sm).epsilon(1e-12));

  // Piecewise-constant moments are analytic: check against quadrature.
  const auto pw = Density::piecewise_constant({0.0, 0.3, 1.0}, {2.0, 4.0 / 7.0});
  const auto fp = FourierCoefficients::compute(pw, 3);
  for (std::size_t k = 1; k <= 3; ++k) {
    const double w = 2.0 * std::numbers::pi * k;
    const double a = ts.integrate([&](double x) { return pw.pdf(x) * std::cos(w * x); }, 0.0, 0.3) +
                     ts.integrate([&](double x) { return pw.pdf(x) * std::cos(w * x); }, 0.3, 1.0);
    CHECK(std::abs(fp.cos_moment(k) - a) < 1e-10);
  }
}

TEST_CASE("sup norm and variance constants") {
  CHECK(sup_norm_sq(ModelSpec::regular_histogram(2)) == Approx(2.0));
  CHECK(sup_norm_sq(ModelSpec::fourier(3)) == Approx(7.0));
  CHECK(sup_norm_sq(ModelSpec::two_block(10, 3, 2, 1)) == Approx(2.0 / 0.3));
  // Uniform, two cells: Cov = diag(1) - b b^T with b = (1/sqrt2, 1/sqrt2),
  // eigenvalues 1 and 0.
  CHECK(max_variance(ModelSpec::regular_histogram(2), Density::uniform()) == Approx(1.0));
  // Uniform Fourier basis: all non-constant functions have variance 1.
  CHECK(max_variance(ModelSpec::fourier(2), Density::uniform()) == Approx(1.0));
  CHECK(max_variance(ModelSpec::regular_histogram(1), Density::power_law()) ==
        Approx(0.0).epsilon(1e-12));
}

TEST_CASE("max_variance dominates every direction (random search)") {
  const auto d = Density::power_law();
  const auto m = ModelSpec::regular_histogram(6);
  const double top = max_variance(m, d);
  const auto e = m.edges();
  std::vector<double> P(6), mu(6);
  for (int i = 0; i < 6; ++i) {
    P[i] = d.cdf(e[i + 1]) - d.cdf(e[i]);
    mu[i] = e[i + 1] - e[i];
  }
  RngStream r(1, 0, "dir");
  double best = 0.0;
  for (int t = 0; t < 20000; ++t) {
    std::vector<double> a(6);
    double norm = 0.0;
    for (auto& x : a) {
      x = r.uniform() - 0.5;
      norm += x * x;
    }
    // t = sum a psi; E t = sum a sqrt(mu) P / mu, E t^2 = sum a^2 P / mu.
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < 6; ++i) {
      m1 += a[i] * P[i] / std::sqrt(mu[i]) / std::sqrt(norm);
      m2 += a[i] * a[i] * P[i] / mu[i] / norm;
    }
    best = std::max(best, m2 - m1 * m1);
  }
  CHECK(best <= top + 1e-12);
  CHECK(best >= 0.9 * top);
}

TEST_CASE("exact table") {
  const auto d = Density::power_law();
  const ExactTable t(build_regular_histograms(30), d, 30);
  REQUIRE(t.size() == 30);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto [lin, sq] = hist_sums(t.model(i), d);
    CHECK(t.D(i) == Approx(lin - sq).epsilon(1e-12));
    CHECK(t.bias_sq(i) == Approx(1.125 - sq).epsilon(1e-12));
    const auto q = t.quantities(i);
    CHECK(q.D == Approx(t.D(i)));
  }
  std::size_t argmin_r = 0, argmax_d = 0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t.R(i) < t.R(argmin_r)) argmin_r = i;
    if (t.D(i) > t.D(argmax_d)) argmax_d = i;
  }
  CHECK(t.risk_minimizer() == argmin_r);
  CHECK(t.max_variance_model() == argmax_d);
  std::size_t total = 0;
  for (long long k = 0; k < 200; ++k) total += t.stratum_size(k);
  CHECK(total == t.size());

  const ExactTable tf(build_fourier_collection(8), d, 8);
  CHECK(tf.D(0) == Approx(exact_quantities(ModelSpec::fourier(1), d, 8).D).epsilon(1e-10));
}

TEST_CASE("pair diagnostics") {
  const auto u = Density::uniform();
  const ExactTable t(build_regular_histograms(10), u, 10);
  const auto p = pair_diagnostics(t, 1, 1, 0.5);
  CHECK(p.e == Approx(2.0 / 10.0));
  CHECK(p.v_sq == Approx(0.5));
  CHECK(p.v_sq_sup == Approx(1.0));

  const ExactTable tf(build_fourier_collection(100), Density::power_law(), 100);
  const auto pf = pair_diagnostics(tf, 2, 2, 0.5);
  CHECK(pf.e == Approx(7.0 / 100.0));
  CHECK(pf.v_sq == Approx(pf.v_sq_sup));
  CHECK(pf.br_oracle > 0.0);
}
