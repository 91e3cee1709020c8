#include <doctest.h>

#include <cmath>

#include "densel/errors.hpp"
#include "densel/rng.hpp"
#include "densel/slope.hpp"

using namespace densel;
using doctest::Approx;

namespace {

std::vector<Candidate> abc() {
  return {{"A", 10, -1.0, 10.0}, {"B", 4, -0.5, 4.0}, {"C", 1, 0.0, 1.0}};
}

// Brute force: argmin over the candidates at a fixed K with the tie rule.
std::size_t brute(const std::vector<Candidate>& c, double K) {
  std::vector<double> pens(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) pens[i] = K * c[i].complexity;
  return select_index(c, pens);
}

}  // namespace

TEST_CASE("select") {
  std::vector<Candidate> c{{"m1", 1, -1.0, 0.0}, {"m2", 2, -0.5, 0.0}};
  const auto r = select(c, std::vector<PenaltyValue>{{"m1", 0.6}, {"m2", 0.05}});
  CHECK(r.index == 1);
  CHECK(r.model_id == "m2");
  CHECK(r.criterion == Approx(-0.45));

  std::vector<Candidate> tie{{"b", 3, 0.0, 0.0}, {"a", 3, 0.0, 0.0}, {"c", 2, 0.0, 0.0}};
  CHECK(select_index(tie, std::vector<double>{0, 0, 0}) == 2);
  tie[2].dim = 3;
  CHECK(select_index(tie, std::vector<double>{0, 0, 0}) == 1);

  std::vector<Candidate> single{{"only", 4, 0.3, 0.0}};
  CHECK(select(single, std::vector<PenaltyValue>{{"only", 1.0}}).model_id == "only");
  CHECK_THROWS_AS(select(c, std::vector<PenaltyValue>{{"m2", 0.6}, {"m1", 0.05}}), ArgumentError);
}

TEST_CASE("slope path of the three-model example") {
  const auto c = abc();
  const auto p = slope_path(c);
  REQUIRE(p.segments.size() == 3);
  CHECK(p.segments[0].model_id == "A");
  CHECK(p.segments[0].k_lo == 0.0);
  CHECK(p.segments[0].k_hi == Approx(1.0 / 12.0));
  CHECK(p.segments[1].model_id == "B");
  CHECK(p.segments[1].k_hi == Approx(1.0 / 6.0));
  CHECK(p.segments[2].model_id == "C");
  CHECK(std::isinf(p.segments[2].k_hi));
  for (double K = 0.0; K < 0.5; K += 1e-4) {
    bool near = std::abs(K - 1.0 / 12.0) < 1e-9 || std::abs(K - 1.0 / 6.0) < 1e-9;
    if (!near) CHECK(p.at(K).index == brute(c, K));
  }
  CHECK(detect_kmin(p, JumpRule::MaximalJump, 100) == Approx(1.0 / 12.0));
  const auto sel = slope_select(c, JumpRule::MaximalJump, 100);
  CHECK(sel.k_min == Approx(1.0 / 12.0));
  CHECK(sel.result.model_id == "C");
  CHECK_FALSE(sel.fallback);
}

TEST_CASE("degenerate paths") {
  std::vector<Candidate> one{{"x", 1, 0.0, 1.0}};
  const auto p = slope_path(one);
  REQUIRE(p.segments.size() == 1);
  CHECK(p.segments[0].k_lo == 0.0);
  CHECK_THROWS_AS(detect_kmin(p, JumpRule::MaximalJump, 10), NoJump);
  const auto s = slope_select(one, JumpRule::MaximalJump, 10);
  CHECK(s.fallback);
  CHECK(s.k_min == 0.0);
  CHECK(s.result.model_id == "x");

  // Duplicates leave the path unchanged.
  auto dup = abc();
  dup.push_back({"B2", 4, -0.5, 4.0});
  const auto pd = slope_path(dup);
  REQUIRE(pd.segments.size() == 3);
  CHECK(pd.segments[1].model_id == "B");

  // Collinear contrasts = -K0 * Delta: one jump from the largest to the smallest.
  const double K0 = 0.3;
  std::vector<Candidate> line;
  for (int d = 1; d <= 6; ++d) line.push_back({"l" + std::to_string(d), std::size_t(d), -K0 * d, double(d)});
  const auto pl = slope_path(line);
  REQUIRE(pl.segments.size() == 2);
  CHECK(pl.segments[0].model_id == "l6");
  CHECK(pl.segments[1].k_lo == Approx(K0));
  CHECK(slope_select(line, JumpRule::MaximalJump, 10).result.model_id == "l1");

  // Two segments: K_min is the breakpoint.
  std::vector<Candidate> two{{"big", 5, -1.0, 5.0}, {"small", 1, 0.0, 1.0}};
  CHECK(detect_kmin(slope_path(two), JumpRule::MaximalJump, 10) == Approx(0.25));
}

TEST_CASE("log-threshold rule") {
  // Complexities 100, 60, 30, 20, 5 with breakpoints 1, 2, 3, 4.
  std::vector<Candidate> c;
  const double deltas[] = {100, 60, 30, 20, 5};
  std::vector<double> contrasts(5);
  // Build contrasts so that consecutive breakpoints are K = 1, 2, 3, 4.
  contrasts[4] = 0.0;
  for (int i = 3; i >= 0; --i) contrasts[i] = contrasts[i + 1] - (i + 1) * (deltas[i] - deltas[i + 1]);
  for (int i = 0; i < 5; ++i) c.push_back({"m" + std::to_string(i), std::size_t(deltas[i]), contrasts[i], deltas[i]});
  const auto p = slope_path(c);
  REQUIRE(p.segments.size() == 5);
  // 100 / ln 100 = 21.7: the first segment at or below is complexity 20 (k_lo = 3).
  CHECK(detect_kmin(p, JumpRule::LogThreshold, 100) == Approx(3.0));
  // Drops 40, 30, 10, 15: the largest is at K = 1.
  CHECK(detect_kmin(p, JumpRule::MaximalJump, 100) == Approx(1.0));
  CHECK_THROWS_AS(detect_kmin(p, JumpRule::LogThreshold, 2), ArgumentError);
  CHECK(parse_jump_rule("log") == JumpRule::LogThreshold);
  CHECK_THROWS_AS(parse_jump_rule("median"), ArgumentError);
}

TEST_CASE("envelope agrees with brute force on random instances") {
  for (std::uint64_t t = 0; t < 300; ++t) {
    RngStream r(77, t, "slope");
    const std::size_t M = 1 + r.below(25);
    std::vector<Candidate> c;
    for (std::size_t i = 0; i < M; ++i) {
      // Integer-valued complexities produce duplicates and collinear points.
      const double delta = double(r.below(15));
      c.push_back({"m" + std::to_string(i), std::size_t(delta) + 1, -r.uniform() * 3.0, delta});
    }
    const auto p = slope_path(c);
    for (std::size_t s = 1; s < p.segments.size(); ++s) {
      REQUIRE(p.segments[s].complexity < p.segments[s - 1].complexity);
      REQUIRE(p.segments[s].k_lo > p.segments[s - 1].k_lo);
    }
    for (int g = 0; g < 400; ++g) {
      const double K = g * 0.01;
      bool near = false;
      for (const auto& s : p.segments) near = near || std::abs(s.k_lo - K) < 1e-9;
      if (near) continue;
      const auto& seg = p.at(K);
      const std::size_t b = brute(c, K);
      const double vb = c[b].contrast + K * c[b].complexity;
      const double vs = c[seg.index].contrast + K * c[seg.index].complexity;
      REQUIRE(std::abs(vs - vb) < 1e-12);
      REQUIRE(c[seg.index].complexity == c[b].complexity);
    }
  }
}
