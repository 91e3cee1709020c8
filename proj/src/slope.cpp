#include "densel/slope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "densel/errors.hpp"

namespace densel {

namespace {

// True when candidate a wins a tie against b.
bool tie_prefers(const Candidate& a, const Candidate& b) {
  if (a.dim != b.dim) return a.dim < b.dim;
  return a.id < b.id;
}

}  // namespace

std::size_t select_index(std::span<const Candidate> fits, std::span<const double> pens) {
  if (fits.empty()) throw ArgumentError("select: empty candidate list");
  if (fits.size() != pens.size()) throw ArgumentError("select: penalty count mismatch");
  std::size_t best = 0;
  double best_value = fits[0].contrast + pens[0];
  for (std::size_t i = 1; i < fits.size(); ++i) {
    const double v = fits[i].contrast + pens[i];
    if (v < best_value || (v == best_value && tie_prefers(fits[i], fits[best]))) {
      best = i;
      best_value = v;
    }
  }
  return best;
}

SelectionResult select(std::span<const Candidate> fits, std::span<const PenaltyValue> pens) {
  if (fits.size() != pens.size()) throw ArgumentError("select: penalty count mismatch");
  std::vector<double> values(pens.size());
  for (std::size_t i = 0; i < pens.size(); ++i) {
    if (pens[i].model_id != fits[i].id) {
      throw ArgumentError("select: penalty for '" + pens[i].model_id + "' does not match model '" +
                          fits[i].id + "'");
    }
    values[i] = pens[i].value;
  }
  const std::size_t i = select_index(fits, values);
  return {i, fits[i].id, fits[i].contrast + values[i], values[i], fits[i].dim, fits[i].complexity};
}

const PathSegment& SlopePath::at(double K) const {
  if (segments.empty()) throw ArgumentError("SlopePath::at: empty path");
  // Last segment whose k_lo <= K.
  auto it = std::upper_bound(segments.begin(), segments.end(), K,
                             [](double k, const PathSegment& s) { return k < s.k_lo; });
  return it == segments.begin() ? segments.front() : *(it - 1);
}

SlopePath slope_path(std::span<const Candidate> points) {
  if (points.empty()) throw ArgumentError("slope_path: no models");
  SlopePath path;
  for (const auto& p : points) {
    if (!(p.complexity >= 0.0)) throw ArgumentError("slope_path: complexity must be non-negative");
    path.max_complexity = std::max(path.max_complexity, p.complexity);
  }

  // Sort by complexity; among equal complexities the best (lowest contrast,
  // then tie rule) comes first and is the only one kept.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = points[a];
    const auto& pb = points[b];
    if (pa.complexity != pb.complexity) return pa.complexity < pb.complexity;
    if (pa.contrast != pb.contrast) return pa.contrast < pb.contrast;
    return tie_prefers(pa, pb);
  });
  std::vector<std::size_t> pruned;
  pruned.reserve(order.size());
  for (std::size_t idx : order) {
    if (!pruned.empty() && points[pruned.back()].complexity == points[idx].complexity) continue;
    // Contrasts along `pruned` strictly decrease, so the last kept model is the
    // best so far; a larger complexity must beat it strictly.
    if (!pruned.empty() && points[idx].contrast >= points[pruned.back()].contrast) continue;
    pruned.push_back(idx);
  }

  // Lower hull over increasing complexity; contrasts are strictly decreasing
  // along `pruned`, so the hull is exactly the envelope. Collinear middle
  // points are only optimal at a single K and are dropped.
  std::vector<std::size_t> hull;
  for (std::size_t idx : pruned) {
    while (hull.size() >= 2) {
      const auto& a = points[hull[hull.size() - 2]];
      const auto& b = points[hull.back()];
      const auto& c = points[idx];
      const double lhs = (b.complexity - a.complexity) * (c.contrast - a.contrast);
      const double rhs = (b.contrast - a.contrast) * (c.complexity - a.complexity);
      // Relative slack so that points collinear up to rounding are dropped
      // instead of producing segments of width ~1e-16.
      if (lhs - rhs <= 1e-12 * (std::abs(lhs) + std::abs(rhs))) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(idx);
  }

  // Walk from the largest complexity (selected at K = 0) downwards.
  double k_lo = 0.0;
  for (std::size_t h = hull.size(); h-- > 0;) {
    PathSegment seg;
    seg.k_lo = k_lo;
    seg.index = hull[h];
    seg.model_id = points[hull[h]].id;
    seg.complexity = points[hull[h]].complexity;
    if (h > 0) {
      const auto& big = points[hull[h]];
      const auto& small = points[hull[h - 1]];
      seg.k_hi = (small.contrast - big.contrast) / (big.complexity - small.complexity);
    }
    k_lo = seg.k_hi;
    path.segments.push_back(std::move(seg));
  }
  return path;
}

JumpRule parse_jump_rule(const std::string& name) {
  if (name == "max") return JumpRule::MaximalJump;
  if (name == "log") return JumpRule::LogThreshold;
  throw ArgumentError("unknown jump rule '" + name + "' (expected max or log)");
}

double detect_kmin(const SlopePath& path, JumpRule rule, std::size_t n) {
  if (path.segments.empty()) throw ArgumentError("detect_kmin: empty path");
  const auto& segs = path.segments;
  if (rule == JumpRule::MaximalJump) {
    if (segs.size() < 2) throw NoJump("slope path has a single segment");
    std::size_t best = 1;
    double best_drop = segs[0].complexity - segs[1].complexity;
    for (std::size_t i = 2; i < segs.size(); ++i) {
      const double drop = segs[i - 1].complexity - segs[i].complexity;
      if (drop > best_drop) {
        best_drop = drop;
        best = i;
      }
    }
    return segs[best].k_lo;
  }
  if (n < 3) throw ArgumentError("detect_kmin: the log-threshold rule needs n >= 3");
  const double threshold = path.max_complexity / std::log(static_cast<double>(n));
  for (const auto& s : segs) {
    if (s.complexity <= threshold) return s.k_lo;
  }
  // Never below the threshold: use the start of the last segment.
  return segs.back().k_lo;
}

SlopeSelection slope_select(std::span<const Candidate> points, JumpRule rule, std::size_t n) {
  SlopeSelection out;
  out.path = slope_path(points);
  try {
    out.k_min = detect_kmin(out.path, rule, n);
  } catch (const NoJump&) {
    out.fallback = true;
    out.k_min = out.path.segments.size() == 1 ? 0.0 : detect_kmin(out.path, JumpRule::LogThreshold, n);
  }
  const double K = 2.0 * out.k_min;
  const auto& seg = out.path.at(K);
  const auto& c = points[seg.index];
  out.result = {seg.index, c.id, c.contrast + K * c.complexity, K * c.complexity, c.dim, c.complexity};
  return out;
}

}  // namespace densel
