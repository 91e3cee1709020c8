#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "densel/penalty.hpp"

namespace densel {

/// One model as seen by a selection rule.
struct Candidate {
  std::string id;
  std::size_t dim = 0;
  double contrast = 0.0;    // P_n Q(s^_m)
  double complexity = 0.0;  // Delta_m for slope paths (d_m, D_m^W, ...)
};

struct SelectionResult {
  std::size_t index = 0;  // position in the candidate list
  std::string model_id;
  double criterion = 0.0;  // contrast + penalty
  double penalty = 0.0;
  std::size_t dim = 0;
  double complexity = 0.0;
};

/// argmin of contrast + penalty. Ties go to the smaller dimension, then to
/// the lexicographically smaller id. Penalty ids must match candidate ids.
SelectionResult select(std::span<const Candidate> fits, std::span<const PenaltyValue> pens);

/// Index-only variant used in bulk loops; `pens` is aligned with `fits`.
std::size_t select_index(std::span<const Candidate> fits, std::span<const double> pens);

struct PathSegment {
  double k_lo = 0.0;
  double k_hi = std::numeric_limits<double>::infinity();
  std::size_t index = 0;
  std::string model_id;
  double complexity = 0.0;
};

/// The exact map K -> argmin(contrast + K complexity) on [0, inf). Segments
/// are [k_lo, k_hi); at a breakpoint the smaller-complexity model is selected.
struct SlopePath {
  std::vector<PathSegment> segments;
  double max_complexity = 0.0;  // over all candidates, not only those on the path

  const PathSegment& at(double K) const;
};

/// Lower envelope of the lines contrast + K complexity, built as the lower
/// convex hull of the points (complexity, contrast).
SlopePath slope_path(std::span<const Candidate> points);

enum class JumpRule {
  MaximalJump,  // breakpoint with the largest complexity drop, earliest on ties
  LogThreshold  // first breakpoint after which complexity <= max_complexity / ln n
};

JumpRule parse_jump_rule(const std::string& name);

/// Throws NoJump for MaximalJump on a single-segment path.
double detect_kmin(const SlopePath& path, JumpRule rule, std::size_t n);

struct SlopeSelection {
  SelectionResult result;
  SlopePath path;
  double k_min = 0.0;
  bool fallback = false;  // MaximalJump found no jump; LogThreshold was used
};

/// Full slope algorithm: path, K_min, then the model selected at 2 K_min.
SlopeSelection slope_select(std::span<const Candidate> points, JumpRule rule, std::size_t n);

}  // namespace densel
