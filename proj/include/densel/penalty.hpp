#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "densel/density.hpp"
#include "densel/exact.hpp"
#include "densel/fit.hpp"
#include "densel/model.hpp"
#include "densel/rng.hpp"

namespace densel {

enum class SchemeKind {
  Efron,       // multinomial(n; 1/n, ..., 1/n) counts
  Rademacher,  // W_i iid uniform on {0, 2}
  LeaveOneOut  // one uniformly chosen W_i = 0, all others n / (n - 1)
};

/// An exchangeable resampling weight vector (W_1, ..., W_n).
struct ResamplingScheme {
  SchemeKind kind = SchemeKind::Efron;

  /// v_W^2 = Var(W_1 - mean(W)) for sample size n.
  double weight_variance(std::size_t n) const;
  void draw(RngStream& rng, std::span<double> weights) const;
  std::string name() const;
};

SchemeKind parse_scheme_kind(const std::string& name);

/// A penalty for one model, on the scale of the per-observation criterion.
struct PenaltyValue {
  std::string model_id;
  double value = 0.0;
};

/// Resampling estimate D_m^W = n/(n-1) sum_lambda (P_n psi^2 - (P_n psi)^2).
/// Throws DegenerateSample when n < 2.
double resampling_dw(const FittedModel& f);

/// pen(m) = 2 D_m^W / n. Exact for every exchangeable scheme.
PenaltyValue resampling_penalty(const FittedModel& f, const Sample& sample);

/// Monte-Carlo version: B weight draws of sum_lambda (nu_n^W psi_lambda)^2,
/// averaged and rescaled by 2 / v_W^2. Converges to resampling_penalty.
/// Also reports the Monte-Carlo standard error of the returned value.
struct MonteCarloPenalty {
  PenaltyValue penalty;
  double std_error = 0.0;
};
MonteCarloPenalty resampling_penalty_mc(const FittedModel& f, const Sample& sample,
                                        const ResamplingScheme& scheme, std::size_t B,
                                        RngStream& rng);

/// K d_m / n.
PenaltyValue dimension_penalty(const ModelSpec& m, double K, std::size_t n);

/// K D_m / n; K = 2 is the ideal penalty, other K drive minimal-penalty sweeps.
PenaltyValue ideal_deterministic_penalty(const ExactModelQuantities& q, std::size_t n, double K);

// Explicit O(n^2 d) forms. They are kept as independent checks of the
// closed forms above and as the U-statistic path of the concentration lab.

/// D_m^W from the pairwise display: sum_lambda (P_n psi^2 - sum_{i != j} psi(X_i) psi(X_j) / (n(n-1))).
double resampling_dw_double_sum(const ModelSpec& m, const Sample& sample);

/// U = sum_{i != j} sum_lambda (psi(X_i) - P psi)(psi(X_j) - P psi) / (n(n-1)).
double ustat_double_sum(const ModelSpec& m, const Sample& sample,
                        std::span<const double> pop_coeffs);

}  // namespace densel
