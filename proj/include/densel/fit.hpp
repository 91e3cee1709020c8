#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "densel/density.hpp"
#include "densel/exact.hpp"
#include "densel/model.hpp"

namespace densel {

/// Projection estimator of one model on one sample.
struct FittedModel {
  ModelSpec model;
  std::vector<double> coeffs;     // P_n psi_lambda
  std::vector<double> sq_means;   // P_n psi_lambda^2, kept for the resampling penalty
  std::size_t n = 0;
  double emp_contrast = 0.0;      // P_n Q(s^_m) = -sum coeffs^2
};

/// Number of sample points in each histogram cell. `sorted_points` must be
/// sorted; each cell costs one binary search.
std::vector<std::size_t> bin_counts(const ModelSpec& m, std::span<const double> sorted_points);

/// Throws ArgumentError on an empty sample. Unsorted samples are sorted on a copy.
FittedModel fit_model(const ModelSpec& m, const Sample& sample);

double empirical_contrast(const FittedModel& f);

/// sum_lambda (P_n psi - P psi)^2 = ||s_m - s^_m||^2.
double p_term(const FittedModel& f, const ExactModelQuantities& q);

/// ||s - s^_m||^2 = ||s - s_m||^2 + p_term, by Pythagoras.
double exact_loss(const FittedModel& f, const ExactModelQuantities& q, const Density& d);

}  // namespace densel
