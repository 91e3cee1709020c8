#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "densel/density.hpp"
#include "densel/model.hpp"

namespace densel {

/// Population quantities of one model under a known density at sample size n.
struct ExactModelQuantities {
  std::string model_id;
  std::size_t dim = 0;
  double D = 0.0;           // n E||s_m - s^_m||^2
  double bias_sq = 0.0;     // ||s - s_m||^2
  double R = 0.0;           // n bias_sq + D
  double sm_norm_sq = 0.0;  // ||s_m||^2 = sum of pop_coeffs^2
  std::vector<double> pop_coeffs;
};

/// a_k = P cos(2 pi k X), b_k = P sin(2 pi k X) for k = 0..max_k (a_0 = 1, b_0 = 0).
class FourierCoefficients {
 public:
  FourierCoefficients() = default;
  /// Analytic for uniform and piecewise-constant densities, adaptive
  /// quadrature (tolerance 1e-9) for the power law.
  static FourierCoefficients compute(const Density& d, std::size_t max_k);

  std::size_t max_k() const noexcept { return cos_.empty() ? 0 : cos_.size() - 1; }
  double cos_moment(std::size_t k) const { return cos_.at(k); }
  double sin_moment(std::size_t k) const { return sin_.at(k); }

 private:
  std::vector<double> cos_, sin_;
};

ExactModelQuantities exact_quantities(const ModelSpec& m, const Density& d, std::size_t n);
ExactModelQuantities exact_quantities(const ModelSpec& m, const Density& d, std::size_t n,
                                      const FourierCoefficients& fc);

/// n e_m = sup over the unit ball of S_m of ||t||_inf^2: sup 1/mu(I) for
/// histograms, d_m for Fourier models.
double sup_norm_sq(const ModelSpec& m);

/// v_m^2 = sup over the unit ball of S_m of Var(t(X)), computed as the top
/// eigenvalue of the covariance matrix of the basis.
double max_variance(const ModelSpec& m, const Density& d);
double max_variance(const ModelSpec& m, const Density& d, const FourierCoefficients& fc);

/// Exact quantities for every model of a collection under one density.
///
/// For histogram collections the cell probabilities are stored flat (the
/// two-block collection at n = 100 has ~8.4e6 cells); per-model pop_coeffs are
/// rebuilt on demand by quantities(i).
class ExactTable {
 public:
  ExactTable(ModelCollection collection, Density density, std::size_t n);

  const ModelCollection& collection() const noexcept { return collection_; }
  const Density& density() const noexcept { return density_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return collection_.models.size(); }
  const ModelSpec& model(std::size_t i) const { return collection_.models.at(i); }

  double D(std::size_t i) const { return D_[i]; }
  double bias_sq(std::size_t i) const { return bias_sq_[i]; }
  double R(std::size_t i) const { return n_ * bias_sq_[i] + D_[i]; }
  double sm_norm_sq(std::size_t i) const { return sm_norm_sq_[i]; }
  std::span<const double> D_values() const noexcept { return D_; }

  /// Histogram collections only: P(X in I_lambda) for the cells of model i.
  std::span<const double> cell_probs(std::size_t i) const;
  /// Fourier collections only.
  const FourierCoefficients& fourier() const noexcept { return fourier_; }

  ExactModelQuantities quantities(std::size_t i) const;

  /// argmin R (m_o) and argmax D (m*); first index on ties.
  std::size_t risk_minimizer() const noexcept { return risk_min_; }
  std::size_t max_variance_model() const noexcept { return d_max_; }

  /// Card{m : R_m in [k, k+1)}.
  std::size_t stratum_size(long long k) const;

 private:
  ModelCollection collection_;
  Density density_;
  std::size_t n_;
  std::vector<double> D_, bias_sq_, sm_norm_sq_;
  std::vector<double> probs_;
  std::vector<std::size_t> offsets_;
  FourierCoefficients fourier_;
  std::size_t risk_min_ = 0, d_max_ = 0;
  std::map<long long, std::size_t> strata_;
};

/// Finite-n values of the quantities entering the variance and risk-bound
/// assumptions for a pair of models of one collection.
struct PairDiagnostics {
  double e = 0.0;          // e_{m,m'}
  double v_sq = 0.0;       // v_{m,m'}^2 by the per-cell / per-basis formula
  double v_sq_sup = 0.0;   // exact sup of Var(t(X)) over the unit ball of S_m + S_m'
  double l_ngamma = 0.0;   // l_{n,gamma}(R_m, R_m')
  double v_ratio = 0.0;    // (v^2 / (R_m v R_m'))^2 l^2
  double e_ratio = 0.0;    // (e / (R_m v R_m')) l^2
  double br_oracle = 0.0;  // R_{m_o} / D_{m*}
  double br_bias = 0.0;    // n ||s - s_{m*}||^2 / D_{m*}
};

// Histogram pairs are evaluated on the common refinement of both partitions;
// v_sq there is sup over refined cells of P(I)(1 - P(I)) / mu(I). Fourier
// pairs use m_{max(j, j')}, with e = (d v d') / n and v_sq = v_sq_sup.
// Throws UnsupportedPair when the two models have different basis kinds.
PairDiagnostics pair_diagnostics(const ExactTable& table, std::size_t i, std::size_t j,
                                 double gamma);

}  // namespace densel
