#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "densel/density.hpp"
#include "densel/model.hpp"

namespace densel {

/// Exact constants entering every tail bound for one model.
struct BoundConstants {
  double D = 0.0;     // D_m
  double e = 0.0;     // e_m = sup ||t||_inf^2 / n over the unit ball
  double v_sq = 0.0;  // v_m^2 = sup Var(t(X)) over the unit ball
  std::size_t n = 0;

  static BoundConstants compute(const ModelSpec& m, const Density& d, std::size_t n);
};

// Deviation thresholds of the proved inequalities, as functions of x.
double p_upper_threshold(const BoundConstants& c, double x);    // P(p - D/n > t) <= e^{-x/20}
double p_lower_threshold(const BoundConstants& c, double x);    // P(D/n - p > t) <= 2.8 e^{-x/20}
double dw_upper_threshold(const BoundConstants& c, double x);   // P(D^W - D > t) <= 4.8 e^{-x}
double dw_lower_threshold(const BoundConstants& c, double x);   // P(D - D^W > t) <= 3 e^{-x}
double ustat_upper_threshold(const BoundConstants& c, double x);  // P(U > t) <= 2 e^{-x}
double ustat_lower_threshold(const BoundConstants& c, double x);  // P(-U > t) <= 3.8 e^{-x}

struct TailRow {
  std::string bound;
  double x = 0.0;
  double threshold = 0.0;
  double frequency = 0.0;
  double cap = 0.0;
  double mc_se = 0.0;
  bool pass = false;
  std::string warning;  // "insufficient resolution" when cap < 5 / R
};

/// A non-tail check reported next to the tail rows (unbiasedness, identity).
struct CheckRow {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  double mc_se = 0.0;
  bool pass = false;
};

struct TailReport {
  std::string family;
  std::vector<TailRow> rows;
  std::vector<CheckRow> checks;
  std::size_t replications = 0;
  std::uint64_t seed = 0;

  bool all_pass() const;
};

struct ConcConfig {
  std::size_t n = 100;
  std::vector<double> xs = {1.0, 5.0, 20.0, 40.0, 80.0};
  std::size_t replications = 10000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

/// Tails of p(m) - D_m/n in both directions.
TailReport check_p_concentration(const ModelSpec& m, const Density& d, const ConcConfig& cfg);

/// Tails of D_m^W - D_m (each side and jointly) and of p(m) - D_m^W/n, plus
/// the unbiasedness row mean(D^W) vs D_m.
TailReport check_resampling_concentration(const ModelSpec& m, const Density& d,
                                          const ConcConfig& cfg);

/// Tails of the degenerate U-statistic, computed by its explicit double sum,
/// plus the identity row max |U - (p - D^W/n)| / (p + D^W/n).
TailReport check_ustat_concentration(const ModelSpec& m, const Density& d, const ConcConfig& cfg);

struct RegularizationReport {
  double sd_dw = 0.0;  // sd of D_m^W
  double sd_np = 0.0;  // sd of n p(m)
  double ratio = 0.0;  // sd_dw / sd_np, NaN when undefined
  bool defined = false;
  std::size_t replications = 0;
};

RegularizationReport regularization_comparison(const ModelSpec& m, const Density& d,
                                               const ConcConfig& cfg);

/// CSV with header bound,x,threshold,frequency,cap,mc_se,pass. Check rows
/// use x = 0, threshold = cap = tolerance and frequency = the checked value.
void write_tail_csv(std::ostream& os, const TailReport& report);
void write_regularization_csv(std::ostream& os, const RegularizationReport& report);

}  // namespace densel
