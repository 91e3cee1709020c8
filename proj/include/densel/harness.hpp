#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "densel/density.hpp"
#include "densel/exact.hpp"
#include "densel/slope.hpp"

namespace densel {

enum class MethodKind {
  SlopeDim,         // slope algorithm with complexity d_m
  Resampling,       // pen = 2 D_m^W / n
  ResamplingSlope,  // slope algorithm with complexity D_m^W
  IdealK            // pen = K D_m / n, needs the true density
};

struct MethodSpec {
  MethodKind kind = MethodKind::Resampling;
  double K = 2.0;  // IdealK only

  /// "slope-dim", "resampling", "resampling-slope", "ideal:K".
  std::string name() const;
  static MethodSpec parse(const std::string& text);
};

std::vector<MethodSpec> default_methods();

/// Everything a selection rule needs from one sample, for every model.
struct CollectionEvaluation {
  std::vector<Candidate> candidates;  // id, dim, contrast; complexity left at 0
  std::vector<double> dw;             // D_m^W
  std::vector<double> loss;           // exact ||s - s^_m||^2
};

/// Fits every model of the table's collection. Histogram collections use bin
/// counts from one sorted sample; Fourier collections reuse nested sums.
void evaluate_collection(const ExactTable& table, const Sample& sample, CollectionEvaluation& out);
CollectionEvaluation evaluate_collection(const ExactTable& table, const Sample& sample);

struct MethodOutcome {
  std::size_t selected = 0;
  double ratio = 0.0;  // selected loss / oracle loss
  std::string flag;    // "none", "no-jump" or "degenerate-oracle"
};

/// Applies one method to an evaluated sample and returns the oracle constant.
MethodOutcome apply_method(const MethodSpec& method, const ExactTable& table,
                           CollectionEvaluation& eval);

/// Oracle constant c for one method on one sample.
double oracle_ratio(const Sample& sample, const ExactTable& table, const MethodSpec& method);

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double q95 = 0.0;
};

/// Mean and nearest-rank quantiles (the ceil(q N)-th order statistic).
Summary summarize(std::span<const double> ratios);
double nearest_rank(std::span<const double> sorted, double q);

struct RawRow {
  std::size_t rep = 0;
  std::string method;
  double ratio = 0.0;
  std::string selected_model;
  std::string flag;
};

struct MethodSummary {
  std::string method;
  Summary stats;
  std::size_t flagged = 0;
};

struct SimulationReport {
  std::vector<MethodSummary> methods;
  std::size_t N = 0;
  std::size_t n = 0;
  CollectionKind collection = CollectionKind::RegularHistograms;
  std::uint64_t seed = 0;
  std::vector<RawRow> raw;  // rep-major, methods in request order
  std::vector<std::string> oracle_models;  // m_o of each replication (argmin loss)
  std::string max_variance_model;          // m* = argmax D_m
};

struct SimulationConfig {
  CollectionKind collection = CollectionKind::RegularHistograms;
  std::size_t n = 100;
  std::size_t N = 1000;
  std::vector<MethodSpec> methods = default_methods();
  std::uint64_t seed = 42;
  std::size_t threads = 1;
};

/// N replications; every method sees the same sample within a replication.
SimulationReport run_simulation(const ExactTable& table, const SimulationConfig& cfg);

/// Example 1 uses regular histograms, example 2 the two-block collection;
/// both estimate the power-law density.
SimulationReport run_example(int example, std::size_t n, std::size_t N,
                             const std::vector<MethodSpec>& methods, std::uint64_t seed,
                             std::size_t threads = 1);

struct SweepReport {
  std::vector<double> K;
  std::vector<double> mean_dim_ratio;     // mean D_{m^} / D_{m*}
  std::vector<double> mean_oracle_ratio;  // mean oracle constant
  std::size_t N = 0;
};

/// Selection with pen = K D_m / n for every K of the grid, on N shared samples.
SweepReport penalty_sweep(const ExactTable& table, std::span<const double> K_grid, std::size_t N,
                          std::uint64_t seed, std::size_t threads = 1);

void write_summary_csv(std::ostream& os, const SimulationReport& report);
void write_raw_csv(std::ostream& os, const SimulationReport& report);
void write_sweep_csv(std::ostream& os, const SweepReport& report);

}  // namespace densel
