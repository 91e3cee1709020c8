#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace densel {

enum class BasisKind { Histogram, Fourier };

/// Equal-width partition of [0, 1] into `cells` pieces.
struct RegularPartition {
  std::size_t cells;
};

/// J1 equal cells on [0, k/n) followed by J2 equal cells on [k/n, 1].
struct TwoBlockPartition {
  std::size_t n, k, j1, j2;
};

struct ExplicitPartition {
  std::shared_ptr<const std::vector<double>> edges;  // 0 = e_0 < ... < e_d = 1
};

/// Span of {1, sqrt2 cos(2 pi k x), sqrt2 sin(2 pi k x) : k = 1..j}.
struct FourierBasis {
  std::size_t j;
};

// A finite-dimensional model with an orthonormal basis. Histogram cells are
// [e_i, e_{i+1}) except the last one, which is closed at 1. Fourier basis
// index 0 is the constant, then (cos k, sin k) pairs: 2k-1 -> cos, 2k -> sin.
class ModelSpec {
 public:
  using Structure =
      std::variant<RegularPartition, TwoBlockPartition, ExplicitPartition, FourierBasis>;

  static ModelSpec regular_histogram(std::size_t cells);
  static ModelSpec two_block(std::size_t n, std::size_t k, std::size_t j1, std::size_t j2);
  static ModelSpec histogram(std::vector<double> edges);
  static ModelSpec fourier(std::size_t j);

  BasisKind basis() const noexcept {
    return std::holds_alternative<FourierBasis>(structure_) ? BasisKind::Fourier
                                                            : BasisKind::Histogram;
  }
  bool is_histogram() const noexcept { return basis() == BasisKind::Histogram; }
  std::size_t dim() const noexcept { return dim_; }
  const std::string& id() const noexcept { return id_; }
  const Structure& structure() const noexcept { return structure_; }

  /// Histogram edge i in 0..dim; edge(0) == 0 and edge(dim) == 1 exactly.
  double edge(std::size_t i) const;
  /// Lebesgue measure of histogram cell i, from the exact rational width.
  double cell_width(std::size_t i) const;
  std::vector<double> edges() const;
  /// Histogram cell containing x in [0, 1].
  std::size_t cell_of(double x) const;

  /// Orthonormal basis function lambda at x. Throws IndexError for a bad lambda
  /// and DomainError for x outside [0, 1].
  double basis_eval(std::size_t lambda, double x) const;

 private:
  ModelSpec(Structure s, std::size_t dim, std::string id)
      : structure_(std::move(s)), dim_(dim), id_(std::move(id)) {}

  Structure structure_;
  std::size_t dim_;
  std::string id_;
};

enum class CollectionKind { RegularHistograms, TwoBlock, Fourier };

std::string to_string(CollectionKind kind);
/// Accepts "regular-hist", "two-block", "fourier".
CollectionKind parse_collection_kind(const std::string& name);

struct ModelCollection {
  CollectionKind kind;
  std::size_t n;
  std::vector<ModelSpec> models;

  std::size_t size() const noexcept { return models.size(); }
};

/// Regular histograms with 1..n cells.
ModelCollection build_regular_histograms(std::size_t n);
/// One model per (k, J1, J2) with 1 <= k <= n, 1 <= J1 <= k, 1 <= J2 <= n - k,
/// ordered by k, then J1, then J2.
ModelCollection build_two_block_collection(std::size_t n);
/// Fourier models m_j, j = 1..n.
ModelCollection build_fourier_collection(std::size_t n);
ModelCollection build_collection(CollectionKind kind, std::size_t n);

/// Closed-form size of the two-block collection: sum_k k (n - k).
std::size_t two_block_cardinality(std::size_t n);

}  // namespace densel
