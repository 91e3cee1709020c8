#include "densel/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "densel/errors.hpp"
#include "densel/format.hpp"

namespace densel {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

ModelSpec ModelSpec::regular_histogram(std::size_t cells) {
  if (cells == 0) throw ArgumentError("regular histogram needs at least one cell");
  return ModelSpec(RegularPartition{cells}, cells, "hist-reg:d=" + std::to_string(cells));
}

ModelSpec ModelSpec::two_block(std::size_t n, std::size_t k, std::size_t j1, std::size_t j2) {
  if (k < 1 || k >= n || j1 < 1 || j1 > k || j2 < 1 || j2 > n - k) {
    throw ArgumentError("two-block model needs 1 <= J1 <= k < n and 1 <= J2 <= n - k");
  }
  return ModelSpec(TwoBlockPartition{n, k, j1, j2}, j1 + j2,
                   "two-block:n=" + std::to_string(n) + ",k=" + std::to_string(k) +
                       ",J1=" + std::to_string(j1) + ",J2=" + std::to_string(j2));
}

ModelSpec ModelSpec::histogram(std::vector<double> edges) {
  if (edges.size() < 2 || edges.front() != 0.0 || edges.back() != 1.0) {
    throw ArgumentError("histogram edges must run from 0 to 1");
  }
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i] < edges[i + 1])) {
      throw ArgumentError("histogram cells must have positive width");
    }
  }
  std::string id = "hist:";
  for (std::size_t i = 0; i < edges.size(); ++i) id += (i ? "," : "") + format_real(edges[i]);
  const std::size_t dim = edges.size() - 1;
  return ModelSpec(ExplicitPartition{std::make_shared<const std::vector<double>>(std::move(edges))},
                   dim, std::move(id));
}

ModelSpec ModelSpec::fourier(std::size_t j) {
  if (j == 0) throw ArgumentError("Fourier model needs j >= 1");
  return ModelSpec(FourierBasis{j}, 2 * j + 1, "fourier:j=" + std::to_string(j));
}

double ModelSpec::edge(std::size_t i) const {
  if (i > dim_) throw IndexError("edge index out of range");
  return std::visit(
      overloaded{
          [&](const RegularPartition& p) {
            return static_cast<double>(i) / static_cast<double>(p.cells);
          },
          [&](const TwoBlockPartition& p) {
            // Both forms are ratios of exact integers, so the shared edge k/n
            // rounds identically from either block.
            if (i <= p.j1) {
              return static_cast<double>(i * p.k) / static_cast<double>(p.j1 * p.n);
            }
            const std::size_t l = i - p.j1;
            return static_cast<double>(p.k * p.j2 + l * (p.n - p.k)) /
                   static_cast<double>(p.n * p.j2);
          },
          [&](const ExplicitPartition& p) { return (*p.edges)[i]; },
          [&](const FourierBasis&) -> double {
            throw ArgumentError("Fourier models have no cell edges");
          }},
      structure_);
}

double ModelSpec::cell_width(std::size_t i) const {
  if (i >= dim_) throw IndexError("cell index out of range");
  return std::visit(
      overloaded{
          [&](const RegularPartition& p) { return 1.0 / static_cast<double>(p.cells); },
          [&](const TwoBlockPartition& p) {
            if (i < p.j1) return static_cast<double>(p.k) / static_cast<double>(p.j1 * p.n);
            return static_cast<double>(p.n - p.k) / static_cast<double>(p.n * p.j2);
          },
          [&](const ExplicitPartition& p) { return (*p.edges)[i + 1] - (*p.edges)[i]; },
          [&](const FourierBasis&) -> double {
            throw ArgumentError("Fourier models have no cells");
          }},
      structure_);
}

std::vector<double> ModelSpec::edges() const {
  std::vector<double> out(dim_ + 1);
  for (std::size_t i = 0; i <= dim_; ++i) out[i] = edge(i);
  return out;
}

std::size_t ModelSpec::cell_of(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("cell_of: x outside [0, 1]");
  // Binary search on edges without materialising them.
  std::size_t lo = 0, hi = dim_;  // invariant: edge(lo) <= x, answer < hi
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (edge(mid) <= x) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double ModelSpec::basis_eval(std::size_t lambda, double x) const {
  if (lambda >= dim_) throw IndexError("basis index " + std::to_string(lambda) + " out of range");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("basis_eval: x outside [0, 1]");
  if (const auto* f = std::get_if<FourierBasis>(&structure_)) {
    (void)f;
    if (lambda == 0) return 1.0;
    const double freq = static_cast<double>((lambda + 1) / 2);
    const double arg = 2.0 * std::numbers::pi * freq * x;
    return std::numbers::sqrt2 * (lambda % 2 == 1 ? std::cos(arg) : std::sin(arg));
  }
  return cell_of(x) == lambda ? 1.0 / std::sqrt(cell_width(lambda)) : 0.0;
}

std::string to_string(CollectionKind kind) {
  switch (kind) {
    case CollectionKind::RegularHistograms:
      return "regular-hist";
    case CollectionKind::TwoBlock:
      return "two-block";
    case CollectionKind::Fourier:
      return "fourier";
  }
  return {};
}

CollectionKind parse_collection_kind(const std::string& name) {
  if (name == "regular-hist") return CollectionKind::RegularHistograms;
  if (name == "two-block") return CollectionKind::TwoBlock;
  if (name == "fourier") return CollectionKind::Fourier;
  throw ArgumentError("unknown collection '" + name + "' (expected regular-hist, two-block or fourier)");
}

ModelCollection build_regular_histograms(std::size_t n) {
  if (n == 0) throw ArgumentError("collection size n must be at least 1");
  ModelCollection c{CollectionKind::RegularHistograms, n, {}};
  c.models.reserve(n);
  for (std::size_t d = 1; d <= n; ++d) c.models.push_back(ModelSpec::regular_histogram(d));
  return c;
}

ModelCollection build_two_block_collection(std::size_t n) {
  if (n == 0) throw ArgumentError("collection size n must be at least 1");
  ModelCollection c{CollectionKind::TwoBlock, n, {}};
  c.models.reserve(two_block_cardinality(n));
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t j1 = 1; j1 <= k; ++j1) {
      for (std::size_t j2 = 1; j2 <= n - k; ++j2) {
        c.models.push_back(ModelSpec::two_block(n, k, j1, j2));
      }
    }
  }
  return c;
}

ModelCollection build_fourier_collection(std::size_t n) {
  if (n == 0) throw ArgumentError("collection size n must be at least 1");
  ModelCollection c{CollectionKind::Fourier, n, {}};
  c.models.reserve(n);
  for (std::size_t j = 1; j <= n; ++j) c.models.push_back(ModelSpec::fourier(j));
  return c;
}

ModelCollection build_collection(CollectionKind kind, std::size_t n) {
  switch (kind) {
    case CollectionKind::RegularHistograms:
      return build_regular_histograms(n);
    case CollectionKind::TwoBlock:
      return build_two_block_collection(n);
    case CollectionKind::Fourier:
      return build_fourier_collection(n);
  }
  throw ArgumentError("unknown collection kind");
}

std::size_t two_block_cardinality(std::size_t n) {
  std::size_t total = 0;
  for (std::size_t k = 1; k < n; ++k) total += k * (n - k);
  return total;
}

}  // namespace densel
