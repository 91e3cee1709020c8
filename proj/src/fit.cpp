#include "densel/fit.hpp"

#include <algorithm>
#include <cmath>

#include "densel/errors.hpp"

namespace densel {

std::vector<std::size_t> bin_counts(const ModelSpec& m, std::span<const double> sorted_points) {
  const std::size_t dim = m.dim();
  std::vector<std::size_t> counts(dim);
  std::size_t below = 0;  // points strictly below the current lower edge
  for (std::size_t c = 0; c < dim; ++c) {
    std::size_t upto;
    if (c + 1 == dim) {
      upto = sorted_points.size();  // last cell is closed at 1
    } else {
      const double hi = m.edge(c + 1);
      upto = static_cast<std::size_t>(
          std::lower_bound(sorted_points.begin(), sorted_points.end(), hi) - sorted_points.begin());
    }
    counts[c] = upto - below;
    below = upto;
  }
  return counts;
}

FittedModel fit_model(const ModelSpec& m, const Sample& sample) {
  if (sample.size() == 0) throw ArgumentError("fit_model: empty sample");
  std::vector<double> sorted_copy;
  std::span<const double> points = sample.points;
  if (!sample.sorted) {
    sorted_copy = sample.points;
    std::sort(sorted_copy.begin(), sorted_copy.end());
    points = sorted_copy;
  }
  FittedModel f{m, std::vector<double>(m.dim()), std::vector<double>(m.dim()), sample.size(), 0.0};
  const double n = static_cast<double>(sample.size());
  if (m.is_histogram()) {
    const auto counts = bin_counts(m, points);
    for (std::size_t c = 0; c < m.dim(); ++c) {
      const double w = m.cell_width(c);
      const double freq = static_cast<double>(counts[c]) / n;
      f.coeffs[c] = freq / std::sqrt(w);
      f.sq_means[c] = freq / w;
    }
  } else {
    for (double x : points) {
      for (std::size_t l = 0; l < m.dim(); ++l) {
        const double v = m.basis_eval(l, x);
        f.coeffs[l] += v;
        f.sq_means[l] += v * v;
      }
    }
    for (std::size_t l = 0; l < m.dim(); ++l) {
      f.coeffs[l] /= n;
      f.sq_means[l] /= n;
    }
  }
  for (double c : f.coeffs) f.emp_contrast -= c * c;
  return f;
}

double empirical_contrast(const FittedModel& f) {
  double total = 0.0;
  for (double c : f.coeffs) total -= c * c;
  return total;
}

double p_term(const FittedModel& f, const ExactModelQuantities& q) {
  if (q.model_id != f.model.id() || q.pop_coeffs.size() != f.coeffs.size()) {
    throw ArgumentError("p_term: quantities computed for '" + q.model_id + "', fit is for '" +
                        f.model.id() + "'");
  }
  double total = 0.0;
  for (std::size_t l = 0; l < f.coeffs.size(); ++l) {
    const double diff = f.coeffs[l] - q.pop_coeffs[l];
    total += diff * diff;
  }
  return total;
}

double exact_loss(const FittedModel& f, const ExactModelQuantities& q, const Density& d) {
  (void)d;  // bias_sq in q already carries ||s||^2
  return q.bias_sq + p_term(f, q);
}

}  // namespace densel
