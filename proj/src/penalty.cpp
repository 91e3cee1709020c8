#include "densel/penalty.hpp"

#include <cmath>

#include "densel/errors.hpp"

namespace densel {

namespace {

void require_pairs(std::size_t n, const char* what) {
  if (n < 2) throw DegenerateSample(std::string(what) + ": needs n >= 2 (formula divides by n - 1)");
}

// psi_lambda(X_i), row-major n x d.
std::vector<double> basis_matrix(const ModelSpec& m, const Sample& sample) {
  const std::size_t n = sample.size(), d = m.dim();
  std::vector<double> out(n * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sample.points[i];
    if (m.is_histogram()) {
      const std::size_t c = m.cell_of(x);
      out[i * d + c] = 1.0 / std::sqrt(m.cell_width(c));
    } else {
      for (std::size_t l = 0; l < d; ++l) out[i * d + l] = m.basis_eval(l, x);
    }
  }
  return out;
}

}  // namespace

double ResamplingScheme::weight_variance(std::size_t n) const {
  require_pairs(n, "weight_variance");
  const double nn = static_cast<double>(n);
  switch (kind) {
    case SchemeKind::Efron:
    case SchemeKind::Rademacher:
      return 1.0 - 1.0 / nn;
    case SchemeKind::LeaveOneOut:
      return 1.0 / (nn - 1.0);
  }
  return 0.0;
}

void ResamplingScheme::draw(RngStream& rng, std::span<double> w) const {
  const std::size_t n = w.size();
  switch (kind) {
    case SchemeKind::Efron:
      std::fill(w.begin(), w.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) w[rng.below(n)] += 1.0;
      break;
    case SchemeKind::Rademacher:
      for (auto& x : w) x = (rng.next_u64() >> 63) ? 2.0 : 0.0;
      break;
    case SchemeKind::LeaveOneOut: {
      const double keep = static_cast<double>(n) / static_cast<double>(n - 1);
      std::fill(w.begin(), w.end(), keep);
      w[rng.below(n)] = 0.0;
      break;
    }
  }
}

std::string ResamplingScheme::name() const {
  switch (kind) {
    case SchemeKind::Efron:
      return "efron";
    case SchemeKind::Rademacher:
      return "rademacher";
    case SchemeKind::LeaveOneOut:
      return "leave-one-out";
  }
  return {};
}

SchemeKind parse_scheme_kind(const std::string& name) {
  if (name == "efron") return SchemeKind::Efron;
  if (name == "rademacher") return SchemeKind::Rademacher;
  if (name == "leave-one-out" || name == "loo") return SchemeKind::LeaveOneOut;
  throw InvalidScheme("unknown resampling scheme '" + name + "'");
}

double resampling_dw(const FittedModel& f) {
  require_pairs(f.n, "resampling_dw");
  double total = 0.0;
  for (std::size_t l = 0; l < f.coeffs.size(); ++l) {
    total += f.sq_means[l] - f.coeffs[l] * f.coeffs[l];
  }
  const double n = static_cast<double>(f.n);
  return std::max(0.0, n / (n - 1.0) * total);
}

PenaltyValue resampling_penalty(const FittedModel& f, const Sample& sample) {
  if (sample.size() != f.n) throw ArgumentError("resampling_penalty: sample does not match fit");
  return {f.model.id(), 2.0 * resampling_dw(f) / static_cast<double>(f.n)};
}

MonteCarloPenalty resampling_penalty_mc(const FittedModel& f, const Sample& sample,
                                        const ResamplingScheme& scheme, std::size_t B,
                                        RngStream& rng) {
  const std::size_t n = sample.size();
  require_pairs(n, "resampling_penalty_mc");
  if (n != f.n) throw ArgumentError("resampling_penalty_mc: sample does not match fit");
  if (B == 0) throw ArgumentError("resampling_penalty_mc: B must be positive");
  const double vw = scheme.weight_variance(n);
  if (!(vw > 0.0)) throw InvalidScheme("resampling scheme has zero weight variance");

  const std::size_t d = f.model.dim();
  const auto psi = basis_matrix(f.model, sample);
  std::vector<double> w(n), proj(d);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t b = 0; b < B; ++b) {
    scheme.draw(rng, w);
    double wbar = 0.0;
    for (double x : w) wbar += x;
    wbar /= static_cast<double>(n);
    std::fill(proj.begin(), proj.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double c = w[i] - wbar;
      if (c == 0.0) continue;
      for (std::size_t l = 0; l < d; ++l) proj[l] += c * psi[i * d + l];
    }
    double sq = 0.0;
    for (double p : proj) sq += p * p;
    sq /= static_cast<double>(n) * static_cast<double>(n);  // sum (nu^W psi)^2
    sum += sq;
    sum_sq += sq * sq;
  }
  const double Bd = static_cast<double>(B);
  const double mean = sum / Bd;
  const double var = B > 1 ? std::max(0.0, (sum_sq - Bd * mean * mean) / (Bd - 1.0)) : 0.0;
  const double scale = 2.0 / vw;
  return {{f.model.id(), scale * mean}, scale * std::sqrt(var / Bd)};
}

PenaltyValue dimension_penalty(const ModelSpec& m, double K, std::size_t n) {
  if (!(K >= 0.0)) throw ArgumentError("dimension_penalty: K must be non-negative");
  if (n == 0) throw ArgumentError("dimension_penalty: n must be positive");
  return {m.id(), K * static_cast<double>(m.dim()) / static_cast<double>(n)};
}

PenaltyValue ideal_deterministic_penalty(const ExactModelQuantities& q, std::size_t n, double K) {
  if (!(K >= 0.0)) throw ArgumentError("ideal_deterministic_penalty: K must be non-negative");
  if (n == 0) throw ArgumentError("ideal_deterministic_penalty: n must be positive");
  return {q.model_id, K * q.D / static_cast<double>(n)};
}

double resampling_dw_double_sum(const ModelSpec& m, const Sample& sample) {
  const std::size_t n = sample.size(), d = m.dim();
  require_pairs(n, "resampling_dw_double_sum");
  const auto psi = basis_matrix(m, sample);
  const double nn = static_cast<double>(n);
  double total = 0.0;
  for (std::size_t l = 0; l < d; ++l) {
    double diag = 0.0, cross = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = psi[i * d + l];
      diag += a * a;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) cross += a * psi[j * d + l];
      }
    }
    total += diag / nn - cross / (nn * (nn - 1.0));
  }
  return total;
}

double ustat_double_sum(const ModelSpec& m, const Sample& sample,
                        std::span<const double> pop_coeffs) {
  const std::size_t n = sample.size(), d = m.dim();
  require_pairs(n, "ustat_double_sum");
  if (pop_coeffs.size() != d) throw ArgumentError("ustat_double_sum: wrong coefficient count");
  auto centered = basis_matrix(m, sample);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < d; ++l) centered[i * d + l] -= pop_coeffs[l];
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double dot = 0.0;
      for (std::size_t l = 0; l < d; ++l) dot += centered[i * d + l] * centered[j * d + l];
      total += dot;
    }
  }
  const double nn = static_cast<double>(n);
  return total / (nn * (nn - 1.0));
}

}  // namespace densel
