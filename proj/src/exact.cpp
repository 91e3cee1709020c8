#include "densel/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "densel/errors.hpp"

namespace densel {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double top_eigenvalue(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  return std::max(0.0, solver.eigenvalues().maxCoeff());
}

std::vector<double> histogram_cell_probs(const ModelSpec& m, const Density& d) {
  std::vector<double> probs(m.dim());
  double prev = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i) {
    const double next = d.cdf(m.edge(i + 1));
    probs[i] = next - prev;
    prev = next;
  }
  return probs;
}

// Sum of P/mu and of P^2/mu over the cells.
std::pair<double, double> histogram_moments(const ModelSpec& m, std::span<const double> probs) {
  double first = 0.0, second = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double w = m.cell_width(i);
    first += probs[i] / w;
    second += probs[i] * probs[i] / w;
  }
  return {first, second};
}

// E[psi_a psi_b] for Fourier indices (0, cos1, sin1, cos2, ...).
double fourier_gram(const FourierCoefficients& fc, std::size_t a, std::size_t b) {
  auto A = [&](long long k) { return fc.cos_moment(static_cast<std::size_t>(std::llabs(k))); };
  auto B = [&](long long k) {
    const double v = fc.sin_moment(static_cast<std::size_t>(std::llabs(k)));
    return k < 0 ? -v : v;
  };
  if (a > b) std::swap(a, b);
  if (b == 0) return 1.0;
  const long long kb = static_cast<long long>((b + 1) / 2);
  const bool b_cos = b % 2 == 1;
  if (a == 0) return std::numbers::sqrt2 * (b_cos ? A(kb) : B(kb));
  const long long ka = static_cast<long long>((a + 1) / 2);
  const bool a_cos = a % 2 == 1;
  if (a_cos && b_cos) return A(ka - kb) + A(ka + kb);
  if (!a_cos && !b_cos) return A(ka - kb) - A(ka + kb);
  // 2 cos(k x) sin(l x) = sin((l + k) x) + sin((l - k) x)
  const long long kc = a_cos ? ka : kb;
  const long long ks = a_cos ? kb : ka;
  return B(ks + kc) + B(ks - kc);
}

std::vector<double> fourier_pop_coeffs(const ModelSpec& m, const FourierCoefficients& fc) {
  const std::size_t dim = m.dim();
  const std::size_t j = (dim - 1) / 2;
  if (fc.max_k() < j) throw ArgumentError("Fourier coefficient table too short for model");
  std::vector<double> c(dim);
  c[0] = 1.0;
  for (std::size_t k = 1; k <= j; ++k) {
    c[2 * k - 1] = std::numbers::sqrt2 * fc.cos_moment(k);
    c[2 * k] = std::numbers::sqrt2 * fc.sin_moment(k);
  }
  return c;
}

}  // namespace

FourierCoefficients FourierCoefficients::compute(const Density& d, std::size_t max_k) {
  FourierCoefficients fc;
  fc.cos_.assign(max_k + 1, 0.0);
  fc.sin_.assign(max_k + 1, 0.0);
  fc.cos_[0] = 1.0;
  for (std::size_t k = 1; k <= max_k; ++k) {
    const double w = kTwoPi * static_cast<double>(k);
    switch (d.kind()) {
      case DensityKind::Uniform:
        break;
      case DensityKind::PiecewiseConstant: {
        double c = 0.0, s = 0.0;
        for (std::size_t i = 0; i < d.heights().size(); ++i) {
          const double a = d.breaks()[i], b = d.breaks()[i + 1], h = d.heights()[i];
          c += h * (std::sin(w * b) - std::sin(w * a)) / w;
          s += h * (std::cos(w * a) - std::cos(w * b)) / w;
        }
        fc.cos_[k] = c;
        fc.sin_[k] = s;
        break;
      }
      case DensityKind::PowerLaw: {
        // Pieces equal in x keep the phase change per piece at pi/2; the
        // density's own substitution handles the x^(-1/4) end.
        const std::size_t pieces = 4 * k;
        const double tol = 1e-9 / static_cast<double>(pieces);
        double c = 0.0, s = 0.0;
        for (std::size_t i = 0; i < pieces; ++i) {
          const double lo = static_cast<double>(i) / static_cast<double>(pieces);
          const double hi = i + 1 == pieces ? 1.0 : static_cast<double>(i + 1) / static_cast<double>(pieces);
          c += d.integrate_against([w](double x) { return std::cos(w * x); }, lo, hi, tol, 1);
          s += d.integrate_against([w](double x) { return std::sin(w * x); }, lo, hi, tol, 1);
        }
        fc.cos_[k] = c;
        fc.sin_[k] = s;
        break;
      }
    }
  }
  return fc;
}

ExactModelQuantities exact_quantities(const ModelSpec& m, const Density& d, std::size_t n) {
  FourierCoefficients fc;
  if (!m.is_histogram()) fc = FourierCoefficients::compute(d, (m.dim() - 1) / 2);
  return exact_quantities(m, d, n, fc);
}

ExactModelQuantities exact_quantities(const ModelSpec& m, const Density& d, std::size_t n,
                                      const FourierCoefficients& fc) {
  ExactModelQuantities q;
  q.model_id = m.id();
  q.dim = m.dim();
  double first_moment = 0.0;  // P(sum_lambda psi_lambda^2)
  if (m.is_histogram()) {
    const auto probs = histogram_cell_probs(m, d);
    q.pop_coeffs.resize(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i) q.pop_coeffs[i] = probs[i] / std::sqrt(m.cell_width(i));
    auto [first, second] = histogram_moments(m, probs);
    first_moment = first;
    q.sm_norm_sq = second;
  } else {
    q.pop_coeffs = fourier_pop_coeffs(m, fc);
    for (double c : q.pop_coeffs) q.sm_norm_sq += c * c;
    first_moment = static_cast<double>(m.dim());
  }
  q.D = std::max(0.0, first_moment - q.sm_norm_sq);
  q.bias_sq = std::max(0.0, d.l2_norm_sq() - q.sm_norm_sq);
  q.R = static_cast<double>(n) * q.bias_sq + q.D;
  return q;
}

double sup_norm_sq(const ModelSpec& m) {
  if (!m.is_histogram()) return static_cast<double>(m.dim());
  double best = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i) best = std::max(best, 1.0 / m.cell_width(i));
  return best;
}

double max_variance(const ModelSpec& m, const Density& d) {
  FourierCoefficients fc;
  if (!m.is_histogram()) fc = FourierCoefficients::compute(d, m.dim() - 1);
  return max_variance(m, d, fc);
}

double max_variance(const ModelSpec& m, const Density& d, const FourierCoefficients& fc) {
  const auto dim = static_cast<Eigen::Index>(m.dim());
  Eigen::MatrixXd cov(dim, dim);
  if (m.is_histogram()) {
    // Cov = diag(P/mu) - b b^T with b = P / sqrt(mu).
    const auto probs = histogram_cell_probs(m, d);
    Eigen::VectorXd b(dim);
    for (Eigen::Index i = 0; i < dim; ++i) b[i] = probs[i] / std::sqrt(m.cell_width(i));
    cov = -b * b.transpose();
    for (Eigen::Index i = 0; i < dim; ++i) cov(i, i) += probs[i] / m.cell_width(i);
  } else {
    if (fc.max_k() + 1 < m.dim()) throw ArgumentError("Fourier table must reach 2j for v^2");
    const auto mean = fourier_pop_coeffs(m, fc);
    for (Eigen::Index a = 0; a < dim; ++a) {
      for (Eigen::Index b = a; b < dim; ++b) {
        const double v = fourier_gram(fc, a, b) - mean[a] * mean[b];
        cov(a, b) = v;
        cov(b, a) = v;
      }
    }
  }
  return top_eigenvalue(cov);
}

ExactTable::ExactTable(ModelCollection collection, Density density, std::size_t n)
    : collection_(std::move(collection)), density_(std::move(density)), n_(n) {
  if (n == 0) throw ArgumentError("ExactTable: n must be positive");
  const std::size_t count = collection_.models.size();
  D_.resize(count);
  bias_sq_.resize(count);
  sm_norm_sq_.resize(count);
  const double norm_sq = density_.l2_norm_sq();
  if (collection_.kind == CollectionKind::Fourier) {
    std::size_t max_j = 0;
    for (const auto& m : collection_.models) max_j = std::max(max_j, (m.dim() - 1) / 2);
    fourier_ = FourierCoefficients::compute(density_, 2 * max_j);
    for (std::size_t i = 0; i < count; ++i) {
      const auto q = exact_quantities(collection_.models[i], density_, n_, fourier_);
      D_[i] = q.D;
      bias_sq_[i] = q.bias_sq;
      sm_norm_sq_[i] = q.sm_norm_sq;
    }
  } else {
    offsets_.resize(count + 1, 0);
    for (std::size_t i = 0; i < count; ++i) offsets_[i + 1] = offsets_[i] + collection_.models[i].dim();
    probs_.resize(offsets_.back());
    for (std::size_t i = 0; i < count; ++i) {
      const auto& m = collection_.models[i];
      double prev = 0.0;
      for (std::size_t c = 0; c < m.dim(); ++c) {
        const double next = density_.cdf(m.edge(c + 1));
        probs_[offsets_[i] + c] = next - prev;
        prev = next;
      }
      auto [first, second] = histogram_moments(m, cell_probs(i));
      sm_norm_sq_[i] = second;
      D_[i] = std::max(0.0, first - second);
      bias_sq_[i] = std::max(0.0, norm_sq - second);
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (R(i) < R(risk_min_)) risk_min_ = i;
    if (D_[i] > D_[d_max_]) d_max_ = i;
    ++strata_[static_cast<long long>(std::floor(R(i)))];
  }
}

std::span<const double> ExactTable::cell_probs(std::size_t i) const {
  if (offsets_.empty()) throw ArgumentError("cell_probs: not a histogram collection");
  return std::span<const double>(probs_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

ExactModelQuantities ExactTable::quantities(std::size_t i) const {
  const auto& m = model(i);
  ExactModelQuantities q;
  q.model_id = m.id();
  q.dim = m.dim();
  q.D = D_[i];
  q.bias_sq = bias_sq_[i];
  q.R = R(i);
  q.sm_norm_sq = sm_norm_sq_[i];
  if (m.is_histogram()) {
    const auto probs = cell_probs(i);
    q.pop_coeffs.resize(m.dim());
    for (std::size_t c = 0; c < m.dim(); ++c) q.pop_coeffs[c] = probs[c] / std::sqrt(m.cell_width(c));
  } else {
    q.pop_coeffs = fourier_pop_coeffs(m, fourier_);
  }
  return q;
}

std::size_t ExactTable::stratum_size(long long k) const {
  auto it = strata_.find(k);
  return it == strata_.end() ? 0 : it->second;
}

PairDiagnostics pair_diagnostics(const ExactTable& table, std::size_t i, std::size_t j,
                                 double gamma) {
  const auto& m = table.model(i);
  const auto& mp = table.model(j);
  if (m.basis() != mp.basis()) throw UnsupportedPair("pair_diagnostics: mixed basis kinds");
  const double n = static_cast<double>(table.n());
  PairDiagnostics out;
  if (m.is_histogram()) {
    auto edges = m.edges();
    const auto other = mp.edges();
    edges.insert(edges.end(), other.begin(), other.end());
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    const ModelSpec refined = ModelSpec::histogram(edges);
    double v_formula = 0.0;
    for (std::size_t c = 0; c < refined.dim(); ++c) {
      const double p = table.density().mass(edges[c], edges[c + 1]);
      v_formula = std::max(v_formula, p * (1.0 - p) / refined.cell_width(c));
    }
    out.e = sup_norm_sq(refined) / n;
    out.v_sq = v_formula;
    out.v_sq_sup = max_variance(refined, table.density());
  } else {
    const ModelSpec& larger = m.dim() >= mp.dim() ? m : mp;
    out.e = static_cast<double>(larger.dim()) / n;
    out.v_sq_sup = max_variance(larger, table.density(), table.fourier());
    out.v_sq = out.v_sq_sup;
  }
  const double Ri = table.R(i), Rj = table.R(j);
  const auto stratum = [&](double r) {
    return static_cast<double>(table.stratum_size(static_cast<long long>(std::floor(r))));
  };
  out.l_ngamma = std::log(1.0 + stratum(Ri)) + std::log(1.0 + stratum(Rj)) +
                 std::log((Ri + 1.0) * (Rj + 1.0)) + std::pow(std::log(n), gamma);
  const double r_max = std::max(Ri, Rj);
  const double l2 = out.l_ngamma * out.l_ngamma;
  out.v_ratio = std::pow(out.v_sq / r_max, 2) * l2;
  out.e_ratio = out.e / r_max * l2;
  const std::size_t mo = table.risk_minimizer();
  const std::size_t ms = table.max_variance_model();
  out.br_oracle = table.R(mo) / table.D(ms);
  out.br_bias = n * table.bias_sq(ms) / table.D(ms);
  return out;
}

}  // namespace densel
