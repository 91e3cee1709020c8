#include "densel/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "densel/errors.hpp"
#include "densel/format.hpp"
#include "densel/parallel.hpp"
#include "densel/rng.hpp"

namespace densel {

namespace {

constexpr double kLossEps = 1e-300;

void reset_candidates(const ExactTable& table, CollectionEvaluation& out) {
  const std::size_t M = table.size();
  if (out.candidates.size() == M && (M == 0 || out.candidates.back().id == table.model(M - 1).id())) {
    return;
  }
  out.candidates.clear();
  out.candidates.reserve(M);
  for (std::size_t i = 0; i < M; ++i) {
    const auto& m = table.model(i);
    out.candidates.push_back({m.id(), m.dim(), 0.0, 0.0});
  }
}

void evaluate_histograms(const ExactTable& table, std::span<const double> pts,
                         CollectionEvaluation& out) {
  const std::size_t n = pts.size();
  const double nd = static_cast<double>(n);
  // Number of points strictly below x.
  auto below = [&](double x) {
    return static_cast<std::size_t>(std::lower_bound(pts.begin(), pts.end(), x) - pts.begin());
  };
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& m = table.model(i);
    const auto probs = table.cell_probs(i);
    const std::size_t d = m.dim();
    double sum_sq = 0.0, sum_lin = 0.0, p = 0.0;
    std::size_t prev = 0;
    for (std::size_t c = 0; c < d; ++c) {
      const std::size_t next = c + 1 == d ? n : below(m.edge(c + 1));
      const double N = static_cast<double>(next - prev);
      prev = next;
      const double inv_mu = 1.0 / m.cell_width(c);
      sum_sq += N * N * inv_mu;
      sum_lin += N * inv_mu;
      const double diff = N / nd - probs[c];
      p += diff * diff * inv_mu;
    }
    const double coeff_sq = sum_sq / (nd * nd);
    out.candidates[i].contrast = -coeff_sq;
    out.dw[i] = n < 2 ? 0.0 : std::max(0.0, nd / (nd - 1.0) * (sum_lin / nd - coeff_sq));
    out.loss[i] = table.bias_sq(i) + p;
  }
}

void evaluate_fourier(const ExactTable& table, std::span<const double> pts,
                      CollectionEvaluation& out) {
  const std::size_t n = pts.size();
  const double nd = static_cast<double>(n);
  std::size_t J = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    J = std::max(J, std::get<FourierBasis>(table.model(i).structure()).j);
  }
  // Empirical and population coefficients of cos k / sin k, k = 1..J.
  std::vector<double> ec(J + 1, 0.0), es(J + 1, 0.0);
  for (double x : pts) {
    for (std::size_t k = 1; k <= J; ++k) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(k) * x;
      ec[k] += std::cos(t);
      es[k] += std::sin(t);
    }
  }
  const auto& fc = table.fourier();
  // Prefix sums over k of coefficient^2 and of (empirical - population)^2.
  std::vector<double> coeff_sq(J + 1, 0.0), p(J + 1, 0.0);
  for (std::size_t k = 1; k <= J; ++k) {
    const double c = std::numbers::sqrt2 * ec[k] / nd;
    const double s = std::numbers::sqrt2 * es[k] / nd;
    const double dc = c - std::numbers::sqrt2 * fc.cos_moment(k);
    const double ds = s - std::numbers::sqrt2 * fc.sin_moment(k);
    coeff_sq[k] = coeff_sq[k - 1] + c * c + s * s;
    p[k] = p[k - 1] + dc * dc + ds * ds;
  }
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& m = table.model(i);
    const std::size_t j = std::get<FourierBasis>(m.structure()).j;
    const double csq = 1.0 + coeff_sq[j];  // constant coefficient is 1
    out.candidates[i].contrast = -csq;
    // sum_lambda P_n psi^2 = d exactly, since 2cos^2 + 2sin^2 = 2.
    const double d = static_cast<double>(m.dim());
    out.dw[i] = n < 2 ? 0.0 : std::max(0.0, nd / (nd - 1.0) * (d - csq));
    out.loss[i] = table.bias_sq(i) + p[j];
  }
}

std::size_t argmin(std::span<const double> v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

std::string MethodSpec::name() const {
  switch (kind) {
    case MethodKind::SlopeDim: return "slope-dim";
    case MethodKind::Resampling: return "resampling";
    case MethodKind::ResamplingSlope: return "resampling-slope";
    case MethodKind::IdealK: return "ideal:" + format_real(K);
  }
  return "unknown";
}

MethodSpec MethodSpec::parse(const std::string& text) {
  if (text == "slope-dim") return {MethodKind::SlopeDim};
  if (text == "resampling") return {MethodKind::Resampling};
  if (text == "resampling-slope") return {MethodKind::ResamplingSlope};
  if (text.rfind("ideal:", 0) == 0) {
    const std::string v = text.substr(6);
    std::size_t used = 0;
    double K = 0.0;
    try {
      K = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size() || !std::isfinite(K) || K < 0.0) {
      throw ArgumentError("bad constant in method '" + text + "'");
    }
    return {MethodKind::IdealK, K};
  }
  throw ArgumentError("unknown method '" + text +
                      "' (expected slope-dim, resampling, resampling-slope or ideal:K)");
}

std::vector<MethodSpec> default_methods() {
  return {{MethodKind::SlopeDim}, {MethodKind::Resampling}, {MethodKind::ResamplingSlope}};
}

void evaluate_collection(const ExactTable& table, const Sample& s, CollectionEvaluation& out) {
  if (s.size() == 0) throw ArgumentError("evaluate_collection: empty sample");
  if (table.size() == 0) throw ArgumentError("evaluate_collection: empty collection");
  std::vector<double> sorted_copy;
  std::span<const double> pts = s.points;
  if (!s.sorted) {
    sorted_copy = s.points;
    std::sort(sorted_copy.begin(), sorted_copy.end());
    pts = sorted_copy;
  }
  reset_candidates(table, out);
  out.dw.assign(table.size(), 0.0);
  out.loss.assign(table.size(), 0.0);
  if (table.collection().kind == CollectionKind::Fourier) {
    evaluate_fourier(table, pts, out);
  } else {
    evaluate_histograms(table, pts, out);
  }
}

CollectionEvaluation evaluate_collection(const ExactTable& table, const Sample& sample) {
  CollectionEvaluation out;
  evaluate_collection(table, sample, out);
  return out;
}

MethodOutcome apply_method(const MethodSpec& method, const ExactTable& table,
                           CollectionEvaluation& eval) {
  const std::size_t M = eval.candidates.size();
  const double nd = static_cast<double>(table.n());
  MethodOutcome out;
  out.flag = "none";
  switch (method.kind) {
    case MethodKind::SlopeDim:
    case MethodKind::ResamplingSlope: {
      for (std::size_t i = 0; i < M; ++i) {
        eval.candidates[i].complexity = method.kind == MethodKind::SlopeDim
                                            ? static_cast<double>(eval.candidates[i].dim)
                                            : eval.dw[i];
      }
      const auto sel = slope_select(eval.candidates, JumpRule::MaximalJump, table.n());
      out.selected = sel.result.index;
      if (sel.fallback) out.flag = "no-jump";
      break;
    }
    case MethodKind::Resampling:
    case MethodKind::IdealK: {
      std::vector<double> pens(M);
      for (std::size_t i = 0; i < M; ++i) {
        pens[i] = method.kind == MethodKind::Resampling ? 2.0 * eval.dw[i] / nd
                                                        : method.K * table.D(i) / nd;
      }
      out.selected = select_index(eval.candidates, pens);
      break;
    }
  }
  const double best = eval.loss[argmin(eval.loss)];
  const double chosen = eval.loss[out.selected];
  if (best <= kLossEps) {
    out.flag = "degenerate-oracle";
    out.ratio = chosen <= kLossEps ? 1.0 : std::numeric_limits<double>::infinity();
  } else {
    out.ratio = chosen / best;
  }
  return out;
}

double oracle_ratio(const Sample& sample, const ExactTable& table, const MethodSpec& method) {
  auto eval = evaluate_collection(table, sample);
  return apply_method(method, table, eval).ratio;
}

double nearest_rank(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ArgumentError("nearest_rank: empty input");
  const double N = static_cast<double>(sorted.size());
  // The small slack keeps ceil(0.95 * 20) at 19 despite rounding of q.
  auto rank = static_cast<std::size_t>(std::ceil(q * N - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

Summary summarize(std::span<const double> ratios) {
  if (ratios.empty()) throw ArgumentError("summarize: empty input");
  std::vector<double> sorted(ratios.begin(), ratios.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double r : sorted) sum += r;
  return {sum / static_cast<double>(sorted.size()), nearest_rank(sorted, 0.5),
          nearest_rank(sorted, 0.95)};
}

SimulationReport run_simulation(const ExactTable& table, const SimulationConfig& cfg) {
  if (cfg.N == 0) throw ArgumentError("run_simulation: N must be >= 1");
  if (cfg.n < 2) throw ArgumentError("run_simulation: n must be >= 2");
  if (cfg.methods.empty()) throw ArgumentError("run_simulation: no methods");
  if (table.n() != cfg.n) throw ArgumentError("run_simulation: table built for a different n");
  const std::size_t K = cfg.methods.size();
  const std::size_t threads = std::max<std::size_t>(1, cfg.threads);

  std::vector<MethodOutcome> outcomes(cfg.N * K);
  std::vector<std::size_t> oracle(cfg.N);
  std::vector<CollectionEvaluation> buffers(std::min(threads, cfg.N));
  parallel_for(cfg.N, threads, [&](std::size_t r, std::size_t worker) {
    RngStream rng(cfg.seed, r, "data");
    const Sample s = sample(table.density(), cfg.n, rng);
    auto& eval = buffers[worker];
    evaluate_collection(table, s, eval);
    oracle[r] = argmin(eval.loss);
    for (std::size_t k = 0; k < K; ++k) outcomes[r * K + k] = apply_method(cfg.methods[k], table, eval);
  });

  SimulationReport rep;
  rep.N = cfg.N;
  rep.n = cfg.n;
  rep.collection = table.collection().kind;
  rep.seed = cfg.seed;
  rep.max_variance_model = table.model(table.max_variance_model()).id();
  rep.raw.reserve(cfg.N * K);
  for (std::size_t r = 0; r < cfg.N; ++r) {
    rep.oracle_models.push_back(table.model(oracle[r]).id());
    for (std::size_t k = 0; k < K; ++k) {
      const auto& o = outcomes[r * K + k];
      rep.raw.push_back({r, cfg.methods[k].name(), o.ratio, table.model(o.selected).id(), o.flag});
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    MethodSummary ms;
    ms.method = cfg.methods[k].name();
    std::vector<double> ratios(cfg.N);
    for (std::size_t r = 0; r < cfg.N; ++r) {
      ratios[r] = outcomes[r * K + k].ratio;
      if (outcomes[r * K + k].flag != "none") ++ms.flagged;
    }
    ms.stats = summarize(ratios);
    rep.methods.push_back(std::move(ms));
  }
  return rep;
}

SimulationReport run_example(int example, std::size_t n, std::size_t N,
                             const std::vector<MethodSpec>& methods, std::uint64_t seed,
                             std::size_t threads) {
  if (example != 1 && example != 2) throw ArgumentError("run_example: example must be 1 or 2");
  if (n < 2) throw ArgumentError("run_example: n must be >= 2");
  const auto kind = example == 1 ? CollectionKind::RegularHistograms : CollectionKind::TwoBlock;
  const ExactTable table(build_collection(kind, n), Density::power_law(), n);
  SimulationConfig cfg;
  cfg.collection = kind;
  cfg.n = n;
  cfg.N = N;
  cfg.methods = methods;
  cfg.seed = seed;
  cfg.threads = threads;
  return run_simulation(table, cfg);
}

SweepReport penalty_sweep(const ExactTable& table, std::span<const double> K_grid, std::size_t N,
                          std::uint64_t seed, std::size_t threads) {
  if (K_grid.empty()) throw ArgumentError("penalty_sweep: empty K grid");
  for (std::size_t i = 0; i < K_grid.size(); ++i) {
    if (!std::isfinite(K_grid[i]) || K_grid[i] < 0.0) {
      throw ArgumentError("penalty_sweep: K values must be finite and >= 0");
    }
    if (i > 0 && !(K_grid[i] > K_grid[i - 1])) {
      throw ArgumentError("penalty_sweep: K grid must be strictly increasing");
    }
  }
  if (N == 0) throw ArgumentError("penalty_sweep: N must be >= 1");
  if (table.n() < 2) throw ArgumentError("penalty_sweep: n must be >= 2");
  const std::size_t G = K_grid.size(), M = table.size();
  const double nd = static_cast<double>(table.n());
  const double d_star = table.D(table.max_variance_model());
  threads = std::max<std::size_t>(1, threads);

  std::vector<double> dim_ratio(N * G), orc_ratio(N * G);
  std::vector<CollectionEvaluation> buffers(std::min(threads, N));
  parallel_for(N, threads, [&](std::size_t r, std::size_t worker) {
    RngStream rng(seed, r, "data");
    const Sample s = sample(table.density(), table.n(), rng);
    auto& eval = buffers[worker];
    evaluate_collection(table, s, eval);
    const double best = eval.loss[argmin(eval.loss)];
    std::vector<double> pens(M);
    for (std::size_t g = 0; g < G; ++g) {
      for (std::size_t i = 0; i < M; ++i) pens[i] = K_grid[g] * table.D(i) / nd;
      const std::size_t sel = select_index(eval.candidates, pens);
      dim_ratio[r * G + g] = table.D(sel) / d_star;
      orc_ratio[r * G + g] = best > kLossEps ? eval.loss[sel] / best : 1.0;
    }
  });

  SweepReport out;
  out.N = N;
  out.K.assign(K_grid.begin(), K_grid.end());
  for (std::size_t g = 0; g < G; ++g) {
    double a = 0.0, b = 0.0;
    for (std::size_t r = 0; r < N; ++r) {
      a += dim_ratio[r * G + g];
      b += orc_ratio[r * G + g];
    }
    out.mean_dim_ratio.push_back(a / static_cast<double>(N));
    out.mean_oracle_ratio.push_back(b / static_cast<double>(N));
  }
  return out;
}

void write_summary_csv(std::ostream& os, const SimulationReport& report) {
  os << "method,mean,median,q95,N,n,seed\n";
  for (const auto& m : report.methods) {
    os << m.method << ',' << format_real(m.stats.mean) << ',' << format_real(m.stats.median) << ','
       << format_real(m.stats.q95) << ',' << report.N << ',' << report.n << ',' << report.seed
       << '\n';
  }
}

void write_raw_csv(std::ostream& os, const SimulationReport& report) {
  os << "rep,method,ratio,selected_model,flag\n";
  for (const auto& r : report.raw) {
    // Model ids of explicit histograms contain commas.
    const bool quote = r.selected_model.find(',') != std::string::npos;
    os << r.rep << ',' << r.method << ',' << format_real(r.ratio) << ','
       << (quote ? "\"" + r.selected_model + "\"" : r.selected_model) << ',' << r.flag << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const SweepReport& report) {
  os << "K,mean_dim_ratio,mean_oracle_ratio,N\n";
  for (std::size_t g = 0; g < report.K.size(); ++g) {
    os << format_real(report.K[g]) << ',' << format_real(report.mean_dim_ratio[g]) << ','
       << format_real(report.mean_oracle_ratio[g]) << ',' << report.N << '\n';
  }
}

}  // namespace densel
