#include "densel/conc_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "densel/errors.hpp"
#include "densel/exact.hpp"
#include "densel/fit.hpp"
#include "densel/format.hpp"
#include "densel/parallel.hpp"
#include "densel/penalty.hpp"

namespace densel {

namespace {

struct RepStats {
  double p = 0.0;   // ||s_m - s^_m||^2
  double dw = 0.0;  // D_m^W
  double u = 0.0;   // explicit double-sum U (only when requested)
};

std::vector<RepStats> simulate(const ModelSpec& m, const Density& d, const ConcConfig& cfg,
                               const ExactModelQuantities& q, bool with_ustat) {
  if (cfg.n < 2) throw DegenerateSample("concentration checks need n >= 2");
  if (cfg.replications == 0) throw ArgumentError("concentration checks need R >= 1");
  std::vector<RepStats> out(cfg.replications);
  parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
    RngStream rng(cfg.seed, r, "conc");
    const Sample s = sample(d, cfg.n, rng);
    const FittedModel f = fit_model(m, s);
    out[r].p = p_term(f, q);
    out[r].dw = resampling_dw(f);
    if (with_ustat) out[r].u = ustat_double_sum(m, s, q.pop_coeffs);
  });
  return out;
}

TailRow tail_row(std::string bound, double x, double threshold, double cap, std::size_t exceed,
                 std::size_t R) {
  TailRow row;
  row.bound = std::move(bound);
  row.x = x;
  row.threshold = threshold;
  row.cap = cap;
  row.frequency = static_cast<double>(exceed) / static_cast<double>(R);
  row.mc_se = std::sqrt(row.frequency * (1.0 - row.frequency) / static_cast<double>(R));
  row.pass = row.frequency <= row.cap + 3.0 * row.mc_se;
  if (cap < 5.0 / static_cast<double>(R)) row.warning = "insufficient resolution";
  return row;
}

template <class Dev>
std::size_t count_exceed(const std::vector<RepStats>& reps, double threshold, Dev deviation) {
  std::size_t count = 0;
  for (const auto& r : reps) {
    if (deviation(r) > threshold) ++count;
  }
  return count;
}

double power_term(const BoundConstants& c, double x) {
  return std::pow(c.D, 0.75) * std::pow(c.e * x * x, 0.25);
}

}  // namespace

BoundConstants BoundConstants::compute(const ModelSpec& m, const Density& d, std::size_t n) {
  BoundConstants c;
  c.n = n;
  c.D = exact_quantities(m, d, n).D;
  c.e = sup_norm_sq(m) / static_cast<double>(n);
  c.v_sq = max_variance(m, d);
  return c;
}

double p_upper_threshold(const BoundConstants& c, double x) {
  return (power_term(c, x) + 0.7 * std::sqrt(c.D * c.v_sq * x) + 0.15 * c.v_sq * x +
          c.e * x * x) /
         static_cast<double>(c.n);
}

double p_lower_threshold(const BoundConstants& c, double x) {
  return (1.8 * power_term(c, x) + 1.71 * std::sqrt(c.D * c.v_sq * x) + 4.06 * c.e * x * x) /
         static_cast<double>(c.n);
}

double dw_upper_threshold(const BoundConstants& c, double x) {
  const double nm1 = static_cast<double>(c.n) - 1.0;
  return std::sqrt(8.0 * c.e * c.D * x) + c.e * (4.0 * x / 3.0 + std::pow(40.3 * x, 2) / nm1) +
         (9.0 * power_term(c, x) + 7.61 * std::sqrt(c.v_sq * c.D * x)) / nm1;
}

double dw_lower_threshold(const BoundConstants& c, double x) {
  const double nm1 = static_cast<double>(c.n) - 1.0;
  return std::sqrt(8.0 * c.e * c.D * x) + c.e * (4.0 * x / 3.0 + std::pow(19.1 * x, 2) / nm1) +
         (5.31 * power_term(c, x) + 3.0 * std::sqrt(c.v_sq * c.D * x) + 3.0 * c.v_sq * x) / nm1;
}

double ustat_upper_threshold(const BoundConstants& c, double x) {
  const double nm1 = static_cast<double>(c.n) - 1.0;
  return (5.31 * power_term(c, x) + 3.0 * std::sqrt(c.v_sq * c.D * x) + 3.0 * c.v_sq * x +
          c.e * std::pow(19.1 * x, 2)) /
         nm1;
}

double ustat_lower_threshold(const BoundConstants& c, double x) {
  const double nm1 = static_cast<double>(c.n) - 1.0;
  return (9.0 * power_term(c, x) + 7.61 * std::sqrt(c.v_sq * c.D * x) +
          c.e * std::pow(40.3 * x, 2)) /
         nm1;
}

bool TailReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const TailRow& r) { return r.pass; }) &&
         std::all_of(checks.begin(), checks.end(), [](const CheckRow& c) { return c.pass; });
}

TailReport check_p_concentration(const ModelSpec& m, const Density& d, const ConcConfig& cfg) {
  const auto q = exact_quantities(m, d, cfg.n);
  const auto c = BoundConstants::compute(m, d, cfg.n);
  const auto reps = simulate(m, d, cfg, q, false);
  const double mean = c.D / static_cast<double>(cfg.n);
  TailReport report{"p", {}, {}, cfg.replications, cfg.seed};
  for (double x : cfg.xs) {
    const double up = p_upper_threshold(c, x);
    const double lo = p_lower_threshold(c, x);
    report.rows.push_back(tail_row("p-upper", x, up, std::exp(-x / 20.0),
                                   count_exceed(reps, up, [&](const RepStats& r) { return r.p - mean; }),
                                   cfg.replications));
    report.rows.push_back(tail_row("p-lower", x, lo, 2.8 * std::exp(-x / 20.0),
                                   count_exceed(reps, lo, [&](const RepStats& r) { return mean - r.p; }),
                                   cfg.replications));
  }
  return report;
}

TailReport check_resampling_concentration(const ModelSpec& m, const Density& d,
                                          const ConcConfig& cfg) {
  const auto q = exact_quantities(m, d, cfg.n);
  const auto c = BoundConstants::compute(m, d, cfg.n);
  const auto reps = simulate(m, d, cfg, q, false);
  const double n = static_cast<double>(cfg.n);
  const std::size_t R = cfg.replications;
  TailReport report{"resampling", {}, {}, R, cfg.seed};
  for (double x : cfg.xs) {
    const double up = dw_upper_threshold(c, x);
    const double lo = dw_lower_threshold(c, x);
    const double ex = std::exp(-x);
    report.rows.push_back(tail_row("dw-upper", x, up, 4.8 * ex,
                                   count_exceed(reps, up, [&](const RepStats& r) { return r.dw - c.D; }), R));
    report.rows.push_back(tail_row("dw-lower", x, lo, 3.0 * ex,
                                   count_exceed(reps, lo, [&](const RepStats& r) { return c.D - r.dw; }), R));
    std::size_t either = 0;
    for (const auto& r : reps) {
      if (r.dw - c.D > up || c.D - r.dw > lo) ++either;
    }
    report.rows.push_back(tail_row("dw-two-sided", x, std::max(up, lo), 7.8 * ex, either, R));
    const double pu = ustat_upper_threshold(c, x);
    const double pl = ustat_lower_threshold(c, x);
    report.rows.push_back(tail_row("p-minus-dw", x, pu, 2.0 * ex,
                                   count_exceed(reps, pu, [&](const RepStats& r) { return r.p - r.dw / n; }), R));
    report.rows.push_back(tail_row("dw-minus-p", x, pl, 3.8 * ex,
                                   count_exceed(reps, pl, [&](const RepStats& r) { return r.dw / n - r.p; }), R));
  }
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& r : reps) {
    sum += r.dw;
    sum_sq += r.dw * r.dw;
  }
  const double Rd = static_cast<double>(R);
  const double mean = sum / Rd;
  const double var = R > 1 ? std::max(0.0, (sum_sq - Rd * mean * mean) / (Rd - 1.0)) : 0.0;
  const double se = std::sqrt(var / Rd);
  CheckRow unbiased{"unbiasedness", std::abs(mean - c.D), 3.0 * se, se, false};
  unbiased.pass = unbiased.value <= unbiased.tolerance || unbiased.value <= 1e-12;
  report.checks.push_back(unbiased);
  return report;
}

TailReport check_ustat_concentration(const ModelSpec& m, const Density& d, const ConcConfig& cfg) {
  const auto q = exact_quantities(m, d, cfg.n);
  const auto c = BoundConstants::compute(m, d, cfg.n);
  const auto reps = simulate(m, d, cfg, q, true);
  const double n = static_cast<double>(cfg.n);
  const std::size_t R = cfg.replications;
  TailReport report{"ustat", {}, {}, R, cfg.seed};
  for (double x : cfg.xs) {
    const double up = ustat_upper_threshold(c, x);
    const double lo = ustat_lower_threshold(c, x);
    const double ex = std::exp(-x);
    report.rows.push_back(tail_row("ustat-upper", x, up, 2.0 * ex,
                                   count_exceed(reps, up, [](const RepStats& r) { return r.u; }), R));
    report.rows.push_back(tail_row("ustat-lower", x, lo, 3.8 * ex,
                                   count_exceed(reps, lo, [](const RepStats& r) { return -r.u; }), R));
  }
  double worst = 0.0;
  for (const auto& r : reps) {
    const double scale = r.p + r.dw / n;
    const double err = std::abs(r.u - (r.p - r.dw / n));
    worst = std::max(worst, scale > 0.0 ? err / scale : err);
  }
  report.checks.push_back({"identity", worst, 1e-10, 0.0, worst <= 1e-10});
  return report;
}

RegularizationReport regularization_comparison(const ModelSpec& m, const Density& d,
                                               const ConcConfig& cfg) {
  const auto q = exact_quantities(m, d, cfg.n);
  const auto reps = simulate(m, d, cfg, q, false);
  const double n = static_cast<double>(cfg.n);
  auto sd = [&](auto value) {
    double sum = 0.0;
    for (const auto& r : reps) sum += value(r);
    const double mean = sum / static_cast<double>(reps.size());
    double ss = 0.0;
    for (const auto& r : reps) ss += (value(r) - mean) * (value(r) - mean);
    return reps.size() > 1 ? std::sqrt(ss / static_cast<double>(reps.size() - 1)) : 0.0;
  };
  RegularizationReport out;
  out.replications = reps.size();
  out.sd_dw = sd([](const RepStats& r) { return r.dw; });
  out.sd_np = sd([&](const RepStats& r) { return n * r.p; });
  out.defined = out.sd_np > 0.0;
  out.ratio = out.defined ? out.sd_dw / out.sd_np : std::numeric_limits<double>::quiet_NaN();
  return out;
}

void write_tail_csv(std::ostream& os, const TailReport& report) {
  os << "bound,x,threshold,frequency,cap,mc_se,pass\n";
  for (const auto& r : report.rows) {
    os << r.bound << ',' << format_real(r.x) << ',' << format_real(r.threshold) << ','
       << format_real(r.frequency) << ',' << format_real(r.cap) << ',' << format_real(r.mc_se)
       << ',' << (r.pass ? "true" : "false") << '\n';
  }
  for (const auto& c : report.checks) {
    os << c.name << ",0," << format_real(c.tolerance) << ',' << format_real(c.value) << ','
       << format_real(c.tolerance) << ',' << format_real(c.mc_se) << ','
       << (c.pass ? "true" : "false") << '\n';
  }
}

void write_regularization_csv(std::ostream& os, const RegularizationReport& report) {
  os << "sd_dw,sd_np,ratio,reps,defined\n";
  os << format_real(report.sd_dw) << ',' << format_real(report.sd_np) << ','
     << format_real(report.ratio) << ',' << report.replications << ','
     << (report.defined ? "true" : "false") << '\n';
}

}  // namespace densel
