#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "densel/conc_lab.hpp"
#include "densel/density.hpp"
#include "densel/errors.hpp"
#include "densel/exact.hpp"
#include "densel/fit.hpp"
#include "densel/format.hpp"
#include "densel/harness.hpp"
#include "densel/model.hpp"
#include "densel/penalty.hpp"
#include "densel/rng.hpp"
#include "densel/slope.hpp"

namespace densel::cli {

namespace {

struct UsageError : ArgumentError {
  using ArgumentError::ArgumentError;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw UsageError("bad number '" + text + "' in " + what);
  }
  return v;
}

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_real(item, what));
  if (out.empty()) throw UsageError(what + " is empty");
  return out;
}

std::string csv_field(const std::string& s) {
  return s.find(',') == std::string::npos ? s : "\"" + s + "\"";
}

// Flat "key = value" lines become "--key value" tokens placed right after the
// subcommand name, so that later command-line flags override them.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file argument");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) return args;
  if (args.empty() || args[0].rfind("-", 0) == 0) {
    throw UsageError("--config must follow a subcommand");
  }
  std::ifstream in(*path);
  if (!in) throw UsageError("cannot read config file '" + *path + "'");
  std::vector<std::string> injected;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(*path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty() || key == "config") {
      throw UsageError(*path + ":" + std::to_string(lineno) + ": bad key '" + key + "'");
    }
    injected.push_back("--" + key);
    injected.push_back(value);
  }
  args.insert(args.begin() + 1, injected.begin(), injected.end());
  return args;
}

struct DensityOpts {
  std::string name = "power-law";
  std::string breaks;
  std::string heights;

  Density build() const {
    if (name == "power-law") return Density::power_law();
    if (name == "uniform") return Density::uniform();
    if (name == "piecewise") {
      if (breaks.empty() || heights.empty()) {
        throw UsageError("--density piecewise needs --breaks and --heights");
      }
      return Density::piecewise_constant(parse_reals(breaks, "--breaks"),
                                         parse_reals(heights, "--heights"));
    }
    throw UsageError("unknown density '" + name + "' (expected power-law, uniform or piecewise)");
  }
};

void add_density(CLI::App* app, DensityOpts& d) {
  app->add_option("--density", d.name, "power-law, uniform or piecewise");
  app->add_option("--breaks", d.breaks, "piecewise breaks, comma separated, from 0 to 1");
  app->add_option("--heights", d.heights, "piecewise heights, comma separated");
}

void add_config_flag(CLI::App* app) {
  // Handled before parsing; registered so that it shows up in --help.
  app->add_option("--config", "flat 'key = value' file; command-line flags override it");
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {}
  std::ostream& stream() { return buffer_; }
  void flush() {
    if (path_.empty()) {
      fallback_ << buffer_.str();
      return;
    }
    std::ofstream f(path_, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path_ + "'");
    f << buffer_.str();
  }

 private:
  std::string path_;
  std::ostream& fallback_;
  std::ostringstream buffer_;
};

Sample read_sample(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read data file '" + path + "'");
  std::vector<double> pts;
  std::string token;
  while (in >> token) {
    for (const auto& item : split(token, ',')) pts.push_back(parse_real(item, path));
  }
  if (pts.empty()) throw UsageError("data file '" + path + "' has no points");
  return Sample::from_points(std::move(pts));
}

struct DataOpts {
  std::string collection = "regular-hist";
  std::size_t n = 100;
  std::uint64_t seed = 1;
  std::string data;
  DensityOpts density;
};

void add_data(CLI::App* app, DataOpts& o) {
  app->add_option("--collection", o.collection, "regular-hist, two-block or fourier");
  app->add_option("--n", o.n, "sample size (ignored with --data)");
  app->add_option("--seed", o.seed, "seed of the simulated sample");
  app->add_option("--data", o.data, "observations in [0,1]; the true density is then unknown");
  add_density(app, o.density);
}

struct Prepared {
  Sample sample;
  ModelCollection collection;
  std::optional<Density> density;
};

Prepared prepare(const DataOpts& o) {
  const auto kind = parse_collection_kind(o.collection);
  std::optional<Density> density;
  Sample s;
  if (!o.data.empty()) {
    s = read_sample(o.data);
  } else {
    density = o.density.build();
    if (o.n == 0) throw UsageError("--n must be >= 1");
    RngStream rng(o.seed, 0, "data");
    s = sample(*density, o.n, rng);
  }
  return {s, build_collection(kind, s.size()), density};
}

std::vector<Candidate> fit_all(const ModelCollection& c, const Sample& s, std::vector<double>* dw) {
  std::vector<Candidate> out;
  out.reserve(c.size());
  if (dw) dw->clear();
  for (const auto& m : c.models) {
    const auto f = fit_model(m, s);
    out.push_back({m.id(), m.dim(), f.emp_contrast, 0.0});
    if (dw) dw->push_back(resampling_dw(f));
  }
  return out;
}

struct SelectOpts {
  DataOpts data;
  std::string penalty = "resampling";
  std::string jump_rule = "max";
  std::string out;
  std::string table_out;
};

int run_select(const SelectOpts& o, std::ostream& stdout_) {
  const auto rule = parse_jump_rule(o.jump_rule);
  const std::string pen = o.penalty;
  const bool ideal = pen.rfind("ideal:", 0) == 0;
  const bool dimension = pen.rfind("dimension:", 0) == 0;
  const bool slope = pen == "slope:dim" || pen == "slope:resampling";
  if (!ideal && !dimension && !slope && pen != "resampling") {
    throw UsageError("unknown penalty '" + pen +
                     "' (expected resampling, dimension:K, ideal:K, slope:dim or slope:resampling)");
  }
  double K = 0.0;
  if (ideal || dimension) K = parse_real(pen.substr(pen.find(':') + 1), "--penalty");
  if (ideal && !o.data.data.empty()) {
    throw UsageError("--penalty ideal:K needs a known density; it cannot be used with --data");
  }
  const auto prep = prepare(o.data);
  if (prep.collection.size() == 0) throw UsageError("the collection is empty for this n");
  const std::size_t n = prep.sample.size();
  std::vector<double> dw;
  auto cands = fit_all(prep.collection, prep.sample, &dw);

  SelectionResult res;
  if (slope) {
    for (std::size_t i = 0; i < cands.size(); ++i) {
      cands[i].complexity = pen == "slope:dim" ? static_cast<double>(cands[i].dim) : dw[i];
    }
    res = slope_select(cands, rule, n).result;
  } else {
    std::vector<double> pens(cands.size());
    std::optional<ExactTable> table;
    if (ideal) table.emplace(prep.collection, *prep.density, n);
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const double nd = static_cast<double>(n);
      if (pen == "resampling") pens[i] = 2.0 * dw[i] / nd;
      else if (dimension) pens[i] = K * static_cast<double>(cands[i].dim) / nd;
      else pens[i] = K * table->D(i) / nd;
    }
    const std::size_t i = select_index(cands, pens);
    res = {i, cands[i].id, cands[i].contrast + pens[i], pens[i], cands[i].dim, 0.0};
  }

  Output out(o.out, stdout_);
  out.stream() << "model_id,dim,contrast,penalty,criterion\n"
               << csv_field(res.model_id) << ',' << res.dim << ','
               << format_real(cands[res.index].contrast) << ',' << format_real(res.penalty) << ','
               << format_real(res.criterion) << '\n';
  out.flush();
  if (!o.table_out.empty()) {
    std::ostringstream sink;
    Output t(o.table_out, sink);
    t.stream() << "model_id,dim,contrast,dw\n";
    for (std::size_t i = 0; i < cands.size(); ++i) {
      t.stream() << csv_field(cands[i].id) << ',' << cands[i].dim << ','
                 << format_real(cands[i].contrast) << ',' << format_real(dw[i]) << '\n';
    }
    t.flush();
  }
  return 0;
}

struct PathOpts {
  DataOpts data;
  std::string complexity = "dim";
  std::string jump_rule = "max";
  std::string out;
};

int run_slope_path(const PathOpts& o, std::ostream& stdout_) {
  if (o.complexity != "dim" && o.complexity != "resampling") {
    throw UsageError("unknown complexity '" + o.complexity + "' (expected dim or resampling)");
  }
  parse_jump_rule(o.jump_rule);
  const auto prep = prepare(o.data);
  if (prep.collection.size() == 0) throw UsageError("the collection is empty for this n");
  std::vector<double> dw;
  auto cands = fit_all(prep.collection, prep.sample, &dw);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    cands[i].complexity = o.complexity == "dim" ? static_cast<double>(cands[i].dim) : dw[i];
  }
  const auto path = slope_path(cands);
  Output out(o.out, stdout_);
  out.stream() << "K_lo,K_hi,model_id,delta\n";
  for (const auto& s : path.segments) {
    out.stream() << format_real(s.k_lo) << ',' << format_real(s.k_hi) << ','
                 << csv_field(s.model_id) << ',' << format_real(s.complexity) << '\n';
  }
  out.flush();
  return 0;
}

struct SimOpts {
  int example = 0;
  std::string collection = "regular-hist";
  std::size_t n = 100;
  std::size_t reps = 0;
  std::string methods = "slope-dim,resampling,resampling-slope";
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  DensityOpts density;
  std::string out;
  std::string raw_out;
};

int run_simulate(const SimOpts& o, std::ostream& stdout_) {
  std::vector<MethodSpec> methods;
  for (const auto& m : split(o.methods, ',')) methods.push_back(MethodSpec::parse(m));
  if (methods.empty()) throw UsageError("--methods is empty");
  if (o.example != 0 && o.example != 1 && o.example != 2) {
    throw UsageError("--example must be 1 or 2");
  }
  if (o.n < 2) throw UsageError("--n must be >= 2");
  if (o.threads == 0) throw UsageError("--threads must be >= 1");
  const auto kind = o.example == 1   ? CollectionKind::RegularHistograms
                    : o.example == 2 ? CollectionKind::TwoBlock
                                     : parse_collection_kind(o.collection);
  const Density density = o.example != 0 ? Density::power_law() : o.density.build();
  const std::size_t reps = o.reps != 0 ? o.reps : (kind == CollectionKind::TwoBlock ? 200 : 1000);

  const ExactTable table(build_collection(kind, o.n), density, o.n);
  SimulationConfig cfg;
  cfg.collection = kind;
  cfg.n = o.n;
  cfg.N = reps;
  cfg.methods = methods;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  const auto report = run_simulation(table, cfg);

  Output out(o.out, stdout_);
  write_summary_csv(out.stream(), report);
  out.flush();
  if (!o.raw_out.empty()) {
    std::ostringstream sink;
    Output raw(o.raw_out, sink);
    write_raw_csv(raw.stream(), report);
    raw.flush();
  }
  return 0;
}

struct ConcOpts {
  std::string bound = "resampling";
  std::string basis = "hist";
  std::size_t n = 100;
  std::size_t dim = 5;
  std::size_t reps = 10000;
  std::string xs = "1,5,20,40,80";
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  DensityOpts density;
  std::string out;
};

int run_conc(const ConcOpts& o, std::ostream& stdout_) {
  if (o.bound != "p" && o.bound != "resampling" && o.bound != "ustat" &&
      o.bound != "regularization") {
    throw UsageError("unknown bound '" + o.bound + "' (expected p, resampling, ustat or regularization)");
  }
  if (o.dim == 0) throw UsageError("--dim must be >= 1");
  if (o.reps == 0) throw UsageError("--reps must be >= 1");
  if (o.threads == 0) throw UsageError("--threads must be >= 1");
  ModelSpec m = ModelSpec::regular_histogram(1);
  if (o.basis == "hist") {
    m = ModelSpec::regular_histogram(o.dim);
  } else if (o.basis == "fourier") {
    if (o.dim % 2 == 0) throw UsageError("Fourier models have odd dimension 2j+1");
    m = ModelSpec::fourier((o.dim - 1) / 2);
  } else {
    throw UsageError("unknown basis '" + o.basis + "' (expected hist or fourier)");
  }
  ConcConfig cfg;
  cfg.n = o.n;
  cfg.xs = parse_reals(o.xs, "--x");
  cfg.replications = o.reps;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  const Density d = o.density.build();

  Output out(o.out, stdout_);
  if (o.bound == "regularization") {
    write_regularization_csv(out.stream(), regularization_comparison(m, d, cfg));
  } else {
    const auto report = o.bound == "p"            ? check_p_concentration(m, d, cfg)
                        : o.bound == "resampling" ? check_resampling_concentration(m, d, cfg)
                                                  : check_ustat_concentration(m, d, cfg);
    write_tail_csv(out.stream(), report);
  }
  out.flush();
  return 0;
}

struct SweepOpts {
  std::string collection = "regular-hist";
  std::size_t n = 100;
  std::string ks;
  std::size_t reps = 200;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  DensityOpts density;
  std::string out;
};

int run_sweep(const SweepOpts& o, std::ostream& stdout_) {
  std::vector<double> grid;
  if (o.ks.empty()) {
    for (int i = 0; i <= 30; ++i) grid.push_back(i / 10.0);
  } else {
    grid = parse_reals(o.ks, "--K");
  }
  if (o.n < 2) throw UsageError("--n must be >= 2");
  if (o.threads == 0) throw UsageError("--threads must be >= 1");
  const auto kind = parse_collection_kind(o.collection);
  const ExactTable table(build_collection(kind, o.n), o.density.build(), o.n);
  const auto report = penalty_sweep(table, grid, o.reps, o.seed, o.threads);
  Output out(o.out, stdout_);
  write_sweep_csv(out.stream(), report);
  out.flush();
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model selection for density estimation by resampling penalties"};
  app.name("densel");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);

  SelectOpts sel;
  auto* s_sel = app.add_subcommand("select", "select one model from a collection");
  add_data(s_sel, sel.data);
  s_sel->add_option("--penalty", sel.penalty,
                    "resampling, dimension:K, ideal:K, slope:dim or slope:resampling");
  s_sel->add_option("--jump-rule", sel.jump_rule, "slope rule for K_min: max or log");
  s_sel->add_option("--out", sel.out, "selection CSV (stdout when empty)");
  s_sel->add_option("--table-out", sel.table_out, "per-model CSV of dim, contrast and D^W");
  add_config_flag(s_sel);

  PathOpts path;
  auto* s_path = app.add_subcommand("slope-path", "exact path K -> selected model");
  add_data(s_path, path.data);
  s_path->add_option("--complexity", path.complexity, "dim or resampling");
  s_path->add_option("--jump-rule", path.jump_rule, "max or log");
  s_path->add_option("--out", path.out, "path CSV (stdout when empty)");
  add_config_flag(s_path);

  SimOpts sim;
  auto* s_sim = app.add_subcommand("simulate", "oracle-constant simulation study");
  s_sim->add_option("--example", sim.example, "1: regular histograms, 2: two-block; 0: use --collection");
  s_sim->add_option("--collection", sim.collection, "regular-hist, two-block or fourier");
  s_sim->add_option("--n", sim.n, "sample size");
  s_sim->add_option("--reps", sim.reps, "replications (0: 1000, or 200 for two-block)");
  s_sim->add_option("--methods", sim.methods,
                    "comma list of slope-dim, resampling, resampling-slope, ideal:K");
  s_sim->add_option("--seed", sim.seed, "seed");
  s_sim->add_option("--threads", sim.threads, "worker threads");
  add_density(s_sim, sim.density);
  s_sim->add_option("--out", sim.out, "summary CSV (stdout when empty)");
  s_sim->add_option("--raw-out", sim.raw_out, "per-replication CSV");
  add_config_flag(s_sim);

  ConcOpts conc;
  auto* s_conc = app.add_subcommand("conc-check", "Monte-Carlo check of concentration bounds");
  s_conc->add_option("--bound", conc.bound, "p, resampling, ustat or regularization");
  s_conc->add_option("--basis", conc.basis, "hist or fourier");
  s_conc->add_option("--n", conc.n, "sample size");
  s_conc->add_option("--dim", conc.dim, "model dimension");
  s_conc->add_option("--reps", conc.reps, "replications");
  s_conc->add_option("--x", conc.xs, "comma list of deviation levels x");
  s_conc->add_option("--seed", conc.seed, "seed");
  s_conc->add_option("--threads", conc.threads, "worker threads");
  add_density(s_conc, conc.density);
  s_conc->add_option("--out", conc.out, "report CSV (stdout when empty)");
  add_config_flag(s_conc);

  SweepOpts sweep;
  auto* s_sweep = app.add_subcommand("sweep", "selection with pen = K D_m / n over a K grid");
  s_sweep->add_option("--collection", sweep.collection, "regular-hist, two-block or fourier");
  s_sweep->add_option("--n", sweep.n, "sample size");
  s_sweep->add_option("--K", sweep.ks, "comma list of K (empty: 0, 0.1, ..., 3)");
  s_sweep->add_option("--reps", sweep.reps, "replications per K");
  s_sweep->add_option("--seed", sweep.seed, "seed");
  s_sweep->add_option("--threads", sweep.threads, "worker threads");
  add_density(s_sweep, sweep.density);
  s_sweep->add_option("--out", sweep.out, "sweep CSV (stdout when empty)");
  add_config_flag(s_sweep);

  try {
    auto args = expand_config(raw_args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const ArgumentError& e) {
    err << "densel: " << e.what() << '\n';
    return 2;
  }

  try {
    if (s_sel->parsed()) return run_select(sel, out);
    if (s_path->parsed()) return run_slope_path(path, out);
    if (s_sim->parsed()) return run_simulate(sim, out);
    if (s_conc->parsed()) return run_conc(conc, out);
    if (s_sweep->parsed()) return run_sweep(sweep, out);
  } catch (const ArgumentError& e) {
    err << "densel: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "densel: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "densel: error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace densel::cli
