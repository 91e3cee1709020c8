#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "densel/conc_lab.hpp"
#include "densel/density.hpp"
#include "densel/errors.hpp"
#include "densel/exact.hpp"
#include "densel/fit.hpp"
#include "densel/harness.hpp"
#include "densel/model.hpp"
#include "densel/penalty.hpp"
#include "densel/slope.hpp"

namespace py = pybind11;
using namespace densel;

namespace {

ModelCollection collection_of(const std::string& kind, std::size_t n) {
  return build_collection(parse_collection_kind(kind), n);
}

Sample draw(const Density& d, std::size_t n, std::uint64_t seed, std::uint64_t rep,
            const std::string& purpose) {
  RngStream rng(seed, rep, purpose);
  return sample(d, n, rng);
}

}  // namespace

PYBIND11_MODULE(_densel, m) {
  m.doc() = "Penalized model selection for density estimation";

  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<Density>(m, "Density")
      .def_static("power_law", &Density::power_law)
      .def_static("uniform", &Density::uniform)
      .def_static("piecewise_constant", &Density::piecewise_constant, py::arg("breaks"),
                  py::arg("heights"))
      .def("pdf", &Density::pdf)
      .def("cdf", &Density::cdf)
      .def("quantile", &Density::quantile)
      .def("l2_norm_sq", &Density::l2_norm_sq)
      .def("__repr__", [](const Density& d) { return "<Density " + d.describe() + ">"; });

  py::class_<Sample>(m, "Sample")
      .def_static("from_points", &Sample::from_points)
      .def_readonly("points", &Sample::points)
      .def("__len__", &Sample::size);
  m.def("sample", &draw, py::arg("density"), py::arg("n"), py::arg("seed"), py::arg("rep") = 0,
        py::arg("purpose") = "data", "n sorted draws from the stream (seed, rep, purpose)");

  py::class_<ModelSpec>(m, "ModelSpec")
      .def_static("regular_histogram", &ModelSpec::regular_histogram)
      .def_static("two_block", &ModelSpec::two_block)
      .def_static("histogram", &ModelSpec::histogram)
      .def_static("fourier", &ModelSpec::fourier)
      .def_property_readonly("id", &ModelSpec::id)
      .def_property_readonly("dim", &ModelSpec::dim)
      .def("basis_eval", &ModelSpec::basis_eval)
      .def("__repr__", [](const ModelSpec& s) { return "<ModelSpec " + s.id() + ">"; });
  m.def("build_collection", [](const std::string& kind, std::size_t n) {
    return collection_of(kind, n).models;
  });
  m.def("two_block_cardinality", &two_block_cardinality);

  py::class_<ExactModelQuantities>(m, "ExactModelQuantities")
      .def_readonly("model_id", &ExactModelQuantities::model_id)
      .def_readonly("dim", &ExactModelQuantities::dim)
      .def_readonly("D", &ExactModelQuantities::D)
      .def_readonly("bias_sq", &ExactModelQuantities::bias_sq)
      .def_readonly("R", &ExactModelQuantities::R)
      .def_readonly("sm_norm_sq", &ExactModelQuantities::sm_norm_sq)
      .def_readonly("pop_coeffs", &ExactModelQuantities::pop_coeffs);
  m.def("exact_quantities",
        py::overload_cast<const ModelSpec&, const Density&, std::size_t>(&exact_quantities));

  py::class_<FittedModel>(m, "FittedModel")
      .def_readonly("coeffs", &FittedModel::coeffs)
      .def_readonly("emp_contrast", &FittedModel::emp_contrast)
      .def_readonly("n", &FittedModel::n)
      .def_property_readonly("model", [](const FittedModel& f) { return f.model; });
  m.def("fit_model", &fit_model);
  m.def("exact_loss", &exact_loss);
  m.def("resampling_dw", &resampling_dw);
  m.def("resampling_penalty",
        [](const FittedModel& f, const Sample& s) { return resampling_penalty(f, s).value; });

  py::class_<Candidate>(m, "Candidate")
      .def(py::init([](std::string id, std::size_t dim, double contrast, double complexity) {
             return Candidate{std::move(id), dim, contrast, complexity};
           }),
           py::arg("id"), py::arg("dim"), py::arg("contrast"), py::arg("complexity") = 0.0)
      .def_readwrite("id", &Candidate::id)
      .def_readwrite("dim", &Candidate::dim)
      .def_readwrite("contrast", &Candidate::contrast)
      .def_readwrite("complexity", &Candidate::complexity);
  m.def("select_index", [](const std::vector<Candidate>& c, const std::vector<double>& pens) {
    return select_index(c, pens);
  });
  m.def("slope_path", [](const std::vector<Candidate>& c) {
    py::list out;
    for (const auto& s : slope_path(c).segments) {
      out.append(py::make_tuple(s.k_lo, s.k_hi, s.model_id, s.complexity));
    }
    return out;
  }, "list of (K_lo, K_hi, model_id, complexity)");
  m.def("slope_select", [](const std::vector<Candidate>& c, const std::string& rule, std::size_t n) {
    const auto s = slope_select(c, parse_jump_rule(rule), n);
    py::dict d;
    d["model_id"] = s.result.model_id;
    d["index"] = s.result.index;
    d["k_min"] = s.k_min;
    d["fallback"] = s.fallback;
    return d;
  }, py::arg("candidates"), py::arg("rule") = "max", py::arg("n") = 100);

  m.def("summarize", [](const std::vector<double>& r) {
    const auto s = summarize(r);
    return py::make_tuple(s.mean, s.median, s.q95);
  });
  m.def(
      "run_example",
      [](int example, std::size_t n, std::size_t N, const std::vector<std::string>& methods,
         std::uint64_t seed, std::size_t threads) {
        std::vector<MethodSpec> specs;
        for (const auto& s : methods) specs.push_back(MethodSpec::parse(s));
        py::gil_scoped_release release;
        const auto rep = run_example(example, n, N, specs, seed, threads);
        py::gil_scoped_acquire acquire;
        py::dict out;
        for (const auto& ms : rep.methods) {
          out[py::str(ms.method)] = py::make_tuple(ms.stats.mean, ms.stats.median, ms.stats.q95);
        }
        return out;
      },
      py::arg("example"), py::arg("n"), py::arg("N"),
      py::arg("methods") = std::vector<std::string>{"slope-dim", "resampling", "resampling-slope"},
      py::arg("seed") = 1, py::arg("threads") = 1,
      "method name -> (mean, median, q95) of the oracle constant");
  m.def(
      "penalty_sweep",
      [](const std::string& kind, std::size_t n, const Density& d, const std::vector<double>& K,
         std::size_t N, std::uint64_t seed, std::size_t threads) {
        const ExactTable table(collection_of(kind, n), d, n);
        const auto r = penalty_sweep(table, K, N, seed, threads);
        return py::make_tuple(r.mean_dim_ratio, r.mean_oracle_ratio);
      },
      py::arg("collection"), py::arg("n"), py::arg("density"), py::arg("K"), py::arg("N"),
      py::arg("seed") = 1, py::arg("threads") = 1);
  m.def(
      "conc_check",
      [](const std::string& bound, const ModelSpec& model, const Density& d, std::size_t n,
         std::vector<double> xs, std::size_t reps, std::uint64_t seed) {
        ConcConfig cfg;
        cfg.n = n;
        cfg.xs = std::move(xs);
        cfg.replications = reps;
        cfg.seed = seed;
        TailReport r;
        if (bound == "p") r = check_p_concentration(model, d, cfg);
        else if (bound == "resampling") r = check_resampling_concentration(model, d, cfg);
        else if (bound == "ustat") r = check_ustat_concentration(model, d, cfg);
        else throw ArgumentError("unknown bound '" + bound + "'");
        py::list rows;
        for (const auto& t : r.rows) {
          rows.append(py::make_tuple(t.bound, t.x, t.threshold, t.frequency, t.cap, t.pass));
        }
        return py::make_tuple(r.all_pass(), rows);
      },
      py::arg("bound"), py::arg("model"), py::arg("density"), py::arg("n"), py::arg("xs"),
      py::arg("reps"), py::arg("seed") = 1);
}
