// SPDX-License-Identifier: Apache-2.0
//
// Python bindings. Configurations cross the boundary as JSON text; the
// Python package converts dicts on the way in.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nfbeam/checks.hpp"
#include "nfbeam/config.hpp"

namespace py = pybind11;
using namespace nfbeam;

namespace {

ExperimentConfig parse(const std::string& text, const std::vector<std::string>& overrides = {}) {
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("<root>", "not valid JSON");
  for (const auto& o : overrides) apply_override(doc, o);
  return config_from_json(doc);
}

py::dict summary_dict(const RunSummary& s) {
  py::dict d;
  d["method"] = s.method;
  d["power_dbm"] = s.power_dbm;
  d["num_cpis"] = s.num_cpis;
  d["mean_rate_method"] = s.mean_rate_method;
  d["mean_rate_opt"] = s.mean_rate_opt;
  d["mean_rate_ff"] = s.mean_rate_ff;
  d["mean_rate_fd"] = s.mean_rate_fd;
  d["mean_position_error"] = s.mean_position_error;
  d["mean_err_vx"] = s.mean_err_vx;
  d["mean_err_vy"] = s.mean_err_vy;
  return d;
}

template <typename Row, typename Fn>
py::array_t<double> column(const std::vector<Row>& rows, Fn&& get) {
  std::vector<double> values;
  values.reserve(rows.size());
  for (const auto& r : rows) values.push_back(get(r));
  return py::array_t<double>(static_cast<py::ssize_t>(values.size()), values.data());
}

py::tuple track(const std::string& config) {
  RunResult r;
  {
    py::gil_scoped_release release;
    r = run_experiment(parse(config));
  }
  const auto& rows = r.rows;
  py::dict m;
  m["cpi"] = column(rows, [](const MetricRow& x) { return static_cast<double>(x.cpi); });
  m["x"] = column(rows, [](const MetricRow& x) { return x.truth.x; });
  m["y"] = column(rows, [](const MetricRow& x) { return x.truth.y; });
  m["vx"] = column(rows, [](const MetricRow& x) { return x.truth.vx; });
  m["vy"] = column(rows, [](const MetricRow& x) { return x.truth.vy; });
  m["x_hat"] = column(rows, [](const MetricRow& x) { return x.estimate.x; });
  m["y_hat"] = column(rows, [](const MetricRow& x) { return x.estimate.y; });
  m["vx_hat"] = column(rows, [](const MetricRow& x) { return x.estimate.vx; });
  m["vy_hat"] = column(rows, [](const MetricRow& x) { return x.estimate.vy; });
  m["rate_method"] = column(rows, [](const MetricRow& x) { return x.rate_method; });
  m["rate_opt"] = column(rows, [](const MetricRow& x) { return x.rate_opt; });
  m["rate_ff"] = column(rows, [](const MetricRow& x) { return x.rate_ff; });
  m["rate_fd"] = column(rows, [](const MetricRow& x) { return x.rate_fd; });
  m["err_vx"] = column(rows, [](const MetricRow& x) { return x.err_vx; });
  m["err_vy"] = column(rows, [](const MetricRow& x) { return x.err_vy; });
  return py::make_tuple(m, summary_dict(r.summary));
}

py::list sweep_power(const std::string& config, const std::vector<double>& powers,
                     const std::vector<std::string>& method_names) {
  std::vector<Method> methods;
  for (const auto& n : method_names) methods.push_back(method_from_string(n));
  const ExperimentConfig c = parse(config);
  std::vector<RunSummary> cells;
  {
    py::gil_scoped_release release;
    cells = power_sweep(c, powers, methods);
  }
  py::list out;
  for (const auto& s : cells) out.append(summary_dict(s));
  return out;
}

py::dict converge(const std::string& config, const std::vector<std::string>& variant_names) {
  std::vector<GdVariant> variants;
  for (const auto& n : variant_names) variants.push_back(gd_variant_from_string(n));
  const ExperimentConfig c = parse(config);
  std::vector<ConvergenceRecord> recs;
  {
    py::gil_scoped_release release;
    recs = convergence_study(c, variants);
  }
  py::list names;
  for (const auto& r : recs) names.append(to_string(r.variant));
  py::dict d;
  d["variant"] = names;
  d["seed"] = column(recs, [](const ConvergenceRecord& r) { return double(r.seed_index); });
  d["k"] = column(recs, [](const ConvergenceRecord& r) { return double(r.row.k); });
  d["vx"] = column(recs, [](const ConvergenceRecord& r) { return r.row.vx; });
  d["vy"] = column(recs, [](const ConvergenceRecord& r) { return r.row.vy; });
  d["objective"] = column(recs, [](const ConvergenceRecord& r) { return r.row.objective; });
  d["err_vx"] = column(recs, [](const ConvergenceRecord& r) { return r.err_vx; });
  d["err_vy"] = column(recs, [](const ConvergenceRecord& r) { return r.err_vy; });
  d["rse"] = column(recs, [](const ConvergenceRecord& r) { return r.rse; });
  return d;
}

py::list checks(const std::string& config) {
  const auto results = run_checks(parse(config));
  py::list out;
  for (const auto& r : results) {
    py::dict d;
    d["check"] = r.name;
    d["samples"] = r.samples;
    d["worst"] = r.worst;
    d["tolerance"] = r.tolerance;
    d["passed"] = r.passed;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_nfbeam, m) {
  m.doc() = "Near-field predictive beamforming and tracking simulator";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("default_config", [] { return config_to_json(ExperimentConfig{}).dump(); });
  m.def("resolve_config",
        [](const std::string& config, const std::vector<std::string>& overrides) {
          return config_to_json(parse(config, overrides)).dump();
        },
        py::arg("config"), py::arg("overrides") = std::vector<std::string>{});
  m.def("track", &track, py::arg("config"));
  m.def("sweep_power", &sweep_power, py::arg("config"), py::arg("powers"), py::arg("methods"));
  m.def("converge", &converge, py::arg("config"), py::arg("variants"));
  m.def("checks", &checks, py::arg("config"));

  m.def("steering_vector",
        [](const std::string& config, double x, double y) {
          return ComplexVec(steering_vector(parse(config).system.array, {x, y}));
        },
        py::arg("config"), py::arg("x"), py::arg("y"));
  m.def("opt_beamformer",
        [](const std::string& config, const std::array<double, 4>& state, int n) {
          const ExperimentConfig c = parse(config);
          if (n < 1 || n > c.system.symbols_per_cpi) {
            throw py::index_error("symbol index out of range");
          }
          const MotionState s{state[0], state[1], state[2], state[3]};
          return ComplexVec(opt_beamformers(c.system, s)[static_cast<size_t>(n - 1)]);
        },
        py::arg("config"), py::arg("state"), py::arg("n"));
  m.def("mrt_throughput",
        [](const std::string& config, const std::array<double, 4>& state) {
          const ExperimentConfig c = parse(config);
          const MotionState s{state[0], state[1], state[2], state[3]};
          return mrt_throughput(c.system, s, c.power_watts(), c.noise.sigma_c2);
        },
        py::arg("config"), py::arg("state"));
  m.def("moving_average",
        [](const std::vector<double>& series, size_t window) {
          return moving_average(series, window);
        },
        py::arg("series"), py::arg("window"));
}
