#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "maopt/capacity.hpp"
#include "maopt/harness.hpp"
#include "maopt/mec.hpp"
#include "maopt/rzf.hpp"

namespace py = pybind11;
using namespace maopt;

namespace {

// Positions cross the boundary as lists of (x, y) pairs.
using PointList = std::vector<std::pair<double, double>>;

std::vector<Position2D> to_positions(const PointList& pts) {
  std::vector<Position2D> out;
  out.reserve(pts.size());
  for (const auto& [x, y] : pts) out.push_back({x, y});
  return out;
}

PointList from_positions(const std::vector<Position2D>& pts) {
  PointList out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.emplace_back(p.x, p.y);
  return out;
}

py::dict record_to_dict(const TrialRecord& r) {
  py::dict d;
  d["trial"] = r.trial;
  d["seed"] = r.seed;
  d["case"] = r.case_name;
  d["scheme"] = r.scheme;
  d["A_lambda"] = r.a_lambda;
  d["N"] = r.n;
  d["M"] = r.m;
  d["metric"] = r.metric;
  d["iters"] = r.iters;
  d["rho_final"] = r.rho_final;
  d["resid"] = r.resid;
  d["min_dist"] = r.min_dist;
  d["t_ms"] = r.t_ms;
  return d;
}

RunConfig make_config(const std::string& case_name, const std::string& scheme, std::size_t trials,
                      std::uint64_t seed, const py::dict& overrides) {
  RunConfig c;
  c.case_kind = parse_case(case_name);
  c.scheme = parse_scheme(scheme);
  c.trials = trials;
  c.seed = seed;
  for (const auto& [k, v] : overrides) {
    apply_config_value(c, py::str(k), py::str(v));
  }
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Movable-antenna position optimization with separation constraints";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<RankDeficient>(m, "RankDeficient", PyExc_ArithmeticError);
  py::register_exception<ZeroChannel>(m, "ZeroChannel", PyExc_ValueError);

  m.def(
      "project_separation",
      [](std::pair<double, double> target, const PointList& others, double d_min) {
        const auto res = solve_separation_projection({target.first, target.second},
                                                     to_positions(others), SeparationConstraint(d_min));
        return std::make_pair(res.point.x, res.point.y);
      },
      py::arg("target"), py::arg("others"), py::arg("d_min") = 0.5,
      "Nearest point to target at least d_min away from every other point.");

  m.def(
      "min_pairwise_distance",
      [](const PointList& pts) { return min_pairwise_distance(to_positions(pts)); }, py::arg("points"));

  m.def(
      "count_feasible_components",
      [](std::size_t index, const PointList& pts, double side, double d_min, double resolution) {
        return count_feasible_components(index, to_positions(pts), Panel::centered_square(side),
                                         SeparationConstraint(d_min), resolution);
      },
      py::arg("index"), py::arg("positions"), py::arg("panel"), py::arg("d_min") = 0.5,
      py::arg("resolution") = kDefaultConnectivityResolution,
      "Connected free regions of antenna `index` in a centered square panel.");

  m.def(
      "conservative_capacity",
      [](double a, double b, double d_min) {
        return conservative_capacity(a, b, SeparationConstraint(d_min));
      },
      py::arg("panel_extent"), py::arg("subset_extent"), py::arg("d_min") = 0.5);

  m.def("water_filling", &water_filling, py::arg("h"), py::arg("p_max"), py::arg("sigma2") = 1.0,
        "Capacity-achieving transmit covariance.");
  m.def("capacity_bits", [](const CMatrix& h, const CMatrix& q, double sigma2) {
    return -capacity_objective(h, q, sigma2);
  }, py::arg("h"), py::arg("q"), py::arg("sigma2") = 1.0);
  m.def("zf_combiner", &zf_combiner, py::arg("h"));
  m.def("rzf_precoder", &rzf_closed_form, py::arg("h"), py::arg("alpha"));
  m.def("sum_rate", &sum_rate, py::arg("h"), py::arg("w"), py::arg("p_max"), py::arg("sigma2") = 1.0);

  m.def(
      "fpa_layout", [](std::size_t count, double spacing) { return from_positions(fpa_layout(count, spacing)); },
      py::arg("count"), py::arg("spacing") = kHalfWavelength);

  m.def(
      "run_trial",
      [](const std::string& case_name, const std::string& scheme, std::size_t trial,
         std::uint64_t seed, const py::dict& overrides) {
        const RunConfig c = make_config(case_name, scheme, trial + 1, seed, overrides);
        TrialRecord r;
        {
          py::gil_scoped_release release;
          r = run_trial(c, trial);
        }
        return record_to_dict(r);
      },
      py::arg("case") = "capacity", py::arg("scheme") = "proposed", py::arg("trial") = 0,
      py::arg("seed") = 1, py::arg("overrides") = py::dict(),
      "One Monte-Carlo trial; overrides take config-file keys.");

  m.def(
      "run_monte_carlo",
      [](const std::string& case_name, const std::string& scheme, std::size_t trials,
         std::uint64_t seed, std::size_t jobs, const py::dict& overrides) {
        RunConfig c = make_config(case_name, scheme, trials, seed, overrides);
        c.jobs = jobs;
        MonteCarloResult res;
        {
          py::gil_scoped_release release;
          res = run_monte_carlo(c);
        }
        py::list records;
        for (const auto& r : res.records) records.append(record_to_dict(r));
        py::dict summary;
        summary["trials"] = res.summary.trials;
        summary["mean"] = res.summary.mean;
        summary["std_error"] = res.summary.std_error;
        summary["feasible_rate"] = res.summary.feasible_rate;
        return py::make_tuple(records, summary);
      },
      py::arg("case") = "capacity", py::arg("scheme") = "proposed", py::arg("trials") = 10,
      py::arg("seed") = 1, py::arg("jobs") = 1, py::arg("overrides") = py::dict(),
      "Returns (records, summary).");

  m.def(
      "diagnose_connectivity",
      [](std::size_t trials, double panel, std::size_t antennas, double resolution, std::uint64_t seed) {
        ConnectivityConfig c;
        c.trials = trials;
        c.panel = panel;
        c.antennas = antennas;
        c.resolution = resolution;
        c.seed = seed;
        ConnectivityResult res;
        {
          py::gil_scoped_release release;
          res = diagnose_connectivity(c);
        }
        std::vector<std::size_t> max_components;
        for (const auto& t : res.trials) max_components.push_back(t.max_components);
        py::dict d;
        d["impacted_fraction"] = res.impacted_fraction;
        d["trapped_fraction"] = res.trapped_fraction;
        d["max_components"] = max_components;
        return d;
      },
      py::arg("trials") = 20, py::arg("panel") = 2.0, py::arg("antennas") = 6,
      py::arg("resolution") = kDefaultConnectivityResolution, py::arg("seed") = 1);

  m.attr("CSV_HEADER") = kCsvHeader;
}
