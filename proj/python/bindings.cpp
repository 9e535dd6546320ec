#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ozsg/error.hpp"
#include "ozsg/exact_eval.hpp"
#include "ozsg/harness.hpp"
#include "ozsg/matrix_ne.hpp"
#include "ozsg/offline_data.hpp"
#include "ozsg/pnvi_bernstein.hpp"
#include "ozsg/pnvi_hoeffding.hpp"
#include "ozsg/serialize.hpp"

namespace py = pybind11;
using namespace ozsg;

namespace {

// JSON crosses the boundary as text; the Python side decodes it with json.loads.
py::object to_py(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

Json from_py(const py::object& obj) {
  return Json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(offline_zsg, m) {
  m.doc() = "Offline Nash equilibrium learning in tabular zero-sum Markov games";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  // Subclasses both Error and ValueError.
  auto bases = py::make_tuple(error, py::handle(PyExc_ValueError));
  py::object config_error = py::reinterpret_steal<py::object>(
      PyErr_NewException("offline_zsg.ConfigError", bases.ptr(), nullptr));
  m.attr("ConfigError") = config_error;
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      PyErr_SetString(py::module_::import("offline_zsg").attr("ConfigError").ptr(), e.what());
    }
  });

  py::class_<GameDims>(m, "GameDims")
      .def_readonly("S", &GameDims::S)
      .def_readonly("A", &GameDims::A)
      .def_readonly("B", &GameDims::B)
      .def_readonly("H", &GameDims::H)
      .def_readonly("s1", &GameDims::s1)
      .def_readonly("turn_based", &GameDims::turn_based);

  py::class_<Game>(m, "Game")
      .def_readonly("dims", &Game::dims)
      .def("to_dict", [](const Game& g) { return to_py(to_json(g)); })
      .def_static("from_dict", [](const py::object& d) { return game_from_json(from_py(d)); })
      .def_static("resolve", &resolve_game, py::arg("source"));

  py::class_<ExplorationPolicy>(m, "ExplorationPolicy")
      .def_static("uniform", [](const Game& g) { return ExplorationPolicy::uniform(g.dims); })
      .def_static("resolve", &resolve_policy, py::arg("source"), py::arg("game"))
      .def("to_dict", [](const ExplorationPolicy& p) { return to_py(to_json(p)); });

  py::class_<StrategyPair>(m, "StrategyPair")
      .def("to_dict", [](const StrategyPair& p) { return to_py(to_json(p)); })
      .def_static("from_dict",
                  [](const py::object& d) { return strategy_pair_from_json(from_py(d)); });

  py::class_<OfflineDataset>(m, "OfflineDataset")
      .def_property_readonly("num_episodes", &OfflineDataset::num_episodes);

  py::class_<MatrixGameSolution>(m, "MatrixGameSolution")
      .def_readonly("mu", &MatrixGameSolution::mu)
      .def_readonly("nu", &MatrixGameSolution::nu)
      .def_readonly("value", &MatrixGameSolution::value)
      .def_readonly("exploitability", &MatrixGameSolution::exploitability);

  m.def("random_game", &random_game, py::arg("seed"), py::arg("S"), py::arg("A"), py::arg("B"),
        py::arg("H"), py::arg("turn_based") = false);
  m.def("hardness_pair", [] {
    HardnessPair p = make_hardness_pair();
    return py::make_tuple(p.game1, p.game2, p.rho);
  });

  m.def(
      "solve_matrix_game",
      [](const std::vector<std::vector<double>>& q, double eps_ne) {
        if (q.empty() || q.front().empty()) throw ConfigError("empty payoff matrix");
        std::vector<double> flat;
        for (const auto& row : q) {
          if (row.size() != q.front().size()) throw ConfigError("ragged payoff matrix");
          flat.insert(flat.end(), row.begin(), row.end());
        }
        return solve_matrix_game(
            {flat, static_cast<int>(q.size()), static_cast<int>(q.front().size())}, eps_ne);
      },
      py::arg("q"), py::arg("eps_ne") = kExactEpsNe);

  m.def(
      "nash_vi",
      [](const Game& g, double eps_ne) {
        NashSolution ne = nash_vi(g, eps_ne);
        return py::make_tuple(ne.values.v(0, g.dims.s1), ne.pi);
      },
      py::arg("game"), py::arg("eps_ne") = kExactEpsNe,
      "Returns (V*_1(s1), equilibrium strategy pair).");
  m.def("duality_gap", &duality_gap, py::arg("game"), py::arg("pi"));

  m.def(
      "sample_dataset",
      [](const Game& g, const ExplorationPolicy& rho, std::size_t n, std::uint64_t seed) {
        return sample_dataset(g, rho, n, seed);
      },
      py::arg("game"), py::arg("rho"), py::arg("n"), py::arg("seed"));

  m.def(
      "learn",
      [](const std::string& alg, const Game& g, const OfflineDataset& ds, double delta, double c,
         double eps_ne, std::uint64_t seed) {
        LearnerRun run = run_learner(algorithm_from_string(alg), g, ds, delta, c, eps_ne, seed);
        py::dict d;
        d["policy"] = run.policy;
        d["gap"] = run.gap;
        d["v_low"] = run.v_low;
        d["v_up"] = run.v_up;
        return d;
      },
      py::arg("alg"), py::arg("game"), py::arg("dataset"), py::arg("delta") = 0.05,
      py::arg("c") = 1.0, py::arg("eps_ne") = kLearnerEpsNe, py::arg("seed") = 0);

  m.def(
      "coverage",
      [](const Game& g, const ExplorationPolicy& rho) {
        return to_py(to_json(diagnose_coverage(g, rho)));
      },
      py::arg("game"), py::arg("rho"));

  m.def(
      "hardness",
      [](std::int64_t n, std::uint64_t seed, double delta, double c) {
        return to_py(to_json(reproduce_hardness(n, seed, delta, c)));
      },
      py::arg("n") = 1000000, py::arg("seed") = 0, py::arg("delta") = 0.05, py::arg("c") = 1.0);

  m.def(
      "fit_loglog_slope",
      [](const std::vector<std::pair<double, double>>& points) {
        LogLogFit f = fit_loglog_slope(points);
        return py::make_tuple(f.slope, f.intercept, f.r2);
      },
      py::arg("points"));
}
