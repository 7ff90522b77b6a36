#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numeric>

#include "manqala/demarcation.hpp"
#include "manqala/ensemble.hpp"
#include "manqala/error.hpp"
#include "manqala/scenario.hpp"
#include "manqala/tchoukaillon.hpp"

namespace py = pybind11;
using namespace manqala;

namespace {

LockSpec to_lock(const std::map<int, int>& pins) { return LockSpec{pins}; }

py::dict move_dict(const Move& m) {
  py::dict d;
  d["kind"] = to_string(m.kind);
  d["leftmost"] = m.leftmost;
  d["duration"] = m.duration;
  d["lock"] = m.lock.pins;
  d["before"] = m.before;
  d["after"] = m.after;
  return d;
}

py::dict demarcation_dict(const Demarcation& d) {
  py::list groups;
  for (const auto& g : d.partition) groups.append(py::make_tuple(g.first, g.last()));
  py::dict out;
  out["groups"] = groups;
  out["permutation"] = d.permutation;
  out["goal"] = d.goal;
  out["residuals"] = d.residuals;
  out["solved"] = d.solved;
  out["duration"] = d.compiled_duration;
  return out;
}

/// Python-facing experiment: a lattice, initial state, target and shared plan.
class PyExperiment {
 public:
  PyExperiment(int sites, const std::map<Occupation, Complex>& initial,
               const Occupation& target, double hopping, double interaction,
               double chemical_potential, const std::string& metric,
               double grid_step) {
    if (initial.empty()) throw ArgumentError("initial state needs at least one term");
    const int particles = std::accumulate(target.begin(), target.end(), 0);
    auto basis = enumerate_basis({sites, particles});
    StateVector psi{basis, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()))};
    for (const auto& [occ, a] : initial) {
      psi.amplitudes[static_cast<Eigen::Index>(basis->index_of(occ))] = a;
    }
    if (psi.amplitudes.norm() == 0.0) throw ArgumentError("initial state has zero norm");
    psi.amplitudes.normalize();
    ex_ = Experiment::create({sites, particles}, {hopping, interaction, chemical_potential},
                             std::move(psi), target, parse_metric_mode(metric), grid_step);
  }

  explicit PyExperiment(Experiment ex) : ex_(std::move(ex)) {}

  ControllerConfig config(const std::string& strategy, std::optional<int> reps) const {
    return plan_controller(
        ControllerConfig{parse_strategy(strategy), ex_.target, ex_.times, reps, {}, {}},
        ex_.initial);
  }

  py::dict run(const std::string& strategy, std::size_t trajectories, std::uint64_t seed,
               std::optional<int> max_repetitions, std::optional<double> max_time,
               unsigned workers, double threshold) const {
    EnsembleOptions opt;
    opt.trajectories = trajectories;
    opt.master_seed = seed;
    opt.budget = {max_repetitions, max_time};
    opt.workers = workers;
    const ControllerConfig cfg = config(strategy, std::nullopt);
    EnsembleResult res;
    {
      py::gil_scoped_release release;
      res = run_ensemble(ex_, cfg, opt);
    }
    const Convergence c = convergence_time(res.stats, threshold);
    std::size_t successes = 0;
    std::vector<double> end_times;
    for (const auto& r : res.records) {
      successes += r.success ? 1 : 0;
      end_times.push_back(r.end_time);
    }
    py::dict out;
    out["strategy"] = res.stats.strategy;
    out["time"] = res.stats.time_grid;
    out["mean"] = res.stats.mean;
    out["std"] = res.stats.stddev;
    out["trajectories"] = res.stats.trajectories;
    out["successes"] = successes;
    out["end_times"] = end_times;
    out["convergence_time"] = c.time;
    out["average_std"] = c.average_std;
    return out;
  }

  py::list trajectory(const std::string& strategy, std::uint64_t seed,
                      std::optional<int> max_repetitions) const {
    const TrajectoryRecord rec =
        run_trajectory(ex_, config(strategy, std::nullopt), 0, seed, {max_repetitions, {}});
    py::list events;
    for (const auto& e : rec.events) {
      py::dict d;
      d["time"] = e.time;
      d["event"] = to_string(e.kind);
      d["occupations"] = e.occupations;
      d["d_B"] = e.bosonic_distance;
      d["target_prob"] = e.target_probability;
      d["outcome"] = e.outcome;
      events.append(d);
    }
    return events;
  }

  py::dict histogram(const std::string& strategy, int repetitions, std::size_t shots,
                     std::uint64_t seed, unsigned workers) const {
    const ControllerConfig cfg = config(strategy, std::nullopt);
    SuccessHistogram h;
    {
      py::gil_scoped_release release;
      h = success_histogram(ex_, cfg, repetitions, shots, seed, workers);
    }
    py::dict out;
    out["target"] = h.target;
    out["initial"] = h.initial;
    out["rest"] = h.rest;
    py::dict outcomes;
    for (const auto& [occ, p] : h.outcomes) outcomes[py::tuple(py::cast(occ))] = p;
    out["outcomes"] = outcomes;
    return out;
  }

  py::object plan(const std::string& strategy) const {
    const ControllerConfig cfg = config(strategy, std::nullopt);
    if (!cfg.demarcation) return py::none();
    py::dict out = demarcation_dict(*cfg.demarcation);
    py::list moves;
    for (const auto& m : cfg.moves.value_or(std::vector<Move>{})) moves.append(move_dict(m));
    out["moves"] = moves;
    return out;
  }

  py::tuple designated_time(const Occupation& config, const std::map<int, int>& lock) const {
    const DesignatedTime dt = ex_.times->lookup(config, to_lock(lock), ex_.target);
    return py::make_tuple(dt.time, dt.probability);
  }

  int sites() const { return ex_.evolver->basis().sites(); }
  int particles() const { return ex_.evolver->basis().particles(); }
  const Occupation& target() const { return ex_.target; }

 private:
  Experiment ex_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bose-Hubbard state-engineering strategies";

  static py::exception<Error> base(m, "ManqalaError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(base.ptr(), e.what());
    }
  });

  m.def("basis_dimension", [](int sites, int particles) {
    return basis_dimension({sites, particles});
  }, py::arg("sites"), py::arg("particles"));

  m.def("enumerate_basis", [](int sites, int particles) {
    const auto basis = enumerate_basis({sites, particles});
    std::vector<Occupation> out;
    for (std::size_t k = 0; k < basis->size(); ++k) out.push_back(basis->state(k));
    return out;
  }, py::arg("sites"), py::arg("particles"));

  m.def("designated_time",
        [](const Occupation& config, const Occupation& target, const std::map<int, int>& lock,
           double hopping, double interaction, double horizon, double grid_step) {
          const int particles = std::accumulate(target.begin(), target.end(), 0);
          auto basis = enumerate_basis({static_cast<int>(target.size()), particles});
          const Evolver ev(basis, build_hamiltonian(*basis, {hopping, interaction, 0.0}));
          const DesignatedTime dt =
              designated_time(ev, config, target, to_lock(lock), horizon, grid_step);
          return py::make_tuple(dt.time, dt.probability);
        },
        py::arg("config"), py::arg("target"), py::arg("lock") = std::map<int, int>{},
        py::arg("J") = 1.0, py::arg("V") = 0.0, py::arg("horizon") = kDefaultHorizon,
        py::arg("grid_step") = kDefaultTimeGridStep);

  m.def("tunneling_distance",
        [](const ExpectationVector& a, const ExpectationVector& b, const std::string& mode) {
          return tunneling_distance(a, b, parse_metric_mode(mode));
        },
        py::arg("a"), py::arg("b"), py::arg("mode") = "eq2");
  m.def("bosonic_distance",
        [](const ExpectationVector& a, const ExpectationVector& target,
           const ExpectationVector& initial, const std::string& mode) {
          return bosonic_distance(a, target, initial, parse_metric_mode(mode));
        },
        py::arg("a"), py::arg("target"), py::arg("initial"), py::arg("mode") = "eq2");

  m.def("tchoukaillon_plan", [](const Occupation& board) {
    const TchoukaillonPlan plan = tchoukaillon_plan(board);
    py::dict out;
    out["winnable"] = plan.winnable;
    std::vector<int> pits;
    for (const Sow& s : plan.sows) pits.push_back(s.pit);
    out["sows"] = pits;
    out["final_board"] = plan.final_board;
    return out;
  }, py::arg("board"));

  m.def("demarcate", [](const Occupation& initial, const Occupation& target) {
    return demarcation_dict(demarcate_sublattices(initial, target));
  }, py::arg("initial"), py::arg("target"));

  m.def("compile_moves",
        [](const std::vector<int>& permutation, bool constrained, const Occupation& board) {
          py::list out;
          for (const Move& mv : compile_moves(permutation, constrained, board)) {
            out.append(move_dict(mv));
          }
          return out;
        },
        py::arg("permutation"), py::arg("constrained"), py::arg("board"));

  m.def("strategies", [] {
    std::vector<std::string> out;
    for (Strategy s : all_strategies()) out.emplace_back(to_string(s));
    return out;
  });

  py::class_<PyExperiment>(m, "Experiment")
      .def(py::init<int, const std::map<Occupation, Complex>&, const Occupation&, double,
                    double, double, const std::string&, double>(),
           py::arg("sites"), py::arg("initial"), py::arg("target"), py::arg("J") = 1.0,
           py::arg("V") = 0.0, py::arg("mu") = 0.0, py::arg("metric") = "eq2",
           py::arg("grid_step") = 0.01)
      .def_static("from_scenario", [](const std::string& text) {
        return PyExperiment(make_experiment(scenario_from_json(text)));
      }, py::arg("json_text"))
      .def_property_readonly("sites", &PyExperiment::sites)
      .def_property_readonly("particles", &PyExperiment::particles)
      .def_property_readonly("target", &PyExperiment::target)
      .def("designated_time", &PyExperiment::designated_time, py::arg("config"),
           py::arg("lock") = std::map<int, int>{})
      .def("plan", &PyExperiment::plan, py::arg("strategy"))
      .def("run", &PyExperiment::run, py::arg("strategy"), py::arg("trajectories") = 1000,
           py::arg("seed") = 0, py::arg("max_repetitions") = py::none(),
           py::arg("max_time") = py::none(), py::arg("workers") = 0,
           py::arg("threshold") = 0.99)
      .def("trajectory", &PyExperiment::trajectory, py::arg("strategy"), py::arg("seed") = 0,
           py::arg("max_repetitions") = py::none())
      .def("histogram", &PyExperiment::histogram, py::arg("strategy"), py::arg("repetitions"),
           py::arg("shots") = 10000, py::arg("seed") = 0, py::arg("workers") = 0);
}
