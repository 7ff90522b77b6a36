#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "manqala/ensemble.hpp"

namespace manqala {

struct InitialSpec {
  enum class Kind { fock, superposition, superfluid };
  Kind kind = Kind::fock;
  Occupation occupation;                             // fock
  std::vector<std::pair<Occupation, Complex>> terms;  // superposition
};

struct Scenario {
  std::string name = "scenario";
  int sites = 0;
  int particles = 0;
  ModelParams model;
  InitialSpec initial;
  Occupation target;
  std::string strategy = "all";  // one strategy name or "all"
  std::size_t trajectories = 1000;
  std::size_t shots = 10000;
  std::optional<int> max_repetitions;
  std::vector<int> histogram_repetitions{1, 2, 3};
  std::uint64_t seed = 0;
  double grid_step = 0.01;
  double horizon = kDefaultHorizon;
  MetricMode metric = MetricMode::eq2;
  std::optional<double> max_jt;
  double threshold = 0.99;

  /// Non-fatal notes collected while loading (e.g. renormalization).
  std::vector<std::string> warnings;
};

/// Throws ConfigError with the offending field in the message.
Scenario parse_scenario(const std::string& path);
Scenario scenario_from_json(const std::string& text);

/// Canonical JSON echo of the resolved scenario (warnings excluded).
std::string scenario_to_json(const Scenario& scenario);

/// FNV-1a over the canonical JSON.
std::uint64_t scenario_hash(const Scenario& scenario);

std::vector<Strategy> scenario_strategies(const Scenario& scenario);

StateVector superfluid_state(BasisPtr basis);

StateVector initial_state(const Scenario& scenario, BasisPtr basis);

Experiment make_experiment(const Scenario& scenario);

}  // namespace manqala
