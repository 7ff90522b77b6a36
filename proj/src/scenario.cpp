#include "manqala/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "manqala/error.hpp"

namespace manqala {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

const json& require(const json& obj, const std::string& key,
                    const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + key, "missing");
  return *it;
}

int as_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  return v.get<int>();
}

double as_real(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

std::size_t as_count(const json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    fail(field, "expected a positive integer");
  }
  return v.get<std::size_t>();
}

Occupation as_occupation(const json& v, const std::string& field, int sites,
                         int particles) {
  if (!v.is_array()) fail(field, "expected a list of integers");
  Occupation occ;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const int n = as_int(v[k], field + "[" + std::to_string(k) + "]");
    if (n < 0) fail(field, "negative occupation");
    occ.push_back(n);
  }
  if (static_cast<int>(occ.size()) != sites) {
    fail(field, "has " + std::to_string(occ.size()) + " sites, expected " +
                    std::to_string(sites));
  }
  if (total_particles(occ) != particles) {
    fail(field, "holds " + std::to_string(total_particles(occ)) +
                    " particles, expected " + std::to_string(particles));
  }
  return occ;
}

Complex as_amplitude(const json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2) {
    return {as_real(v[0], field + "[0]"), as_real(v[1], field + "[1]")};
  }
  if (v.is_object()) {
    const double re = v.contains("re") ? as_real(v["re"], field + ".re") : 0.0;
    const double im = v.contains("im") ? as_real(v["im"], field + ".im") : 0.0;
    return {re, im};
  }
  fail(field, "expected a number, [re, im] or {re, im}");
}

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) fail(where + key, "unknown field");
  }
}

json occupation_json(const Occupation& occ) { return json(occ); }

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("scenario must be a JSON object");
  reject_unknown(doc,
                 {"name", "sites", "particles", "model", "initial", "target",
                  "strategy", "trajectories", "shots", "max_repetitions",
                  "histogram_repetitions", "seed", "grid_step", "horizon",
                  "metric_mode", "max_jt", "threshold"},
                 "");

  Scenario s;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) fail("name", "expected a string");
    s.name = doc["name"].get<std::string>();
  }
  s.sites = as_int(require(doc, "sites", ""), "sites");
  s.particles = as_int(require(doc, "particles", ""), "particles");
  if (s.sites < 1) fail("sites", "must be >= 1");
  if (s.particles < 0) fail("particles", "must be >= 0");

  if (doc.contains("model")) {
    const json& m = doc["model"];
    if (!m.is_object()) fail("model", "expected an object");
    reject_unknown(m, {"J", "V", "mu"}, "model.");
    if (m.contains("J")) s.model.hopping = as_real(m["J"], "model.J");
    if (m.contains("V")) s.model.interaction = as_real(m["V"], "model.V");
    if (m.contains("mu")) s.model.chemical_potential = as_real(m["mu"], "model.mu");
  }

  const json& init = require(doc, "initial", "");
  if (!init.is_object()) fail("initial", "expected an object");
  const std::string kind =
      init.value("type", std::string("fock"));
  if (kind == "fock") {
    reject_unknown(init, {"type", "occupation"}, "initial.");
    s.initial.kind = InitialSpec::Kind::fock;
    s.initial.occupation = as_occupation(require(init, "occupation", "initial."),
                                         "initial.occupation", s.sites, s.particles);
  } else if (kind == "superposition") {
    reject_unknown(init, {"type", "terms"}, "initial.");
    s.initial.kind = InitialSpec::Kind::superposition;
    const json& terms = require(init, "terms", "initial.");
    if (!terms.is_array() || terms.empty()) {
      fail("initial.terms", "expected a non-empty list");
    }
    double norm2 = 0.0;
    std::set<Occupation> seen;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const std::string f = "initial.terms[" + std::to_string(k) + "]";
      if (!terms[k].is_object()) fail(f, "expected {occupation, amplitude}");
      reject_unknown(terms[k], {"occupation", "amplitude"}, f + ".");
      Occupation occ = as_occupation(require(terms[k], "occupation", f + "."),
                                     f + ".occupation", s.sites, s.particles);
      if (!seen.insert(occ).second) fail(f + ".occupation", "repeated term");
      const Complex a = as_amplitude(require(terms[k], "amplitude", f + "."),
                                     f + ".amplitude");
      norm2 += std::norm(a);
      s.initial.terms.emplace_back(std::move(occ), a);
    }
    if (norm2 <= 0.0) fail("initial.terms", "all amplitudes vanish");
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-9) {
      s.warnings.push_back("initial.terms: amplitudes renormalized from norm " +
                           std::to_string(std::sqrt(norm2)));
      for (auto& term : s.initial.terms) term.second /= std::sqrt(norm2);
    }
  } else if (kind == "superfluid") {
    reject_unknown(init, {"type"}, "initial.");
    s.initial.kind = InitialSpec::Kind::superfluid;
  } else {
    fail("initial.type", "expected fock, superposition or superfluid");
  }

  const json& target = require(doc, "target", "");
  if (target.is_object()) {
    reject_unknown(target, {"type", "occupation"}, "target.");
    if (target.value("type", std::string("fock")) != "fock") {
      fail("target.type", "only fock targets are supported");
    }
    s.target = as_occupation(require(target, "occupation", "target."),
                             "target.occupation", s.sites, s.particles);
  } else {
    s.target = as_occupation(target, "target", s.sites, s.particles);
  }

  if (doc.contains("strategy")) {
    if (!doc["strategy"].is_string()) fail("strategy", "expected a string");
    s.strategy = doc["strategy"].get<std::string>();
    if (s.strategy != "all") {
      try {
        parse_strategy(s.strategy);
      } catch (const ArgumentError& e) {
        fail("strategy", e.what());
      }
    }
  }
  if (doc.contains("trajectories")) s.trajectories = as_count(doc["trajectories"], "trajectories");
  if (doc.contains("shots")) s.shots = as_count(doc["shots"], "shots");
  if (doc.contains("max_repetitions") && !doc["max_repetitions"].is_null()) {
    s.max_repetitions = static_cast<int>(as_count(doc["max_repetitions"], "max_repetitions"));
  }
  if (doc.contains("histogram_repetitions")) {
    const json& reps = doc["histogram_repetitions"];
    if (!reps.is_array() || reps.empty()) {
      fail("histogram_repetitions", "expected a non-empty list");
    }
    s.histogram_repetitions.clear();
    for (const auto& r : reps) {
      s.histogram_repetitions.push_back(
          static_cast<int>(as_count(r, "histogram_repetitions")));
    }
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) fail("seed", "expected a non-negative integer");
    s.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("grid_step")) {
    s.grid_step = as_real(doc["grid_step"], "grid_step");
    if (!(s.grid_step > 0.0)) fail("grid_step", "must be > 0");
  }
  if (doc.contains("horizon")) {
    s.horizon = as_real(doc["horizon"], "horizon");
    if (!(s.horizon > 0.0)) fail("horizon", "must be > 0");
  }
  if (doc.contains("metric_mode")) {
    if (!doc["metric_mode"].is_string()) fail("metric_mode", "expected a string");
    try {
      s.metric = parse_metric_mode(doc["metric_mode"].get<std::string>());
    } catch (const Error& e) {
      fail("metric_mode", e.what());
    }
  }
  if (doc.contains("max_jt") && !doc["max_jt"].is_null()) {
    s.max_jt = as_real(doc["max_jt"], "max_jt");
    if (!(*s.max_jt > 0.0)) fail("max_jt", "must be > 0");
  }
  if (doc.contains("threshold")) {
    s.threshold = as_real(doc["threshold"], "threshold");
    if (!(s.threshold > 0.0 && s.threshold <= 1.0)) fail("threshold", "must lie in (0, 1]");
  }
  try {
    basis_dimension({s.sites, s.particles});
  } catch (const Error& e) {
    fail("sites", e.what());
  }
  return s;
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["sites"] = s.sites;
  doc["particles"] = s.particles;
  doc["model"] = {{"J", s.model.hopping},
                  {"V", s.model.interaction},
                  {"mu", s.model.chemical_potential}};
  json init;
  switch (s.initial.kind) {
    case InitialSpec::Kind::fock:
      init = {{"type", "fock"}, {"occupation", occupation_json(s.initial.occupation)}};
      break;
    case InitialSpec::Kind::superposition: {
      json terms = json::array();
      for (const auto& [occ, a] : s.initial.terms) {
        terms.push_back({{"occupation", occupation_json(occ)},
                         {"amplitude", {a.real(), a.imag()}}});
      }
      init = {{"type", "superposition"}, {"terms", terms}};
      break;
    }
    case InitialSpec::Kind::superfluid:
      init = {{"type", "superfluid"}};
      break;
  }
  doc["initial"] = init;
  doc["target"] = occupation_json(s.target);
  doc["strategy"] = s.strategy;
  doc["trajectories"] = s.trajectories;
  doc["shots"] = s.shots;
  doc["max_repetitions"] = s.max_repetitions ? json(*s.max_repetitions) : json(nullptr);
  doc["histogram_repetitions"] = s.histogram_repetitions;
  doc["seed"] = s.seed;
  doc["grid_step"] = s.grid_step;
  doc["horizon"] = s.horizon;
  doc["metric_mode"] = to_string(s.metric);
  doc["max_jt"] = s.max_jt ? json(*s.max_jt) : json(nullptr);
  doc["threshold"] = s.threshold;
  return doc.dump(2);
}

std::uint64_t scenario_hash(const Scenario& scenario) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : scenario_to_json(scenario)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<Strategy> scenario_strategies(const Scenario& scenario) {
  if (scenario.strategy == "all") return all_strategies();
  return {parse_strategy(scenario.strategy)};
}

StateVector superfluid_state(BasisPtr basis) {
  // (Σ_i a†_i)^N |0> = Σ_n N!/sqrt(Π n_i!) |n>, up to normalization.
  StateVector psi{basis, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()))};
  for (std::size_t k = 0; k < basis->size(); ++k) {
    double log_w = std::lgamma(basis->particles() + 1.0);
    for (int n : basis->state(k)) log_w -= 0.5 * std::lgamma(n + 1.0);
    psi.amplitudes[static_cast<Eigen::Index>(k)] = std::exp(log_w);
  }
  psi.amplitudes.normalize();
  return psi;
}

StateVector initial_state(const Scenario& scenario, BasisPtr basis) {
  switch (scenario.initial.kind) {
    case InitialSpec::Kind::fock:
      return fock_state(basis, scenario.initial.occupation);
    case InitialSpec::Kind::superfluid:
      return superfluid_state(basis);
    case InitialSpec::Kind::superposition: {
      StateVector psi{basis,
                      Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()))};
      for (const auto& [occ, a] : scenario.initial.terms) {
        psi.amplitudes[static_cast<Eigen::Index>(basis->index_of(occ))] = a;
      }
      psi.amplitudes.normalize();
      return psi;
    }
  }
  throw ConfigError("unknown initial state kind");
}

Experiment make_experiment(const Scenario& scenario) {
  const LatticeShape shape{scenario.sites, scenario.particles};
  auto basis = enumerate_basis(shape);
  return Experiment::create(shape, scenario.model, initial_state(scenario, basis),
                            scenario.target, scenario.metric, scenario.grid_step,
                            scenario.horizon);
}

}  // namespace manqala
