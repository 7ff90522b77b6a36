#include "manqala/artifacts.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "manqala/error.hpp"

namespace manqala {

namespace {

using nlohmann::json;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string fixed6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  // Avoid "-0.000000" from round-off around zero.
  if (std::string(buf) == "-0.000000") return "0.000000";
  return buf;
}

void write_header(std::ostream& out, const ArtifactHeader& h) {
  out << "# scenario_hash=" << format_hash(h.scenario_hash) << "\n";
  out << "# seed=" << h.seed << "\n";
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

/// Data rows after the header row, skipping '#' comment lines.
std::vector<std::vector<std::string>> read_rows(std::istream& in,
                                                const std::string& expected_header) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != expected_header) {
        throw ConfigError("unexpected CSV header '" + line + "', expected '" +
                          expected_header + "'");
      }
      header_seen = true;
      continue;
    }
    rows.push_back(split(line, ','));
  }
  if (!header_seen) throw ConfigError("CSV input has no header row");
  return rows;
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("malformed number '" + s + "'");
  }
}

json lock_json(const std::optional<LockSpec>& lock) {
  if (!lock || lock->empty()) return nullptr;
  json out = json::object();
  for (const auto& [site, n] : lock->pins) out[std::to_string(site)] = n;
  return out;
}

LockSpec lock_from(const json& j) {
  LockSpec lock;
  if (j.is_null()) return lock;
  for (const auto& [site, n] : j.items()) lock.pins[std::stoi(site)] = n.get<int>();
  return lock;
}

json move_json(const Move& m) {
  return {{"kind", to_string(m.kind)},
          {"leftmost", m.leftmost},
          {"duration", m.duration},
          {"lock", lock_json(m.lock)},
          {"before", m.before},
          {"after", m.after}};
}

}  // namespace

std::string format_hash(std::uint64_t hash) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, hash);
  return buf;
}

std::string plan_to_json(const PlanArtifact& plan) {
  json doc;
  doc["scenario_hash"] = format_hash(plan.header.scenario_hash);
  doc["seed"] = plan.header.seed;
  doc["sites"] = plan.sites;
  doc["particles"] = plan.particles;
  doc["target"] = plan.target;
  doc["horizon"] = plan.horizon;
  json tables = json::array();
  for (const auto& t : plan.tables) {
    json entries = json::array();
    for (const auto& [config, e] : t.entries) {
      entries.push_back({{"config", config}, {"time", e.time}, {"probability", e.probability}});
    }
    tables.push_back({{"target", t.target},
                      {"lock", lock_json(t.lock)},
                      {"horizon", t.horizon},
                      {"entries", entries}});
  }
  doc["tables"] = tables;
  json strategies = json::array();
  for (const auto& sp : plan.strategies) {
    json entry{{"strategy", to_string(sp.strategy)}};
    if (sp.demarcation) {
      const Demarcation& d = *sp.demarcation;
      json groups = json::array();
      for (const auto& g : d.partition) groups.push_back({g.first, g.last()});
      entry["demarcation"] = {{"partition", groups},
                              {"permutation", d.permutation},
                              {"residuals", d.residuals},
                              {"goal", d.goal},
                              {"solved", d.solved},
                              {"compiled_duration", d.compiled_duration}};
    }
    json moves = json::array();
    for (const auto& m : sp.moves) moves.push_back(move_json(m));
    entry["moves"] = moves;
    entry["total_duration"] = total_duration(sp.moves);
    strategies.push_back(entry);
  }
  doc["strategies"] = strategies;
  return doc.dump(2) + "\n";
}

PlanArtifact plan_from_json(const std::string& text) {
  PlanArtifact plan;
  try {
    const json doc = json::parse(text);
    plan.header.scenario_hash =
        std::stoull(doc.at("scenario_hash").get<std::string>(), nullptr, 16);
    plan.header.seed = doc.at("seed").get<std::uint64_t>();
    plan.sites = doc.at("sites").get<int>();
    plan.particles = doc.at("particles").get<int>();
    plan.target = doc.at("target").get<Occupation>();
    plan.horizon = doc.at("horizon").get<double>();
    for (const auto& t : doc.at("tables")) {
      DesignatedTimes table;
      table.target = t.at("target").get<Occupation>();
      const LockSpec lock = lock_from(t.at("lock"));
      if (!lock.empty()) table.lock = lock;
      table.horizon = t.at("horizon").get<double>();
      for (const auto& e : t.at("entries")) {
        table.entries[e.at("config").get<Occupation>()] =
            DesignatedTime{e.at("time").get<double>(), e.at("probability").get<double>()};
      }
      plan.tables.push_back(std::move(table));
    }
    for (const auto& s : doc.at("strategies")) {
      StrategyPlan sp;
      sp.strategy = parse_strategy(s.at("strategy").get<std::string>());
      if (s.contains("demarcation")) {
        const json& d = s["demarcation"];
        Demarcation dm;
        for (const auto& g : d.at("partition")) {
          const int first = g.at(0).get<int>();
          dm.partition.push_back({first, g.at(1).get<int>() - first + 1});
        }
        dm.permutation = d.at("permutation").get<std::vector<int>>();
        dm.residuals = d.at("residuals").get<std::vector<int>>();
        dm.goal = d.at("goal").get<Occupation>();
        dm.solved = d.at("solved").get<std::vector<bool>>();
        dm.compiled_duration = d.at("compiled_duration").get<double>();
        sp.demarcation = std::move(dm);
      }
      for (const auto& m : s.at("moves")) {
        const MoveKind kind =
            m.at("kind").get<std::string>() == "two_site" ? MoveKind::two_site
                                                          : MoveKind::three_site;
        sp.moves.push_back(make_move(kind, m.at("leftmost").get<int>(),
                                     m.at("before").get<Occupation>()));
      }
      plan.strategies.push_back(std::move(sp));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed plan artifact: ") + e.what());
  }
  return plan;
}

void write_stats_csv(std::ostream& out, const ArtifactHeader& header,
                     const EnsembleStats& stats) {
  write_header(out, header);
  out << "strategy,Jt,mean_dB,std_dB,n_traj\n";
  for (std::size_t k = 0; k < stats.time_grid.size(); ++k) {
    out << stats.strategy << ',' << num(stats.time_grid[k]) << ','
        << num(stats.mean[k]) << ',' << num(stats.stddev[k]) << ','
        << stats.trajectories << '\n';
  }
}

std::vector<EnsembleStats> read_stats_csv(std::istream& in) {
  std::vector<EnsembleStats> out;
  for (const auto& row : read_rows(in, "strategy,Jt,mean_dB,std_dB,n_traj")) {
    if (row.size() != 5) throw ConfigError("stats row needs 5 columns");
    if (out.empty() || out.back().strategy != row[0]) {
      out.emplace_back();
      out.back().strategy = row[0];
    }
    EnsembleStats& s = out.back();
    s.time_grid.push_back(to_double(row[1]));
    s.mean.push_back(to_double(row[2]));
    s.stddev.push_back(to_double(row[3]));
    s.trajectories = static_cast<std::size_t>(to_double(row[4]));
  }
  for (auto& s : out) {
    if (s.time_grid.size() > 1) s.grid_step = s.time_grid[1] - s.time_grid[0];
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const ArtifactHeader& header,
                          const std::vector<TrajectoryRecord>& records) {
  write_header(out, header);
  out << "trajectory_id,Jt,event,occupations,d_B,target_prob,outcome\n";
  for (const auto& r : records) {
    for (const auto& e : r.events) {
      std::string occ;
      for (std::size_t k = 0; k < e.occupations.size(); ++k) {
        if (k) occ += ';';
        occ += fixed6(e.occupations[k]);
      }
      out << r.trajectory_id << ',' << num(e.time) << ',' << to_string(e.kind)
          << ',' << occ << ',' << num(e.bosonic_distance) << ','
          << num(e.target_probability) << ','
          << (e.outcome ? format_occupation(*e.outcome) : std::string()) << '\n';
    }
  }
}

void write_histogram_csv(std::ostream& out, const ArtifactHeader& header,
                         const std::vector<SuccessHistogram>& histograms) {
  write_header(out, header);
  out << "strategy,repetitions,outcome_label,probability\n";
  for (const auto& h : histograms) {
    auto row = [&](const std::string& label, double p) {
      out << h.strategy << ',' << h.repetitions << ',' << label << ',' << num(p) << '\n';
    };
    row("target", h.target);
    row("initial", h.initial);
    row("rest", h.rest);
    for (const auto& [board, p] : h.outcomes) row(format_occupation(board), p);
  }
}

std::vector<HistogramRow> read_histogram_csv(std::istream& in) {
  std::vector<HistogramRow> out;
  for (const auto& row : read_rows(in, "strategy,repetitions,outcome_label,probability")) {
    if (row.size() != 4) throw ConfigError("histogram row needs 4 columns");
    out.push_back({row[0], static_cast<int>(to_double(row[1])), row[2], to_double(row[3])});
  }
  return out;
}

std::string summary_to_json(const ArtifactHeader& header, double threshold,
                            const std::vector<StrategySummary>& summaries) {
  json doc;
  doc["scenario_hash"] = format_hash(header.scenario_hash);
  doc["seed"] = header.seed;
  doc["threshold"] = threshold;
  json per = json::object();
  for (const auto& s : summaries) {
    json hist = json::object();
    for (const auto& [reps, labels] : s.histogram) {
      json cell = json::object();
      for (const auto& [label, p] : labels) cell[label] = p;
      hist[std::to_string(reps)] = cell;
    }
    per[s.strategy] = {{"convergence_Jt", s.convergence_time ? json(*s.convergence_time) : json(nullptr)},
                       {"avg_std_to_threshold", s.average_std},
                       {"histogram", hist}};
  }
  doc["strategies"] = per;
  return doc.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
  if (!out) throw Error("failed writing " + path);
}

}  // namespace manqala
