#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "manqala/ensemble.hpp"
#include "manqala/scenario.hpp"

namespace manqala {

/// Provenance written as leading '#' lines of every CSV.
struct ArtifactHeader {
  std::uint64_t scenario_hash = 0;
  std::uint64_t seed = 0;
};

std::string format_hash(std::uint64_t hash);

struct StrategyPlan {
  Strategy strategy = Strategy::fumes;
  std::optional<Demarcation> demarcation;
  std::vector<Move> moves;
};

struct PlanArtifact {
  ArtifactHeader header;
  int sites = 0;
  int particles = 0;
  Occupation target;
  double horizon = kDefaultHorizon;
  std::vector<DesignatedTimes> tables;
  std::vector<StrategyPlan> strategies;
};

std::string plan_to_json(const PlanArtifact& plan);
/// Throws ConfigError on malformed input.
PlanArtifact plan_from_json(const std::string& text);

void write_stats_csv(std::ostream& out, const ArtifactHeader& header,
                     const EnsembleStats& stats);
/// Skips '#' lines; one EnsembleStats per strategy in file order.
std::vector<EnsembleStats> read_stats_csv(std::istream& in);

/// Events in trajectory order, including any grid-sample rows.
void write_trajectory_csv(std::ostream& out, const ArtifactHeader& header,
                          const std::vector<TrajectoryRecord>& records);

void write_histogram_csv(std::ostream& out, const ArtifactHeader& header,
                         const std::vector<SuccessHistogram>& histograms);

struct HistogramRow {
  std::string strategy;
  int repetitions = 0;
  std::string label;
  double probability = 0.0;
};
std::vector<HistogramRow> read_histogram_csv(std::istream& in);

struct StrategySummary {
  std::string strategy;
  std::optional<double> convergence_time;
  double average_std = 0.0;
  std::map<int, std::map<std::string, double>> histogram;  // reps -> label -> p
};

std::string summary_to_json(const ArtifactHeader& header, double threshold,
                            const std::vector<StrategySummary>& summaries);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace manqala
