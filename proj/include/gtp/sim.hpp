#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gtp/game.hpp"

namespace gtp {

struct Scenario {
  std::string name;
  GameContext ctx;
  SolverConfig solver;
};

/// Arms are named after the side a vehicle arrives from.
const char* arm_name(std::size_t arm);
const char* turn_name(TurnKind turn);
/// Arm a vehicle leaves by.
std::size_t exit_arm(std::size_t arm, TurnKind turn);

/// Parses scenario YAML. Omitted keys take their defaults. Throws
/// ScenarioSyntaxError (with line) or ValidationError (with field path).
Scenario parse_scenario(std::string_view text);
/// Throws IoError when the file cannot be read.
Scenario load_scenario(const std::filesystem::path& path);
/// Re-checks every invariant of an assembled scenario.
void validate_scenario(const Scenario& s);
/// Every effective parameter, in file layout.
nlohmann::ordered_json scenario_to_json(const Scenario& s);

enum class Mode { Nominal, Gtp };

struct RunReport {
  Scenario scenario;
  Mode mode = Mode::Gtp;
  GameOutcome outcome;
  TimedTrajectory ego;
  TimedTrajectory opp;
  std::vector<GtcSample> gtc_curve;
  double t_crit = 0.0;
  double min_gtc = 0.0;
  /// First zero-gap instant, if any.
  std::optional<double> t_impact;
  std::optional<StopInterval> stop_interval;
  std::optional<std::pair<double, double>> ego_zone;
  std::optional<std::pair<double, double>> opp_zone;
};

RunReport run(const Scenario& scenario, Mode mode);

nlohmann::ordered_json report_to_json(const RunReport& report);

/// All report invariants that fail; empty when the report is consistent.
/// Recomputes the GTC curve, constraints and derived fields from the traces.
std::vector<std::string> verify_report(const nlohmann::json& report);

/// Writes the traces, report and plots into out_dir (created if needed).
/// overlay is an optional external trajectory drawn on the scene.
void emit(const RunReport& report, const std::filesystem::path& out_dir,
          const std::vector<Vec2>& overlay = {});

/// Reads x,y columns from a CSV with a header row.
std::vector<Vec2> read_overlay(const std::filesystem::path& path);

}  // namespace gtp
