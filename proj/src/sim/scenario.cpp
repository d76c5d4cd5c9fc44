#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "gtp/errors.hpp"
#include "gtp/sim.hpp"

namespace gtp {

namespace {

constexpr std::array<const char*, 4> kArmNames{"south", "north", "east", "west"};

int line_of(const YAML::Node& n) { return n.Mark().line + 1; }

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Rejects keys outside `allowed` so typos do not silently fall back to
// defaults.
void check_keys(const YAML::Node& map, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!map.IsMap()) {
    throw ScenarioSyntaxError(fmt::format("{}: expected a mapping", where.empty() ? "document" : where),
                              line_of(map));
  }
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!ok.contains(key)) {
      throw ScenarioSyntaxError(fmt::format("unknown key '{}'", join(where, key)), line_of(kv.first));
    }
  }
}

template <typename T>
void read(const YAML::Node& map, const std::string& where, const char* key, T& out) {
  const YAML::Node n = map[key];
  if (!n) return;
  if (!n.IsScalar()) throw ValidationError(join(where, key), "expected a scalar");
  try {
    out = n.as<T>();
  } catch (const YAML::Exception&) {
    throw ValidationError(join(where, key), fmt::format("cannot read '{}'", n.Scalar()));
  }
}

std::size_t parse_arm(const std::string& field, const std::string& name) {
  for (std::size_t i = 0; i < kArmNames.size(); ++i) {
    if (name == kArmNames[i]) return i;
  }
  throw ValidationError(field, fmt::format("unknown arm '{}'", name));
}

TurnKind parse_turn(const std::string& field, const std::string& name) {
  if (name == "left") return TurnKind::LeftTurn;
  if (name == "right") return TurnKind::RightTurn;
  if (name == "straight") return TurnKind::Straight;
  throw ValidationError(field, fmt::format("unknown turn '{}'", name));
}

void read_vehicle(const YAML::Node& n, const std::string& where, VehicleSetup& v) {
  check_keys(n, where, {"arm", "exit", "turn", "start_offset", "entry_delay", "length", "wheelbase", "width"});
  std::string arm = kArmNames[v.arm];
  std::string turn = turn_name(v.turn);
  read(n, where, "arm", arm);
  read(n, where, "turn", turn);
  v.arm = parse_arm(where + ".arm", arm);
  v.turn = parse_turn(where + ".turn", turn);
  if (n["exit"]) {
    std::string exit;
    read(n, where, "exit", exit);
    if (parse_arm(where + ".exit", exit) != exit_arm(v.arm, v.turn)) {
      throw ValidationError(where + ".exit", fmt::format("a {} turn from {} leaves by {}", turn, arm,
                                                         arm_name(exit_arm(v.arm, v.turn))));
    }
  }
  read(n, where, "start_offset", v.start_offset);
  read(n, where, "entry_delay", v.entry_delay);
  read(n, where, "length", v.dims.length);
  read(n, where, "wheelbase", v.dims.wheelbase);
  read(n, where, "width", v.dims.width);
}

void require(bool ok, const std::string& field, const char* what) {
  if (!ok) throw ValidationError(field, what);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

void check_vehicle(const VehicleSetup& v, const std::string& where, const IntersectionLayout& layout) {
  require(v.arm < 4, where + ".arm", "no such arm");
  require(finite_positive(v.dims.length), where + ".length", "must be positive");
  require(finite_positive(v.dims.wheelbase), where + ".wheelbase", "must be positive");
  require(finite_positive(v.dims.width), where + ".width", "must be positive");
  require(v.dims.wheelbase < v.dims.length, where + ".wheelbase", "must be shorter than length");
  require(v.dims.width < layout.lane_width(), where + ".width", "must be narrower than a lane");
  require(std::isfinite(v.start_offset) && v.start_offset >= 0.0 && v.start_offset < layout.approach_distance(),
          where + ".start_offset", "must lie on the approach, in [0, approach_distance)");
  require(std::isfinite(v.entry_delay), where + ".entry_delay", "must be finite");
}

}  // namespace

const char* arm_name(std::size_t arm) { return kArmNames.at(arm); }

const char* turn_name(TurnKind turn) {
  switch (turn) {
    case TurnKind::LeftTurn: return "left";
    case TurnKind::RightTurn: return "right";
    case TurnKind::Straight: return "straight";
  }
  return "?";
}

std::size_t exit_arm(std::size_t arm, TurnKind turn) {
  // Arms listed as south, north, east, west; travel direction on arrival is
  // north, south, west, east.
  static constexpr std::array<std::array<std::size_t, 3>, 4> table{{
      {3, 2, 1},  // from south: left -> west, right -> east, straight -> north
      {2, 3, 0},
      {0, 1, 3},
      {1, 0, 2},
  }};
  return table.at(arm)[static_cast<std::size_t>(turn)];
}

void validate_scenario(const Scenario& s) {
  const GameContext& c = s.ctx;
  require(finite_positive(c.layout.lane_width()), "layout.lane_width", "must be positive");
  require(finite_positive(c.layout.approach_distance()), "layout.approach_distance", "must be positive");
  require(finite_positive(c.layout.exit_length()), "layout.exit_length", "must be positive");
  require(finite_positive(c.safety.ttc), "safety.ttc", "must be positive");
  require(std::isfinite(c.safety.d_safe) && c.safety.d_safe >= 0.0, "safety.d_safe", "must be non-negative");
  require(c.weights.w1 >= 0.0 && c.weights.w1 <= 1.0, "weights.w1", "must lie in [0, 1]");
  require(c.weights.w2 >= 0.0 && c.weights.w2 <= 1.0, "weights.w2", "must lie in [0, 1]");
  require(finite_positive(c.weights.lambda), "weights.lambda", "must be positive");
  require(finite_positive(c.weights.g_crit), "weights.g_crit", "must be positive");
  require(finite_positive(c.limits.v_max), "limits.v_max", "must be positive");
  require(c.weights.v_max == c.limits.v_max, "limits.v_max", "payoff and motion limits disagree");
  require(finite_positive(c.limits.a_lat_max), "limits.a_lat_max", "must be positive");
  require(finite_positive(c.limits.a_long_max), "limits.a_long_max", "must be positive");
  require(finite_positive(c.dt) && c.dt <= 1.0, "dt", "must lie in (0, 1]");
  require(std::isfinite(c.stop_margin) && c.stop_margin >= 0.0, "stop_margin", "must be non-negative");
  check_vehicle(c.ego, "vehicles.ego", c.layout);
  check_vehicle(c.opp, "vehicles.opp", c.layout);
  // Both traces must share one time grid.
  for (const auto& [v, field] : {std::pair{&c.ego, "vehicles.ego.entry_delay"}, {&c.opp, "vehicles.opp.entry_delay"}}) {
    const double k = v->entry_delay / c.dt;
    require(std::abs(k - std::round(k)) < 1e-6, field, "must be a multiple of dt");
  }

  const SolverConfig& v = s.solver;
  require(v.swarm_size >= 2, "solver.swarm_size", "must be at least 2");
  require(v.iterations >= 1, "solver.iterations", "must be at least 1");
  require(v.deviation_samples >= 1, "solver.deviation_samples", "must be at least 1");
  require(std::isfinite(v.inertia), "solver.inertia", "must be finite");
  require(std::isfinite(v.cognitive), "solver.cognitive", "must be finite");
  require(std::isfinite(v.social), "solver.social", "must be finite");
  require(finite_positive(v.yield_horizon), "solver.yield_horizon", "must be positive");
  require(v.refine_swarm >= 1, "solver.refine_swarm", "must be at least 1");
  require(v.refine_iterations >= 1, "solver.refine_iterations", "must be at least 1");
}

Scenario parse_scenario(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ScenarioSyntaxError(e.msg, e.mark.line + 1);
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  check_keys(root, "",
             {"name", "layout", "safety", "weights", "limits", "dt", "stop_margin", "vehicles", "solver"});

  Scenario s;
  s.name = "unnamed";
  GameContext& c = s.ctx;
  c.opp.arm = 1;
  read(root, "", "name", s.name);

  double lane_width = c.layout.lane_width();
  double approach = c.layout.approach_distance();
  double exit_length = c.layout.exit_length();
  if (const YAML::Node n = root["layout"]) {
    check_keys(n, "layout", {"lane_width", "approach_distance", "exit_length"});
    read(n, "layout", "lane_width", lane_width);
    read(n, "layout", "approach_distance", approach);
    read(n, "layout", "exit_length", exit_length);
  }
  require(finite_positive(lane_width), "layout.lane_width", "must be positive");
  require(finite_positive(approach), "layout.approach_distance", "must be positive");
  require(finite_positive(exit_length), "layout.exit_length", "must be positive");
  c.layout = IntersectionLayout(lane_width, approach, exit_length);

  if (const YAML::Node n = root["safety"]) {
    check_keys(n, "safety", {"ttc", "d_safe"});
    read(n, "safety", "ttc", c.safety.ttc);
    read(n, "safety", "d_safe", c.safety.d_safe);
  }
  if (const YAML::Node n = root["weights"]) {
    check_keys(n, "weights", {"w1", "w2", "lambda", "g_crit"});
    read(n, "weights", "w1", c.weights.w1);
    read(n, "weights", "w2", c.weights.w2);
    read(n, "weights", "lambda", c.weights.lambda);
    read(n, "weights", "g_crit", c.weights.g_crit);
  }
  if (const YAML::Node n = root["limits"]) {
    check_keys(n, "limits", {"v_max", "a_lat_max", "a_long_max"});
    read(n, "limits", "v_max", c.limits.v_max);
    read(n, "limits", "a_lat_max", c.limits.a_lat_max);
    read(n, "limits", "a_long_max", c.limits.a_long_max);
  }
  c.weights.v_max = c.limits.v_max;
  read(root, "", "dt", c.dt);
  read(root, "", "stop_margin", c.stop_margin);

  if (const YAML::Node n = root["vehicles"]) {
    check_keys(n, "vehicles", {"ego", "opp"});
    if (n["ego"]) read_vehicle(n["ego"], "vehicles.ego", c.ego);
    if (n["opp"]) read_vehicle(n["opp"], "vehicles.opp", c.opp);
  }

  if (const YAML::Node n = root["solver"]) {
    check_keys(n, "solver",
               {"swarm_size", "iterations", "inertia", "cognitive", "social", "seed", "deviation_samples",
                "warm_start_iterations", "yield_horizon", "refine_swarm", "refine_iterations"});
    SolverConfig& v = s.solver;
    read(n, "solver", "swarm_size", v.swarm_size);
    read(n, "solver", "iterations", v.iterations);
    read(n, "solver", "inertia", v.inertia);
    read(n, "solver", "cognitive", v.cognitive);
    read(n, "solver", "social", v.social);
    read(n, "solver", "seed", v.seed);
    read(n, "solver", "deviation_samples", v.deviation_samples);
    read(n, "solver", "warm_start_iterations", v.warm_start_iterations);
    read(n, "solver", "yield_horizon", v.yield_horizon);
    read(n, "solver", "refine_swarm", v.refine_swarm);
    read(n, "solver", "refine_iterations", v.refine_iterations);
  }
  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open scenario");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError(path.string(), "read failed");
  return parse_scenario(text.str());
}

nlohmann::ordered_json scenario_to_json(const Scenario& s) {
  const GameContext& c = s.ctx;
  auto vehicle = [](const VehicleSetup& v) {
    return nlohmann::ordered_json{{"arm", arm_name(v.arm)},
                                  {"exit", arm_name(exit_arm(v.arm, v.turn))},
                                  {"turn", turn_name(v.turn)},
                                  {"start_offset", v.start_offset},
                                  {"entry_delay", v.entry_delay},
                                  {"length", v.dims.length},
                                  {"wheelbase", v.dims.wheelbase},
                                  {"width", v.dims.width}};
  };
  const SolverConfig& v = s.solver;
  return {{"name", s.name},
          {"layout",
           {{"lane_width", c.layout.lane_width()},
            {"approach_distance", c.layout.approach_distance()},
            {"exit_length", c.layout.exit_length()}}},
          {"safety", {{"ttc", c.safety.ttc}, {"d_safe", c.safety.d_safe}}},
          {"weights",
           {{"w1", c.weights.w1}, {"w2", c.weights.w2}, {"lambda", c.weights.lambda}, {"g_crit", c.weights.g_crit}}},
          {"limits",
           {{"v_max", c.limits.v_max}, {"a_lat_max", c.limits.a_lat_max}, {"a_long_max", c.limits.a_long_max}}},
          {"dt", c.dt},
          {"stop_margin", c.stop_margin},
          {"vehicles", {{"ego", vehicle(c.ego)}, {"opp", vehicle(c.opp)}}},
          {"solver",
           {{"swarm_size", v.swarm_size},
            {"iterations", v.iterations},
            {"inertia", v.inertia},
            {"cognitive", v.cognitive},
            {"social", v.social},
            {"seed", v.seed},
            {"deviation_samples", v.deviation_samples},
            {"warm_start_iterations", v.warm_start_iterations},
            {"yield_horizon", v.yield_horizon},
            {"refine_swarm", v.refine_swarm},
            {"refine_iterations", v.refine_iterations}}}};
}

}  // namespace gtp
