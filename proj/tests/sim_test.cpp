#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "gtp/errors.hpp"
#include "gtp/sim.hpp"

using namespace gtp;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = GTP_SCENARIO_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gtp_sim_test_" + name);
  fs::remove_all(p);
  return p;
}

Scenario cheap(Scenario s) {
  s.solver.swarm_size = 12;
  s.solver.iterations = 8;
  s.solver.deviation_samples = 8;
  s.solver.warm_start_iterations = 20;
  return s;
}

int cli(const std::string& args) {
  const int rc = std::system((std::string(GTP_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(LoadScenario, Case1HoldsTableValues) {
  const Scenario s = load_scenario(kScenarios / "case1.scenario");
  EXPECT_EQ(s.ctx.layout.approach_distance(), 80.0);
  EXPECT_EQ(s.ctx.layout.lane_width(), 3.5);
  EXPECT_EQ(s.ctx.safety.ttc, 2.0);
  EXPECT_EQ(s.ctx.safety.d_safe, 0.2);
  EXPECT_EQ(s.ctx.limits.v_max, 13.0);
  EXPECT_EQ(s.ctx.weights.v_max, 13.0);
  EXPECT_EQ(s.ctx.weights.lambda, 1e3);
  for (const VehicleSetup* v : {&s.ctx.ego, &s.ctx.opp}) {
    EXPECT_EQ(v->dims.wheelbase, 1.9);
    EXPECT_EQ(v->dims.length, 3.9);
  }
  EXPECT_EQ(s.ctx.weights.w1, 0.5);
  EXPECT_EQ(s.ctx.weights.w2, 0.5);
  EXPECT_EQ(s.ctx.weights.g_crit, 2.0);
}

TEST(LoadScenario, Case2StartsTheOpponentEarlier) {
  const Scenario s = load_scenario(kScenarios / "case2.scenario");
  EXPECT_EQ(s.ctx.opp.entry_delay, -1.5);
  EXPECT_EQ(s.ctx.ego.entry_delay, 0.0);
}

TEST(ParseScenario, OmittedDtDefaultsAndIsEchoed) {
  const Scenario s = parse_scenario("name: x\n");
  EXPECT_EQ(s.ctx.dt, 0.1);
  EXPECT_EQ(scenario_to_json(s)["dt"].get<double>(), 0.1);
  EXPECT_EQ(scenario_to_json(s)["solver"]["swarm_size"].get<int>(), 64);
}

TEST(ParseScenario, NegativeLaneWidthNamesTheField) {
  try {
    parse_scenario("layout:\n  lane_width: -1\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "layout.lane_width");
  }
}

TEST(ParseScenario, FieldErrorsCarryDottedPaths) {
  const std::pair<const char*, const char*> cases[] = {
      {"vehicles:\n  opp:\n    arm: up\n", "vehicles.opp.arm"},
      {"vehicles:\n  ego:\n    turn: u\n", "vehicles.ego.turn"},
      {"vehicles:\n  ego:\n    exit: east\n", "vehicles.ego.exit"},
      {"weights:\n  w1: 1.5\n", "weights.w1"},
      {"safety:\n  ttc: abc\n", "safety.ttc"},
      {"dt: 0\n", "dt"},
      {"vehicles:\n  opp:\n    entry_delay: 0.05\n", "vehicles.opp.entry_delay"},
      {"solver:\n  swarm_size: 1\n", "solver.swarm_size"},
  };
  for (const auto& [text, field] : cases) {
    try {
      parse_scenario(text);
      ADD_FAILURE() << text;
    } catch (const ValidationError& e) {
      EXPECT_EQ(e.field(), field);
    }
  }
}

TEST(ParseScenario, SyntaxErrorsCarryLines) {
  try {
    parse_scenario("name: a\nlayout: [1, 2\n");
    FAIL();
  } catch (const ScenarioSyntaxError& e) {
    EXPECT_GE(e.line(), 2);
  }
  try {
    parse_scenario("name: a\nlayout:\n  lane_wdith: 3\n");
    FAIL();
  } catch (const ScenarioSyntaxError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(LoadScenario, MissingFileIsIoError) {
  EXPECT_THROW(load_scenario("/nonexistent/x.scenario"), IoError);
}

TEST(ExitArm, MatchesHeadingRotation) {
  // Arrival headings south, north, east, west; left adds a quarter turn.
  const double heading[] = {M_PI / 2, -M_PI / 2, M_PI, 0.0};
  const double turn[] = {M_PI / 2, -M_PI / 2, 0.0};
  for (std::size_t arm = 0; arm < 4; ++arm) {
    for (int k = 0; k < 3; ++k) {
      const double out = heading[arm] + turn[k];
      // The exit arm is the one whose arrivals travel opposite to out.
      std::size_t expect = 4;
      for (std::size_t j = 0; j < 4; ++j) {
        if (std::abs(std::remainder(heading[j] - out - M_PI, 2 * M_PI)) < 1e-9) expect = j;
      }
      EXPECT_EQ(exit_arm(arm, static_cast<TurnKind>(k)), expect);
    }
  }
}

class RunTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    nominal_ = new RunReport(run(load_scenario(kScenarios / "case1.scenario"), Mode::Nominal));
    yield_ = new RunReport(run(cheap(load_scenario(kScenarios / "case2.scenario")), Mode::Gtp));
  }
  static void TearDownTestSuite() {
    delete nominal_;
    delete yield_;
  }
  static RunReport* nominal_;
  static RunReport* yield_;
};

RunReport* RunTest::nominal_ = nullptr;
RunReport* RunTest::yield_ = nullptr;

TEST_F(RunTest, NominalCase1Collides) {
  EXPECT_EQ(nominal_->min_gtc, 0.0);
  ASSERT_TRUE(nominal_->t_impact.has_value());
  EXPECT_EQ(*nominal_->t_impact, nominal_->t_crit);
  EXPECT_FALSE(nominal_->stop_interval.has_value());
}

TEST_F(RunTest, MinGtcIsTheCurveMinimum) {
  for (const RunReport* r : {nominal_, yield_}) {
    double m = INFINITY;
    for (const auto& g : r->gtc_curve) m = std::min(m, g.gtc);
    EXPECT_EQ(r->min_gtc, m);
  }
}

TEST_F(RunTest, YieldCarriesAnOrderedStopInterval) {
  ASSERT_EQ(yield_->outcome.decision, Decision::Yield);
  ASSERT_TRUE(yield_->stop_interval.has_value());
  EXPECT_GT(yield_->stop_interval->t1, 0.0);
  EXPECT_LT(yield_->stop_interval->t1, yield_->stop_interval->t2);
  EXPECT_NEAR(yield_->stop_interval->t2 - yield_->stop_interval->t1, yield_->outcome.wait_time, 1e-9);
}

TEST_F(RunTest, VerifyAcceptsReportsAndCatchesTampering) {
  const nlohmann::json good = report_to_json(*yield_);
  EXPECT_TRUE(verify_report(good).empty());
  EXPECT_TRUE(verify_report(report_to_json(*nominal_)).empty());

  nlohmann::json bad = good;
  bad["min_gtc"] = bad["min_gtc"].get<double>() + 0.5;
  EXPECT_FALSE(verify_report(bad).empty());
  bad = good;
  bad["traces"]["ego"][40][1] = bad["traces"]["ego"][40][1].get<double>() + 1.0;
  EXPECT_FALSE(verify_report(bad).empty());
  bad = good;
  bad["outcome"]["payoff"]["ego"]["q"] = 7.0;
  EXPECT_FALSE(verify_report(bad).empty());
  bad = good;
  bad["stop_interval"] = nullptr;
  EXPECT_FALSE(verify_report(bad).empty());
  bad = good;
  bad.erase("gtc_curve");
  EXPECT_FALSE(verify_report(bad).empty());
}

TEST_F(RunTest, EmitWritesOneRowPerState) {
  const fs::path dir = scratch("emit");
  emit(*yield_, dir);
  const auto lines = [](const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
  };
  const std::string ego = slurp(dir / "trace_ego.csv");
  ASSERT_EQ(ego.back(), '\n');
  const auto rows = lines(ego);
  EXPECT_EQ(rows.front(), "t,x,y,theta,speed");
  EXPECT_EQ(rows.size(), yield_->ego.states.size() + 1);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(std::count(rows[i].begin(), rows[i].end(), ','), 4);
  EXPECT_EQ(lines(slurp(dir / "trace_opp.csv")).size(), yield_->opp.states.size() + 1);
  const auto gtc = lines(slurp(dir / "gtc.csv"));
  EXPECT_EQ(gtc.front(), "t,gtc");
  EXPECT_EQ(gtc.size(), yield_->gtc_curve.size() + 1);

  const std::string svg = slurp(dir / "gtc.svg");
  EXPECT_NE(svg.find("t1 = "), std::string::npos);
  EXPECT_NE(svg.find("t2 = "), std::string::npos);
  EXPECT_NE(svg.find("g_crit"), std::string::npos);
  EXPECT_NE(slurp(dir / "scene.svg").find("<polyline"), std::string::npos);
  EXPECT_TRUE(verify_report(nlohmann::json::parse(slurp(dir / "report.json"))).empty());
}

TEST_F(RunTest, EmitIsByteIdenticalOnRerun) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  emit(*nominal_, a);
  emit(run(load_scenario(kScenarios / "case1.scenario"), Mode::Nominal), b);
  for (const char* f : {"trace_ego.csv", "trace_opp.csv", "gtc.csv", "report.json", "scene.svg", "gtc.svg"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(Overlay, ReadsXyColumns) {
  const fs::path dir = scratch("overlay");
  fs::create_directories(dir);
  std::ofstream(dir / "o.csv") << "t,y,x\n0,1.5,2\n1,2.5,3\n";
  const auto pts = read_overlay(dir / "o.csv");
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[1].x, 3.0);
  EXPECT_EQ(pts[1].y, 2.5);
  std::ofstream(dir / "bad.csv") << "x,y\n1,2,3\n";
  EXPECT_THROW(read_overlay(dir / "bad.csv"), ValidationError);
  std::ofstream(dir / "comma.csv") << "x,y\n1;5,2\n";
  EXPECT_THROW(read_overlay(dir / "comma.csv"), ValidationError);
  EXPECT_THROW(read_overlay(dir / "none.csv"), IoError);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.scenario") << "layout:\n  lane_width: -1\n";
  std::ofstream(dir / "tight.scenario") << slurp(kScenarios / "case2.scenario")
                                         << "  yield_horizon: 0.5\n  swarm_size: 12\n";
  EXPECT_EQ(cli("run " + (kScenarios / "nominal.scenario").string() + " --mode nominal --out " + (dir / "n").string()), 0);
  EXPECT_EQ(cli("verify " + (dir / "n" / "report.json").string()), 0);
  EXPECT_EQ(cli("run " + (dir / "bad.scenario").string()), 1);
  EXPECT_EQ(cli("run " + (dir / "missing.scenario").string()), 3);
  EXPECT_EQ(cli("run " + (dir / "tight.scenario").string() + " --out " + (dir / "t").string()), 2);
  EXPECT_EQ(cli("run " + (kScenarios / "nominal.scenario").string() + " --mode fast"), 1);
  EXPECT_EQ(cli("fit --from 0,0,0 --to 1,1,1.5707963267948966"), 0);
  EXPECT_EQ(cli("fit --from 0,0 --to 1,1,0"), 1);
  EXPECT_EQ(cli("verify " + (dir / "nothing.json").string()), 3);
}
