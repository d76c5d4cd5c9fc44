#include <charconv>
#include <cstdio>
#include <fstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gtp/errors.hpp"
#include "gtp/sim.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 1, kInfeasible = 2, kIo = 3 };

gtp::Pose parse_pose(const std::string& text, const char* flag) {
  double v[3];
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int i = 0; i < 3; ++i) {
    const auto r = std::from_chars(p, end, v[i]);
    if (r.ec != std::errc()) throw gtp::ValidationError(flag, "expected x,y,theta");
    p = r.ptr;
    if (i < 2) {
      if (p == end || *p != ',') throw gtp::ValidationError(flag, "expected x,y,theta");
      ++p;
    }
  }
  if (p != end) throw gtp::ValidationError(flag, "expected x,y,theta");
  return {v[0], v[1], v[2]};
}

int cmd_run(const std::string& file, const std::string& mode_name, std::optional<std::uint64_t> seed,
            const std::string& out, std::optional<double> dt, const std::string& overlay_file) {
  gtp::Scenario sc = gtp::load_scenario(file);
  if (seed) sc.solver.seed = *seed;
  if (dt) sc.ctx.dt = *dt;
  const gtp::Mode mode = mode_name == "nominal" ? gtp::Mode::Nominal : gtp::Mode::Gtp;
  const auto overlay = overlay_file.empty() ? std::vector<gtp::Vec2>{} : gtp::read_overlay(overlay_file);
  const gtp::RunReport r = gtp::run(sc, mode);
  gtp::emit(r, out, overlay);

  fmt::print("scenario {} mode {} seed {}\n", sc.name, mode_name, sc.solver.seed);
  if (mode == gtp::Mode::Gtp) {
    const bool yield = r.outcome.decision == gtp::Decision::Yield;
    fmt::print("decision {} wait {} s J {}\n", yield ? "yield" : "proceed", r.outcome.wait_time, r.outcome.j_value);
    if (r.stop_interval) fmt::print("stop t1 {:.3f} s t2 {:.3f} s\n", r.stop_interval->t1, r.stop_interval->t2);
  }
  fmt::print("min_gtc {} m at t {} s\n", r.min_gtc, r.t_crit);
  if (r.t_impact) fmt::print("collision at t {} s\n", *r.t_impact);
  fmt::print("wrote {}\n", out);
  return kOk;
}

int cmd_verify(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw gtp::IoError(file, "cannot open report");
  nlohmann::json report;
  try {
    report = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fmt::print(stderr, "{}: {}\n", file, e.what());
    return kValidation;
  }
  const auto problems = gtp::verify_report(report);
  for (const auto& p : problems) fmt::print("FAIL {}\n", p);
  if (!problems.empty()) return kValidation;
  fmt::print("ok\n");
  return kOk;
}

int cmd_fit(const std::string& from, const std::string& to) {
  const gtp::Pose a = parse_pose(from, "--from");
  const gtp::Pose b = parse_pose(to, "--to");
  const gtp::ClothoidSegment c = gtp::fit_g1(a, b);
  const gtp::Pose end = gtp::eval_segment(c, c.length).pose;
  fmt::print("kappa0 {}\nsharpness {}\nlength {}\nend {},{},{}\n", c.kappa0, c.sharpness, c.length, end.x, end.y,
             end.theta);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-vehicle intersection negotiation simulator"};
  app.require_subcommand(1);

  std::string scenario, mode = "gtp", out = "out", overlay;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  auto* run = app.add_subcommand("run", "Solve a scenario and write traces, report and plots");
  run->add_option("scenario", scenario, "Scenario file")->required();
  run->add_option("--mode", mode, "nominal or gtp")->check(CLI::IsMember({"nominal", "gtp"}));
  run->add_option("--seed", seed, "Solver seed");
  run->add_option("--out", out, "Output directory");
  run->add_option("--dt", dt, "Time step in s");
  run->add_option("--overlay", overlay, "CSV with x,y columns drawn on the scene");

  std::string report;
  auto* verify = app.add_subcommand("verify", "Re-check a report against its own traces");
  verify->add_option("report", report, "report.json")->required();

  std::string from, to;
  auto* fit = app.add_subcommand("fit", "Fit one clothoid between two poses");
  fit->add_option("--from", from, "x,y,theta")->required();
  fit->add_option("--to", to, "x,y,theta")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }

  try {
    if (*run) return cmd_run(scenario, mode, seed, out, dt, overlay);
    if (*verify) return cmd_verify(report);
    return cmd_fit(from, to);
  } catch (const gtp::ScenarioSyntaxError& e) {
    fmt::print(stderr, "syntax error, line {}: {}\n", e.line(), e.what());
    return kValidation;
  } catch (const gtp::ValidationError& e) {
    fmt::print(stderr, "invalid {}\n", e.what());
    return kValidation;
  } catch (const gtp::IoError& e) {
    fmt::print(stderr, "i/o error: {}\n", e.what());
    return kIo;
  } catch (const gtp::InfeasibleScenarioError& e) {
    fmt::print(stderr, "infeasible scenario: {}\n", e.what());
    return kInfeasible;
  } catch (const gtp::InfeasibleGeometryError& e) {
    fmt::print(stderr, "infeasible geometry: {}\n", e.what());
    return kInfeasible;
  } catch (const gtp::NoConvergenceError& e) {
    fmt::print(stderr, "no convergence: {}\n", e.what());
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "invalid input: {}\n", e.what());
    return kValidation;
  } catch (const std::domain_error& e) {
    fmt::print(stderr, "invalid input: {}\n", e.what());
    return kValidation;
  }
}
