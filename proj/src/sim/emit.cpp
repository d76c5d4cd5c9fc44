#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "gtp/errors.hpp"
#include "gtp/sim.hpp"

namespace gtp {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << text;
  out.close();
  if (!out) throw IoError(path.string(), "write failed");
}

std::string trace_csv(const TimedTrajectory& traj) {
  std::string s = "t,x,y,theta,speed\n";
  for (const TrajectoryState& st : traj.states) {
    s += fmt::format("{},{},{},{},{}\n", st.t, st.pose.x, st.pose.y, st.pose.theta, st.speed);
  }
  return s;
}

std::string gtc_csv(const std::vector<GtcSample>& curve) {
  std::string s = "t,gtc\n";
  for (const GtcSample& g : curve) s += fmt::format("{},{}\n", g.t, g.gtc);
  return s;
}

const TrajectoryState& state_at(const TimedTrajectory& traj, double t) {
  return *std::min_element(traj.states.begin(), traj.states.end(), [t](const auto& a, const auto& b) {
    return std::abs(a.t - t) < std::abs(b.t - t);
  });
}

// World metres to scene pixels.
struct SceneMap {
  double half;
  double px_per_m = 6.0;
  double x(double wx) const { return (wx + half) * px_per_m; }
  double y(double wy) const { return (half - wy) * px_per_m; }
  double size() const { return 2.0 * half * px_per_m; }
};

std::string polyline(const SceneMap& m, const std::vector<Vec2>& pts, const char* style) {
  std::string s = "<polyline fill=\"none\" " + std::string(style) + " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    s += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", m.x(pts[i].x), m.y(pts[i].y));
  }
  return s + "\"/>\n";
}

std::vector<Vec2> positions(const TimedTrajectory& traj) {
  std::vector<Vec2> pts;
  for (const TrajectoryState& st : traj.states) pts.push_back(st.pose.position());
  return pts;
}

std::string scene_svg(const RunReport& r, const std::vector<Vec2>& overlay) {
  const IntersectionLayout& layout = r.scenario.ctx.layout;
  const double l = layout.lane_width();
  const SceneMap m{3.0 * l + 30.0};
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{0:.0f}\" viewBox=\"0 0 {0:.0f} {0:.0f}\">\n",
      m.size());
  s += fmt::format("<rect width=\"{0:.0f}\" height=\"{0:.0f}\" fill=\"#e8eee4\"/>\n", m.size());
  // Carriageways: one vertical and one horizontal band, two lanes each.
  s += fmt::format("<rect x=\"{:.2f}\" y=\"0\" width=\"{:.2f}\" height=\"{:.0f}\" fill=\"#8a8a8a\"/>\n", m.x(-l),
                   2.0 * l * m.px_per_m, m.size());
  s += fmt::format("<rect x=\"0\" y=\"{:.2f}\" width=\"{:.0f}\" height=\"{:.2f}\" fill=\"#8a8a8a\"/>\n", m.y(l),
                   m.size(), 2.0 * l * m.px_per_m);
  for (const auto& line : layout.lane_boundaries()) {
    s += polyline(m, line, "stroke=\"#ffffff\" stroke-width=\"1\" stroke-dasharray=\"6 4\"");
  }
  std::vector<Vec2> zone = layout.conflict_zone();
  zone.push_back(zone.front());
  s += polyline(m, zone, "stroke=\"#e08a00\" stroke-width=\"1.5\" stroke-dasharray=\"3 3\"");

  s += polyline(m, positions(r.ego), "stroke=\"#1f5fbf\" stroke-width=\"2\"");
  s += polyline(m, positions(r.opp), "stroke=\"#c0392b\" stroke-width=\"2\"");
  if (!overlay.empty()) s += polyline(m, overlay, "stroke=\"#2e8b57\" stroke-width=\"1.5\" stroke-dasharray=\"4 2\"");

  const auto box = [&](const TimedTrajectory& traj, const VehicleDims& dims, const char* color) {
    const Obb b = footprint(state_at(traj, r.t_crit).pose, dims);
    std::vector<Vec2> pts(b.vertices().begin(), b.vertices().end());
    pts.push_back(pts.front());
    return polyline(m, pts, color);
  };
  s += box(r.ego, r.scenario.ctx.ego.dims, "stroke=\"#0b2f66\" stroke-width=\"1.5\"");
  s += box(r.opp, r.scenario.ctx.opp.dims, "stroke=\"#6b1a12\" stroke-width=\"1.5\"");
  if (r.stop_interval) {
    const Vec2 p = state_at(r.ego, r.stop_interval->t1).pose.position();
    s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"#1f5fbf\"/>\n", m.x(p.x), m.y(p.y));
  }

  s += fmt::format("<text x=\"8\" y=\"16\" font-family=\"sans-serif\" font-size=\"12\">{} ({} mode)</text>\n",
                   r.scenario.name, r.mode == Mode::Gtp ? "gtp" : "nominal");
  s += "<text x=\"8\" y=\"32\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#1f5fbf\">ego</text>\n";
  s += "<text x=\"40\" y=\"32\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#c0392b\">opponent</text>\n";
  s += fmt::format("<text x=\"8\" y=\"48\" font-family=\"sans-serif\" font-size=\"12\">footprints at t = {:.2f} s</text>\n",
                   r.t_crit);
  return s + "</svg>\n";
}

double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double f : {1.0, 2.0, 5.0}) {
    if (f * mag >= raw) return f * mag;
  }
  return 10.0 * mag;
}

std::string gtc_svg(const RunReport& r) {
  constexpr double W = 640, H = 360, L = 56, R = 16, T = 24, B = 40;
  const double g_crit = r.scenario.ctx.weights.g_crit;
  const double t0 = r.gtc_curve.front().t;
  const double t1 = std::max(r.gtc_curve.back().t, t0 + r.scenario.ctx.dt);
  double g_max = g_crit;
  for (const GtcSample& g : r.gtc_curve) g_max = std::max(g_max, g.gtc);
  g_max *= 1.1;
  const auto X = [&](double t) { return L + (t - t0) / (t1 - t0) * (W - L - R); };
  const auto Y = [&](double g) { return H - B - g / g_max * (H - T - B); };

  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" viewBox=\"0 0 {0:.0f} {1:.0f}\">\n",
      W, H);
  s += fmt::format("<rect width=\"{:.0f}\" height=\"{:.0f}\" fill=\"#ffffff\"/>\n", W, H);
  s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"#000\"/>\n", L, H - B,
                   W - R);
  s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#000\"/>\n", L, T,
                   H - B);
  const double ts = nice_step(t1 - t0);
  for (double t = std::ceil(t0 / ts) * ts; t <= t1 + 1e-9; t += ts) {
    s += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{:g}</text>\n",
        X(t), H - B + 14, std::round(t / ts) * ts);
  }
  const double gs = nice_step(g_max);
  for (double g = 0.0; g <= g_max + 1e-9; g += gs) {
    s += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{:g}</text>\n",
        L - 4, Y(g) + 3, std::round(g / gs) * gs);
  }
  s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
                   "text-anchor=\"middle\">t [s]</text>\n",
                   (L + W - R) / 2.0, H - 8);
  s += fmt::format("<text x=\"12\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\">gtc [m]</text>\n", T - 8);

  s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"#e08a00\" "
                   "stroke-dasharray=\"6 4\"/>\n",
                   L, Y(g_crit), W - R);
  s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#e08a00\" "
                   "text-anchor=\"end\">g_crit</text>\n",
                   W - R - 2, Y(g_crit) - 4);

  s += "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < r.gtc_curve.size(); ++i) {
    s += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", X(r.gtc_curve[i].t), Y(r.gtc_curve[i].gtc));
  }
  s += "\"/>\n";
  s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"#1f5fbf\"/>\n", X(r.t_crit), Y(r.min_gtc));
  if (r.t_impact) {
    s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"#c0392b\"/>\n", X(*r.t_impact), Y(0.0));
  }
  if (r.stop_interval) {
    for (const auto& [t, label] : {std::pair{r.stop_interval->t1, "t1"}, {r.stop_interval->t2, "t2"}}) {
      const double x = X(std::clamp(t, t0, t1));
      s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#555\" "
                       "stroke-dasharray=\"2 3\"/>\n",
                       x, T, H - B);
      s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"10\" "
                       "text-anchor=\"middle\">{} = {:.2f} s</text>\n",
                       x, T - 4, label, t);
    }
  }
  return s + "</svg>\n";
}

double parse_double(std::string_view text, const std::string& where) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v)) {
    throw ValidationError(where, fmt::format("not a number: '{}'", text));
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

void emit(const RunReport& report, const std::filesystem::path& out_dir, const std::vector<Vec2>& overlay) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string(), ec.message());
  write_file(out_dir / "trace_ego.csv", trace_csv(report.ego));
  write_file(out_dir / "trace_opp.csv", trace_csv(report.opp));
  write_file(out_dir / "gtc.csv", gtc_csv(report.gtc_curve));
  write_file(out_dir / "report.json", report_to_json(report).dump(2) + "\n");
  write_file(out_dir / "scene.svg", scene_svg(report, overlay));
  write_file(out_dir / "gtc.svg", gtc_svg(report));
}

std::vector<Vec2> read_overlay(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open overlay");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("overlay", "missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  std::size_t ix = header.size(), iy = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "x") ix = i;
    if (header[i] == "y") iy = i;
  }
  if (ix == header.size() || iy == header.size()) throw ValidationError("overlay", "header needs x and y columns");
  std::vector<Vec2> pts;
  for (int row = 2; std::getline(in, line); ++row) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw ValidationError("overlay", fmt::format("row {} has {} cells, header has {}", row, cells.size(), header.size()));
    }
    const std::string where = fmt::format("overlay row {}", row);
    pts.push_back({parse_double(cells[ix], where), parse_double(cells[iy], where)});
  }
  if (in.bad()) throw IoError(path.string(), "read failed");
  return pts;
}

}  // namespace gtp
