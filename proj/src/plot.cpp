#include "aqite/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "aqite/errors.hpp"
#include "aqite/runner.hpp"
#include "json.hpp"

namespace aqite {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Fixed palette so repeated renders are byte-identical.
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#e377c2", "#17becf",
                                   "#7f7f7f", "#bcbd22"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v, bool log) {
  char buf[32];
  if (log) {
    std::snprintf(buf, sizeof buf, "1e%d", static_cast<int>(std::lround(v)));
  } else {
    std::snprintf(buf, sizeof buf, "%g", v);
  }
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Panel {
  std::string title;
  std::function<double(const TrajectoryRecord&)> value;
  bool log = true;
};

double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

void draw_panel(std::ostringstream& svg, const Panel& panel,
                std::span<const PlotSeries> series,
                std::span<const double> markers, double x0, double y0,
                double w, double h) {
  const double left = x0 + 60, right = x0 + w - 15;
  const double top = y0 + 25, bottom = y0 + h - 40;

  double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
  double vmin = tmin, vmax = -tmin;
  for (const auto& s : series) {
    for (const auto& r : s.records) {
      const double v = panel.value(r);
      tmin = std::min(tmin, r.tau);
      tmax = std::max(tmax, r.tau);
      if (!std::isfinite(v) || (panel.log && v <= 0.0)) continue;
      const double y = panel.log ? std::log10(v) : v;
      vmin = std::min(vmin, y);
      vmax = std::max(vmax, y);
    }
  }
  if (!std::isfinite(tmin)) return;
  if (tmax <= tmin) tmax = tmin + 1.0;
  if (!std::isfinite(vmin)) vmin = vmax = 0.0;
  if (panel.log) {
    vmin = std::floor(vmin);
    vmax = std::ceil(vmax);
  }
  if (vmax <= vmin) vmax = vmin + 1.0;
  if (!panel.log) {
    const double pad = 0.05 * (vmax - vmin);
    vmin -= pad;
    vmax += pad;
  }
  auto px = [&](double t) { return left + (t - tmin) / (tmax - tmin) * (right - left); };
  auto py = [&](double y) { return bottom - (y - vmin) / (vmax - vmin) * (bottom - top); };

  svg << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << num(y0 + 16)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(panel.title)
      << "</text>\n";
  svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\""
      << num(right - left) << "\" height=\"" << num(bottom - top)
      << "\" fill=\"none\" stroke=\"#000\"/>\n";

  // y ticks
  const double ystep = panel.log ? std::max(1.0, std::ceil((vmax - vmin) / 8.0))
                                 : nice_step(vmax - vmin);
  for (double y = std::ceil(vmin / ystep) * ystep; y <= vmax + 1e-9; y += ystep) {
    svg << "<line x1=\"" << num(left) << "\" x2=\"" << num(right) << "\" y1=\""
        << num(py(y)) << "\" y2=\"" << num(py(y))
        << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
    svg << "<text x=\"" << num(left - 4) << "\" y=\"" << num(py(y) + 4)
        << "\" text-anchor=\"end\" font-size=\"10\">"
        << tick_label(std::abs(y) < 1e-12 ? 0.0 : y, panel.log) << "</text>\n";
  }
  // x ticks
  const double xstep = nice_step(tmax - tmin);
  for (double t = std::ceil(tmin / xstep) * xstep; t <= tmax + 1e-9; t += xstep) {
    svg << "<text x=\"" << num(px(t)) << "\" y=\"" << num(bottom + 14)
        << "\" text-anchor=\"middle\" font-size=\"10\">"
        << tick_label(std::abs(t) < 1e-12 ? 0.0 : t, false) << "</text>\n";
  }
  svg << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << num(bottom + 30)
      << "\" text-anchor=\"middle\" font-size=\"11\">tau</text>\n";

  for (double m : markers) {
    if (m < tmin || m > tmax) continue;
    svg << "<line x1=\"" << num(px(m)) << "\" x2=\"" << num(px(m)) << "\" y1=\""
        << num(top) << "\" y2=\"" << num(bottom)
        << "\" stroke=\"#444\" stroke-dasharray=\"2,3\"/>\n";
  }

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % std::size(kColors)];
    std::string path;
    bool pen_down = false;
    for (const auto& r : series[k].records) {
      const double v = panel.value(r);
      if (!std::isfinite(v) || (panel.log && v <= 0.0)) {
        pen_down = false;
        continue;
      }
      const double y = std::clamp(panel.log ? std::log10(v) : v, vmin, vmax);
      path += (pen_down ? " L" : " M") + num(px(r.tau)) + " " + num(py(y));
      pen_down = true;
    }
    if (path.empty()) continue;
    svg << "<path d=\"" << path.substr(1) << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
  }
}

void draw_legend(std::ostringstream& svg, std::span<const PlotSeries> series,
                 double x, double y) {
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double yy = y + 16.0 * static_cast<double>(k);
    svg << "<line x1=\"" << num(x) << "\" x2=\"" << num(x + 20) << "\" y1=\""
        << num(yy) << "\" y2=\"" << num(yy) << "\" stroke=\""
        << kColors[k % std::size(kColors)] << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(x + 26) << "\" y=\"" << num(yy + 4)
        << "\" font-size=\"11\">" << escape(series[k].label) << "</text>\n";
  }
}

json load_json(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw SchemaError("cannot read " + path.string());
  json j = json::parse(f, nullptr, false);
  if (j.is_discarded()) throw SchemaError(path.string() + ": invalid JSON");
  return j;
}

// Interior schedule breakpoints of a run directory's spec.
void collect_markers(const fs::path& run_dir, std::set<double>& markers) {
  const fs::path summary = run_dir / "summary.json";
  if (!fs::exists(summary)) return;
  const json j = load_json(summary);
  if (!j.contains("spec") || !j["spec"].contains("truncation.schedule")) return;
  for (const auto& seg : j["spec"]["truncation.schedule"]) {
    if (seg.is_array() && !seg.empty() && seg[0].is_number() &&
        seg[0].get<double>() > 0.0) {
      markers.insert(seg[0].get<double>());
    }
  }
}

std::string overrides_label(const json& overrides) {
  std::string label;
  for (const auto& [k, v] : overrides.items()) {
    if (!label.empty()) label += ", ";
    const auto dot = k.rfind('.');
    label += (dot == std::string::npos ? k : k.substr(dot + 1)) + "=" +
             (v.is_string() ? v.get<std::string>() : v.dump());
  }
  return label.empty() ? "base" : label;
}

}  // namespace

std::string render_figure(int figure, std::span<const PlotSeries> series,
                          std::span<const double> markers) {
  if (figure < 1 || figure > 5) {
    throw ConfigError("--figure must be between 1 and 5");
  }
  bool any = false;
  for (const auto& s : series) any = any || !s.records.empty();
  if (!any) throw SchemaError("no records to plot");

  const Panel i_inf{"I_inf (infidelity with ground state of H)",
                    [](const TrajectoryRecord& r) { return r.i_inf; }, true};
  const Panel i_tau{"I_tau (infidelity with Psi(tau))",
                    [](const TrajectoryRecord& r) { return r.i_tau; }, true};
  const Panel gap{"gap of H~", [](const TrajectoryRecord& r) { return r.gap; },
                  true};
  const Panel norm{"norm of H~",
                   [](const TrajectoryRecord& r) { return r.norm; }, false};

  std::ostringstream svg;
  const double legend_h = 16.0 * static_cast<double>(series.size()) + 20.0;
  if (figure == 4) {
    const double w = 640, h = 420 + legend_h;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
        << "\" height=\"" << num(h) << "\" font-family=\"sans-serif\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    draw_panel(svg, i_inf, series, markers, 0, 0, w, 420);
    draw_legend(svg, series, 70, 430);
  } else {
    const double w = 1000, h = 760 + legend_h;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
        << "\" height=\"" << num(h) << "\" font-family=\"sans-serif\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    const Panel* panels[] = {&i_inf, &i_tau, &gap, &norm};
    const char* tags[] = {"(a) ", "(b) ", "(c) ", "(d) "};
    for (int k = 0; k < 4; ++k) {
      Panel p = *panels[k];
      p.title = tags[k] + p.title;
      draw_panel(svg, p, series, {}, 500.0 * (k % 2), 380.0 * (k / 2), 500,
                 380);
    }
    draw_legend(svg, series, 70, 770);
  }
  svg << "</svg>\n";
  return svg.str();
}

fs::path emit_plot(const fs::path& input, int figure, const fs::path& out_dir) {
  std::vector<PlotSeries> series;
  std::set<double> markers;
  if (fs::is_directory(input)) {
    series.push_back({input.filename().string(),
                      read_records_csv(input / "records.csv")});
    collect_markers(input, markers);
  } else if (input.extension() == ".json") {
    const json index = load_json(input);
    if (!index.contains("points") || !index["points"].is_array()) {
      throw SchemaError(input.string() + ": missing 'points'");
    }
    const fs::path root = input.parent_path();
    for (const auto& p : index["points"]) {
      if (!p.contains("status") || p["status"] != "ok") continue;
      if (!p.contains("dir")) throw SchemaError("index point without 'dir'");
      const fs::path dir = root / p["dir"].get<std::string>();
      series.push_back({overrides_label(p.value("overrides", json::object())),
                        read_records_csv(dir / "records.csv")});
      collect_markers(dir, markers);
    }
  } else {
    series.push_back({input.stem().string(), read_records_csv(input)});
    collect_markers(input.parent_path(), markers);
  }
  const std::vector<double> m(markers.begin(), markers.end());
  const std::string text = render_figure(figure, series, m);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const fs::path out = out_dir / ("figure" + std::to_string(figure) + ".svg");
  std::ofstream f(out, std::ios::binary);
  if (!f) throw ResourceError("cannot write " + out.string());
  f << text;
  return out;
}

}  // namespace aqite
