#include "carleman/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "carleman/config.hpp"
#include "carleman/snapshot_io.hpp"

namespace carleman {

namespace {

namespace fs = std::filesystem;

constexpr double kW = 640, kH = 420, kMargin = 60;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

void write_svg_plot(const std::string& path, const PlotSpec& spec,
                    const std::vector<PlotSeries>& series) {
  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };

  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const PlotSeries& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (spec.log_x && s.x[i] <= 0.0) continue;
      if (spec.log_y && s.y[i] <= 0.0) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (x0 > x1) { x0 = 0; x1 = 1; }
  if (y0 > y1) { y0 = 0; y1 = 1; }
  if (x1 - x0 < 1e-12) { x0 -= 0.5; x1 += 0.5; }
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }

  auto px = [&](double v) {
    return kMargin + (tx(v) - x0) / (x1 - x0) * (kW - 2 * kMargin);
  };
  auto py = [&](double v) {
    return kH - kMargin - (ty(v) - y0) / (y1 - y0) * (kH - 2 * kMargin);
  };

  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
     << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << " " << kH
     << "\">\n";
  os << "<!-- data\n";
  for (const PlotSeries& s : series) {
    os << "series: " << s.label << "\n";
    for (size_t i = 0; i < s.x.size(); ++i)
      os << num(s.x[i]) << "," << num(s.y[i]) << "\n";
  }
  os << "-->\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"15\">" << spec.title
     << "</text>\n";
  // axes
  os << "<line x1=\"" << kMargin << "\" y1=\"" << kH - kMargin << "\" x2=\""
     << kW - kMargin << "\" y2=\"" << kH - kMargin
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\""
     << kMargin << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double fx = x0 + tick * (x1 - x0) / 4;
    const double fy = y0 + tick * (y1 - y0) / 4;
    const double vx = spec.log_x ? std::pow(10.0, fx) : fx;
    const double vy = spec.log_y ? std::pow(10.0, fy) : fy;
    os << "<text x=\"" << kMargin + tick * (kW - 2 * kMargin) / 4 << "\" y=\""
       << kH - kMargin + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">" << num(vx) << "</text>\n";
    os << "<text x=\"" << kMargin - 6 << "\" y=\""
       << kH - kMargin - tick * (kH - 2 * kMargin) / 4 + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << num(vy) << "</text>\n";
  }
  os << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 14
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\">" << spec.x_label << "</text>\n";
  os << "<text x=\"16\" y=\"" << kH / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        "transform=\"rotate(-90 16 " << kH / 2 << ")\">" << spec.y_label
     << "</text>\n";

  int ci = 0;
  for (const PlotSeries& s : series) {
    const char* color = kColors[ci % 8];
    std::ostringstream pts;
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (spec.log_x && s.x[i] <= 0.0) continue;
      if (spec.log_y && s.y[i] <= 0.0) continue;
      pts << px(s.x[i]) << "," << py(s.y[i]) << " ";
    }
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
    os << "<text x=\"" << kW - kMargin + 4 << "\" y=\"" << kMargin + 16 * ci
       << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color
       << "\">" << s.label << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
}

namespace {

std::vector<std::vector<double>> read_csv_columns(const std::string& path) {
  std::ifstream is(path);
  std::string line;
  std::getline(is, line);  // header
  std::vector<std::vector<double>> cols;
  while (std::getline(is, line)) {
    std::stringstream ss(line);
    std::string cell;
    size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (cols.size() <= c) cols.resize(c + 1);
      try {
        cols[c].push_back(std::stod(cell));
      } catch (...) {
        cols[c].push_back(std::nan(""));
      }
      ++c;
    }
  }
  return cols;
}

/// Midline profile of a field: values along axis 0 through the domain center.
PlotSeries midline(const Snapshot& snap, size_t field, const std::string& label) {
  PlotSeries s;
  s.label = label;
  const Grid& g = snap.grid;
  const Index jmid = g.cells[1] / 2, kmid = g.cells[2] / 2;
  for (Index i = 0; i < g.cells[0]; ++i) {
    const Index idx = g.flat(i, g.n >= 2 ? jmid : 0, g.n >= 3 ? kmid : 0);
    s.x.push_back(g.origin[0] + (i + 0.5) * g.dx);
    s.y.push_back(snap.fields[field][idx]);
  }
  return s;
}

}  // namespace

std::string emit_plots(const std::string& dir) {
  std::ostringstream log;
  int plots = 0;
  fs::create_directories(dir + "/plots");

  if (fs::exists(dir + "/diagnostics/convergence.csv")) {
    const auto cols = read_csv_columns(dir + "/diagnostics/convergence.csv");
    if (cols.size() >= 3 && !cols[0].empty()) {
      PlotSpec spec{"diffusive-limit error vs epsilon", "epsilon", "e(eps)",
                    true, true};
      write_svg_plot(dir + "/plots/convergence.svg", spec,
                     {{"e(eps)", cols[0], cols[1]},
                      {"isotropy gap", cols[0], cols[2]}});
      ++plots;
    }
  } else {
    log << "warning: no convergence.csv, skipping sweep plot\n";
  }

  // density profiles from the limit run
  std::vector<fs::path> limit_snaps;
  if (fs::exists(dir + "/limit"))
    for (const auto& e : fs::directory_iterator(dir + "/limit"))
      if (e.path().extension() == ".cks") limit_snaps.push_back(e.path());
  std::sort(limit_snaps.begin(), limit_snaps.end());
  if (!limit_snaps.empty()) {
    std::vector<PlotSeries> series;
    for (const fs::path& p : limit_snaps) {
      const Snapshot snap = read_snapshot(p.string());
      series.push_back(midline(snap, 0, "t=" + num(snap.t)));
    }
    PlotSpec spec{"limit density midline profiles", "x", "rho", false, false};
    write_svg_plot(dir + "/plots/rho_profiles.svg", spec, series);
    ++plots;
  } else {
    log << "warning: no limit snapshots, skipping profile plot\n";
  }

  // kinetic vs limit at the final snapshot
  {
    std::vector<PlotSeries> series;
    if (!limit_snaps.empty()) {
      const Snapshot limit = read_snapshot(limit_snaps.back().string());
      PlotSeries s = midline(limit, 0, "limit rho");
      series.push_back(s);
      for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_directory()) continue;
        const std::string name = e.path().filename().string();
        if (name.rfind("kinetic_eps_", 0) != 0) continue;
        std::vector<fs::path> snaps;
        for (const auto& f : fs::directory_iterator(e.path()))
          if (f.path().extension() == ".cks") snaps.push_back(f.path());
        std::sort(snaps.begin(), snaps.end());
        if (snaps.empty()) continue;
        const Snapshot snap = read_snapshot(snaps.back().string());
        Snapshot rho = snap;
        rho.fields = {Field::Zero(snap.grid.size())};
        for (const Field& f : snap.fields) rho.fields[0] += f;
        series.push_back(midline(rho, 0, name.substr(8)));
      }
      if (series.size() > 1) {
        PlotSpec spec{"kinetic rho vs limit at final time", "x", "rho", false,
                      false};
        write_svg_plot(dir + "/plots/kinetic_vs_limit.svg", spec, series);
        ++plots;
      }
    }
  }

  if (fs::exists(dir + "/diagnostics/contraction.csv")) {
    const auto cols = read_csv_columns(dir + "/diagnostics/contraction.csv");
    if (cols.size() >= 3 && !cols[0].empty()) {
      // one series per epsilon
      std::vector<PlotSeries> series;
      for (size_t i = 0; i < cols[0].size(); ++i) {
        const std::string label = "eps=" + num(cols[0][i]);
        if (series.empty() || series.back().label != label)
          series.push_back({label, {}, {}});
        series.back().x.push_back(cols[1][i]);
        series.back().y.push_back(cols[2][i]);
      }
      PlotSpec spec{"L1 contraction series", "t", "sum (u-v)+ L1", false, false};
      write_svg_plot(dir + "/plots/contraction.svg", spec, series);
      ++plots;
    }
  }

  // barrier cross-section from the config echo
  if (fs::exists(dir + "/config_echo.json") && !limit_snaps.empty()) {
    std::ifstream is(dir + "/config_echo.json");
    std::stringstream ss;
    ss << is.rdbuf();
    const ValidationResult vr = validate_config_text(ss.str());
    if (vr.ok() && (vr.config->lower_barrier || vr.config->upper_barrier)) {
      const Snapshot limit = read_snapshot(limit_snaps.back().string());
      std::vector<PlotSeries> series;
      series.push_back(midline(limit, 0, "limit rho"));
      const double n2 = 2.0 * vr.config->model.n;
      if (vr.config->lower_barrier) {
        Snapshot psi = limit;
        psi.fields = {psi_field(*vr.config->lower_barrier, limit.grid, limit.t) *
                      (2.0 * vr.config->model.n) / (2.0 * n2)};
        series.push_back(midline(psi, 0, "(1/4n) Psi * 2n"));
      }
      if (vr.config->upper_barrier) {
        Snapshot psi = limit;
        psi.fields = {psi_field(*vr.config->upper_barrier, limit.grid, limit.t) *
                      (3.0 * 2.0 * vr.config->model.n) / (2.0 * n2)};
        series.push_back(midline(psi, 0, "(3/4n) PsiBar * 2n"));
      }
      PlotSpec spec{"barrier vs solution cross-section", "x", "value", false,
                    false};
      write_svg_plot(dir + "/plots/barrier_cross_section.svg", spec, series);
      ++plots;
    }
  }

  log << "wrote " << plots << " plot(s) under " << dir << "/plots\n";
  return log.str();
}

}  // namespace carleman
