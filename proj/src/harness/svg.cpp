#include "kdv/harness/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace kdv::harness {

namespace {

constexpr double kW = 720, kH = 480, kPad = 60;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string header(const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kW) + "\" height=\"" + fmt(kH) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
         "<text x=\"" + fmt(kW / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + title + "</text>\n";
}

}  // namespace

std::string waterfall_svg(std::span<const FieldState> snapshots, std::size_t max_lines) {
  std::string out = header("V(X, S) waterfall");
  if (snapshots.empty()) return out + "</svg>\n";
  const std::size_t n = snapshots.size();
  const std::size_t stride = std::max<std::size_t>(1, (n + max_lines - 1) / std::max<std::size_t>(1, max_lines));
  std::vector<std::size_t> pick;
  for (std::size_t i = 0; i < n; i += stride) pick.push_back(i);
  if (pick.back() != n - 1) pick.push_back(n - 1);

  double vmax = 0.0;
  for (auto i : pick)
    for (double v : snapshots[i].values) vmax = std::max(vmax, std::abs(v));
  if (!(vmax > 0.0)) vmax = 1.0;
  const auto& g = snapshots.front().grid;
  const double plot_w = kW - 2 * kPad, plot_h = kH - 2 * kPad;
  const double lane = plot_h / static_cast<double>(pick.size() + 2);
  const double amp = 3.0 * lane / vmax;
  for (std::size_t k = 0; k < pick.size(); ++k) {
    const auto& s = snapshots[pick[k]];
    const double base = kH - kPad - static_cast<double>(k) * lane;
    out += "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"0.8\" points=\"";
    for (std::size_t j = 0; j < s.values.size(); ++j) {
      const double x = kPad + plot_w * static_cast<double>(j) / static_cast<double>(s.values.size());
      out += fmt(x) + "," + fmt(base - amp * s.values[j]) + " ";
    }
    out += "\"/>\n";
    out += "<text x=\"" + fmt(kW - kPad + 4) + "\" y=\"" + fmt(base) + "\">S=" + label(s.time) + "</text>\n";
  }
  out += "<text x=\"" + fmt(kPad) + "\" y=\"" + fmt(kH - 20) + "\">X=" + label(g.origin) + "</text>\n";
  out += "<text x=\"" + fmt(kW - kPad) + "\" y=\"" + fmt(kH - 20) + "\" text-anchor=\"end\">X=" +
         label(g.origin + g.L) + "</text>\n";
  return out + "</svg>\n";
}

std::string line_plot_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          std::span<const Series> series) {
  std::string out = header(title);
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  const double pw = kW - 2 * kPad, ph = kH - 2 * kPad;
  auto X = [&](double x) { return kPad + pw * (x - x0) / (x1 - x0); };
  auto Y = [&](double y) { return kH - kPad - ph * (y - y0) / (y1 - y0); };

  out += "<rect x=\"" + fmt(kPad) + "\" y=\"" + fmt(kPad) + "\" width=\"" + fmt(pw) + "\" height=\"" + fmt(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  out += "<text x=\"" + fmt(kPad) + "\" y=\"" + fmt(kH - kPad + 16) + "\">" + label(x0) + "</text>\n";
  out += "<text x=\"" + fmt(kW - kPad) + "\" y=\"" + fmt(kH - kPad + 16) + "\" text-anchor=\"end\">" + label(x1) +
         "</text>\n";
  out += "<text x=\"" + fmt(kPad - 4) + "\" y=\"" + fmt(kH - kPad) + "\" text-anchor=\"end\">" + label(y0) +
         "</text>\n";
  out += "<text x=\"" + fmt(kPad - 4) + "\" y=\"" + fmt(kPad + 10) + "\" text-anchor=\"end\">" + label(y1) +
         "</text>\n";
  out += "<text x=\"" + fmt(kW / 2) + "\" y=\"" + fmt(kH - 16) + "\" text-anchor=\"middle\">" + xlabel + "</text>\n";
  out += "<text x=\"16\" y=\"" + fmt(kH / 2) + "\" transform=\"rotate(-90 16 " + fmt(kH / 2) +
         ")\" text-anchor=\"middle\">" + ylabel + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) out += fmt(X(s.x[i])) + "," + fmt(Y(s.y[i])) + " ";
    out += "\"/>\n";
    const double ly = kPad + 16 + 16 * static_cast<double>(k);
    out += "<line x1=\"" + fmt(kPad + 10) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" + fmt(kPad + 34) + "\" y2=\"" +
           fmt(ly - 4) + "\" stroke=\"" + s.color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fmt(kPad + 40) + "\" y=\"" + fmt(ly) + "\">" + s.label + "</text>\n";
  }
  return out + "</svg>\n";
}

}  // namespace kdv::harness
