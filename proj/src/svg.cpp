#include "lmsamp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "lmsamp/csv.hpp"

namespace lmsamp::svgio {

namespace {

struct Bounds {
  double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
};

Bounds panel_bounds(const Panel& p) {
  Bounds b;
  b.xlo = b.ylo = std::numeric_limits<double>::infinity();
  b.xhi = b.yhi = -std::numeric_limits<double>::infinity();
  for (const auto& s : p.series) {
    for (double v : s.x) {
      if (std::isfinite(v)) {
        b.xlo = std::min(b.xlo, v);
        b.xhi = std::max(b.xhi, v);
      }
    }
    for (double v : s.y) {
      if (std::isfinite(v)) {
        b.ylo = std::min(b.ylo, v);
        b.yhi = std::max(b.yhi, v);
      }
    }
  }
  if (!std::isfinite(b.xlo)) b = Bounds{};
  if (b.xhi <= b.xlo) b.xhi = b.xlo + 1.0;
  if (b.yhi <= b.ylo) b.yhi = b.ylo + 1.0;
  double pad = 0.05 * (b.yhi - b.ylo);
  b.ylo -= pad;
  b.yhi += pad;
  return b;
}

}  // namespace

void write_chart(const std::string& path, const std::vector<Panel>& panels,
                 int panel_width, int panel_height) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  const int margin = 44;
  const int width = static_cast<int>(panels.size()) * panel_width;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << panel_height << "\" font-family=\"sans-serif\" "
      << "font-size=\"11\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << panel_height
      << "\" fill=\"white\"/>\n";
  int x0 = 0;
  for (const auto& panel : panels) {
    Bounds b = panel_bounds(panel);
    const double px0 = x0 + margin, px1 = x0 + panel_width - 12;
    const double py0 = panel_height - margin, py1 = 24;
    auto sx = [&](double x) {
      return px0 + (x - b.xlo) / (b.xhi - b.xlo) * (px1 - px0);
    };
    auto sy = [&](double y) {
      return py0 + (y - b.ylo) / (b.yhi - b.ylo) * (py1 - py0);
    };
    out << "<text x=\"" << x0 + panel_width / 2 << "\" y=\"14\" "
        << "text-anchor=\"middle\">" << panel.title << "</text>\n";
    // axes
    out << "<line x1=\"" << px0 << "\" y1=\"" << py0 << "\" x2=\"" << px1
        << "\" y2=\"" << py0 << "\" stroke=\"#444\"/>\n";
    out << "<line x1=\"" << px0 << "\" y1=\"" << py0 << "\" x2=\"" << px0
        << "\" y2=\"" << py1 << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << px0 << "\" y=\"" << py0 + 14 << "\">"
        << csvio::format_number(b.xlo) << "</text>\n";
    out << "<text x=\"" << px1 << "\" y=\"" << py0 + 14
        << "\" text-anchor=\"end\">" << csvio::format_number(b.xhi)
        << "</text>\n";
    out << "<text x=\"" << px0 - 4 << "\" y=\"" << py0
        << "\" text-anchor=\"end\">" << csvio::format_number(b.ylo)
        << "</text>\n";
    out << "<text x=\"" << px0 - 4 << "\" y=\"" << py1 + 4
        << "\" text-anchor=\"end\">" << csvio::format_number(b.yhi)
        << "</text>\n";
    int legend_y = 26;
    for (const auto& s : panel.series) {
      if (s.line && s.x.size() > 1) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          if (!std::isfinite(s.y[i])) continue;
          out << sx(s.x[i]) << "," << sy(s.y[i]) << " ";
        }
        out << "\"/>\n";
      }
      if (s.markers) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          if (!std::isfinite(s.y[i])) continue;
          out << "<circle cx=\"" << sx(s.x[i]) << "\" cy=\"" << sy(s.y[i])
              << "\" r=\"3\" fill=\"none\" stroke=\"" << s.color << "\"/>\n";
        }
      }
      if (!s.label.empty()) {
        out << "<text x=\"" << px1 - 4 << "\" y=\"" << legend_y
            << "\" text-anchor=\"end\" fill=\"" << s.color << "\">" << s.label
            << "</text>\n";
        legend_y += 14;
      }
    }
    x0 += panel_width;
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace lmsamp::svgio
