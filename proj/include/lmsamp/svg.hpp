#pragma once

#include <string>
#include <vector>

namespace lmsamp::svgio {

/// One curve (or point set) in a panel.
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f6fb2";
  bool line = true;
  bool markers = false;
};

struct Panel {
  std::string title;
  std::vector<Series> series;
};

/// Minimal static line chart: side-by-side panels, shared styling, axis
/// bounds annotated at the corners. CSV stays the canonical output; this is
/// a quick visual check.
void write_chart(const std::string& path, const std::vector<Panel>& panels,
                 int panel_width = 360, int panel_height = 300);

}  // namespace lmsamp::svgio
