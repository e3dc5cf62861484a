#include "shockcast/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace shockcast {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 420;
constexpr int kMarginLeft = 54;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 34;
constexpr int kMarginBottom = 40;

struct Scale {
  double x0, x1, y0, y1;
  double px(double x) const {
    return kMarginLeft + (x - x0) / (x1 - x0) * (kWidth - kMarginLeft - kMarginRight);
  }
  double py(double y) const {
    return kHeight - kMarginBottom -
           (y - y0) / (y1 - y0) * (kHeight - kMarginTop - kMarginBottom);
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void axes(std::ostringstream& svg, const Scale& s, const std::string& title) {
  svg << "<rect width='" << kWidth << "' height='" << kHeight << "' fill='white'/>\n";
  svg << "<text x='" << kMarginLeft << "' y='20' font-family='sans-serif' font-size='14'>"
      << title << "</text>\n";
  svg << "<line x1='" << s.px(s.x0) << "' y1='" << s.py(s.y0) << "' x2='" << s.px(s.x1)
      << "' y2='" << s.py(s.y0) << "' stroke='black'/>\n";
  svg << "<line x1='" << s.px(s.x0) << "' y1='" << s.py(s.y0) << "' x2='" << s.px(s.x0)
      << "' y2='" << s.py(s.y1) << "' stroke='black'/>\n";
  for (int i = 0; i <= 5; ++i) {
    double y = s.y0 + (s.y1 - s.y0) * i / 5.0;
    svg << "<line x1='" << s.px(s.x0) - 4 << "' y1='" << s.py(y) << "' x2='" << s.px(s.x0)
        << "' y2='" << s.py(y) << "' stroke='black'/>\n";
    svg << "<text x='" << s.px(s.x0) - 8 << "' y='" << s.py(y) + 4
        << "' text-anchor='end' font-family='sans-serif' font-size='11'>" << num(y)
        << "</text>\n";
    double x = s.x0 + (s.x1 - s.x0) * i / 5.0;
    svg << "<line x1='" << s.px(x) << "' y1='" << s.py(s.y0) << "' x2='" << s.px(x) << "' y2='"
        << s.py(s.y0) + 4 << "' stroke='black'/>\n";
    svg << "<text x='" << s.px(x) << "' y='" << s.py(s.y0) + 16
        << "' text-anchor='middle' font-family='sans-serif' font-size='11'>"
        << static_cast<int>(std::lround(x)) << "</text>\n";
  }
}

double period_mid(const Period& p) { return 0.5 * (p.start_year + p.end_year); }

}  // namespace

std::string render_fan_svg(const SeriesPanel& panel, int country, const ProjectionFan& fan) {
  const auto& q = fan.quantiles[static_cast<std::size_t>(country)];
  const int H = static_cast<int>(fan.periods.size());
  const int nq = static_cast<int>(fan.quantile_levels.size());

  double ymin = 1e300, ymax = -1e300, xmin = 1e300, xmax = -1e300;
  for (int t = 0; t < panel.n_periods(); ++t) {
    if (!panel.observed(country, t)) continue;
    double x = period_mid(panel.periods()[t]);
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, panel.value(country, t));
    ymax = std::max(ymax, panel.value(country, t));
  }
  for (int h = 0; h < H; ++h) {
    double x = period_mid(fan.periods[static_cast<std::size_t>(h)]);
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, q(h, 0));
    ymax = std::max(ymax, q(h, nq - 1));
  }
  double pad = 0.06 * (ymax - ymin + 1e-9);
  Scale s{xmin - 2, xmax + 2, ymin - pad, ymax + pad};

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
      << "'>\n";
  axes(svg, s, panel.country_name(country) + " (" + to_string(fan.mode) + ")");

  // band between the outermost quantiles
  svg << "<polygon fill='#9ecae1' fill-opacity='0.55' stroke='none' points='";
  for (int h = 0; h < H; ++h) {
    svg << num(s.px(period_mid(fan.periods[static_cast<std::size_t>(h)]))) << ","
        << num(s.py(q(h, 0))) << " ";
  }
  for (int h = H - 1; h >= 0; --h) {
    svg << num(s.px(period_mid(fan.periods[static_cast<std::size_t>(h)]))) << ","
        << num(s.py(q(h, nq - 1))) << " ";
  }
  svg << "'/>\n";

  // median line
  int med = nq / 2;
  svg << "<polyline fill='none' stroke='#08519c' stroke-width='2' points='";
  for (int h = 0; h < H; ++h) {
    svg << num(s.px(period_mid(fan.periods[static_cast<std::size_t>(h)]))) << ","
        << num(s.py(q(h, med))) << " ";
  }
  svg << "'/>\n";

  for (int t = 0; t < panel.n_periods(); ++t) {
    if (!panel.observed(country, t)) continue;
    svg << "<circle cx='" << num(s.px(period_mid(panel.periods()[t]))) << "' cy='"
        << num(s.py(panel.value(country, t))) << "' r='2.5' fill='black'/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_shock_svg(const SeriesPanel& panel, int country, const ShockReport& report) {
  const std::string code = panel.country(country);
  double ymin = 1e300, ymax = -1e300, xmin = 1e300, xmax = -1e300;
  for (int t = 0; t < panel.n_periods(); ++t) {
    if (!panel.observed(country, t)) continue;
    double x = period_mid(panel.periods()[t]);
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, panel.value(country, t));
    ymax = std::max(ymax, panel.value(country, t));
  }
  std::vector<const ShockCell*> cells;
  for (const auto& cell : report.cells) {
    if (cell.country != code) continue;
    cells.push_back(&cell);
    if (cell.flagged) {
      ymax = std::max(ymax, cell.observed + cell.ci_high);
      ymin = std::min(ymin, cell.observed + cell.ci_low);
    }
  }
  double pad = 0.06 * (ymax - ymin + 1e-9);
  Scale s{xmin - 2, xmax + 2, ymin - pad, ymax + pad};

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
      << "'>\n";
  axes(svg, s, panel.country_name(country) + " shock-corrected estimates");

  svg << "<polyline fill='none' stroke='#bbbbbb' stroke-width='1' points='";
  for (int t = 0; t < panel.n_periods(); ++t) {
    if (!panel.observed(country, t)) continue;
    svg << num(s.px(period_mid(panel.periods()[t]))) << ","
        << num(s.py(panel.value(country, t))) << " ";
  }
  svg << "'/>\n";
  for (int t = 0; t < panel.n_periods(); ++t) {
    if (!panel.observed(country, t)) continue;
    svg << "<circle cx='" << num(s.px(period_mid(panel.periods()[t]))) << "' cy='"
        << num(s.py(panel.value(country, t))) << "' r='2.5' fill='black'/>\n";
  }

  for (const ShockCell* cell : cells) {
    if (!cell->flagged) continue;
    double x = s.px(period_mid(cell->period));
    svg << "<line x1='" << num(x) << "' y1='" << num(s.py(cell->observed + cell->ci_low))
        << "' x2='" << num(x) << "' y2='" << num(s.py(cell->observed + cell->ci_high))
        << "' stroke='#cb181d' stroke-width='1.5'/>\n";
    svg << "<circle cx='" << num(x) << "' cy='" << num(s.py(cell->corrected))
        << "' r='3.5' fill='#cb181d'/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace shockcast
