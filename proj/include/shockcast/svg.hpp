#pragma once

#include <string>
#include <vector>

#include "shockcast/panel.hpp"
#include "shockcast/projection.hpp"

namespace shockcast {

// Minimal SVG fan chart: observed points, projection median line, and a
// shaded band between the outermost quantiles. Data-identical to the CSV.
std::string render_fan_svg(const SeriesPanel& panel, int country, const ProjectionFan& fan);

// Observed series with shock-corrected estimates and 95% CI error bars for
// flagged cells of one country.
std::string render_shock_svg(const SeriesPanel& panel, int country, const ShockReport& report);

}  // namespace shockcast
