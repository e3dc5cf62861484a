#include "shockcast/panel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>

#include "shockcast/csv.hpp"

namespace shockcast {

std::string Period::label() const {
  return std::to_string(start_year) + "-" + std::to_string(end_year);
}

Period Period::parse(const std::string& label) {
  auto dash = label.find('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 >= label.size()) {
    throw std::runtime_error("malformed period label: '" + label + "' (expected START-END)");
  }
  try {
    int s = std::stoi(label.substr(0, dash));
    int e = std::stoi(label.substr(dash + 1));
    return {s, e};
  } catch (const std::exception&) {
    throw std::runtime_error("malformed period label: '" + label + "'");
  }
}

namespace {
constexpr int kPeriodWidth = 5;

std::string cell_name(const std::string& country, const Period& p) {
  return country + " @ " + p.label();
}
}  // namespace

SeriesPanel SeriesPanel::from_cells(std::vector<Cell> cells, PanelLimits limits) {
  if (cells.empty()) throw std::runtime_error("panel has no rows");

  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return std::tie(a.country_code, a.period_start) < std::tie(b.country_code, b.period_start);
  });

  SeriesPanel panel;
  panel.limits_ = limits;

  int min_start = cells.front().period_start;
  int max_start = cells.front().period_start;
  for (const auto& c : cells) {
    min_start = std::min(min_start, c.period_start);
    max_start = std::max(max_start, c.period_start);
    if ((c.period_start - min_start) % kPeriodWidth != 0) {
      throw std::runtime_error("period start " + std::to_string(c.period_start) + " for " +
                               c.country_code + " does not align to the 5-year grid");
    }
  }
  for (int s = min_start; s <= max_start; s += kPeriodWidth) {
    panel.periods_.push_back({s, s + kPeriodWidth});
  }

  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0 && cells[i].country_code == cells[i - 1].country_code &&
        cells[i].period_start == cells[i - 1].period_start) {
      throw std::runtime_error("duplicate row for " +
                               cell_name(cells[i].country_code,
                                         {cells[i].period_start, cells[i].period_start + 5}));
    }
    if (panel.countries_.empty() || panel.countries_.back() != cells[i].country_code) {
      panel.countries_.push_back(cells[i].country_code);
      panel.names_.push_back(cells[i].country_name);
      panel.regions_.push_back(cells[i].region);
    } else if (panel.regions_.back() != cells[i].region) {
      throw std::runtime_error("country " + cells[i].country_code +
                               " appears with two region labels: '" + panel.regions_.back() +
                               "' and '" + cells[i].region + "'");
    }
  }

  const int C = panel.n_countries();
  const int T = panel.n_periods();
  panel.values_.setConstant(C, T, std::numeric_limits<double>::quiet_NaN());
  panel.mask_.setZero(C, T);

  int ci = -1;
  for (const auto& c : cells) {
    if (ci < 0 || panel.countries_[ci] != c.country_code) ++ci;
    int ti = (c.period_start - min_start) / kPeriodWidth;
    Period p = panel.periods_[ti];
    if (!std::isfinite(c.value) || c.value <= limits.value_low || c.value >= limits.value_high) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%g", c.value);
      throw std::runtime_error("value " + std::string(buf) + " at " +
                               cell_name(c.country_code, p) + " outside (" +
                               std::to_string(limits.value_low) + ", " +
                               std::to_string(limits.value_high) + ")");
    }
    panel.values_(ci, ti) = c.value;
    panel.mask_(ci, ti) = 1;
  }

  panel.first_.assign(C, -1);
  panel.last_.assign(C, -1);
  for (int i = 0; i < C; ++i) {
    for (int t = 0; t < T; ++t) {
      if (panel.mask_(i, t)) {
        if (panel.first_[i] < 0) panel.first_[i] = t;
        panel.last_[i] = t;
      }
    }
    for (int t = panel.first_[i]; t <= panel.last_[i]; ++t) {
      if (!panel.mask_(i, t)) {
        throw std::runtime_error("internal gap for " +
                                 cell_name(panel.countries_[i], panel.periods_[t]) +
                                 ": missing between two observed periods");
      }
    }
    if (panel.last_[i] - panel.first_[i] + 1 < 2) {
      throw std::runtime_error("country " + panel.countries_[i] +
                               " has fewer than 2 consecutive observed periods");
    }
  }
  return panel;
}

int SeriesPanel::country_index(const std::string& code) const {
  auto it = std::lower_bound(countries_.begin(), countries_.end(), code);
  if (it == countries_.end() || *it != code) return -1;
  return static_cast<int>(it - countries_.begin());
}

int SeriesPanel::period_index(const Period& p) const {
  for (std::size_t i = 0; i < periods_.size(); ++i) {
    if (periods_[i] == p) return static_cast<int>(i);
  }
  return -1;
}

int SeriesPanel::n_observed_cells() const {
  return static_cast<int>(mask_.cast<int>().sum());
}

double SeriesPanel::max_observed() const {
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_countries(); ++i) {
    for (int t = 0; t < n_periods(); ++t) {
      if (mask_(i, t)) m = std::max(m, values_(i, t));
    }
  }
  return m;
}

std::vector<SeriesPanel::Cell> SeriesPanel::to_cells() const {
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(n_observed_cells()));
  for (int i = 0; i < n_countries(); ++i) {
    for (int t = 0; t < n_periods(); ++t) {
      if (mask_(i, t)) {
        cells.push_back({countries_[i], names_[i], regions_[i], periods_[t].start_year,
                         values_(i, t)});
      }
    }
  }
  return cells;
}

SeriesPanel load_panel(const std::string& path, const PanelSchema& schema, PanelLimits limits) {
  CsvTable table = read_csv(path);
  const std::string cols[] = {schema.country_code, schema.country_name, schema.region,
                              schema.period_start, schema.value};
  int idx[5];
  for (int i = 0; i < 5; ++i) {
    idx[i] = table.column(cols[i]);
    if (idx[i] < 0) {
      throw std::runtime_error(path + ": missing required column '" + cols[i] + "'");
    }
  }
  std::vector<SeriesPanel::Cell> cells;
  cells.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    SeriesPanel::Cell cell;
    cell.country_code = row[idx[0]];
    cell.country_name = row[idx[1]];
    cell.region = row[idx[2]];
    try {
      cell.period_start = std::stoi(row[idx[3]]);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": row " + std::to_string(r + 2) +
                               ": cannot parse period start '" + row[idx[3]] + "'");
    }
    try {
      std::size_t pos = 0;
      cell.value = std::stod(row[idx[4]], &pos);
      if (pos != row[idx[4]].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": row " + std::to_string(r + 2) + ": cannot parse value '" +
                               row[idx[4]] + "'");
    }
    cells.push_back(std::move(cell));
  }
  return SeriesPanel::from_cells(std::move(cells), limits);
}

void write_panel(const SeriesPanel& panel, const std::string& path, const PanelSchema& schema) {
  CsvTable table;
  table.header = {schema.country_code, schema.country_name, schema.region, schema.period_start,
                  schema.value};
  for (const auto& cell : panel.to_cells()) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", cell.value);
    table.rows.push_back({cell.country_code, cell.country_name, cell.region,
                          std::to_string(cell.period_start), buf});
  }
  write_csv(path, table);
}

std::pair<SeriesPanel, SeriesPanel> holdout_split(const SeriesPanel& panel, const Period& cutoff) {
  int cut = panel.period_index(cutoff);
  if (cut < 0) {
    throw std::runtime_error("cutoff period " + cutoff.label() + " not found in panel");
  }

  std::vector<SeriesPanel::Cell> train_cells;
  for (const auto& c : panel.to_cells()) {
    if (c.period_start <= cutoff.start_year) train_cells.push_back(c);
  }
  SeriesPanel train = SeriesPanel::from_cells(std::move(train_cells), panel.limits());
  for (const auto& code : panel.countries()) {
    if (train.country_index(code) < 0) {
      throw std::runtime_error("country " + code + " has no observations at or before " +
                               cutoff.label() + "; train/test country sets would differ");
    }
  }

  // The test side may legitimately have countries with 0 or 1 observations
  // (or no periods at all), so it bypasses the run-length validation.
  SeriesPanel test;
  test.limits_ = panel.limits();
  test.countries_ = panel.countries_;
  test.names_ = panel.names_;
  test.regions_ = panel.regions_;
  const int C = panel.n_countries();
  const int T = panel.n_periods();
  const int nt = T - cut - 1;
  for (int t = cut + 1; t < T; ++t) test.periods_.push_back(panel.periods()[t]);
  test.values_.setConstant(C, nt, std::numeric_limits<double>::quiet_NaN());
  test.mask_.setZero(C, nt);
  test.first_.assign(C, -1);
  test.last_.assign(C, -1);
  for (int i = 0; i < C; ++i) {
    for (int t = 0; t < nt; ++t) {
      if (panel.observed(i, cut + 1 + t)) {
        test.values_(i, t) = panel.value(i, cut + 1 + t);
        test.mask_(i, t) = 1;
        if (test.first_[i] < 0) test.first_[i] = t;
        test.last_[i] = t;
      }
    }
  }
  return {std::move(train), std::move(test)};
}

}  // namespace shockcast
