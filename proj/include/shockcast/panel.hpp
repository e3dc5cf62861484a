#pragma once

#include <Eigen/Core>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace shockcast {

// A 5-year calendar period, e.g. {2015, 2020} with label "2015-2020".
struct Period {
  int start_year = 0;
  int end_year = 0;

  auto operator<=>(const Period&) const = default;
  int width() const { return end_year - start_year; }
  std::string label() const;
  static Period parse(const std::string& label);
  Period next() const { return {end_year, end_year + width()}; }
};

struct PanelSchema {
  std::string country_code = "country_code";
  std::string country_name = "country_name";
  std::string region = "region";
  std::string period_start = "period_start";
  std::string value = "e0";
};

struct PanelLimits {
  double value_low = 15.0;
  double value_high = 110.0;
};

// Rectangular country x period panel of observed indicator levels.
// Missingness is restricted to leading/trailing runs per country.
class SeriesPanel {
 public:
  struct Cell {
    std::string country_code;
    std::string country_name;
    std::string region;
    int period_start = 0;
    double value = 0.0;
  };

  // Validates invariants; throws std::runtime_error naming the offender.
  static SeriesPanel from_cells(std::vector<Cell> cells, PanelLimits limits = {});

  int n_countries() const { return static_cast<int>(countries_.size()); }
  int n_periods() const { return static_cast<int>(periods_.size()); }
  const std::vector<std::string>& countries() const { return countries_; }
  const std::vector<Period>& periods() const { return periods_; }
  const std::string& region(int ci) const { return regions_[ci]; }
  const std::string& country_name(int ci) const { return names_[ci]; }
  const std::string& country(int ci) const { return countries_[ci]; }

  int country_index(const std::string& code) const;  // -1 if absent
  int period_index(const Period& p) const;           // -1 if absent

  bool observed(int ci, int ti) const { return mask_(ci, ti) != 0; }
  double value(int ci, int ti) const { return values_(ci, ti); }
  const Eigen::MatrixXd& values() const { return values_; }

  int first_observed(int ci) const { return first_[ci]; }
  int last_observed(int ci) const { return last_[ci]; }
  int n_observed_cells() const;
  double max_observed() const;

  PanelLimits limits() const { return limits_; }

  std::vector<Cell> to_cells() const;

 private:
  SeriesPanel() = default;
  friend std::pair<SeriesPanel, SeriesPanel> holdout_split(const SeriesPanel&, const Period&);
  std::vector<std::string> countries_;  // codes, sorted
  std::vector<std::string> names_;
  std::vector<std::string> regions_;
  std::vector<Period> periods_;  // strictly increasing, contiguous
  Eigen::MatrixXd values_;       // countries x periods, NaN where missing
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> mask_;
  std::vector<int> first_, last_;
  PanelLimits limits_;
};

SeriesPanel load_panel(const std::string& path, const PanelSchema& schema = {},
                       PanelLimits limits = {});
void write_panel(const SeriesPanel& panel, const std::string& path,
                 const PanelSchema& schema = {});

// Train keeps periods <= cutoff, test the rest; country/region sets identical.
std::pair<SeriesPanel, SeriesPanel> holdout_split(const SeriesPanel& panel, const Period& cutoff);

}  // namespace shockcast
