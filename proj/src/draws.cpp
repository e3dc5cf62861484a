#include "shockcast/draws.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "shockcast/csv.hpp"
#include "shockcast/model.hpp"

namespace shockcast {

NamedDraws::NamedDraws(std::vector<std::string> names, Eigen::MatrixXd values, int n_chains,
                       Eigen::VectorXd lp)
    : names_(std::move(names)), values_(std::move(values)), lp_(std::move(lp)), n_chains_(n_chains) {
  if (values_.cols() != static_cast<Eigen::Index>(names_.size())) {
    throw std::invalid_argument("NamedDraws: name/column count mismatch");
  }
  if (n_chains_ < 1 || values_.rows() % n_chains_ != 0) {
    throw std::invalid_argument("NamedDraws: rows must split evenly across chains");
  }
  if (lp_.size() != values_.rows()) {
    throw std::invalid_argument("NamedDraws: lp length mismatch");
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    by_name_.emplace(names_[i], static_cast<int>(i));
  }
}

int NamedDraws::index(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

Eigen::VectorXd NamedDraws::column(const std::string& name) const {
  int idx = index(name);
  if (idx < 0) throw std::invalid_argument("draws do not contain parameter '" + name + "'");
  return values_.col(idx);
}

Eigen::MatrixXd NamedDraws::parameter_matrix(int col) const {
  const int iters = n_iterations();
  Eigen::MatrixXd out(iters, n_chains_);
  for (int c = 0; c < n_chains_; ++c) {
    out.col(c) = values_.col(col).segment(static_cast<Eigen::Index>(c) * iters, iters);
  }
  return out;
}

Eigen::MatrixXd NamedDraws::parameter_matrix(const std::string& name) const {
  int idx = index(name);
  if (idx < 0) throw std::invalid_argument("draws do not contain parameter '" + name + "'");
  return parameter_matrix(idx);
}

NamedDraws constrain_draws(const ShockModel& model, const PosteriorDraws& draws) {
  const int iters = draws.n_iterations();
  const int chains = draws.n_chains();
  Eigen::MatrixXd values(static_cast<Eigen::Index>(chains) * iters, model.dim());
  Eigen::VectorXd lp(static_cast<Eigen::Index>(chains) * iters);
  for (int c = 0; c < chains; ++c) {
    for (int it = 0; it < iters; ++it) {
      values.row(static_cast<Eigen::Index>(c) * iters + it) =
          model.constrain(draws.chains[c].draws.row(it).transpose()).transpose();
      lp(static_cast<Eigen::Index>(c) * iters + it) = draws.chains[c].lp(it);
    }
  }
  return NamedDraws(model.constrained_names(), std::move(values), chains, std::move(lp));
}

void write_draws_csv(const std::string& path, const NamedDraws& draws) {
  CsvTable table;
  table.header = {"chain", "iteration", "lp__"};
  for (const auto& n : draws.names()) table.header.push_back(n);
  const int iters = draws.n_iterations();
  char buf[40];
  table.rows.reserve(static_cast<std::size_t>(draws.total_draws()));
  for (int row = 0; row < draws.total_draws(); ++row) {
    std::vector<std::string> fields;
    fields.reserve(table.header.size());
    fields.push_back(std::to_string(row / iters + 1));
    fields.push_back(std::to_string(row % iters + 1));
    std::snprintf(buf, sizeof(buf), "%.9g", draws.lp()(row));
    fields.push_back(buf);
    for (int c = 0; c < draws.n_parameters(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.9g", draws.values()(row, c));
      fields.push_back(buf);
    }
    table.rows.push_back(std::move(fields));
  }
  write_csv(path, table);
}

NamedDraws read_draws_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  if (table.header.size() < 4 || table.header[0] != "chain" || table.header[1] != "iteration" ||
      table.header[2] != "lp__") {
    throw std::runtime_error(path + ": not a draws CSV (expected chain,iteration,lp__,...)");
  }
  const int n_params = static_cast<int>(table.header.size()) - 3;
  const int rows = static_cast<int>(table.rows.size());
  std::vector<std::string> names(table.header.begin() + 3, table.header.end());
  Eigen::MatrixXd values(rows, n_params);
  Eigen::VectorXd lp(rows);
  int n_chains = 0;
  for (int r = 0; r < rows; ++r) {
    const auto& row = table.rows[static_cast<std::size_t>(r)];
    n_chains = std::max(n_chains, std::stoi(row[0]));
    lp(r) = std::stod(row[2]);
    for (int c = 0; c < n_params; ++c) {
      values(r, c) = std::stod(row[static_cast<std::size_t>(c) + 3]);
    }
  }
  return NamedDraws(std::move(names), std::move(values), std::max(1, n_chains), std::move(lp));
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty set");
  q = std::clamp(q, 0.0, 1.0);
  std::sort(values.begin(), values.end());
  double h = q * (static_cast<double>(values.size()) - 1.0);
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  double frac = h - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

double quantile(Eigen::VectorXd values, double q) {
  std::vector<double> v(values.data(), values.data() + values.size());
  return quantile(std::move(v), q);
}

double median(const Eigen::VectorXd& values) { return quantile(values, 0.5); }

}  // namespace shockcast
