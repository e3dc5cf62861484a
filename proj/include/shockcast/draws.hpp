#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "shockcast/sampler.hpp"

namespace shockcast {

class ShockModel;

// Post-warmup draws in the interpretable (constrained) parameterization,
// chain-major rows, one named column per parameter plus lp__.
class NamedDraws {
 public:
  NamedDraws() = default;
  NamedDraws(std::vector<std::string> names, Eigen::MatrixXd values, int n_chains,
             Eigen::VectorXd lp);

  int n_chains() const { return n_chains_; }
  int n_iterations() const { return n_chains_ > 0 ? static_cast<int>(values_.rows()) / n_chains_ : 0; }
  int n_parameters() const { return static_cast<int>(names_.size()); }
  int total_draws() const { return static_cast<int>(values_.rows()); }

  const std::vector<std::string>& names() const { return names_; }
  const Eigen::MatrixXd& values() const { return values_; }
  const Eigen::VectorXd& lp() const { return lp_; }

  int index(const std::string& name) const;  // -1 when absent
  bool has(const std::string& name) const { return index(name) >= 0; }
  Eigen::VectorXd column(const std::string& name) const;
  // One parameter reshaped to iterations x chains (for diagnostics).
  Eigen::MatrixXd parameter_matrix(const std::string& name) const;
  Eigen::MatrixXd parameter_matrix(int col) const;

 private:
  std::vector<std::string> names_;
  Eigen::MatrixXd values_;  // (n_chains * n_iterations) x n_parameters
  Eigen::VectorXd lp_;
  int n_chains_ = 0;
  std::unordered_map<std::string, int> by_name_;
};

// Constrains every stored draw of a sampler run.
NamedDraws constrain_draws(const ShockModel& model, const PosteriorDraws& draws);

void write_draws_csv(const std::string& path, const NamedDraws& draws);
NamedDraws read_draws_csv(const std::string& path);

// Quantile with linear interpolation (type 7). q in [0, 1].
double quantile(Eigen::VectorXd values, double q);
double quantile(std::vector<double> values, double q);
double median(const Eigen::VectorXd& values);

}  // namespace shockcast
