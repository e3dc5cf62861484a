#include "shockcast/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "shockcast/dist.hpp"

namespace shockcast {

namespace {

// Split each chain in half; drops the middle draw of odd-length chains.
Eigen::MatrixXd split_chains(const Eigen::MatrixXd& draws) {
  const int n = static_cast<int>(draws.rows());
  const int m = static_cast<int>(draws.cols());
  const int half = n / 2;
  Eigen::MatrixXd out(half, 2 * m);
  for (int c = 0; c < m; ++c) {
    out.col(2 * c) = draws.col(c).head(half);
    out.col(2 * c + 1) = draws.col(c).tail(half);
  }
  return out;
}

// Pooled average ranks -> normal scores, (r - 3/8) / (S + 1/4).
Eigen::MatrixXd rank_normalize(const Eigen::MatrixXd& draws) {
  const int n = static_cast<int>(draws.rows());
  const int m = static_cast<int>(draws.cols());
  const int total = n * m;
  std::vector<int> order(total);
  std::iota(order.begin(), order.end(), 0);
  const double* data = draws.data();  // column-major
  std::sort(order.begin(), order.end(), [&](int a, int b) { return data[a] < data[b]; });

  std::vector<double> rank(total);
  int i = 0;
  while (i < total) {
    int j = i;
    while (j + 1 < total && data[order[j + 1]] == data[order[i]]) ++j;
    double avg = 0.5 * (i + j) + 1.0;  // 1-based average rank of the tie run
    for (int k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  Eigen::MatrixXd z(n, m);
  double denom = total + 0.25;
  for (int idx = 0; idx < total; ++idx) {
    z.data()[idx] = normal_quantile((rank[idx] - 0.375) / denom);
  }
  return z;
}

// Classic potential scale reduction on already-split chains.
std::optional<double> basic_rhat(const Eigen::MatrixXd& draws) {
  const int n = static_cast<int>(draws.rows());
  const int m = static_cast<int>(draws.cols());
  if (n < 2 || m < 2) return std::nullopt;
  Eigen::VectorXd means(m), vars(m);
  for (int c = 0; c < m; ++c) {
    means(c) = draws.col(c).mean();
    vars(c) = (draws.col(c).array() - means(c)).square().sum() / (n - 1);
  }
  double w = vars.mean();
  double grand = means.mean();
  double b_over_n = (means.array() - grand).square().sum() / (m - 1);
  if (!(w > 0.0)) return std::nullopt;
  double var_plus = (n - 1.0) / n * w + b_over_n;
  return std::sqrt(var_plus / w);
}

bool is_constant(const Eigen::MatrixXd& draws) {
  return (draws.array() == draws(0, 0)).all();
}

}  // namespace

std::optional<double> split_rhat(const Eigen::MatrixXd& draws) {
  if (draws.cols() < 2 || draws.rows() < 4) {
    throw std::invalid_argument("split_rhat: need >= 2 chains and >= 4 iterations");
  }
  if (is_constant(draws)) return std::nullopt;

  Eigen::MatrixXd split = split_chains(draws);

  auto bulk = basic_rhat(rank_normalize(split));

  // Folded: absolute deviations from the pooled median catch tail problems.
  Eigen::MatrixXd flat = split;
  std::vector<double> all(flat.data(), flat.data() + flat.size());
  std::nth_element(all.begin(), all.begin() + all.size() / 2, all.end());
  double med = all[all.size() / 2];
  Eigen::MatrixXd folded = (split.array() - med).abs().matrix();
  auto tail = basic_rhat(rank_normalize(folded));

  if (!bulk && !tail) return std::nullopt;
  if (!bulk) return tail;
  if (!tail) return bulk;
  return std::max(*bulk, *tail);
}

std::optional<double> effective_sample_size(const Eigen::MatrixXd& draws) {
  if (draws.cols() < 2 || draws.rows() < 4) {
    throw std::invalid_argument("effective_sample_size: need >= 2 chains and >= 4 iterations");
  }
  if (is_constant(draws)) return std::nullopt;

  Eigen::MatrixXd split = split_chains(draws);
  const int n = static_cast<int>(split.rows());
  const int m = static_cast<int>(split.cols());

  Eigen::VectorXd means(m), vars(m);
  for (int c = 0; c < m; ++c) {
    means(c) = split.col(c).mean();
    vars(c) = (split.col(c).array() - means(c)).square().sum() / (n - 1);
  }
  double w = vars.mean();
  double grand = means.mean();
  double b_over_n = (means.array() - grand).square().sum() / (m - 1);
  double var_plus = (n - 1.0) / n * w + b_over_n;
  if (!(var_plus > 0.0) || !std::isfinite(var_plus)) return std::nullopt;

  // Mean autocovariance across chains at a given lag.
  auto acov = [&](int lag) {
    double s = 0.0;
    for (int c = 0; c < m; ++c) {
      double acc = 0.0;
      for (int t = 0; t < n - lag; ++t) {
        acc += (split(t, c) - means(c)) * (split(t + lag, c) - means(c));
      }
      s += acc / n;
    }
    return s / m;
  };

  // rho_t = 1 - (W - mean acov_t) / var_plus, summed over Geyer pairs
  // (rho_{2k} + rho_{2k+1}) while positive, enforced non-increasing.
  double rho1 = 1.0 - (w - acov(1)) / var_plus;
  double total = 1.0 + rho1;  // pair at lag (0, 1); rho_0 = 1
  double prev = total;
  for (int lag = 2; lag + 1 < n; lag += 2) {
    double rho_even = 1.0 - (w - acov(lag)) / var_plus;
    double rho_odd = 1.0 - (w - acov(lag + 1)) / var_plus;
    double pair = rho_even + rho_odd;
    if (!std::isfinite(pair) || pair <= 0.0) break;
    pair = std::min(pair, prev);
    total += pair;
    prev = pair;
  }
  double tau = 2.0 * total - 1.0;
  tau = std::max(tau, 1.0 / std::log10(static_cast<double>(n * m) + 10.0));
  double ess = static_cast<double>(n) * m / tau;
  if (!std::isfinite(ess) || ess <= 0.0) return std::nullopt;
  return ess;
}

}  // namespace shockcast
