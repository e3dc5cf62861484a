#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "shockcast/log_density.hpp"

namespace shockcast {

struct SamplerConfig {
  int n_chains = 4;
  int n_warmup = 500;
  int n_sampling = 1000;
  double target_accept = 0.8;
  int max_tree_depth = 10;
  double divergence_threshold = 1000.0;  // Hamiltonian error flagged as divergent
  std::uint64_t seed = 1;
  double init_radius = 2.0;  // inits uniform on [-r, r] per coordinate
  double rhat_threshold = 1.05;
  bool nuts = true;          // false: fixed-length HMC (debug fallback)
  int leapfrog_steps = 32;   // used by the fixed-length fallback
  int threads = 0;           // 0: SHOCKCAST_THREADS or hardware
};

struct IterationStats {
  bool divergent = false;
  int tree_depth = 0;
  int n_leapfrog = 0;
  double energy = 0.0;
  double accept_stat = 0.0;
  double step_size = 0.0;
};

struct ChainResult {
  Eigen::MatrixXd draws;  // n_sampling x dim
  Eigen::VectorXd lp;     // n_sampling
  std::vector<IterationStats> stats;
  double step_size = 0.0;       // post-warmup
  Eigen::VectorXd inv_mass;     // diagonal inverse metric
  int divergent_warmup = 0;
};

class PosteriorDraws {
 public:
  std::vector<ChainResult> chains;

  int n_chains() const { return static_cast<int>(chains.size()); }
  int n_iterations() const { return chains.empty() ? 0 : static_cast<int>(chains[0].draws.rows()); }
  int dim() const { return chains.empty() ? 0 : static_cast<int>(chains[0].draws.cols()); }
  int total_draws() const { return n_chains() * n_iterations(); }

  // Draws of one coordinate as an iterations x chains matrix.
  Eigen::MatrixXd parameter_matrix(int param) const;
  // Fraction of post-warmup iterations flagged divergent.
  double divergence_rate() const;
};

// Runs n_chains independent NUTS chains (in parallel when threads permit)
// with dual-averaging step-size and diagonal metric adaptation during
// warmup. Deterministic for a given seed regardless of thread count.
PosteriorDraws run_chains(const LogDensity& model, const SamplerConfig& config,
                          const std::vector<Eigen::VectorXd>& inits = {});

// Parallelism cap honoring SHOCKCAST_THREADS.
int resolve_threads(int requested);

}  // namespace shockcast
