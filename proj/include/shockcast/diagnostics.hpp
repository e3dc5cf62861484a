#pragma once

#include <Eigen/Core>
#include <optional>

namespace shockcast {

// Rank-normalized split R-hat (Vehtari et al. 2021): chains are split in
// half, pooled draws rank-normalized, and the classic potential scale
// reduction computed on both the normalized and the folded draws; the
// larger of the two is returned. draws is iterations x chains.
// Returns nullopt when the statistic is undefined (constant draws).
std::optional<double> split_rhat(const Eigen::MatrixXd& draws);

// Multi-chain effective sample size with Geyer's initial monotone sequence
// truncation, on split chains. Returns nullopt for degenerate inputs.
std::optional<double> effective_sample_size(const Eigen::MatrixXd& draws);

}  // namespace shockcast
