#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "thinning/rng.hpp"

namespace thinning {

enum class ProposalKind { UniformBox, GaussianRandomWalk };

struct McmcConfig {
  int burn_in = 1000;
  int thin_every = 50;
  ProposalKind proposal = ProposalKind::GaussianRandomWalk;
  // UniformBox: coordinatewise bounds. GaussianRandomWalk: per-coordinate
  // step standard deviations.
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> scale;
  bool adapt = false;
  double target_acceptance = 0.3;

  void validate(std::size_t dims) const;
};

struct ChainDiagnostics {
  double acceptance_rate = 0.0;  // accepted / proposed, whole run
  long n_proposed = 0;
  long n_accepted = 0;
  double post_burn_in_acceptance = 0.0;
  std::vector<double> final_scale;
};

using LogTarget = std::function<double(const std::vector<double>&)>;

// One retained state after burn_in + thin_every Metropolis steps. Proposals
// are symmetric, so the acceptance probability is min(1, exp(delta));
// off-support proposals (log target = -inf) are always rejected. Adaptation,
// when enabled, rescales the random-walk steps toward target_acceptance
// during burn-in only, so the retained chain runs a fixed kernel.
std::pair<std::vector<double>, ChainDiagnostics> metropolis_sample(
    const LogTarget& log_target, std::vector<double> init, const McmcConfig& cfg,
    RngState& rng);

// Multiplicative Robbins-Monro style update used during burn-in; exposed so
// the rule itself is testable. Strictly increases scales when the observed
// acceptance exceeds the target, strictly decreases them otherwise.
std::vector<double> adapt_scale(const std::vector<double>& scale,
                                double batch_acceptance, double target,
                                double learning_rate);

}  // namespace thinning
