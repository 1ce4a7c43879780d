#include "thinning/mcmc.hpp"

#include <cmath>
#include <limits>

#include "thinning/errors.hpp"

namespace thinning {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kAdaptBatch = 50;
}  // namespace

void McmcConfig::validate(std::size_t dims) const {
  if (burn_in < 0) fail(errc::invalid_parameter, "mcmc: burn_in must be >= 0", "burn_in");
  if (thin_every < 1)
    fail(errc::invalid_parameter, "mcmc: thin_every must be >= 1", "thin_every");
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0))
    fail(errc::invalid_parameter, "mcmc: target_acceptance must be in (0, 1)",
         "target_acceptance");
  if (proposal == ProposalKind::UniformBox) {
    if (lower.size() != dims || upper.size() != dims)
      fail(errc::invalid_parameter, "mcmc: box bounds must match the dimension",
           "lower");
    for (std::size_t i = 0; i < dims; ++i)
      if (!(lower[i] < upper[i]))
        fail(errc::invalid_parameter, "mcmc: box requires lower < upper", "upper");
  } else {
    if (scale.size() != dims)
      fail(errc::invalid_parameter, "mcmc: scale must match the dimension", "scale");
    for (double s : scale)
      if (!(s > 0.0))
        fail(errc::invalid_parameter, "mcmc: scale must be positive", "scale");
  }
}

std::vector<double> adapt_scale(const std::vector<double>& scale,
                                double batch_acceptance, double target,
                                double learning_rate) {
  std::vector<double> out(scale.size());
  const double factor = std::exp(learning_rate * (batch_acceptance - target));
  for (std::size_t i = 0; i < scale.size(); ++i) out[i] = scale[i] * factor;
  return out;
}

std::pair<std::vector<double>, ChainDiagnostics> metropolis_sample(
    const LogTarget& log_target, std::vector<double> init, const McmcConfig& cfg,
    RngState& rng) {
  const std::size_t dims = init.size();
  cfg.validate(dims);

  double current_lp = log_target(init);
  if (!std::isfinite(current_lp))
    fail(errc::bad_init, "metropolis_sample: log target not finite at init");

  std::vector<double> state = std::move(init);
  std::vector<double> proposal(dims);
  std::vector<double> scale = cfg.scale;

  ChainDiagnostics diag;
  long post_burn_in_accepted = 0;
  long post_burn_in_proposed = 0;
  int batch_accepted = 0;
  int batch_proposed = 0;

  const int total_steps = cfg.burn_in + cfg.thin_every;
  for (int step = 0; step < total_steps; ++step) {
    if (cfg.proposal == ProposalKind::UniformBox) {
      for (std::size_t i = 0; i < dims; ++i)
        proposal[i] = rng.uniform(cfg.lower[i], cfg.upper[i]);
    } else {
      for (std::size_t i = 0; i < dims; ++i)
        proposal[i] = state[i] + scale[i] * rng.normal();
    }
    const double proposal_lp = log_target(proposal);
    if (std::isnan(proposal_lp) || proposal_lp == std::numeric_limits<double>::infinity())
      fail(errc::non_finite_target,
           "metropolis_sample: log target returned NaN/+inf during the run");

    ++diag.n_proposed;
    ++batch_proposed;
    const bool in_burn_in = step < cfg.burn_in;
    if (!in_burn_in) ++post_burn_in_proposed;

    bool accepted = false;
    if (proposal_lp > kNegInf) {
      const double delta = proposal_lp - current_lp;
      if (delta >= 0.0 || std::log(rng.uniform01()) < delta) accepted = true;
    }
    if (accepted) {
      state = proposal;
      current_lp = proposal_lp;
      ++diag.n_accepted;
      ++batch_accepted;
      if (!in_burn_in) ++post_burn_in_accepted;
    }

    if (cfg.adapt && in_burn_in && cfg.proposal == ProposalKind::GaussianRandomWalk &&
        batch_proposed == kAdaptBatch) {
      const double rate = static_cast<double>(batch_accepted) / batch_proposed;
      scale = adapt_scale(scale, rate, cfg.target_acceptance, 0.5);
      batch_accepted = 0;
      batch_proposed = 0;
    }
  }

  diag.acceptance_rate =
      diag.n_proposed > 0 ? static_cast<double>(diag.n_accepted) / diag.n_proposed : 0.0;
  diag.post_burn_in_acceptance =
      post_burn_in_proposed > 0
          ? static_cast<double>(post_burn_in_accepted) / post_burn_in_proposed
          : 0.0;
  diag.final_scale = scale;
  return {state, diag};
}

}  // namespace thinning
