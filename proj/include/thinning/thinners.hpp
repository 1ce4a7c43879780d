#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thinning/distributions.hpp"
#include "thinning/mcmc.hpp"
#include "thinning/rng.hpp"

namespace thinning {

enum class ThinMode {
  Convolution,
  SphereProjection,
  WeibullPower,
  GeometricMeanBeta,
  GeometricMeanGamma,
  MaxSupport,
  MinSupport,
  MeanVariance,
  SampleSplit,
  Transform,
};

const char* thin_mode_name(ThinMode m);
ThinMode thin_mode_from_name(const std::string& name);

enum class TransformKind { SquareAboutMu, PowerNu, LogOverNu };

struct Transform {
  TransformKind kind = TransformKind::SquareAboutMu;
  double param = 0.0;  // mu for SquareAboutMu, nu otherwise
};

// Exact fraction for allocation weights; lets integer constraints such as
// eps_k * r be checked without floating rounding.
struct Fraction {
  long long num = 0;
  long long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct ThinningPlan {
  int K = 1;
  ThinMode mode = ThinMode::Convolution;
  // Convolution-style allocation weights, summing to 1. When the exact
  // fractions are supplied they take precedence for integrality checks.
  std::vector<double> weights;
  std::vector<Fraction> weight_fractions;
  // Sample splitting / record allocation.
  std::vector<int> fold_sizes;
  // Hyperparameter of the WeibullPower thinner.
  double nu = 0.0;

  // Equal weights helper.
  static ThinningPlan convolution(std::vector<double> eps);
  static ThinningPlan equal_convolution(int K);

  const std::vector<double>& effective_weights() const;
  void validate() const;
};

enum class RecombinerId {
  Sum,
  SumOfSquares,
  SumOfPowers,
  GeometricMean,
  Max,
  Min,
  MeanAndVariance,
  ConcatSort,
  ExpOfSum,
};

const char* recombiner_name(RecombinerId id);
RecombinerId recombiner_from_name(const std::string& name);

struct Recombiner {
  RecombinerId id = RecombinerId::Sum;
  // SumOfPowers: the exponent. ExpOfSum: the leading scale, nu * exp(sum).
  double nu = 0.0;
};

// The K thinned values plus everything needed to check and recompose them.
// For indirect thinners, indirect_stat holds the sufficient statistic S(X)
// that was actually thinned. fold_specs describe each fold's marginal law
// Q_theta^(k) with the unknown parameter left as a placeholder (it is listed
// in `unknown` and its stored value is NaN).
struct FoldSet {
  std::vector<std::vector<double>> folds;
  Recombiner recombiner;
  std::vector<double> t_value;
  std::optional<std::vector<double>> indirect_stat;
  std::vector<DistributionSpec> fold_specs;
  bool degenerate = false;
};

// Deterministic evaluation of the recombiner T on the folds.
std::vector<double> recombine(const FoldSet& fs);

// Quantity the recombiner must reproduce: t_value (== x for direct thinners,
// S(x) for indirect ones). Returns the max relative error of
// recombine(folds) against it.
double reconstruction_error(const FoldSet& fs);

// --- thinning operations ---------------------------------------------------
// Every thinner samples (X^(1..K)) | X without reading parameters declared
// unknown in the spec; pass spec.thinning_view() to wipe them outright.

FoldSet thin_convolution(const std::vector<double>& x, const DistributionSpec& spec,
                         const ThinningPlan& plan, RngState& rng);
FoldSet thin_sphere(double x, const DistributionSpec& spec, const ThinningPlan& plan,
                    RngState& rng);
FoldSet thin_weibull(double x, const DistributionSpec& spec, const ThinningPlan& plan,
                     RngState& rng);
FoldSet thin_beta(double x, const DistributionSpec& spec, const ThinningPlan& plan,
                  const McmcConfig& mcmc, RngState& rng);
FoldSet thin_gamma_shape(double x, const DistributionSpec& spec,
                         const ThinningPlan& plan, const McmcConfig& mcmc,
                         RngState& rng);
FoldSet thin_max(double x, const DistributionSpec& spec, const ThinningPlan& plan,
                 RngState& rng);
FoldSet thin_min(double x, const DistributionSpec& spec, const ThinningPlan& plan,
                 RngState& rng);
FoldSet thin_mean_variance(const std::vector<double>& x, const ThinningPlan& plan,
                           RngState& rng);
FoldSet thin_split(const std::vector<double>& x, const ThinningPlan& plan,
                   RngState& rng);
FoldSet thin_transformed(double x, const Transform& transform,
                         const ThinningPlan& inner_plan, RngState& rng);

// Routes to the thinner selected by plan.mode; builds Transform parameters
// from the spec's known parameters when mode == Transform.
FoldSet thin_dispatch(const std::vector<double>& x, const DistributionSpec& spec,
                      const ThinningPlan& plan, const McmcConfig& mcmc, RngState& rng);

// Supplement-style (U, V) decomposition of x under the N_n(theta, I_n)
// model: W ~ N_n(0, gamma I), U = x + W, V = x - W / gamma. With a shared
// rng this matches thin_convolution on Normal with eps = (1/(1+gamma),
// gamma/(1+gamma)) through the documented mapping W = gamma Z_1 - Z_2.
std::pair<std::vector<double>, std::vector<double>> gaussian_uv_decompose(
    const std::vector<double>& x, double gamma, RngState& rng);

// Concrete fold marginals Q_theta^(k) at the true parameter values carried
// by `truth`; the verification side of the contract.
std::vector<DistributionSpec> fold_marginals(const DistributionSpec& truth,
                                             const ThinningPlan& plan);

// Registry guard. Throws UnsupportedFamily for families with documented
// negative results (Bernoulli, Categorical; Cauchy by addition) and for
// family/mode pairs no thinner supports.
void require_thinnable(const DistributionSpec& spec, ThinMode mode);
ThinMode default_mode_for(Family f);

const char* transform_kind_name(TransformKind k);

}  // namespace thinning
