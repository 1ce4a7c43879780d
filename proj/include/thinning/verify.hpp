#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "thinning/distributions.hpp"
#include "thinning/mcmc.hpp"
#include "thinning/rng.hpp"
#include "thinning/thinners.hpp"

namespace thinning {

struct KsResult {
  double d = 0.0;
  double p = 1.0;
};

// One-sample Kolmogorov-Smirnov test of a sorted sample against a CDF.
// p-value from the asymptotic Kolmogorov series (100 terms) with the
// usual small-sample effective lambda; fine for n >= 35.
KsResult ks_one_sample(const std::vector<double>& sorted_sample,
                       const std::function<double(double)>& cdf);

struct CopulaGrid {
  std::array<std::array<long, 10>, 10> bins{};
  long total = 0;
};

struct CopulaResult {
  double pearson_r = 0.0;
  double chi2_stat = 0.0;
  double chi2_p = 1.0;
  CopulaGrid grid;
};

// Independence checks on a sample of PIT pairs: Pearson correlation of the
// raw PITs, and a 10x10 binned chi-square uniformity test on the empirical
// copula (rank-transformed pairs, so the margins are exactly uniform and the
// statistic has 81 degrees of freedom).
CopulaResult copula_independence(const std::vector<double>& pit1,
                                 const std::vector<double>& pit2);

struct FisherCheck {
  double estimate = 0.0;
  double target = 0.0;
  double rel_err = 0.0;
};

// Monte Carlo check of score-variance additivity across folds for the
// Poisson convolution thinner: sum_k Var(fold_k / theta - eps_k) against
// 1/theta.
FisherCheck fisher_additivity_check(const DistributionSpec& poisson_spec,
                                    const ThinningPlan& plan, long B, RngState rng,
                                    int threads = 1);

struct SubCheck {
  std::string name;
  std::string kind;  // "ks", "pearson", "copula_chi2", "reconstruction", "errors"
  double statistic = 0.0;
  double value = 0.0;      // p-value or error magnitude
  double threshold = 0.0;  // pass boundary for `value`
  bool pass = false;
};

// One (thinner, spec, plan) verification target. The spec carries the true
// parameter values; parameters named in spec.unknown are wiped before the
// thinner sees them. `series_length` is the input length for the
// MeanVariance / SampleSplit thinners. The override hooks exist for
// negative-control tests (wrong declared marginal, dependent folds).
struct VerifyCase {
  std::string id;
  DistributionSpec spec;
  ThinningPlan plan;
  McmcConfig mcmc;
  int series_length = 0;
  std::function<std::vector<DistributionSpec>()> marginal_override;
  std::function<FoldSet(const std::vector<double>&, RngState&)> thin_override;
};

struct PairwiseIndependence {
  int fold_i = 0;
  int fold_j = 0;
  double pearson_r = 0.0;
  double chi2_stat = 0.0;
  double copula_chi2_p = 1.0;
};

struct VerificationReport {
  std::string thinner_id;
  DistributionSpec spec;
  ThinningPlan plan;
  long B = 0;
  double recon_max_rel_err = 0.0;
  std::vector<KsResult> per_fold_ks;
  std::vector<PairwiseIndependence> pairwise_independence;
  std::optional<FisherCheck> fisher_check;
  long error_count = 0;
  std::string first_error;
  bool pass = false;
  std::vector<std::string> failures;
  std::vector<SubCheck> subchecks;
};

// Draws B fresh x ~ P_theta, thins each without the unknown parameters, and
// tests reconstruction, per-fold marginals (PIT + KS at level 0.01) and
// pairwise fold independence (|r| < 3/sqrt(B), copula chi-square at 0.01).
VerificationReport run_verification(const VerifyCase& vcase, long B, RngState rng,
                                    int threads = 1);

// The full verification matrix: every thinner at three parameter settings
// spanning small/moderate/large regimes. Mirrored by the JSON fixture in
// tests/fixtures/verification_matrix.json.
std::vector<VerifyCase> default_matrix();

nlohmann::json report_to_json(const VerificationReport& report);
// Flat CSV, one row per sub-check; includes the header when asked.
std::string report_csv_header();
std::string report_to_csv_rows(const VerificationReport& report);

}  // namespace thinning
