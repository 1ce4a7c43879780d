#include "thinning/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "thinning/errors.hpp"
#include "thinning/serialization.hpp"
#include "thinning/special.hpp"

namespace thinning {

namespace {
constexpr double kKsLevel = 0.01;
constexpr double kCopulaLevel = 0.01;
}  // namespace

KsResult ks_one_sample(const std::vector<double>& sorted_sample,
                       const std::function<double(double)>& cdf) {
  const std::size_t n = sorted_sample.size();
  if (n == 0) fail(errc::invalid_parameter, "ks_one_sample: empty sample");
  for (std::size_t i = 1; i < n; ++i)
    if (sorted_sample[i - 1] > sorted_sample[i])
      fail(errc::unsorted_input, "ks_one_sample: sample must be sorted");

  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(sorted_sample[i]);
    const double lo = static_cast<double>(i) / static_cast<double>(n);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
    d = std::max(d, std::max(f - lo, hi - f));
  }
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
  return {d, kolmogorov_sf(lambda)};
}

CopulaResult copula_independence(const std::vector<double>& pit1,
                                 const std::vector<double>& pit2) {
  const std::size_t n = pit1.size();
  if (n != pit2.size() || n < 2)
    fail(errc::invalid_parameter, "copula_independence: need paired samples");
  for (std::size_t i = 0; i < n; ++i)
    if (pit1[i] < 0.0 || pit1[i] > 1.0 || pit2[i] < 0.0 || pit2[i] > 1.0)
      fail(errc::invalid_parameter, "copula_independence: PITs must lie in [0,1]");

  const auto degenerate = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
  };
  if (degenerate(pit1) || degenerate(pit2))
    fail(errc::degenerate_pits, "copula_independence: PITs are all equal");

  CopulaResult out;

  // Pearson correlation of the raw PITs.
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m1 += pit1[i];
    m2 += pit2[i];
  }
  m1 /= static_cast<double>(n);
  m2 /= static_cast<double>(n);
  double s11 = 0.0, s22 = 0.0, s12 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = pit1[i] - m1;
    const double b = pit2[i] - m2;
    s11 += a * a;
    s22 += b * b;
    s12 += a * b;
  }
  out.pearson_r = s12 / std::sqrt(s11 * s22);

  // Empirical copula: bin the rank pairs. Ranks make both margins exactly
  // uniform, so only the 9x9 interactions are free (df = 81) and each of
  // the 100 cells expects n/100 under independence.
  std::vector<std::size_t> order1(n), order2(n);
  std::iota(order1.begin(), order1.end(), 0);
  std::iota(order2.begin(), order2.end(), 0);
  std::sort(order1.begin(), order1.end(),
            [&](std::size_t a, std::size_t b) { return pit1[a] < pit1[b]; });
  std::sort(order2.begin(), order2.end(),
            [&](std::size_t a, std::size_t b) { return pit2[a] < pit2[b]; });
  std::vector<int> cell1(n), cell2(n);
  for (std::size_t r = 0; r < n; ++r) {
    cell1[order1[r]] = static_cast<int>((10 * r) / n);
    cell2[order2[r]] = static_cast<int>((10 * r) / n);
  }
  for (std::size_t i = 0; i < n; ++i) ++out.grid.bins[static_cast<std::size_t>(cell1[i])][static_cast<std::size_t>(cell2[i])];
  out.grid.total = static_cast<long>(n);

  const double expected = static_cast<double>(n) / 100.0;
  double stat = 0.0;
  for (const auto& row : out.grid.bins)
    for (long c : row) {
      const double diff = static_cast<double>(c) - expected;
      stat += diff * diff / expected;
    }
  out.chi2_stat = stat;
  out.chi2_p = chi_squared_sf(stat, 81.0);
  return out;
}

// ---------------------------------------------------------------------------
// Verification runs.

namespace {

// Input draw for one replicate: a single draw for parametric thinners, a
// series of iid draws for the indirect sample-based thinners.
std::vector<double> draw_case_input(const VerifyCase& vc, RngState& rng) {
  if (vc.plan.mode == ThinMode::MeanVariance || vc.plan.mode == ThinMode::SampleSplit) {
    const int n = vc.series_length;
    std::vector<double> x;
    x.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x.push_back(sample(vc.spec, rng)[0]);
    return x;
  }
  return sample(vc.spec, rng);
}

// Scalar law of the fold summary used for PIT checks. Vector-valued folds
// are summarized by coordinate 0, whose marginal is scalar.
std::vector<DistributionSpec> pit_marginals(const VerifyCase& vc) {
  if (vc.marginal_override) return vc.marginal_override();
  auto specs = fold_marginals(vc.spec, vc.plan);
  for (auto& s : specs) {
    if (s.family == Family::MultivariateNormalIso) {
      s = make_spec(Family::Normal,
                    {{"mu", s.param("mu")}, {"sigma2", s.param("sigma2")}});
    } else if (s.family == Family::Multinomial) {
      s = make_spec(Family::Binomial, {{"r", s.param("r")}, {"p", s.param("p1")}});
    }
  }
  return specs;
}

double randomized_pit(const DistributionSpec& marginal, double value, RngState& pit_rng) {
  if (is_discrete(marginal.family)) {
    // Distributional transform: uniform between F(x-) and F(x). Exactly
    // uniform under the declared law, and independent across folds given
    // an independent randomizer.
    const double below = value - 0.5;  // integer lattice
    const double lo = cdf(marginal, below);
    const double mass = std::exp(log_density(marginal, value));
    return std::min(1.0, lo + pit_rng.uniform01() * mass);
  }
  return cdf(marginal, value);
}

struct ReplicateOutcome {
  double recon_err = 0.0;
  bool failed = false;
};

}  // namespace

VerificationReport run_verification(const VerifyCase& vcase, long B, RngState rng,
                                    int threads) {
  if (B < 1) fail(errc::invalid_parameter, "run_verification: B must be >= 1", "B");
  const int K = vcase.plan.K;

  VerificationReport report;
  report.thinner_id = vcase.id.empty() ? thin_mode_name(vcase.plan.mode) : vcase.id;
  report.spec = vcase.spec;
  report.plan = vcase.plan;
  report.B = B;

  const auto marginals = pit_marginals(vcase);
  if (static_cast<int>(marginals.size()) != K)
    fail(errc::size_mismatch, "run_verification: marginal count != K");

  std::vector<std::vector<double>> pits(
      static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(B)));
  std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(B));
  std::vector<std::string> errors(static_cast<std::size_t>(threads > 0 ? threads : 1));
  std::atomic<long> error_count{0};

  const DistributionSpec thin_spec = vcase.spec.thinning_view();
  const int lanes = std::max(1, threads);
  std::vector<std::thread> pool;
  const auto worker = [&](int lane) {
    for (long b = lane; b < B; b += lanes) {
      RngState draw_rng = rng.split(static_cast<std::uint64_t>(2 * b));
      RngState pit_rng = rng.split(static_cast<std::uint64_t>(2 * b + 1));
      try {
        const auto x = draw_case_input(vcase, draw_rng);
        const FoldSet fs = vcase.thin_override
                               ? vcase.thin_override(x, draw_rng)
                               : thin_dispatch(x, thin_spec, vcase.plan, vcase.mcmc,
                                               draw_rng);
        outcomes[static_cast<std::size_t>(b)].recon_err = reconstruction_error(fs);
        for (int k = 0; k < K; ++k) {
          const double summary = fs.folds[static_cast<std::size_t>(k)][0];
          pits[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)] =
              randomized_pit(marginals[static_cast<std::size_t>(k)], summary, pit_rng);
        }
      } catch (const Error& e) {
        outcomes[static_cast<std::size_t>(b)].failed = true;
        ++error_count;
        if (errors[static_cast<std::size_t>(lane)].empty())
          errors[static_cast<std::size_t>(lane)] =
              std::string(e.code()) + ": " + e.what();
      }
    }
  };
  if (lanes == 1) {
    worker(0);
  } else {
    pool.reserve(static_cast<std::size_t>(lanes));
    for (int lane = 0; lane < lanes; ++lane) pool.emplace_back(worker, lane);
    for (auto& t : pool) t.join();
  }

  report.error_count = error_count.load();
  for (const auto& e : errors)
    if (!e.empty()) {
      report.first_error = e;
      break;
    }

  // Reconstruction.
  double recon = 0.0;
  for (const auto& o : outcomes)
    if (!o.failed) recon = std::max(recon, o.recon_err);
  report.recon_max_rel_err = recon;
  const double recon_tol = is_discrete(vcase.spec.family) &&
                                   vcase.plan.mode == ThinMode::Convolution
                               ? 0.0
                               : 1e-9;

  // Compact the PITs if any replicate failed.
  std::vector<std::vector<double>> clean_pits(static_cast<std::size_t>(K));
  if (report.error_count == 0) {
    clean_pits = pits;
  } else {
    for (long b = 0; b < B; ++b) {
      if (outcomes[static_cast<std::size_t>(b)].failed) continue;
      for (int k = 0; k < K; ++k)
        clean_pits[static_cast<std::size_t>(k)].push_back(
            pits[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)]);
    }
  }
  const long clean_B = static_cast<long>(clean_pits[0].size());

  const auto add_check = [&](const std::string& name, const std::string& kind,
                             double stat, double value, double threshold,
                             bool pass) {
    report.subchecks.push_back({name, kind, stat, value, threshold, pass});
    if (!pass) report.failures.push_back(name);
  };

  add_check("reconstruction", "reconstruction", recon, recon, recon_tol,
            recon <= recon_tol);
  add_check("replicate_errors", "errors", static_cast<double>(report.error_count),
            static_cast<double>(report.error_count), 0.0, report.error_count == 0);

  // Per-fold KS against the declared marginal (via PIT, so the reference is
  // the uniform CDF).
  const auto identity = [](double u) { return u; };
  for (int k = 0; k < K; ++k) {
    auto sorted = clean_pits[static_cast<std::size_t>(k)];
    std::sort(sorted.begin(), sorted.end());
    const KsResult ks = ks_one_sample(sorted, identity);
    report.per_fold_ks.push_back(ks);
    add_check("fold" + std::to_string(k + 1) + "_ks", "ks", ks.d, ks.p, kKsLevel,
              ks.p > kKsLevel);
  }

  // Pairwise independence on the first and last adjacent pairs (all pairs
  // collapse to (1,2) when K = 2; none exist for the identity plan).
  std::vector<std::pair<int, int>> pairs;
  if (K >= 2) pairs.push_back({0, 1});
  if (K > 2) pairs.push_back({0, K - 1});
  const double r_band = 3.0 / std::sqrt(static_cast<double>(std::max<long>(clean_B, 1)));
  for (auto [i, j] : pairs) {
    const CopulaResult cop = copula_independence(clean_pits[static_cast<std::size_t>(i)],
                                                 clean_pits[static_cast<std::size_t>(j)]);
    report.pairwise_independence.push_back(
        {i, j, cop.pearson_r, cop.chi2_stat, cop.chi2_p});
    const std::string tag =
        "pair" + std::to_string(i + 1) + std::to_string(j + 1);
    add_check(tag + "_pearson", "pearson", cop.pearson_r, std::fabs(cop.pearson_r),
              r_band, std::fabs(cop.pearson_r) < r_band);
    add_check(tag + "_copula", "copula_chi2", cop.chi2_stat, cop.chi2_p,
              kCopulaLevel, cop.chi2_p > kCopulaLevel);
  }

  report.pass = report.failures.empty();
  return report;
}

FisherCheck fisher_additivity_check(const DistributionSpec& poisson_spec,
                                    const ThinningPlan& plan, long B, RngState rng,
                                    int threads) {
  if (poisson_spec.family != Family::Poisson)
    fail(errc::unsupported_family,
         "fisher_additivity_check: only the Poisson score is implemented",
         "family");
  const double theta = poisson_spec.param("rate");
  const int K = plan.K;
  std::vector<double> eps = plan.weights;
  if (eps.empty()) eps.assign(static_cast<std::size_t>(K), 1.0 / K);

  const DistributionSpec thin_spec = poisson_spec.thinning_view();
  const int lanes = std::max(1, threads);
  // Per-lane accumulators, merged deterministically by lane index.
  std::vector<std::vector<double>> sum(static_cast<std::size_t>(lanes),
                                       std::vector<double>(static_cast<std::size_t>(K), 0.0));
  std::vector<std::vector<double>> sumsq = sum;

  const auto worker = [&](int lane) {
    for (long b = lane; b < B; b += lanes) {
      RngState r = rng.split(static_cast<std::uint64_t>(b));
      const auto x = sample(poisson_spec, r);
      const FoldSet fs = thin_convolution(x, thin_spec, plan, r);
      for (int k = 0; k < K; ++k) {
        // Score of fold k at theta: x_k / theta - eps_k.
        const double score =
            fs.folds[static_cast<std::size_t>(k)][0] / theta - eps[static_cast<std::size_t>(k)];
        sum[static_cast<std::size_t>(lane)][static_cast<std::size_t>(k)] += score;
        sumsq[static_cast<std::size_t>(lane)][static_cast<std::size_t>(k)] += score * score;
      }
    }
  };
  if (lanes == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int lane = 0; lane < lanes; ++lane) pool.emplace_back(worker, lane);
    for (auto& t : pool) t.join();
  }

  double estimate = 0.0;
  for (int k = 0; k < K; ++k) {
    double s = 0.0, ss = 0.0;
    for (int lane = 0; lane < lanes; ++lane) {
      s += sum[static_cast<std::size_t>(lane)][static_cast<std::size_t>(k)];
      ss += sumsq[static_cast<std::size_t>(lane)][static_cast<std::size_t>(k)];
    }
    const double mean = s / static_cast<double>(B);
    estimate += ss / static_cast<double>(B) - mean * mean;
  }
  const double target = 1.0 / theta;
  return {estimate, target, std::fabs(estimate - target) / target};
}

// ---------------------------------------------------------------------------
// Default verification matrix: every thinner, three parameter settings.

namespace {

ThinningPlan two_fold_37() {
  ThinningPlan plan = ThinningPlan::convolution({0.3, 0.7});
  plan.weight_fractions = {{3, 10}, {7, 10}};
  return plan;
}

VerifyCase basic_case(std::string id, DistributionSpec spec, ThinningPlan plan) {
  VerifyCase vc;
  vc.id = std::move(id);
  vc.spec = std::move(spec);
  vc.plan = std::move(plan);
  return vc;
}

}  // namespace

std::vector<VerifyCase> default_matrix() {
  std::vector<VerifyCase> cases;
  const auto add = [&](VerifyCase vc) { cases.push_back(std::move(vc)); };

  // Convolution: Normal.
  {
    const double mus[3] = {0.0, 3.0, -2.0};
    const double vars[3] = {1.0, 0.25, 9.0};
    for (int s = 0; s < 3; ++s)
      add(basic_case("conv-normal-s" + std::to_string(s + 1),
                     make_spec(Family::Normal, {{"mu", mus[s]}, {"sigma2", vars[s]}},
                               {"mu"}),
                     two_fold_37()));
  }
  // Convolution: isotropic multivariate normal (dim 3).
  {
    const double mus[3] = {0.0, 1.5, -1.0};
    const double vars[3] = {1.0, 4.0, 0.5};
    for (int s = 0; s < 3; ++s)
      add(basic_case("conv-mvniso-s" + std::to_string(s + 1),
                     make_spec(Family::MultivariateNormalIso,
                               {{"mu", mus[s]}, {"sigma2", vars[s]}}, {"mu"}, 3),
                     two_fold_37()));
  }
  // Convolution: Poisson.
  {
    const double rates[3] = {0.8, 7.0, 40.0};
    for (int s = 0; s < 3; ++s)
      add(basic_case("conv-poisson-s" + std::to_string(s + 1),
                     make_spec(Family::Poisson, {{"rate", rates[s]}}, {"rate"}),
                     two_fold_37()));
  }
  // Convolution: negative binomial.
  {
    const double rs[3] = {10, 20, 10};
    const double ps[3] = {0.3, 0.5, 0.8};
    for (int s = 0; s < 3; ++s)
      add(basic_case("conv-negbin-s" + std::to_string(s + 1),
                     make_spec(Family::NegBinomial, {{"r", rs[s]}, {"p", ps[s]}},
                               {"p"}),
                     two_fold_37()));
  }
  // Convolution: binomial.
  {
    const double rs[3] = {10, 20, 10};
    const double ps[3] = {0.4, 0.15, 0.85};
    for (int s = 0; s < 3; ++s)
      add(basic_case("conv-binomial-s" + std::to_string(s + 1),
                     make_spec(Family::Binomial, {{"r", rs[s]}, {"p", ps[s]}}, {"p"}),
                     two_fold_37()));
  }
  // Convolution: multinomial (dim 3).
  {
    const double rs[3] = {10, 20, 10};
    const double probs[3][3] = {
        {0.2, 0.3, 0.5}, {0.5, 0.25, 0.25}, {0.1, 0.6, 0.3}};
    for (int s = 0; s < 3; ++s)
      add(basic_case("conv-multinomial-s" + std::to_string(s + 1),
                     make_spec(Family::Multinomial,
                               {{"r", rs[s]},
                                {"p1", probs[s][0]},
                                {"p2", probs[s][1]},
                                {"p3", probs[s][2]}},
                               {"p1", "p2", "p3"}, 3),
                     two_fold_37()));
  }
  // Convolution: gamma with known shape.
  {
    const double shapes[3] = {2.0, 0.7, 5.0};
    const double rates[3] = {0.5, 3.0, 1.0};
    for (int s = 0; s < 3; ++s)
      add(basic_case("conv-gamma-s" + std::to_string(s + 1),
                     make_spec(Family::GammaRate,
                               {{"shape", shapes[s]}, {"rate", rates[s]}}, {"rate"}),
                     two_fold_37()));
  }
  // Sphere projection: Gamma(K/2, theta), K = 2.
  {
    const double rates[3] = {0.5, 1.0, 4.0};
    for (int s = 0; s < 3; ++s) {
      ThinningPlan plan;
      plan.K = 2;
      plan.mode = ThinMode::SphereProjection;
      add(basic_case("sphere-s" + std::to_string(s + 1),
                     make_spec(Family::GammaRate,
                               {{"shape", 1.0}, {"rate", rates[s]}}, {"rate"}),
                     plan));
    }
  }
  // Weibull power: Gamma(K, theta), K = 2.
  {
    const double rates[3] = {1.0, 2.0, 0.5};
    const double nus[3] = {2.0, 0.8, 1.5};
    for (int s = 0; s < 3; ++s) {
      ThinningPlan plan;
      plan.K = 2;
      plan.mode = ThinMode::WeibullPower;
      plan.nu = nus[s];
      add(basic_case("weibull-power-s" + std::to_string(s + 1),
                     make_spec(Family::GammaRate,
                               {{"shape", 2.0}, {"rate", rates[s]}}, {"rate"}),
                     plan));
    }
  }
  // Beta geometric-mean thinner (MCMC).
  {
    const double as[3] = {2.0, 0.7, 5.0};
    const double bs[3] = {3.0, 1.5, 2.0};
    for (int s = 0; s < 3; ++s) {
      ThinningPlan plan;
      plan.K = 2;
      plan.mode = ThinMode::GeometricMeanBeta;
      add(basic_case("beta-mcmc-s" + std::to_string(s + 1),
                     make_spec(Family::Beta, {{"a", as[s]}, {"b", bs[s]}}, {"a"}),
                     plan));
    }
  }
  // Gamma with unknown shape (MCMC).
  {
    const double shapes[3] = {3.0, 1.2, 6.0};
    const double rates[3] = {1.0, 0.5, 2.0};
    for (int s = 0; s < 3; ++s) {
      ThinningPlan plan;
      plan.K = 2;
      plan.mode = ThinMode::GeometricMeanGamma;
      add(basic_case("gamma-shape-mcmc-s" + std::to_string(s + 1),
                     make_spec(Family::GammaShape,
                               {{"shape", shapes[s]}, {"rate", rates[s]}}, {"shape"}),
                     plan));
    }
  }
  // Max-support thinner: scaled beta (alpha = 1 is Uniform(0, theta)).
  {
    const double scales[3] = {2.0, 1.0, 5.0};
    const double alphas[3] = {1.0, 3.0, 0.5};
    for (int s = 0; s < 3; ++s) {
      ThinningPlan plan;
      plan.K = 2;
      plan.mode = ThinMode::MaxSupport;
      add(basic_case("max-s" + std::to_string(s + 1),
                     make_spec(Family::ScaledBeta,
                               {{"scale", scales[s]}, {"alpha", alphas[s]}},
                               {"scale"}),
                     plan));
    }
  }
  // Min-support thinner: shifted exponential.
  {
    const double shifts[3] = {1.0, 0.0, -3.0};
    const double rates[3] = {2.0, 1.0, 0.5};
    for (int s = 0; s < 3; ++s) {
      ThinningPlan plan;
      plan.K = 2;
      plan.mode = ThinMode::MinSupport;
      add(basic_case("min-s" + std::to_string(s + 1),
                     make_spec(Family::ShiftedExponential,
                               {{"shift", shifts[s]}, {"rate", rates[s]}},
                               {"shift"}),
                     plan));
    }
  }
  // Mean-variance thinner: N_n with both parameters unknown, n = K = 2.
  {
    const double mus[3] = {0.0, 2.0, -1.0};
    const double vars[3] = {1.0, 4.0, 0.25};
    for (int s = 0; s < 3; ++s) {
      ThinningPlan plan;
      plan.K = 2;
      plan.mode = ThinMode::MeanVariance;
      VerifyCase vc = basic_case(
          "mean-variance-s" + std::to_string(s + 1),
          make_spec(Family::Normal, {{"mu", mus[s]}, {"sigma2", vars[s]}},
                    {"mu", "sigma2"}),
          plan);
      vc.series_length = 2;
      add(std::move(vc));
    }
  }
  // Sample splitting: n = 10 into (4, 6).
  {
    const double mus[3] = {0.0, 2.0, -1.0};
    const double vars[3] = {1.0, 9.0, 0.5};
    for (int s = 0; s < 3; ++s) {
      ThinningPlan plan;
      plan.K = 2;
      plan.mode = ThinMode::SampleSplit;
      plan.fold_sizes = {4, 6};
      VerifyCase vc = basic_case(
          "split-s" + std::to_string(s + 1),
          make_spec(Family::Normal, {{"mu", mus[s]}, {"sigma2", vars[s]}},
                    {"mu", "sigma2"}),
          plan);
      vc.series_length = 10;
      add(std::move(vc));
    }
  }
  // Indirect transforms into gamma convolutions.
  {
    const double mus[3] = {0.0, 1.0, -2.0};
    const double vars[3] = {1.0, 4.0, 0.25};
    for (int s = 0; s < 3; ++s) {
      ThinningPlan plan = ThinningPlan::convolution({0.5, 0.5});
      plan.mode = ThinMode::Transform;
      add(basic_case("transform-square-s" + std::to_string(s + 1),
                     make_spec(Family::Normal,
                               {{"mu", mus[s]}, {"sigma2", vars[s]}}, {"sigma2"}),
                     plan));
    }
  }
  {
    const double scales[3] = {1.0, 2.0, 0.5};
    const double nus[3] = {2.0, 0.8, 1.5};
    for (int s = 0; s < 3; ++s) {
      ThinningPlan plan = ThinningPlan::convolution({0.5, 0.5});
      plan.mode = ThinMode::Transform;
      add(basic_case("transform-power-s" + std::to_string(s + 1),
                     make_spec(Family::Weibull,
                               {{"scale", scales[s]}, {"nu", nus[s]}}, {"scale"}),
                     plan));
    }
  }
  {
    const double nus[3] = {1.0, 2.0, 0.5};
    const double shapes[3] = {3.0, 1.5, 5.0};
    for (int s = 0; s < 3; ++s) {
      ThinningPlan plan = ThinningPlan::convolution({0.5, 0.5});
      plan.mode = ThinMode::Transform;
      add(basic_case("transform-log-s" + std::to_string(s + 1),
                     make_spec(Family::Pareto,
                               {{"nu", nus[s]}, {"shape", shapes[s]}}, {"shape"}),
                     plan));
    }
  }
  return cases;
}

// ---------------------------------------------------------------------------
// Serialization.

nlohmann::json report_to_json(const VerificationReport& report) {
  nlohmann::json j;
  j["thinner_id"] = report.thinner_id;
  j["spec"] = to_json(report.spec);
  j["plan"] = to_json(report.plan);
  j["B"] = report.B;
  j["recon_max_rel_err"] = report.recon_max_rel_err;
  j["per_fold_ks"] = nlohmann::json::array();
  for (const auto& ks : report.per_fold_ks)
    j["per_fold_ks"].push_back({{"D", ks.d}, {"p", ks.p}});
  j["pairwise_independence"] = nlohmann::json::array();
  for (const auto& p : report.pairwise_independence)
    j["pairwise_independence"].push_back({{"fold_i", p.fold_i + 1},
                                          {"fold_j", p.fold_j + 1},
                                          {"pearson_r", p.pearson_r},
                                          {"copula_chi2_p", p.copula_chi2_p}});
  if (report.fisher_check) {
    j["fisher_check"] = {{"estimate", report.fisher_check->estimate},
                         {"target", report.fisher_check->target},
                         {"rel_err", report.fisher_check->rel_err}};
  } else {
    j["fisher_check"] = nullptr;
  }
  j["error_count"] = report.error_count;
  if (!report.first_error.empty()) j["first_error"] = report.first_error;
  j["verdict"] = report.pass ? "pass" : "fail";
  j["failures"] = report.failures;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.subchecks)
    checks.push_back({{"name", c.name},
                      {"kind", c.kind},
                      {"statistic", c.statistic},
                      {"value", c.value},
                      {"threshold", c.threshold},
                      {"pass", c.pass}});
  j["subchecks"] = checks;
  return j;
}

std::string report_csv_header() {
  return "case,check,kind,statistic,value,threshold,pass\n";
}

std::string report_to_csv_rows(const VerificationReport& report) {
  std::ostringstream out;
  out.precision(12);
  for (const auto& c : report.subchecks) {
    out << report.thinner_id << ',' << c.name << ',' << c.kind << ','
        << c.statistic << ',' << c.value << ',' << c.threshold << ','
        << (c.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace thinning
