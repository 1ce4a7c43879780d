#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "thinning/distributions.hpp"
#include "thinning/errors.hpp"
#include "thinning/special.hpp"
#include "thinning/thinners.hpp"

using namespace thinning;

namespace {

double ks_p_against(const std::vector<double>& values,
                    const std::function<double(double)>& cdf_fn) {
  std::vector<double> u(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) u[i] = cdf_fn(values[i]);
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    d = std::max(d, std::max(u[i] - i / n, (i + 1) / n - u[i]));
  const double s = std::sqrt(n);
  return kolmogorov_sf((s + 0.12 + 0.11 / s) * d);
}

McmcConfig fast_mcmc() {
  McmcConfig cfg;
  cfg.burn_in = 300;
  cfg.thin_every = 20;
  return cfg;
}

double simpson_grid(const std::function<double(double)>& f, double a, double b,
                    int panels) {
  double acc = f(a) + f(b);
  const double h = (b - a) / panels;
  for (int i = 1; i < panels; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

}  // namespace

TEST_SUITE_BEGIN("thinners");

TEST_CASE("recombiner arithmetic") {
  FoldSet fs;
  fs.recombiner = {RecombinerId::Sum, 0.0};
  fs.folds = {{1.0}, {2.0}, {3.0}};
  fs.t_value = {6.0};
  CHECK(recombine(fs)[0] == 6.0);
  CHECK(reconstruction_error(fs) == 0.0);

  fs.recombiner = {RecombinerId::GeometricMean, 0.0};
  fs.folds = {{0.37}, {0.37}, {0.37}};
  CHECK(recombine(fs)[0] == doctest::Approx(0.37).epsilon(1e-15));

  fs.recombiner = {RecombinerId::SumOfPowers, 2.0};
  fs.folds = {{3.0}, {4.0}};
  CHECK(recombine(fs)[0] == doctest::Approx(25.0).epsilon(1e-15));

  fs.recombiner = {RecombinerId::Max, 0.0};
  CHECK(recombine(fs)[0] == 4.0);
  fs.recombiner = {RecombinerId::Min, 0.0};
  CHECK(recombine(fs)[0] == 3.0);

  fs.recombiner = {RecombinerId::MeanAndVariance, 0.0};
  fs.folds = {{1.0}, {2.0}, {3.0}, {4.0}};
  const auto mv = recombine(fs);
  CHECK(mv[0] == doctest::Approx(2.5));
  CHECK(mv[1] == doctest::Approx(5.0 / 3.0));

  fs.recombiner = {RecombinerId::ConcatSort, 0.0};
  fs.folds = {{3.0, 1.0}, {2.0}};
  const auto sorted = recombine(fs);
  CHECK(sorted == std::vector<double>{1.0, 2.0, 3.0});

  fs.recombiner = {RecombinerId::ExpOfSum, 2.0};
  fs.folds = {{0.5}, {0.25}};
  CHECK(recombine(fs)[0] == doctest::Approx(2.0 * std::exp(0.75)).epsilon(1e-15));

  FoldSet empty;
  CHECK_THROWS_AS(recombine(empty), Error);
}

TEST_CASE("identity plan K=1 is exact passthrough for every thinner") {
  RngState rng(20240105, 0);
  ThinningPlan one;
  one.K = 1;
  one.weights = {1.0};

  auto check_identity = [](const FoldSet& fs, double x) {
    CHECK(fs.folds.size() == 1);
    CHECK(fs.folds[0][0] == x);
    CHECK(reconstruction_error(fs) <= 1e-12);
  };

  check_identity(thin_convolution({5.0}, make_spec(Family::Poisson, {}, {"rate"}),
                                  one, rng),
                 5.0);
  check_identity(
      thin_convolution({2.5}, make_spec(Family::GammaRate, {{"shape", 2.0}}, {"rate"}),
                       one, rng),
      2.5);
  {
    ThinningPlan p = one;
    p.mode = ThinMode::GeometricMeanBeta;
    check_identity(thin_beta(0.3, make_spec(Family::Beta, {{"b", 3.0}}, {"a"}), p,
                             fast_mcmc(), rng),
                   0.3);
    p.mode = ThinMode::GeometricMeanGamma;
    check_identity(thin_gamma_shape(1.7, make_spec(Family::GammaShape, {{"rate", 1.0}},
                                                   {"shape"}),
                                    p, fast_mcmc(), rng),
                   1.7);
    p.mode = ThinMode::MaxSupport;
    check_identity(
        thin_max(0.9, make_spec(Family::ScaledBeta, {{"alpha", 2.0}}, {"scale"}), p,
                 rng),
        0.9);
    p.mode = ThinMode::MinSupport;
    check_identity(
        thin_min(4.0, make_spec(Family::ShiftedExponential, {{"rate", 1.0}},
                                {"shift"}),
                 p, rng),
        4.0);
    p.mode = ThinMode::SampleSplit;
    p.fold_sizes = {3};
    const std::vector<double> x = {3.0, 1.0, 2.0};
    const FoldSet fs = thin_split(x, p, rng);
    CHECK(fs.folds[0] == x);  // original order preserved
  }
}

TEST_CASE("poisson conditional matches the enumerated binomial law") {
  // Enumerate P(X1 = j | X1 + X2 = 5) for independent Poissons with rates
  // (0.3 c, 0.7 c); the shared rate c cancels, leaving Binomial(5, 0.3).
  const auto spec = make_spec(Family::Poisson, {{"rate", 5.0}}, {"rate"});
  const ThinningPlan plan = ThinningPlan::convolution({0.3, 0.7});
  RngState rng(20240106, 0);
  const int B = 200000;
  long hits = 0;
  for (int b = 0; b < B; ++b) {
    const FoldSet fs = thin_convolution({5.0}, spec, plan, rng);
    CHECK(fs.folds[0][0] + fs.folds[1][0] == 5.0);
    if (fs.folds[0][0] == 2.0) ++hits;
  }
  const double expect = std::exp(log_choose(5, 2)) * 0.09 * 0.343;
  const double se = std::sqrt(expect * (1.0 - expect) / B);
  CHECK(std::fabs(static_cast<double>(hits) / B - expect) < 3.0 * se);
}

TEST_CASE("gamma conditional share is Beta(eps1 a, eps2 a)") {
  const auto spec = make_spec(Family::GammaRate, {{"shape", 2.0}}, {"rate"});
  const ThinningPlan plan = ThinningPlan::convolution({0.5, 0.5});
  RngState rng(20240107, 0);
  const int B = 100000;
  std::vector<double> shares(B);
  for (int b = 0; b < B; ++b) {
    const FoldSet fs = thin_convolution({3.0}, spec, plan, rng);
    CHECK(reconstruction_error(fs) < 1e-9);
    shares[static_cast<std::size_t>(b)] = fs.folds[0][0] / 3.0;
  }
  // Beta(1, 1) share: uniform.
  CHECK(ks_p_against(shares, [](double u) { return u; }) > 0.01);
}

TEST_CASE("binomial conditional matches the hypergeometric enumeration") {
  // r = 4 trials split (2, 2); given x = 2 successes the first fold count is
  // Hypergeometric: P(0) = P(2) = 1/6, P(1) = 4/6.
  const auto spec = make_spec(Family::Binomial, {{"r", 4.0}, {"p", 0.5}}, {"p"});
  const ThinningPlan plan = ThinningPlan::convolution({0.5, 0.5});
  RngState rng(20240108, 0);
  const int B = 120000;
  std::map<double, long> counts;
  for (int b = 0; b < B; ++b) {
    const FoldSet fs = thin_convolution({2.0}, spec, plan, rng);
    CHECK(fs.folds[0][0] + fs.folds[1][0] == 2.0);
    ++counts[fs.folds[0][0]];
  }
  const std::map<double, double> expect = {{0.0, 1.0 / 6}, {1.0, 4.0 / 6}, {2.0, 1.0 / 6}};
  for (const auto& [value, prob] : expect) {
    const double freq = static_cast<double>(counts[value]) / B;
    CHECK(std::fabs(freq - prob) < 3.0 * std::sqrt(prob * (1 - prob) / B));
  }
}

TEST_CASE("negative binomial conditional matches the Dirichlet-multinomial pmf") {
  // r = 4 split (2, 2), x = 3 failures: fold-1 count follows
  // DirichletMultinomial(3, (2, 2)).
  const auto spec = make_spec(Family::NegBinomial, {{"r", 4.0}, {"p", 0.4}}, {"p"});
  const ThinningPlan plan = ThinningPlan::convolution({0.5, 0.5});
  const auto dm = make_spec(Family::DirichletMultinomial,
                            {{"n", 3.0}, {"a1", 2.0}, {"a2", 2.0}}, {}, 2);
  RngState rng(20240109, 0);
  const int B = 120000;
  std::map<double, long> counts;
  for (int b = 0; b < B; ++b) {
    const FoldSet fs = thin_convolution({3.0}, spec, plan, rng);
    CHECK(fs.folds[0][0] + fs.folds[1][0] == 3.0);
    ++counts[fs.folds[0][0]];
  }
  for (double j : {0.0, 1.0, 2.0, 3.0}) {
    const double prob = std::exp(log_density(dm, std::vector<double>{j, 3.0 - j}));
    const double freq = static_cast<double>(counts[j]) / B;
    CHECK(std::fabs(freq - prob) < 3.5 * std::sqrt(prob * (1 - prob) / B));
  }
}

TEST_CASE("multinomial partition gives hypergeometric category counts") {
  const auto spec = make_spec(Family::Multinomial,
                              {{"r", 4.0}, {"p1", 0.5}, {"p2", 0.5}},
                              {"p1", "p2"}, 2);
  const ThinningPlan plan = ThinningPlan::convolution({0.5, 0.5});
  RngState rng(20240110, 0);
  const int B = 120000;
  std::map<double, long> counts;
  for (int b = 0; b < B; ++b) {
    const FoldSet fs = thin_convolution({2.0, 2.0}, spec, plan, rng);
    CHECK(fs.folds[0][0] + fs.folds[1][0] == 2.0);
    CHECK(fs.folds[0][1] + fs.folds[1][1] == 2.0);
    CHECK(fs.folds[0][0] + fs.folds[0][1] == 2.0);  // fold sizes hold exactly
    ++counts[fs.folds[0][0]];
  }
  const std::map<double, double> expect = {{0.0, 1.0 / 6}, {1.0, 4.0 / 6}, {2.0, 1.0 / 6}};
  for (const auto& [value, prob] : expect) {
    const double freq = static_cast<double>(counts[value]) / B;
    CHECK(std::fabs(freq - prob) < 3.0 * std::sqrt(prob * (1 - prob) / B));
  }
}

TEST_CASE("normal convolution reconstructs and leaves folds independent") {
  const auto spec = make_spec(Family::Normal, {{"mu", 1.0}, {"sigma2", 2.0}}, {"mu"});
  const ThinningPlan plan = ThinningPlan::convolution({0.3, 0.7});
  const auto marginals = fold_marginals(spec, plan);
  RngState rng(20240111, 0);
  const int B = 100000;
  std::vector<double> f1(B), f2(B);
  double cross = 0.0, m1 = 0.0, m2 = 0.0;
  for (int b = 0; b < B; ++b) {
    const auto x = sample(spec, rng);
    const FoldSet fs = thin_convolution(x, spec.thinning_view(), plan, rng);
    CHECK(reconstruction_error(fs) < 1e-9);
    f1[static_cast<std::size_t>(b)] = fs.folds[0][0];
    f2[static_cast<std::size_t>(b)] = fs.folds[1][0];
    m1 += fs.folds[0][0];
    m2 += fs.folds[1][0];
  }
  m1 /= B;
  m2 /= B;
  for (int b = 0; b < B; ++b)
    cross += (f1[static_cast<std::size_t>(b)] - m1) * (f2[static_cast<std::size_t>(b)] - m2);
  cross /= B;
  // Cov(X1, X2) = 0; each variance eps_k sigma2.
  CHECK(std::fabs(cross) < 4.0 * std::sqrt(0.3 * 2.0 * 0.7 * 2.0 / B));
  CHECK(ks_p_against(f1, [&](double v) { return cdf(marginals[0], v); }) > 0.01);
  CHECK(ks_p_against(f2, [&](double v) { return cdf(marginals[1], v); }) > 0.01);
}

TEST_CASE("degenerate counts thin to zero folds without touching the rng") {
  RngState rng(1, 0);
  const auto before = RngState(1, 0);
  const auto pois = make_spec(Family::Poisson, {}, {"rate"});
  const ThinningPlan plan = ThinningPlan::convolution({0.3, 0.7});
  const FoldSet fs = thin_convolution({0.0}, pois, plan, rng);
  CHECK(fs.folds[0][0] == 0.0);
  CHECK(fs.folds[1][0] == 0.0);
  RngState untouched = before;
  CHECK(rng.next_u64() == untouched.next_u64());

  const auto bin = make_spec(Family::Binomial, {{"r", 10.0}}, {"p"});
  ThinningPlan bplan = ThinningPlan::convolution({0.5, 0.5});
  RngState rng2(2, 0);
  RngState rng2_copy(2, 0);
  const FoldSet bfs = thin_convolution({0.0}, bin, bplan, rng2);
  CHECK(bfs.folds[0][0] == 0.0);
  CHECK(rng2.next_u64() == rng2_copy.next_u64());
}

TEST_CASE("gamma thinners reject nonpositive draws") {
  RngState rng(1, 0);
  const auto spec = make_spec(Family::GammaRate, {{"shape", 2.0}}, {"rate"});
  const ThinningPlan plan = ThinningPlan::convolution({0.5, 0.5});
  CHECK_THROWS_AS(thin_convolution({0.0}, spec, plan, rng), Error);
  CHECK_THROWS_AS(thin_convolution({-1.0}, spec, plan, rng), Error);
}

TEST_CASE("integer allocation validation") {
  RngState rng(1, 0);
  const auto spec = make_spec(Family::Binomial, {{"r", 5.0}, {"p", 0.5}}, {"p"});
  const ThinningPlan plan = ThinningPlan::convolution({0.5, 0.5});
  try {
    thin_convolution({2.0}, spec, plan, rng);
    FAIL("expected NonIntegerAllocation");
  } catch (const Error& e) {
    CHECK(std::string(e.code()) == "NonIntegerAllocation");
  }
  // Exact fractions: 9 trials at 1/3 + 2/3 is fine, 10 is not.
  ThinningPlan frac = ThinningPlan::convolution({1.0 / 3.0, 2.0 / 3.0});
  frac.weight_fractions = {{1, 3}, {2, 3}};
  const auto spec9 = make_spec(Family::Binomial, {{"r", 9.0}, {"p", 0.5}}, {"p"});
  CHECK_NOTHROW(thin_convolution({4.0}, spec9, frac, rng));
  const auto spec10 = make_spec(Family::Binomial, {{"r", 10.0}, {"p", 0.5}}, {"p"});
  CHECK_THROWS_AS(thin_convolution({4.0}, spec10, frac, rng), Error);
}

TEST_CASE("sphere thinner basics and marginal variance") {
  RngState rng(20240112, 0);
  {
    ThinningPlan plan;
    plan.K = 2;
    const auto spec = make_spec(Family::GammaRate, {{"shape", 1.0}}, {"rate"});
    const FoldSet zero = thin_sphere(0.0, spec, plan, rng);
    CHECK(zero.folds[0][0] == 0.0);
    CHECK(zero.folds[1][0] == 0.0);
    const FoldSet fs = thin_sphere(1.0, spec, plan, rng);
    CHECK(fs.folds[0][0] * fs.folds[0][0] + fs.folds[1][0] * fs.folds[1][0] ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  {
    // K = 4, theta = 1/2: fold marginal N(0, 1); check the sample variance.
    ThinningPlan plan;
    plan.K = 4;
    const auto truth =
        make_spec(Family::GammaRate, {{"shape", 2.0}, {"rate", 0.5}}, {"rate"});
    const int B = 100000;
    double sumsq = 0.0;
    for (int b = 0; b < B; ++b) {
      const double x = sample(truth, rng)[0];
      const FoldSet fs = thin_sphere(x, truth.thinning_view(), plan, rng);
      CHECK(reconstruction_error(fs) < 1e-9);
      sumsq += fs.folds[0][0] * fs.folds[0][0];
    }
    const double var = sumsq / B;
    CHECK(std::fabs(var - 1.0) < 3.0 * std::sqrt(2.0 / B));
  }
  {
    ThinningPlan plan;
    plan.K = 3;  // shape 1 != 3/2
    const auto spec = make_spec(Family::GammaRate, {{"shape", 1.0}}, {"rate"});
    CHECK_THROWS_AS(thin_sphere(1.0, spec, plan, rng), Error);
  }
}

TEST_CASE("weibull power thinner") {
  RngState rng(20240113, 0);
  {
    // nu = 1 reduces exactly to gamma convolution with equal weights.
    ThinningPlan plan;
    plan.K = 2;
    plan.nu = 1.0;
    const auto spec = make_spec(Family::GammaRate, {{"shape", 2.0}}, {"rate"});
    RngState a(7, 3), b(7, 3);
    const FoldSet via_weibull = thin_weibull(4.0, spec, plan, a);
    const FoldSet via_conv = thin_convolution(
        {4.0}, spec, ThinningPlan::equal_convolution(2), b);
    CHECK(via_weibull.folds[0][0] == via_conv.folds[0][0]);
    CHECK(via_weibull.folds[1][0] == via_conv.folds[1][0]);
  }
  {
    ThinningPlan plan;
    plan.K = 2;
    plan.nu = 2.0;
    const auto spec = make_spec(Family::GammaRate, {{"shape", 2.0}}, {"rate"});
    const FoldSet fs = thin_weibull(4.0, spec, plan, rng);
    CHECK(fs.folds[0][0] * fs.folds[0][0] + fs.folds[1][0] * fs.folds[1][0] ==
          doctest::Approx(4.0).epsilon(1e-9));
  }
  {
    // K = 3, theta = 1, nu = 2: folds are Weibull(1, 2).
    ThinningPlan plan;
    plan.K = 3;
    plan.nu = 2.0;
    const auto truth =
        make_spec(Family::GammaRate, {{"shape", 3.0}, {"rate", 1.0}}, {"rate"});
    const auto weib = make_spec(Family::Weibull, {{"scale", 1.0}, {"nu", 2.0}});
    RngState r(20240114, 0);
    const int B = 100000;
    std::vector<double> folds(B);
    for (int b = 0; b < B; ++b) {
      const double x = sample(truth, r)[0];
      const FoldSet fs = thin_weibull(x, truth.thinning_view(), plan, r);
      folds[static_cast<std::size_t>(b)] = fs.folds[b % 3][0];
    }
    CHECK(ks_p_against(folds, [&](double v) { return cdf(weib, v); }) > 0.01);
  }
  {
    ThinningPlan plan;
    plan.K = 2;
    plan.nu = -1.0;
    const auto spec = make_spec(Family::GammaRate, {{"shape", 2.0}}, {"rate"});
    CHECK_THROWS_AS(thin_weibull(1.0, spec, plan, rng), Error);
  }
}

TEST_CASE("beta thinner: construction constraints hold for every draw") {
  const auto spec = make_spec(Family::Beta, {{"a", 2.0}, {"b", 3.0}}, {"a"});
  ThinningPlan plan;
  plan.K = 2;
  plan.mode = ThinMode::GeometricMeanBeta;
  RngState rng(20240115, 0);
  const McmcConfig cfg = fast_mcmc();
  for (int i = 0; i < 200; ++i) {
    const double x = sample(spec, rng)[0];
    const FoldSet fs = thin_beta(x, spec.thinning_view(), plan, cfg, rng);
    const double x2 = fs.folds[1][0];
    CHECK(x2 > std::pow(x, 2.0));
    CHECK(x2 < 1.0);
    CHECK(fs.folds[0][0] * fs.folds[1][0] ==
          doctest::Approx(x * x).epsilon(1e-9));
    CHECK(reconstruction_error(fs) < 1e-9);
  }
}

TEST_CASE("beta thinner: conditional mean matches the quadrature oracle") {
  // K = 2, t = 0.25, beta = 3: E[X1 | gm = t] by adaptive-free Simpson on
  // the conditional density x^(-3/2) ((1-x)(1-t^2/x))^(beta/2-1) on (t^2, 1).
  const double t = 0.25;
  const double beta = 3.0;
  const auto density = [&](double x) {
    if (x <= t * t || x >= 1.0) return 0.0;
    return std::pow(x, -1.5) *
           std::pow((1.0 - x) * (1.0 - t * t / x), 0.5 * beta - 1.0);
  };
  const double z = simpson_grid(density, t * t + 1e-12, 1.0 - 1e-12, 20000);
  const double mean_oracle =
      simpson_grid([&](double x) { return x * density(x); }, t * t + 1e-12,
                   1.0 - 1e-12, 20000) /
      z;
  const double second_oracle =
      simpson_grid([&](double x) { return x * x * density(x); }, t * t + 1e-12,
                   1.0 - 1e-12, 20000) /
      z;
  // Frozen 50-digit values for this setting.
  CHECK(mean_oracle == doctest::Approx(0.25).epsilon(1e-5));
  CHECK(second_oracle == doctest::Approx(0.09765625).epsilon(1e-5));

  const auto spec = make_spec(Family::Beta, {{"b", beta}}, {"a"});
  ThinningPlan plan;
  plan.K = 2;
  plan.mode = ThinMode::GeometricMeanBeta;
  McmcConfig cfg;
  cfg.burn_in = 500;
  cfg.thin_every = 25;
  RngState rng(20240116, 0);
  const int n = 12000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const FoldSet fs = thin_beta(t, spec, plan, cfg, rng);
    sum += fs.folds[0][0];
    sumsq += fs.folds[0][0] * fs.folds[0][0];
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  // Retained states are near-independent at thin_every = 25; allow a
  // correlation slack factor on the MC band.
  CHECK(std::fabs(mean - mean_oracle) < 5.0 * std::sqrt(var / n));
}

TEST_CASE("beta thinner: fold moments reproduce the beta moment identity") {
  // E[prod_k (X_k)^(r/K)] = B(theta + r, beta) / B(theta, beta) for fresh
  // draws; checked through the independence of the folds.
  const double theta = 2.0, beta = 3.0;
  const auto truth = make_spec(Family::Beta, {{"a", theta}, {"b", beta}}, {"a"});
  ThinningPlan plan;
  plan.K = 2;
  plan.mode = ThinMode::GeometricMeanBeta;
  McmcConfig cfg;
  cfg.burn_in = 400;
  cfg.thin_every = 20;
  RngState rng(20240117, 0);
  const int B = 30000;
  for (double r : {1.0, 2.0}) {
    double s1 = 0.0, s1sq = 0.0, s2 = 0.0, s2sq = 0.0, direct = 0.0, directsq = 0.0;
    RngState loop_rng = rng.split(static_cast<std::uint64_t>(r));
    for (int b = 0; b < B; ++b) {
      const double x = sample(truth, loop_rng)[0];
      const FoldSet fs = thin_beta(x, truth.thinning_view(), plan, cfg, loop_rng);
      const double m1 = std::pow(fs.folds[0][0], r / 2.0);
      const double m2 = std::pow(fs.folds[1][0], r / 2.0);
      s1 += m1;
      s1sq += m1 * m1;
      s2 += m2;
      s2sq += m2 * m2;
      const double rec = std::pow(recombine(fs)[0], r);
      direct += rec;
      directsq += rec * rec;
    }
    const double target = std::exp(log_beta(theta + r, beta) - log_beta(theta, beta));
    const double e1 = s1 / B, e2 = s2 / B;
    const double v1 = s1sq / B - e1 * e1, v2 = s2sq / B - e2 * e2;
    const double prod = e1 * e2;
    const double prod_se =
        prod * std::sqrt(v1 / (e1 * e1 * B) + v2 / (e2 * e2 * B));
    CHECK(std::fabs(prod - target) < 3.0 * prod_se);
    const double de = direct / B;
    const double dv = directsq / B - de * de;
    CHECK(std::fabs(de - target) < 3.0 * std::sqrt(dv / B));
  }
}

TEST_CASE("gamma shape thinner: constraints and MGF identity") {
  const double theta = 3.0, beta = 1.0;
  const auto truth =
      make_spec(Family::GammaShape, {{"shape", theta}, {"rate", beta}}, {"shape"});
  ThinningPlan plan;
  plan.K = 2;
  plan.mode = ThinMode::GeometricMeanGamma;
  McmcConfig cfg;
  cfg.burn_in = 400;
  cfg.thin_every = 20;
  RngState rng(20240118, 0);
  const int B = 30000;
  for (double t : {0.5, 1.0}) {
    double s1 = 0.0, s1sq = 0.0, s2 = 0.0, s2sq = 0.0;
    RngState loop_rng = rng.split(static_cast<std::uint64_t>(10 * t));
    for (int b = 0; b < B; ++b) {
      const double x = sample(truth, loop_rng)[0];
      const FoldSet fs =
          thin_gamma_shape(x, truth.thinning_view(), plan, cfg, loop_rng);
      CHECK(fs.folds[0][0] * fs.folds[1][0] ==
            doctest::Approx(x * x).epsilon(1e-9));
      const double m1 = std::pow(fs.folds[0][0], t / 2.0);
      const double m2 = std::pow(fs.folds[1][0], t / 2.0);
      s1 += m1;
      s1sq += m1 * m1;
      s2 += m2;
      s2sq += m2 * m2;
    }
    // Phi(t) = Gamma(theta + t) / (Gamma(theta) beta^t).
    const double target =
        std::exp(log_gamma(theta + t) - log_gamma(theta) - t * std::log(beta));
    const double e1 = s1 / B, e2 = s2 / B;
    const double v1 = s1sq / B - e1 * e1, v2 = s2sq / B - e2 * e2;
    const double prod = e1 * e2;
    const double prod_se =
        prod * std::sqrt(v1 / (e1 * e1 * B) + v2 / (e2 * e2 * B));
    CHECK(std::fabs(prod - target) < 3.0 * prod_se);
  }
}

TEST_CASE("max thinner: exact maximum and scaled-beta marginal") {
  RngState rng(20240119, 0);
  const auto truth =
      make_spec(Family::UniformScale, {{"scale", 2.0}}, {"scale"});
  ThinningPlan plan;
  plan.K = 2;
  plan.mode = ThinMode::MaxSupport;
  const int B = 100000;
  std::vector<double> f1(B);
  for (int b = 0; b < B; ++b) {
    const double x = sample(truth, rng)[0];
    const FoldSet fs = thin_max(x, truth.thinning_view(), plan, rng);
    CHECK(std::max(fs.folds[0][0], fs.folds[1][0]) == x);
    CHECK(fs.folds[0][0] <= x);
    CHECK(fs.folds[1][0] <= x);
    f1[static_cast<std::size_t>(b)] = fs.folds[0][0];
  }
  // Fold marginal 2 * Beta(1/2, 1): CDF (z/2)^(1/2).
  CHECK(ks_p_against(f1, [](double z) { return std::sqrt(z / 2.0); }) > 0.01);
}

TEST_CASE("min thinner: exact minimum and shifted-exponential marginal") {
  RngState rng(20240120, 0);
  const auto truth = make_spec(Family::ShiftedExponential,
                               {{"shift", 1.0}, {"rate", 2.0}}, {"shift"});
  ThinningPlan plan;
  plan.K = 3;
  plan.mode = ThinMode::MinSupport;
  const auto fold_law = make_spec(Family::ShiftedExponential,
                                  {{"shift", 1.0}, {"rate", 2.0 / 3.0}});
  const int B = 100000;
  std::vector<double> fold_values(B);
  for (int b = 0; b < B; ++b) {
    const double x = sample(truth, rng)[0];
    const FoldSet fs = thin_min(x, truth.thinning_view(), plan, rng);
    double mn = fs.folds[0][0];
    for (const auto& f : fs.folds) mn = std::min(mn, f[0]);
    CHECK(mn == x);
    fold_values[static_cast<std::size_t>(b)] = fs.folds[b % 3][0];
  }
  CHECK(ks_p_against(fold_values, [&](double v) { return cdf(fold_law, v); }) > 0.01);
}

TEST_CASE("mean-variance thinner") {
  RngState rng(20240121, 0);
  {
    ThinningPlan plan;
    plan.K = 4;
    plan.mode = ThinMode::MeanVariance;
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    const FoldSet fs = thin_mean_variance(x, plan, rng);
    const auto mv = recombine(fs);
    CHECK(mv[0] == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(mv[1] == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  }
  {
    // Constant input: degenerate branch returns the input itself.
    ThinningPlan plan;
    plan.K = 3;
    plan.mode = ThinMode::MeanVariance;
    const std::vector<double> x = {2.0, 2.0, 2.0};
    const FoldSet fs = thin_mean_variance(x, plan, rng);
    CHECK(fs.degenerate);
    for (const auto& f : fs.folds) CHECK(f[0] == 2.0);
  }
  {
    // n = 5, N(0, 1): every output coordinate is again N(0, 1).
    ThinningPlan plan;
    plan.K = 5;
    plan.mode = ThinMode::MeanVariance;
    const auto law = make_spec(Family::Normal, {{"mu", 0.0}, {"sigma2", 1.0}});
    const int B = 100000;
    std::vector<double> coord(B);
    for (int b = 0; b < B; ++b) {
      std::vector<double> x(5);
      for (auto& v : x) v = sample(law, rng)[0];
      const FoldSet fs = thin_mean_variance(x, plan, rng);
      CHECK(reconstruction_error(fs) < 1e-9);
      coord[static_cast<std::size_t>(b)] = fs.folds[static_cast<std::size_t>(b % 5)][0];
    }
    CHECK(ks_p_against(coord, [&](double v) { return cdf(law, v); }) > 0.01);
  }
}

TEST_CASE("sample splitting") {
  RngState rng(20240122, 0);
  {
    // Multiset preservation, any input.
    ThinningPlan plan;
    plan.K = 2;
    plan.mode = ThinMode::SampleSplit;
    plan.fold_sizes = {2, 3};
    const std::vector<double> x = {5.0, 1.0, 3.0, 3.0, 2.0};
    const FoldSet fs = thin_split(x, plan, rng);
    auto merged = fs.folds[0];
    merged.insert(merged.end(), fs.folds[1].begin(), fs.folds[1].end());
    std::sort(merged.begin(), merged.end());
    std::vector<double> expect = x;
    std::sort(expect.begin(), expect.end());
    CHECK(merged == expect);
    CHECK(recombine(fs) == expect);
  }
  {
    // n = 3, sizes (1, 2): each singleton appears with frequency 1/3.
    ThinningPlan plan;
    plan.K = 2;
    plan.mode = ThinMode::SampleSplit;
    plan.fold_sizes = {1, 2};
    const std::vector<double> x = {10.0, 20.0, 30.0};
    std::map<double, long> counts;
    const int B = 100000;
    for (int b = 0; b < B; ++b) {
      const FoldSet fs = thin_split(x, plan, rng);
      ++counts[fs.folds[0][0]];
    }
    for (double v : x) {
      const double freq = static_cast<double>(counts[v]) / B;
      CHECK(std::fabs(freq - 1.0 / 3.0) <
            3.0 * std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / B));
    }
  }
  {
    ThinningPlan plan;
    plan.K = 2;
    plan.mode = ThinMode::SampleSplit;
    plan.fold_sizes = {2, 2};
    CHECK_THROWS_AS(thin_split({1.0, 2.0, 3.0}, plan, rng), Error);
  }
}

TEST_CASE("transformed thinners") {
  RngState rng(20240123, 0);
  {
    // x = mu: S = 0 and every fold is zero.
    const Transform tr{TransformKind::SquareAboutMu, 1.5};
    const FoldSet fs =
        thin_transformed(1.5, tr, ThinningPlan::convolution({0.5, 0.5}), rng);
    CHECK(fs.folds[0][0] == 0.0);
    CHECK(fs.folds[1][0] == 0.0);
    CHECK((*fs.indirect_stat)[0] == 0.0);
  }
  {
    // Sum of folds reproduces S(x).
    const Transform tr{TransformKind::LogOverNu, 2.0};
    for (int i = 0; i < 50; ++i) {
      const double x = 2.0 + rng.exponential();
      const FoldSet fs =
          thin_transformed(x, tr, ThinningPlan::convolution({0.25, 0.75}), rng);
      CHECK(recombine(fs)[0] ==
            doctest::Approx(std::log(x / 2.0)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(
        thin_transformed(1.0, tr, ThinningPlan::convolution({0.5, 0.5}), rng),
        Error);
  }
  {
    // Normal mu=0, theta=1, K=2: folds are Gamma(1/4, 1/2).
    const auto truth = make_spec(Family::Normal, {{"mu", 0.0}, {"sigma2", 1.0}},
                                 {"sigma2"});
    const auto fold_law =
        make_spec(Family::GammaRate, {{"shape", 0.25}, {"rate", 0.5}});
    const Transform tr{TransformKind::SquareAboutMu, 0.0};
    const int B = 100000;
    std::vector<double> f1(B);
    for (int b = 0; b < B; ++b) {
      const double x = sample(truth, rng)[0];
      const FoldSet fs =
          thin_transformed(x, tr, ThinningPlan::convolution({0.5, 0.5}), rng);
      f1[static_cast<std::size_t>(b)] = fs.folds[0][0];
    }
    CHECK(ks_p_against(f1, [&](double v) { return cdf(fold_law, v); }) > 0.01);
  }
}

TEST_CASE("uv decomposition") {
  RngState rng(20240124, 0);
  const std::vector<double> x = {0.5, -1.0, 2.0};
  {
    // Algebraic identities: eps1 U + eps2 V = x and U - x = gamma (x - V).
    const double gamma = 2.0;
    const double eps1 = 1.0 / 3.0;
    auto [u, v] = gaussian_uv_decompose(x, gamma, rng);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(eps1 * u[i] + (1.0 - eps1) * v[i] ==
            doctest::Approx(x[i]).epsilon(1e-9));
      CHECK(u[i] - x[i] == doctest::Approx(gamma * (x[i] - v[i])).epsilon(1e-12));
    }
  }
  {
    // Shared rng: (eps1 U, eps2 V) matches the convolution thinner folds.
    const double gamma = 2.0;
    const double eps1 = 1.0 / 3.0;
    RngState a(11, 0), b(11, 0);
    auto [u, v] = gaussian_uv_decompose(x, gamma, a);
    const auto spec = make_spec(Family::MultivariateNormalIso,
                                {{"sigma2", 1.0}}, {"mu"}, 3);
    const FoldSet fs = thin_convolution(
        x, spec, ThinningPlan::convolution({eps1, 1.0 - eps1}), b);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(eps1 * u[i] == doctest::Approx(fs.folds[0][i]).epsilon(1e-12));
      CHECK((1.0 - eps1) * v[i] == doctest::Approx(fs.folds[1][i]).epsilon(1e-12));
    }
  }
  {
    // Independence is unconditional: over fresh draws X ~ N(theta, 1),
    // Cov(U_i, V_i) = Var(X) - Var(W)/gamma = 0.
    const double gamma = 2.0;
    const int B = 100000;
    std::vector<double> us(B), vs(B);
    double su = 0.0, sv = 0.0;
    RngState r(20240125, 0);
    for (int b = 0; b < B; ++b) {
      const std::vector<double> draw = {0.3 + r.normal(), -1.0 + r.normal(),
                                        2.0 + r.normal()};
      auto [u, v] = gaussian_uv_decompose(draw, gamma, r);
      us[static_cast<std::size_t>(b)] = u[0];
      vs[static_cast<std::size_t>(b)] = v[0];
      su += u[0];
      sv += v[0];
    }
    su /= B;
    sv /= B;
    double suv = 0.0, s2 = 0.0;
    for (int b = 0; b < B; ++b) {
      const double cross = (us[static_cast<std::size_t>(b)] - su) *
                           (vs[static_cast<std::size_t>(b)] - sv);
      suv += cross;
      s2 += cross * cross;
    }
    suv /= B;
    const double se = std::sqrt((s2 / B - suv * suv) / B);
    CHECK(std::fabs(suv) < 3.0 * se);
  }
  CHECK_THROWS_AS(gaussian_uv_decompose(x, 0.0, rng), Error);
}

TEST_CASE("negative results stay unthinnable") {
  RngState rng(1, 0);
  ThinningPlan plan = ThinningPlan::convolution({0.5, 0.5});
  const auto cat =
      make_spec(Family::Categorical, {{"p1", 0.5}, {"p2", 0.5}}, {}, 2);
  try {
    thin_dispatch({0.0, 1.0}, cat, plan, McmcConfig{}, rng);
    FAIL("expected UnsupportedFamily");
  } catch (const Error& e) {
    CHECK(std::string(e.code()) == "UnsupportedFamily");
    CHECK(std::string(e.what()).find("Categorical") != std::string::npos);
  }
  const auto bernoulli = make_spec(Family::Binomial, {{"r", 1.0}, {"p", 0.5}}, {"p"});
  try {
    thin_convolution({1.0}, bernoulli, plan, rng);
    FAIL("expected UnsupportedFamily");
  } catch (const Error& e) {
    CHECK(std::string(e.code()) == "UnsupportedFamily");
    CHECK(std::string(e.what()).find("Bernoulli") != std::string::npos);
  }
}

TEST_CASE("fold specs carry the placeholder for the unknown parameter") {
  RngState rng(6, 0);
  const auto spec = make_spec(Family::GammaRate, {{"shape", 2.0}}, {"rate"});
  const FoldSet fs = thin_convolution(
      {3.0}, spec, ThinningPlan::convolution({0.25, 0.75}), rng);
  REQUIRE(fs.fold_specs.size() == 2);
  CHECK(fs.fold_specs[0].param("shape") == doctest::Approx(0.5));
  CHECK(fs.fold_specs[1].param("shape") == doctest::Approx(1.5));
  CHECK(fs.fold_specs[0].unknown.count("rate") == 1);
  CHECK(std::isnan(fs.fold_specs[0].param("rate")));
}

TEST_SUITE_END();
