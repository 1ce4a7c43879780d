#include "thinning/thinners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "thinning/errors.hpp"
#include "thinning/special.hpp"

namespace thinning {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

long long as_count(double x, const char* what) {
  if (!(x >= 0.0) || std::fabs(x - std::llround(x)) > 1e-9)
    fail(errc::out_of_support, std::string(what) + " must be a nonnegative integer");
  return std::llround(x);
}

DistributionSpec placeholder(Family f,
                             std::initializer_list<std::pair<const char*, double>> known,
                             std::initializer_list<const char*> unknown, int dim = 1) {
  DistributionSpec s = make_spec(f, known, unknown, dim);
  for (const char* u : unknown) s.params[u] = kNaN;
  return s;
}
}  // namespace

const char* thin_mode_name(ThinMode m) {
  switch (m) {
    case ThinMode::Convolution: return "Convolution";
    case ThinMode::SphereProjection: return "SphereProjection";
    case ThinMode::WeibullPower: return "WeibullPower";
    case ThinMode::GeometricMeanBeta: return "GeometricMeanBeta";
    case ThinMode::GeometricMeanGamma: return "GeometricMeanGamma";
    case ThinMode::MaxSupport: return "MaxSupport";
    case ThinMode::MinSupport: return "MinSupport";
    case ThinMode::MeanVariance: return "MeanVariance";
    case ThinMode::SampleSplit: return "SampleSplit";
    case ThinMode::Transform: return "Transform";
  }
  return "Unknown";
}

ThinMode thin_mode_from_name(const std::string& name) {
  static const std::map<std::string, ThinMode> table = {
      {"Convolution", ThinMode::Convolution},
      {"SphereProjection", ThinMode::SphereProjection},
      {"WeibullPower", ThinMode::WeibullPower},
      {"GeometricMeanBeta", ThinMode::GeometricMeanBeta},
      {"GeometricMeanGamma", ThinMode::GeometricMeanGamma},
      {"MaxSupport", ThinMode::MaxSupport},
      {"MinSupport", ThinMode::MinSupport},
      {"MeanVariance", ThinMode::MeanVariance},
      {"SampleSplit", ThinMode::SampleSplit},
      {"Transform", ThinMode::Transform},
  };
  auto it = table.find(name);
  if (it == table.end())
    fail(errc::invalid_parameter, "unknown thinning mode: " + name, "mode");
  return it->second;
}

const char* recombiner_name(RecombinerId id) {
  switch (id) {
    case RecombinerId::Sum: return "Sum";
    case RecombinerId::SumOfSquares: return "SumOfSquares";
    case RecombinerId::SumOfPowers: return "SumOfPowers";
    case RecombinerId::GeometricMean: return "GeometricMean";
    case RecombinerId::Max: return "Max";
    case RecombinerId::Min: return "Min";
    case RecombinerId::MeanAndVariance: return "MeanAndVariance";
    case RecombinerId::ConcatSort: return "ConcatSort";
    case RecombinerId::ExpOfSum: return "ExpOfSum";
  }
  return "Unknown";
}

RecombinerId recombiner_from_name(const std::string& name) {
  static const std::map<std::string, RecombinerId> table = {
      {"Sum", RecombinerId::Sum},
      {"SumOfSquares", RecombinerId::SumOfSquares},
      {"SumOfPowers", RecombinerId::SumOfPowers},
      {"GeometricMean", RecombinerId::GeometricMean},
      {"Max", RecombinerId::Max},
      {"Min", RecombinerId::Min},
      {"MeanAndVariance", RecombinerId::MeanAndVariance},
      {"ConcatSort", RecombinerId::ConcatSort},
      {"ExpOfSum", RecombinerId::ExpOfSum},
  };
  auto it = table.find(name);
  if (it == table.end())
    fail(errc::invalid_parameter, "unknown recombiner: " + name, "recombiner");
  return it->second;
}

const char* transform_kind_name(TransformKind k) {
  switch (k) {
    case TransformKind::SquareAboutMu: return "SquareAboutMu";
    case TransformKind::PowerNu: return "PowerNu";
    case TransformKind::LogOverNu: return "LogOverNu";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// ThinningPlan

ThinningPlan ThinningPlan::convolution(std::vector<double> eps) {
  ThinningPlan plan;
  plan.K = static_cast<int>(eps.size());
  plan.mode = ThinMode::Convolution;
  plan.weights = std::move(eps);
  return plan;
}

ThinningPlan ThinningPlan::equal_convolution(int K) {
  ThinningPlan plan;
  plan.K = K;
  plan.mode = ThinMode::Convolution;
  plan.weights.assign(static_cast<std::size_t>(K), 1.0 / K);
  plan.weight_fractions.resize(static_cast<std::size_t>(K));
  for (auto& f : plan.weight_fractions) f = Fraction{1, K};
  return plan;
}

const std::vector<double>& ThinningPlan::effective_weights() const { return weights; }

void ThinningPlan::validate() const {
  if (K < 1) fail(errc::invalid_parameter, "plan: K must be >= 1", "K");
  if (!weights.empty()) {
    if (static_cast<int>(weights.size()) != K)
      fail(errc::invalid_parameter, "plan: weights must have length K", "eps");
    double total = 0.0;
    for (double w : weights) {
      if (!(w > 0.0))
        fail(errc::invalid_parameter, "plan: all weights must be positive", "eps");
      total += w;
    }
    if (std::fabs(total - 1.0) > 1e-12)
      fail(errc::invalid_parameter, "plan: weights must sum to 1 within 1e-12",
           "eps");
  }
  if (!weight_fractions.empty() &&
      weight_fractions.size() != static_cast<std::size_t>(K))
    fail(errc::invalid_parameter, "plan: weight fractions must have length K", "eps");
  if (!fold_sizes.empty()) {
    if (static_cast<int>(fold_sizes.size()) != K)
      fail(errc::invalid_parameter, "plan: fold_sizes must have length K",
           "fold_sizes");
    for (int n : fold_sizes)
      if (n < 1)
        fail(errc::invalid_parameter, "plan: fold sizes must be positive",
             "fold_sizes");
  }
}

namespace {

std::vector<double> weights_or_equal(const ThinningPlan& plan) {
  if (!plan.weights.empty()) return plan.weights;
  std::vector<double> eq(static_cast<std::size_t>(plan.K), 1.0 / plan.K);
  return eq;
}

// eps_k * r as validated positive integers; exact when fractions are given.
std::vector<long long> integer_allocations(const ThinningPlan& plan, long long r) {
  const auto eps = weights_or_equal(plan);
  std::vector<long long> out(eps.size());
  long long total = 0;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    long long m;
    if (k < plan.weight_fractions.size() && plan.weight_fractions[k].den > 0) {
      const auto& f = plan.weight_fractions[k];
      if ((f.num * r) % f.den != 0)
        fail(errc::non_integer_allocation,
             "eps_" + std::to_string(k + 1) + " * r = " + std::to_string(f.num) +
                 "/" + std::to_string(f.den) + " * " + std::to_string(r) +
                 " is not an integer",
             "eps");
      m = f.num * r / f.den;
    } else {
      const double raw = eps[k] * static_cast<double>(r);
      m = std::llround(raw);
      if (std::fabs(raw - static_cast<double>(m)) > 1e-9 * std::max(1.0, raw))
        fail(errc::non_integer_allocation,
             "eps_" + std::to_string(k + 1) + " * r is not an integer", "eps");
    }
    if (m < 1)
      fail(errc::non_integer_allocation,
           "eps_" + std::to_string(k + 1) + " * r must be a positive integer",
           "eps");
    total += m;
    out[k] = m;
  }
  if (total != r)
    fail(errc::non_integer_allocation, "allocations do not sum to r", "eps");
  return out;
}

FoldSet identity_foldset(const std::vector<double>& x, Recombiner rec,
                         DistributionSpec fold_spec) {
  FoldSet fs;
  fs.folds = {x};
  fs.recombiner = rec;
  fs.t_value = x;
  fs.fold_specs = {std::move(fold_spec)};
  return fs;
}

}  // namespace

// ---------------------------------------------------------------------------
// recombine

std::vector<double> recombine(const FoldSet& fs) {
  if (fs.folds.empty()) fail(errc::empty_folds, "recombine: no folds");
  const std::size_t dim = fs.folds.front().size();
  for (const auto& f : fs.folds)
    if (f.size() != dim && fs.recombiner.id != RecombinerId::ConcatSort)
      fail(errc::size_mismatch, "recombine: fold dimensions differ");

  switch (fs.recombiner.id) {
    case RecombinerId::Sum: {
      std::vector<double> out(dim, 0.0);
      for (const auto& f : fs.folds)
        for (std::size_t i = 0; i < dim; ++i) out[i] += f[i];
      return out;
    }
    case RecombinerId::SumOfSquares: {
      double acc = 0.0;
      for (const auto& f : fs.folds) acc += f[0] * f[0];
      return {acc};
    }
    case RecombinerId::SumOfPowers: {
      double acc = 0.0;
      for (const auto& f : fs.folds) acc += std::pow(f[0], fs.recombiner.nu);
      return {acc};
    }
    case RecombinerId::GeometricMean: {
      // exp(mean(log)) rather than the K-th root of the product, to avoid
      // overflow/underflow at large K.
      double acc = 0.0;
      for (const auto& f : fs.folds) acc += std::log(f[0]);
      return {std::exp(acc / static_cast<double>(fs.folds.size()))};
    }
    case RecombinerId::Max: {
      double acc = fs.folds[0][0];
      for (const auto& f : fs.folds) acc = std::max(acc, f[0]);
      return {acc};
    }
    case RecombinerId::Min: {
      double acc = fs.folds[0][0];
      for (const auto& f : fs.folds) acc = std::min(acc, f[0]);
      return {acc};
    }
    case RecombinerId::MeanAndVariance: {
      const double n = static_cast<double>(fs.folds.size());
      double mean = 0.0;
      for (const auto& f : fs.folds) mean += f[0];
      mean /= n;
      double ss = 0.0;
      for (const auto& f : fs.folds) ss += (f[0] - mean) * (f[0] - mean);
      return {mean, n > 1 ? ss / (n - 1.0) : 0.0};
    }
    case RecombinerId::ConcatSort: {
      std::vector<double> out;
      for (const auto& f : fs.folds) out.insert(out.end(), f.begin(), f.end());
      std::sort(out.begin(), out.end());
      return out;
    }
    case RecombinerId::ExpOfSum: {
      double acc = 0.0;
      for (const auto& f : fs.folds) acc += f[0];
      return {fs.recombiner.nu * std::exp(acc)};
    }
  }
  fail(errc::invalid_parameter, "recombine: unhandled recombiner");
}

double reconstruction_error(const FoldSet& fs) {
  const auto got = recombine(fs);
  if (got.size() != fs.t_value.size())
    fail(errc::size_mismatch, "reconstruction: t_value size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double scale = std::fabs(fs.t_value[i]);
    const double denom = scale > 0.0 ? scale : 1.0;
    worst = std::max(worst, std::fabs(got[i] - fs.t_value[i]) / denom);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Convolution thinner

namespace {

FoldSet convolution_normal(const std::vector<double>& x, double sigma2,
                           const std::vector<double>& eps, RngState& rng,
                           Family fold_family, int dim) {
  const int K = static_cast<int>(eps.size());
  const std::size_t n = x.size();
  std::vector<std::vector<double>> z(K, std::vector<double>(n));
  for (int k = 0; k < K; ++k) {
    const double sd = std::sqrt(eps[k] * sigma2);
    for (std::size_t i = 0; i < n; ++i) z[k][i] = sd * rng.normal();
  }
  std::vector<double> zsum(n, 0.0);
  for (int k = 0; k < K; ++k)
    for (std::size_t i = 0; i < n; ++i) zsum[i] += z[k][i];

  FoldSet fs;
  fs.folds.assign(K, std::vector<double>(n));
  for (int k = 0; k < K; ++k)
    for (std::size_t i = 0; i < n; ++i)
      fs.folds[k][i] = eps[k] * x[i] + z[k][i] - eps[k] * zsum[i];
  fs.recombiner = {RecombinerId::Sum, 0.0};
  fs.t_value = x;
  for (int k = 0; k < K; ++k)
    fs.fold_specs.push_back(placeholder(fold_family, {{"sigma2", eps[k] * sigma2}},
                                        {"mu"}, dim));
  return fs;
}

std::vector<std::vector<double>> gamma_dirichlet_folds(double x,
                                                       const std::vector<double>& conc,
                                                       RngState& rng) {
  const auto shares = sample_dirichlet(conc, rng);
  std::vector<std::vector<double>> folds(conc.size());
  for (std::size_t k = 0; k < conc.size(); ++k) folds[k] = {x * shares[k]};
  return folds;
}

}  // namespace

FoldSet thin_convolution(const std::vector<double>& x, const DistributionSpec& spec,
                         const ThinningPlan& plan, RngState& rng) {
  plan.validate();
  require_thinnable(spec, ThinMode::Convolution);
  const auto eps = weights_or_equal(plan);
  const int K = plan.K;

  switch (spec.family) {
    case Family::Normal:
    case Family::MultivariateNormalIso: {
      if (static_cast<int>(x.size()) != spec.dim)
        fail(errc::size_mismatch, "thin_convolution: draw dimension mismatch");
      if (K == 1)
        return identity_foldset(
            x, {RecombinerId::Sum, 0.0},
            placeholder(spec.family, {{"sigma2", spec.known("sigma2")}}, {"mu"},
                        spec.dim));
      return convolution_normal(x, spec.known("sigma2"), eps, rng, spec.family,
                                spec.dim);
    }
    case Family::Poisson: {
      const long long count = as_count(x.at(0), "Poisson draw");
      FoldSet fs;
      fs.recombiner = {RecombinerId::Sum, 0.0};
      fs.t_value = {static_cast<double>(count)};
      for (int k = 0; k < K; ++k)
        fs.fold_specs.push_back(placeholder(Family::Poisson, {}, {"rate"}));
      if (K == 1 || count == 0) {
        // x = 0 thins to all-zero folds without consuming randomness.
        fs.folds.assign(static_cast<std::size_t>(K), {0.0});
        if (K == 1) fs.folds[0][0] = static_cast<double>(count);
        return fs;
      }
      const auto counts = sample_multinomial_counts(count, eps, rng);
      for (int k = 0; k < K; ++k)
        fs.folds.push_back({static_cast<double>(counts[k])});
      return fs;
    }
    case Family::Binomial: {
      const long long r = as_count(spec.known("r"), "Binomial r");
      const long long successes = as_count(x.at(0), "Binomial draw");
      if (successes > r)
        fail(errc::out_of_support, "Binomial draw exceeds trial count");
      const auto alloc = integer_allocations(plan, r);
      FoldSet fs;
      fs.recombiner = {RecombinerId::Sum, 0.0};
      fs.t_value = {static_cast<double>(successes)};
      for (int k = 0; k < K; ++k)
        fs.fold_specs.push_back(placeholder(
            Family::Binomial, {{"r", static_cast<double>(alloc[k])}}, {"p"}));
      if (K == 1 || successes == 0) {
        fs.folds.assign(static_cast<std::size_t>(K), {0.0});
        if (K == 1) fs.folds[0][0] = static_cast<double>(successes);
        return fs;
      }
      // Partition of the r labeled trials: sequential hypergeometric draws.
      long long remaining_trials = r;
      long long remaining_successes = successes;
      for (int k = 0; k < K; ++k) {
        long long got;
        if (k + 1 == K) {
          got = remaining_successes;
        } else {
          got = sample_hypergeometric(remaining_trials, remaining_successes,
                                      alloc[k], rng);
        }
        fs.folds.push_back({static_cast<double>(got)});
        remaining_trials -= alloc[k];
        remaining_successes -= got;
      }
      return fs;
    }
    case Family::NegBinomial: {
      // Integer allocations eps_k * r must sum to r, so r itself has to be
      // a positive integer here.
      const long long r = as_count(spec.known("r"), "NegBinomial r");
      const long long failures = as_count(x.at(0), "NegBinomial draw");
      const auto alloc = integer_allocations(plan, r);
      FoldSet fs;
      fs.recombiner = {RecombinerId::Sum, 0.0};
      fs.t_value = {static_cast<double>(failures)};
      for (int k = 0; k < K; ++k)
        fs.fold_specs.push_back(placeholder(
            Family::NegBinomial, {{"r", static_cast<double>(alloc[k])}}, {"p"}));
      if (K == 1 || failures == 0) {
        fs.folds.assign(static_cast<std::size_t>(K), {0.0});
        if (K == 1) fs.folds[0][0] = static_cast<double>(failures);
        return fs;
      }
      // Dirichlet-multinomial conditional with concentrations eps_k * r.
      std::vector<double> conc(alloc.begin(), alloc.end());
      const auto shares = sample_dirichlet(conc, rng);
      const auto counts = sample_multinomial_counts(failures, shares, rng);
      for (int k = 0; k < K; ++k)
        fs.folds.push_back({static_cast<double>(counts[k])});
      return fs;
    }
    case Family::Multinomial: {
      const long long r = as_count(spec.known("r"), "Multinomial r");
      if (static_cast<int>(x.size()) != spec.dim)
        fail(errc::size_mismatch, "thin_convolution: draw dimension mismatch");
      long long total = 0;
      std::vector<long long> counts(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        counts[i] = as_count(x[i], "Multinomial draw");
        total += counts[i];
      }
      if (total != r)
        fail(errc::out_of_support, "Multinomial draw must sum to r");
      const auto alloc = integer_allocations(plan, r);
      FoldSet fs;
      fs.recombiner = {RecombinerId::Sum, 0.0};
      fs.t_value = x;
      for (int k = 0; k < K; ++k)
        fs.fold_specs.push_back(placeholder(
            Family::Multinomial, {{"r", static_cast<double>(alloc[k])}}, {"p"},
            spec.dim));
      if (K == 1) {
        fs.folds = {x};
        return fs;
      }
      // Random partition of the r category-labeled trials.
      std::vector<int> labels;
      labels.reserve(static_cast<std::size_t>(r));
      for (std::size_t c = 0; c < counts.size(); ++c)
        labels.insert(labels.end(), static_cast<std::size_t>(counts[c]),
                      static_cast<int>(c));
      for (std::size_t i = labels.size(); i > 1; --i)
        std::swap(labels[i - 1], labels[rng.uniform_below(i)]);
      std::size_t offset = 0;
      for (int k = 0; k < K; ++k) {
        std::vector<double> fold(x.size(), 0.0);
        for (long long j = 0; j < alloc[k]; ++j)
          fold[static_cast<std::size_t>(labels[offset + j])] += 1.0;
        offset += static_cast<std::size_t>(alloc[k]);
        fs.folds.push_back(std::move(fold));
      }
      return fs;
    }
    case Family::GammaRate: {
      const double alpha = spec.known("shape");
      const double v = x.at(0);
      if (!(v > 0.0))
        fail(errc::out_of_support, "Gamma thinning requires x > 0");
      FoldSet fs;
      fs.recombiner = {RecombinerId::Sum, 0.0};
      fs.t_value = {v};
      for (int k = 0; k < K; ++k)
        fs.fold_specs.push_back(
            placeholder(Family::GammaRate, {{"shape", eps[k] * alpha}}, {"rate"}));
      if (K == 1) {
        fs.folds = {{v}};
        return fs;
      }
      std::vector<double> conc(eps.size());
      for (std::size_t k = 0; k < eps.size(); ++k) conc[k] = eps[k] * alpha;
      fs.folds = gamma_dirichlet_folds(v, conc, rng);
      return fs;
    }
    default:
      fail(errc::unsupported_family,
           std::string("thin_convolution does not support family ") +
               family_name(spec.family),
           "family");
  }
}

// ---------------------------------------------------------------------------
// Sphere projection thinner: Gamma(K/2, theta) -> K centred normals.

FoldSet thin_sphere(double x, const DistributionSpec& spec, const ThinningPlan& plan,
                    RngState& rng) {
  plan.validate();
  const int K = plan.K;
  const double shape = spec.known("shape");
  if (std::fabs(shape - 0.5 * K) > 1e-12)
    fail(errc::shape_mismatch,
         "thin_sphere requires shape = K/2 (got shape=" + std::to_string(shape) +
             ", K=" + std::to_string(K) + ")",
         "shape");
  if (x < 0.0) fail(errc::out_of_support, "thin_sphere requires x >= 0");

  FoldSet fs;
  fs.recombiner = {RecombinerId::SumOfSquares, 0.0};
  fs.t_value = {x};
  // mu is known (0); the unknown is the variance 1/(2 theta).
  for (int k = 0; k < K; ++k)
    fs.fold_specs.push_back(
        placeholder(Family::Normal, {{"mu", 0.0}}, {"sigma2"}));
  if (x == 0.0) {
    fs.folds.assign(K, {0.0});
    return fs;
  }
  std::vector<double> z(static_cast<std::size_t>(K));
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& v : z) {
      v = rng.normal();
      norm2 += v * v;
    }
  } while (norm2 == 0.0);
  const double scale = std::sqrt(x / norm2);
  for (int k = 0; k < K; ++k) fs.folds.push_back({z[static_cast<std::size_t>(k)] * scale});
  return fs;
}

// ---------------------------------------------------------------------------
// Weibull-power thinner: Gamma(K, theta) -> K Weibull(theta^(-1/nu), nu).

FoldSet thin_weibull(double x, const DistributionSpec& spec, const ThinningPlan& plan,
                     RngState& rng) {
  plan.validate();
  const int K = plan.K;
  const double shape = spec.known("shape");
  if (std::fabs(shape - static_cast<double>(K)) > 1e-12)
    fail(errc::shape_mismatch,
         "thin_weibull requires shape = K (got shape=" + std::to_string(shape) +
             ", K=" + std::to_string(K) + ")",
         "shape");
  const double nu = plan.nu;
  if (!(nu > 0.0)) fail(errc::invalid_nu, "thin_weibull requires nu > 0", "nu");
  if (!(x > 0.0)) fail(errc::out_of_support, "thin_weibull requires x > 0");

  // Gamma-thin x with equal weights into exponential-shape folds, then take
  // the 1/nu power of each.
  const DistributionSpec inner =
      placeholder(Family::GammaRate, {{"shape", static_cast<double>(K)}}, {"rate"});
  FoldSet gamma_folds =
      thin_convolution({x}, inner, ThinningPlan::equal_convolution(K), rng);

  FoldSet fs;
  fs.recombiner = {RecombinerId::SumOfPowers, nu};
  fs.t_value = {x};
  for (int k = 0; k < K; ++k) {
    fs.folds.push_back({std::pow(gamma_folds.folds[static_cast<std::size_t>(k)][0],
                                 1.0 / nu)});
    fs.fold_specs.push_back(placeholder(Family::Weibull, {{"nu", nu}}, {"scale"}));
  }
  return fs;
}

// ---------------------------------------------------------------------------
// Geometric-mean thinners (MCMC).

namespace {

FoldSet finish_geometric_mean(double x, int K, std::vector<double> free_coords,
                              std::vector<DistributionSpec> fold_specs) {
  // The first K-1 folds are the sampled coordinates; the last one is pinned
  // by the geometric-mean constraint.
  double log_prod = 0.0;
  for (double v : free_coords) log_prod += std::log(v);
  const double last = std::exp(static_cast<double>(K) * std::log(x) - log_prod);
  FoldSet fs;
  for (double v : free_coords) fs.folds.push_back({v});
  fs.folds.push_back({last});
  fs.recombiner = {RecombinerId::GeometricMean, 0.0};
  fs.t_value = {x};
  fs.fold_specs = std::move(fold_specs);
  return fs;
}

}  // namespace

FoldSet thin_beta(double x, const DistributionSpec& spec, const ThinningPlan& plan,
                  const McmcConfig& mcmc, RngState& rng) {
  plan.validate();
  const int K = plan.K;
  if (!(x > 0.0 && x < 1.0))
    fail(errc::out_of_support, "thin_beta requires x in (0, 1)");
  const double beta = spec.known("b");

  std::vector<DistributionSpec> fold_specs;
  for (int k = 0; k < K; ++k)
    fold_specs.push_back(placeholder(Family::Beta, {{"b", beta / K}}, {"a"}));
  if (K == 1) return identity_foldset({x}, {RecombinerId::GeometricMean, 0.0},
                                      fold_specs[0]);

  const double log_t_pow_k = static_cast<double>(K) * std::log(x);

  // Conditional density of the K-1 free coordinates given geometric mean x;
  // theta cancels by sufficiency, only beta enters. The chain runs in logit
  // coordinates z_k = logit(x_k): the conditional mass concentrates within
  // O(t^K) of the support corner when t is small, where any fixed-box
  // independence proposal stalls, while a random walk on the unconstrained
  // scale keeps mixing. The per-coordinate Jacobian x(1-x) folds the -1
  // exponents away.
  const double beta_over_k = beta / K;
  std::vector<double> exponents(static_cast<std::size_t>(K - 1));
  for (int k = 0; k < K - 1; ++k)
    exponents[static_cast<std::size_t>(k)] = static_cast<double>(k + 1 - K) / K;
  const auto log_target = [&](const std::vector<double>& z) -> double {
    double log_prod = 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < static_cast<std::size_t>(K); ++k) {
      const double zk = z[k];
      // log x = -log1p(exp(-z)), log(1 - x) = -log1p(exp(z)), stably.
      const double log_xk = zk >= 0.0 ? -std::log1p(std::exp(-zk))
                                      : zk - std::log1p(std::exp(zk));
      const double log_1mxk = zk >= 0.0 ? -zk - std::log1p(std::exp(-zk))
                                        : -std::log1p(std::exp(zk));
      acc += exponents[k] * log_xk + beta_over_k * log_1mxk;
      log_prod += log_xk;
    }
    const double log_last = log_t_pow_k - log_prod;
    if (!(log_last < 0.0)) return kNegInf;  // implied fold must stay in (0,1)
    acc += (beta_over_k - 1.0) * std::log1p(-std::exp(log_last));
    return acc;
  };

  McmcConfig cfg = mcmc;
  cfg.proposal = ProposalKind::GaussianRandomWalk;
  if (cfg.scale.size() != static_cast<std::size_t>(K - 1)) {
    const double step =
        2.4 / std::sqrt(static_cast<double>(K - 1) * (1.0 + beta / K));
    cfg.scale.assign(static_cast<std::size_t>(K - 1), step);
  }
  cfg.adapt = true;

  std::vector<double> init(static_cast<std::size_t>(K - 1),
                           std::log(x / (1.0 - x)));
  auto [state, diag] = metropolis_sample(log_target, std::move(init), cfg, rng);
  if (diag.n_accepted == 0 && diag.n_proposed >= 100)
    fail(errc::mcmc_non_convergence,
         "thin_beta: chain accepted no proposals in " +
             std::to_string(diag.n_proposed) + " steps");
  std::vector<double> coords(state.size());
  for (std::size_t i = 0; i < state.size(); ++i)
    coords[i] = 1.0 / (1.0 + std::exp(-state[i]));
  return finish_geometric_mean(x, K, std::move(coords), std::move(fold_specs));
}

FoldSet thin_gamma_shape(double x, const DistributionSpec& spec,
                         const ThinningPlan& plan, const McmcConfig& mcmc,
                         RngState& rng) {
  plan.validate();
  const int K = plan.K;
  if (!(x > 0.0)) fail(errc::out_of_support, "thin_gamma_shape requires x > 0");
  const double beta = spec.known("rate");

  std::vector<DistributionSpec> fold_specs;
  for (int k = 0; k < K; ++k)
    fold_specs.push_back(
        placeholder(Family::GammaRate, {{"rate", beta / K}}, {"shape"}));
  if (K == 1) return identity_foldset({x}, {RecombinerId::GeometricMean, 0.0},
                                      fold_specs[0]);

  const double log_t_pow_k = static_cast<double>(K) * std::log(x);
  const double rate_over_k = beta / K;

  // Random-walk Metropolis on z_k = log x_k; the Jacobian folds the -1 in
  // each exponent away, leaving (k-K)/K * z_k.
  const auto log_target = [&](const std::vector<double>& z) -> double {
    double z_sum = 0.0;
    double acc = 0.0;
    double exp_sum = 0.0;
    for (int k = 0; k < K - 1; ++k) {
      const double zk = z[static_cast<std::size_t>(k)];
      acc += (static_cast<double>(k + 1 - K) / K) * zk;
      exp_sum += std::exp(zk);
      z_sum += zk;
    }
    const double last = std::exp(log_t_pow_k - z_sum);
    if (!std::isfinite(last)) return kNegInf;
    return acc - rate_over_k * (exp_sum + last);
  };

  McmcConfig cfg = mcmc;
  cfg.proposal = ProposalKind::GaussianRandomWalk;
  if (cfg.scale.size() != static_cast<std::size_t>(K - 1)) {
    const double step =
        2.4 / std::sqrt(static_cast<double>(K - 1) * (1.0 + beta / K));
    cfg.scale.assign(static_cast<std::size_t>(K - 1), step);
  }
  cfg.adapt = true;

  std::vector<double> init(static_cast<std::size_t>(K - 1), std::log(x));
  auto [state, diag] = metropolis_sample(log_target, std::move(init), cfg, rng);
  if (diag.n_accepted == 0 && diag.n_proposed >= 100)
    fail(errc::mcmc_non_convergence,
         "thin_gamma_shape: chain accepted no proposals in " +
             std::to_string(diag.n_proposed) + " steps");
  std::vector<double> coords(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) coords[i] = std::exp(state[i]);
  return finish_geometric_mean(x, K, std::move(coords), std::move(fold_specs));
}

// ---------------------------------------------------------------------------
// Truncated-support thinners.

FoldSet thin_max(double x, const DistributionSpec& spec, const ThinningPlan& plan,
                 RngState& rng) {
  plan.validate();
  const int K = plan.K;
  if (spec.family != Family::UniformScale && spec.family != Family::ScaledBeta)
    fail(errc::unsupported_family,
         std::string("thin_max supports UniformScale and ScaledBeta, not ") +
             family_name(spec.family),
         "family");
  const double alpha = spec.family == Family::UniformScale
                           ? 1.0
                           : spec.known("alpha");
  if (!(x > 0.0)) fail(errc::out_of_support, "thin_max requires x > 0");

  std::vector<DistributionSpec> fold_specs;
  for (int k = 0; k < K; ++k)
    fold_specs.push_back(
        placeholder(Family::ScaledBeta, {{"alpha", alpha / K}}, {"scale"}));
  if (K == 1)
    return identity_foldset({x}, {RecombinerId::Max, 0.0}, fold_specs[0]);

  const std::size_t holder = rng.uniform_below(static_cast<std::uint64_t>(K));
  FoldSet fs;
  fs.recombiner = {RecombinerId::Max, 0.0};
  fs.t_value = {x};
  fs.fold_specs = std::move(fold_specs);
  for (int k = 0; k < K; ++k) {
    if (static_cast<std::size_t>(k) == holder) {
      fs.folds.push_back({x});
    } else {
      // x * Beta(alpha/K, 1) by inversion.
      fs.folds.push_back(
          {x * std::pow(rng.uniform01(), static_cast<double>(K) / alpha)});
    }
  }
  return fs;
}

FoldSet thin_min(double x, const DistributionSpec& spec, const ThinningPlan& plan,
                 RngState& rng) {
  plan.validate();
  const int K = plan.K;
  if (spec.family != Family::ShiftedExponential)
    fail(errc::unsupported_family,
         std::string("thin_min supports ShiftedExponential, not ") +
             family_name(spec.family),
         "family");
  const double rate = spec.known("rate");
  if (!(rate > 0.0))
    fail(errc::invalid_parameter, "thin_min requires rate > 0", "rate");

  std::vector<DistributionSpec> fold_specs;
  for (int k = 0; k < K; ++k)
    fold_specs.push_back(
        placeholder(Family::ShiftedExponential, {{"rate", rate / K}}, {"shift"}));
  if (K == 1)
    return identity_foldset({x}, {RecombinerId::Min, 0.0}, fold_specs[0]);

  const std::size_t holder = rng.uniform_below(static_cast<std::uint64_t>(K));
  FoldSet fs;
  fs.recombiner = {RecombinerId::Min, 0.0};
  fs.t_value = {x};
  fs.fold_specs = std::move(fold_specs);
  for (int k = 0; k < K; ++k) {
    if (static_cast<std::size_t>(k) == holder) {
      fs.folds.push_back({x});
    } else {
      fs.folds.push_back({x + rng.exponential() * static_cast<double>(K) / rate});
    }
  }
  return fs;
}

// ---------------------------------------------------------------------------
// Indirect thinners.

FoldSet thin_mean_variance(const std::vector<double>& x, const ThinningPlan& plan,
                           RngState& rng) {
  plan.validate();
  const std::size_t n = x.size();
  if (n < 2)
    fail(errc::invalid_parameter, "thin_mean_variance requires n >= 2", "x");
  if (plan.K != static_cast<int>(n))
    fail(errc::size_mismatch, "thin_mean_variance requires plan K = n", "K");

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double variance = ss / static_cast<double>(n - 1);

  FoldSet fs;
  fs.recombiner = {RecombinerId::MeanAndVariance, 0.0};
  fs.t_value = {mean, variance};
  fs.indirect_stat = std::vector<double>{mean, variance};
  for (std::size_t k = 0; k < n; ++k)
    fs.fold_specs.push_back(placeholder(Family::Normal, {}, {"mu", "sigma2"}));

  if (variance == 0.0) {
    // Degenerate: the sphere has radius zero, the input is the only point.
    fs.degenerate = true;
    for (double v : x) fs.folds.push_back({v});
    return fs;
  }

  // Uniform draw on the sphere {mean = t1, var = t2}: centre a standard
  // normal vector and rescale its norm.
  std::vector<double> z(n);
  double znorm2;
  do {
    double zbar = 0.0;
    for (auto& v : z) {
      v = rng.normal();
      zbar += v;
    }
    zbar /= static_cast<double>(n);
    znorm2 = 0.0;
    for (auto& v : z) {
      v -= zbar;
      znorm2 += v * v;
    }
  } while (znorm2 == 0.0);
  const double target_norm = std::sqrt(static_cast<double>(n - 1) * variance);
  const double rescale = target_norm / std::sqrt(znorm2);
  for (double v : z) fs.folds.push_back({mean + v * rescale});
  return fs;
}

FoldSet thin_split(const std::vector<double>& x, const ThinningPlan& plan,
                   RngState& rng) {
  plan.validate();
  const std::size_t n = x.size();
  if (plan.fold_sizes.empty())
    fail(errc::invalid_parameter, "thin_split requires fold sizes", "fold_sizes");
  long long total = 0;
  for (int m : plan.fold_sizes) total += m;
  if (total != static_cast<long long>(n))
    fail(errc::size_mismatch, "thin_split: fold sizes must sum to n", "fold_sizes");

  FoldSet fs;
  fs.recombiner = {RecombinerId::ConcatSort, 0.0};
  std::vector<double> sorted(x);
  std::sort(sorted.begin(), sorted.end());
  fs.t_value = sorted;
  fs.indirect_stat = sorted;

  if (plan.K == 1) {
    fs.folds = {x};  // identity split keeps the original order
    return fs;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i)
    std::swap(order[i - 1], order[rng.uniform_below(i)]);
  std::size_t offset = 0;
  for (int k = 0; k < plan.K; ++k) {
    const std::size_t m = static_cast<std::size_t>(plan.fold_sizes[static_cast<std::size_t>(k)]);
    std::vector<double> fold(m);
    for (std::size_t j = 0; j < m; ++j) fold[j] = x[order[offset + j]];
    offset += m;
    fs.folds.push_back(std::move(fold));
  }
  return fs;
}

FoldSet thin_transformed(double x, const Transform& transform,
                         const ThinningPlan& inner_plan, RngState& rng) {
  inner_plan.validate();
  double stat;
  double inner_shape;
  switch (transform.kind) {
    case TransformKind::SquareAboutMu:
      stat = (x - transform.param) * (x - transform.param);
      inner_shape = 0.5;
      break;
    case TransformKind::PowerNu:
      if (!(transform.param > 0.0))
        fail(errc::invalid_nu, "PowerNu requires nu > 0", "nu");
      if (x < 0.0)
        fail(errc::transform_domain_error, "PowerNu requires x >= 0");
      stat = std::pow(x, transform.param);
      inner_shape = 1.0;
      break;
    case TransformKind::LogOverNu:
      if (!(transform.param > 0.0))
        fail(errc::invalid_nu, "LogOverNu requires nu > 0", "nu");
      if (x < transform.param)
        fail(errc::transform_domain_error,
             "LogOverNu requires x >= nu (input below the support bound)");
      stat = std::log(x / transform.param);
      inner_shape = 1.0;
      break;
    default:
      fail(errc::invalid_parameter, "unknown transform");
  }

  const auto eps = weights_or_equal(inner_plan);
  FoldSet fs;
  fs.recombiner = {RecombinerId::Sum, 0.0};
  fs.t_value = {stat};
  fs.indirect_stat = std::vector<double>{stat};
  for (int k = 0; k < inner_plan.K; ++k)
    fs.fold_specs.push_back(placeholder(
        Family::GammaRate, {{"shape", eps[static_cast<std::size_t>(k)] * inner_shape}},
        {"rate"}));

  if (stat == 0.0) {
    fs.folds.assign(static_cast<std::size_t>(inner_plan.K), {0.0});
    fs.degenerate = true;
    return fs;
  }
  if (inner_plan.K == 1) {
    fs.folds = {{stat}};
    return fs;
  }
  std::vector<double> conc(eps.size());
  for (std::size_t k = 0; k < eps.size(); ++k) conc[k] = eps[k] * inner_shape;
  fs.folds = gamma_dirichlet_folds(stat, conc, rng);
  return fs;
}

// ---------------------------------------------------------------------------
// (U, V) decomposition.

std::pair<std::vector<double>, std::vector<double>> gaussian_uv_decompose(
    const std::vector<double>& x, double gamma, RngState& rng) {
  if (!(gamma > 0.0))
    fail(errc::invalid_gamma, "gaussian_uv_decompose requires gamma > 0", "gamma");
  const std::size_t n = x.size();
  const double eps1 = 1.0 / (1.0 + gamma);
  const double eps2 = 1.0 - eps1;
  // Drawing the same per-fold noise as thin_convolution(Normal, (eps1, eps2))
  // and mapping W = gamma Z_1 - Z_2 keeps the two constructions aligned on a
  // shared stream: eps1 U = eps1 x + (1-eps1) Z_1 - eps1 Z_2 = X^(1).
  std::vector<double> z1(n), z2(n);
  const double sd1 = std::sqrt(eps1);
  const double sd2 = std::sqrt(eps2);
  for (auto& v : z1) v = sd1 * rng.normal();
  for (auto& v : z2) v = sd2 * rng.normal();
  std::vector<double> u(n), v_out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = gamma * z1[i] - z2[i];
    u[i] = x[i] + w;
    v_out[i] = x[i] - w / gamma;
  }
  return {u, v_out};
}

// ---------------------------------------------------------------------------
// Dispatch, registry, fold marginals.

ThinMode default_mode_for(Family f) {
  switch (f) {
    case Family::Normal:
    case Family::MultivariateNormalIso:
    case Family::Poisson:
    case Family::NegBinomial:
    case Family::Binomial:
    case Family::Multinomial:
    case Family::GammaRate:
      return ThinMode::Convolution;
    case Family::GammaShape:
      return ThinMode::GeometricMeanGamma;
    case Family::Beta:
      return ThinMode::GeometricMeanBeta;
    case Family::Weibull:
      return ThinMode::Transform;
    case Family::Pareto:
      return ThinMode::Transform;
    case Family::UniformScale:
    case Family::ScaledBeta:
      return ThinMode::MaxSupport;
    case Family::ShiftedExponential:
      return ThinMode::MinSupport;
    default:
      fail(errc::unsupported_family,
           std::string("no thinner is registered for family ") + family_name(f),
           "family");
  }
}

void require_thinnable(const DistributionSpec& spec, ThinMode mode) {
  if (spec.family == Family::Categorical)
    fail(errc::unsupported_family,
         "the Categorical family cannot be thinned by any function: like the "
         "Bernoulli, a categorical variable is not the sum of independent "
         "non-constant variables, so no sufficient recombiner exists",
         "family");
  if (spec.family == Family::Binomial && mode == ThinMode::Convolution &&
      !spec.unknown.count("r") && spec.has("r") && spec.param("r") == 1.0)
    fail(errc::unsupported_family,
         "Binomial with r = 1 is the Bernoulli family, which cannot be "
         "thinned by any function: a Bernoulli variable is not the sum of "
         "independent non-constant variables",
         "family");
  (void)mode;
}

FoldSet thin_dispatch(const std::vector<double>& x, const DistributionSpec& spec,
                      const ThinningPlan& plan, const McmcConfig& mcmc,
                      RngState& rng) {
  require_thinnable(spec, plan.mode);
  switch (plan.mode) {
    case ThinMode::Convolution:
      return thin_convolution(x, spec, plan, rng);
    case ThinMode::SphereProjection:
      return thin_sphere(x.at(0), spec, plan, rng);
    case ThinMode::WeibullPower:
      return thin_weibull(x.at(0), spec, plan, rng);
    case ThinMode::GeometricMeanBeta:
      return thin_beta(x.at(0), spec, plan, mcmc, rng);
    case ThinMode::GeometricMeanGamma:
      return thin_gamma_shape(x.at(0), spec, plan, mcmc, rng);
    case ThinMode::MaxSupport:
      return thin_max(x.at(0), spec, plan, rng);
    case ThinMode::MinSupport:
      return thin_min(x.at(0), spec, plan, rng);
    case ThinMode::MeanVariance:
      return thin_mean_variance(x, plan, rng);
    case ThinMode::SampleSplit:
      return thin_split(x, plan, rng);
    case ThinMode::Transform: {
      Transform tr;
      switch (spec.family) {
        case Family::Normal:
          tr = {TransformKind::SquareAboutMu, spec.known("mu")};
          break;
        case Family::Weibull:
          tr = {TransformKind::PowerNu, spec.known("nu")};
          break;
        case Family::Pareto:
          tr = {TransformKind::LogOverNu, spec.known("nu")};
          break;
        default:
          fail(errc::unsupported_family,
               std::string("Transform mode does not support family ") +
                   family_name(spec.family),
               "family");
      }
      return thin_transformed(x.at(0), tr, plan, rng);
    }
  }
  fail(errc::invalid_parameter, "thin_dispatch: unhandled mode");
}

std::vector<DistributionSpec> fold_marginals(const DistributionSpec& truth,
                                             const ThinningPlan& plan) {
  const int K = plan.K;
  std::vector<double> eps = plan.weights;
  if (eps.empty()) eps.assign(static_cast<std::size_t>(K), 1.0 / K);
  std::vector<DistributionSpec> out;
  out.reserve(static_cast<std::size_t>(K));

  switch (plan.mode) {
    case ThinMode::Convolution: {
      switch (truth.family) {
        case Family::Normal:
        case Family::MultivariateNormalIso:
          for (int k = 0; k < K; ++k)
            out.push_back(make_spec(truth.family,
                                    {{"mu", eps[static_cast<std::size_t>(k)] * truth.param("mu")},
                                     {"sigma2", eps[static_cast<std::size_t>(k)] * truth.param("sigma2")}},
                                    {}, truth.dim));
          return out;
        case Family::Poisson:
          for (int k = 0; k < K; ++k)
            out.push_back(make_spec(Family::Poisson,
                                    {{"rate", eps[static_cast<std::size_t>(k)] * truth.param("rate")}}));
          return out;
        case Family::NegBinomial:
          for (int k = 0; k < K; ++k)
            out.push_back(make_spec(Family::NegBinomial,
                                    {{"r", eps[static_cast<std::size_t>(k)] * truth.param("r")},
                                     {"p", truth.param("p")}}));
          return out;
        case Family::Binomial:
          for (int k = 0; k < K; ++k)
            out.push_back(make_spec(Family::Binomial,
                                    {{"r", std::round(eps[static_cast<std::size_t>(k)] * truth.param("r"))},
                                     {"p", truth.param("p")}}));
          return out;
        case Family::Multinomial:
          for (int k = 0; k < K; ++k) {
            DistributionSpec s = truth;
            s.unknown.clear();
            s.params["r"] = std::round(eps[static_cast<std::size_t>(k)] * truth.param("r"));
            out.push_back(std::move(s));
          }
          return out;
        case Family::GammaRate:
          for (int k = 0; k < K; ++k)
            out.push_back(make_spec(Family::GammaRate,
                                    {{"shape", eps[static_cast<std::size_t>(k)] * truth.param("shape")},
                                     {"rate", truth.param("rate")}}));
          return out;
        default:
          fail(errc::unsupported_family, "fold_marginals: unsupported convolution family");
      }
    }
    case ThinMode::SphereProjection:
      for (int k = 0; k < K; ++k)
        out.push_back(make_spec(Family::Normal,
                                {{"mu", 0.0}, {"sigma2", 0.5 / truth.param("rate")}}));
      return out;
    case ThinMode::WeibullPower:
      for (int k = 0; k < K; ++k)
        out.push_back(make_spec(
            Family::Weibull,
            {{"scale", std::pow(truth.param("rate"), -1.0 / plan.nu)}, {"nu", plan.nu}}));
      return out;
    case ThinMode::GeometricMeanBeta:
      for (int k = 0; k < K; ++k)
        out.push_back(make_spec(Family::Beta,
                                {{"a", truth.param("a") / K + static_cast<double>(k) / K},
                                 {"b", truth.param("b") / K}}));
      return out;
    case ThinMode::GeometricMeanGamma:
      for (int k = 0; k < K; ++k)
        out.push_back(make_spec(Family::GammaRate,
                                {{"shape", truth.param("shape") / K + static_cast<double>(k) / K},
                                 {"rate", truth.param("rate") / K}}));
      return out;
    case ThinMode::MaxSupport: {
      const double alpha =
          truth.family == Family::UniformScale ? 1.0 : truth.param("alpha");
      for (int k = 0; k < K; ++k)
        out.push_back(make_spec(Family::ScaledBeta,
                                {{"scale", truth.param("scale")}, {"alpha", alpha / K}}));
      return out;
    }
    case ThinMode::MinSupport:
      for (int k = 0; k < K; ++k)
        out.push_back(make_spec(Family::ShiftedExponential,
                                {{"shift", truth.param("shift")},
                                 {"rate", truth.param("rate") / K}}));
      return out;
    case ThinMode::MeanVariance:
      for (int k = 0; k < K; ++k)
        out.push_back(make_spec(Family::Normal,
                                {{"mu", truth.param("mu")},
                                 {"sigma2", truth.param("sigma2")}}));
      return out;
    case ThinMode::SampleSplit:
      // Folds are subsamples from the original family itself.
      for (int k = 0; k < K; ++k) {
        DistributionSpec s = truth;
        s.unknown.clear();
        out.push_back(std::move(s));
      }
      return out;
    case ThinMode::Transform: {
      double rate;
      switch (truth.family) {
        case Family::Normal:
          rate = 0.5 / truth.param("sigma2");
          break;
        case Family::Weibull:
          rate = std::pow(truth.param("scale"), -truth.param("nu"));
          break;
        case Family::Pareto:
          rate = truth.param("shape");
          break;
        default:
          fail(errc::unsupported_family, "fold_marginals: unsupported transform family");
      }
      const double inner_shape = truth.family == Family::Normal ? 0.5 : 1.0;
      for (int k = 0; k < K; ++k)
        out.push_back(make_spec(Family::GammaRate,
                                {{"shape", eps[static_cast<std::size_t>(k)] * inner_shape},
                                 {"rate", rate}}));
      return out;
    }
  }
  fail(errc::invalid_parameter, "fold_marginals: unhandled mode");
}

}  // namespace thinning
