#include "thinning/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thinning/errors.hpp"
#include "thinning/special.hpp"

namespace thinning {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_nonneg_integer(double x, double tol = 1e-9) {
  return x >= -tol && std::fabs(x - std::llround(x)) <= tol;
}

void require(bool ok, const std::string& message, const std::string& field) {
  if (!ok) throw Error(errc::invalid_parameter, message, field);
}
}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::Normal: return "Normal";
    case Family::MultivariateNormalIso: return "MultivariateNormalIso";
    case Family::Poisson: return "Poisson";
    case Family::NegBinomial: return "NegBinomial";
    case Family::Binomial: return "Binomial";
    case Family::Multinomial: return "Multinomial";
    case Family::GammaRate: return "GammaRate";
    case Family::GammaShape: return "GammaShape";
    case Family::Beta: return "Beta";
    case Family::Weibull: return "Weibull";
    case Family::Pareto: return "Pareto";
    case Family::UniformScale: return "UniformScale";
    case Family::ScaledBeta: return "ScaledBeta";
    case Family::ShiftedExponential: return "ShiftedExponential";
    case Family::Exponential: return "Exponential";
    case Family::Dirichlet: return "Dirichlet";
    case Family::Hypergeometric: return "Hypergeometric";
    case Family::DirichletMultinomial: return "DirichletMultinomial";
    case Family::Categorical: return "Categorical";
  }
  return "Unknown";
}

Family family_from_name(const std::string& name) {
  static const std::map<std::string, Family> table = {
      {"Normal", Family::Normal},
      {"MultivariateNormalIso", Family::MultivariateNormalIso},
      {"Poisson", Family::Poisson},
      {"NegBinomial", Family::NegBinomial},
      {"Binomial", Family::Binomial},
      {"Multinomial", Family::Multinomial},
      {"GammaRate", Family::GammaRate},
      {"GammaShape", Family::GammaShape},
      {"Beta", Family::Beta},
      {"Weibull", Family::Weibull},
      {"Pareto", Family::Pareto},
      {"UniformScale", Family::UniformScale},
      {"ScaledBeta", Family::ScaledBeta},
      {"ShiftedExponential", Family::ShiftedExponential},
      {"Exponential", Family::Exponential},
      {"Dirichlet", Family::Dirichlet},
      {"Hypergeometric", Family::Hypergeometric},
      {"DirichletMultinomial", Family::DirichletMultinomial},
      {"Categorical", Family::Categorical},
  };
  auto it = table.find(name);
  if (it == table.end()) {
    // Families with documented negative results get a dedicated message.
    if (name == "Bernoulli")
      fail(errc::unsupported_family,
           "the Bernoulli family cannot be thinned by any function: a "
           "Bernoulli variable is not the sum of independent non-constant "
           "variables, so no sufficient recombiner exists",
           "family");
    if (name == "Cauchy")
      fail(errc::unsupported_family,
           "the Cauchy family cannot be thinned by addition: the sum of two "
           "Cauchy halves is not sufficient for (location, scale), so the "
           "conditional law would depend on the unknown parameters",
           "family");
    fail(errc::invalid_parameter, "unknown family name: " + name, "family");
  }
  return it->second;
}

double DistributionSpec::param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end())
    throw Error(errc::invalid_parameter,
                std::string(family_name(family)) + " is missing parameter '" +
                    name + "'",
                name);
  return it->second;
}

double DistributionSpec::known(const std::string& name) const {
  if (unknown.count(name))
    throw Error(errc::unknown_required_parameter,
                "parameter '" + name + "' of " + family_name(family) +
                    " is declared unknown and may not be read by a thinner",
                name);
  return param(name);
}

bool DistributionSpec::has(const std::string& name) const {
  return params.count(name) != 0;
}

std::vector<double> DistributionSpec::indexed(const std::string& prefix) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(dim));
  for (int i = 1; i <= dim; ++i) out.push_back(param(prefix + std::to_string(i)));
  return out;
}

DistributionSpec DistributionSpec::thinning_view() const {
  DistributionSpec view = *this;
  for (const auto& name : unknown) {
    auto it = view.params.find(name);
    if (it != view.params.end()) it->second = kNaN;
  }
  return view;
}

void DistributionSpec::validate() const {
  const auto positive = [&](const char* name) {
    if (unknown.count(name)) return;
    require(param(name) > 0.0,
            std::string(family_name(family)) + ": '" + name +
                "' must be strictly positive",
            name);
  };
  const auto prob = [&](const std::string& name) {
    if (unknown.count(name)) return;
    const double p = param(name);
    require(p > 0.0 && p < 1.0,
            std::string(family_name(family)) + ": '" + name +
                "' must lie in (0, 1)",
            name);
  };
  const auto count = [&](const char* name) {
    if (unknown.count(name)) return;
    require(is_nonneg_integer(param(name)) && param(name) >= 0,
            std::string(family_name(family)) + ": '" + name +
                "' must be a nonnegative integer",
            name);
  };
  require(dim >= 1, "dim must be a positive integer", "dim");

  switch (family) {
    case Family::Normal:
    case Family::MultivariateNormalIso:
      if (!unknown.count("sigma2"))
        require(param("sigma2") >= 0.0, "variance must be nonnegative", "sigma2");
      break;
    case Family::Poisson:
      positive("rate");
      break;
    case Family::NegBinomial:
      positive("r");
      prob("p");
      break;
    case Family::Binomial:
      count("r");
      prob("p");
      break;
    case Family::Multinomial: {
      count("r");
      double total = 0.0;
      for (int i = 1; i <= dim; ++i) {
        prob("p" + std::to_string(i));
        total += param("p" + std::to_string(i));
      }
      require(std::fabs(total - 1.0) <= 1e-12,
              "Multinomial probabilities must sum to 1 within 1e-12", "p");
      break;
    }
    case Family::GammaRate:
    case Family::GammaShape:
      positive("shape");
      positive("rate");
      break;
    case Family::Beta:
      positive("a");
      positive("b");
      break;
    case Family::Weibull:
      positive("scale");
      positive("nu");
      break;
    case Family::Pareto:
      positive("nu");
      positive("shape");
      break;
    case Family::UniformScale:
      positive("scale");
      break;
    case Family::ScaledBeta:
      positive("scale");
      positive("alpha");
      break;
    case Family::ShiftedExponential:
      positive("rate");
      if (!unknown.count("shift")) param("shift");
      break;
    case Family::Exponential:
      positive("rate");
      break;
    case Family::Dirichlet:
      for (int i = 1; i <= dim; ++i) positive(("a" + std::to_string(i)).c_str());
      break;
    case Family::Hypergeometric: {
      count("N");
      count("K");
      count("n");
      require(param("K") <= param("N") && param("n") <= param("N"),
              "Hypergeometric: K and n must not exceed N", "N");
      break;
    }
    case Family::DirichletMultinomial:
      count("n");
      for (int i = 1; i <= dim; ++i) positive(("a" + std::to_string(i)).c_str());
      break;
    case Family::Categorical: {
      double total = 0.0;
      for (int i = 1; i <= dim; ++i) {
        prob("p" + std::to_string(i));
        total += param("p" + std::to_string(i));
      }
      require(std::fabs(total - 1.0) <= 1e-12,
              "Categorical probabilities must sum to 1 within 1e-12", "p");
      break;
    }
  }
}

DistributionSpec make_spec(Family f,
                           std::initializer_list<std::pair<const char*, double>> params,
                           std::initializer_list<const char*> unknown, int dim) {
  DistributionSpec spec;
  spec.family = f;
  spec.dim = dim;
  for (const auto& [k, v] : params) spec.params[k] = v;
  for (const char* u : unknown) spec.unknown.insert(u);
  return spec;
}

bool is_discrete(Family f) {
  switch (f) {
    case Family::Poisson:
    case Family::NegBinomial:
    case Family::Binomial:
    case Family::Multinomial:
    case Family::Hypergeometric:
    case Family::DirichletMultinomial:
    case Family::Categorical:
      return true;
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Primitive samplers.

long long sample_poisson(double mean, RngState& rng) {
  if (mean < 0.0) fail(errc::domain_error, "sample_poisson: negative mean");
  if (mean == 0.0) return 0;
  if (mean < 30.0) {
    // Multiplication method.
    const double limit = std::exp(-mean);
    long long k = 0;
    double prod = rng.uniform01();
    while (prod > limit) {
      ++k;
      prod *= rng.uniform01();
    }
    return k;
  }
  // Hormann's transformed rejection (PTRS); exact for mean >= 10.
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform01() - 0.5;
    const double v = rng.uniform01();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = -mean + kf * std::log(mean) - log_gamma(kf + 1.0);
    if (lhs <= rhs) return static_cast<long long>(kf);
  }
}

long long sample_binomial(long long n, double p, RngState& rng) {
  if (n < 0) fail(errc::domain_error, "sample_binomial: negative trial count");
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (p > 0.5) return n - sample_binomial(n, 1.0 - p, rng);
  // Waiting-time method: geometric jumps between successes. Exact, with
  // expected cost n * p + 1 draws.
  const double log_q = std::log1p(-p);
  long long successes = 0;
  long long trials = 0;
  for (;;) {
    trials += 1 + static_cast<long long>(std::floor(std::log(rng.uniform01()) / log_q));
    if (trials > n) return successes;
    ++successes;
  }
}

long long sample_hypergeometric(long long total, long long successes,
                                long long draws, RngState& rng) {
  if (total < 0 || successes < 0 || draws < 0 || successes > total || draws > total)
    fail(errc::domain_error, "sample_hypergeometric: invalid urn");
  long long got = 0;
  long long remaining = total;
  long long remaining_successes = successes;
  for (long long i = 0; i < draws; ++i) {
    const double p_success =
        static_cast<double>(remaining_successes) / static_cast<double>(remaining);
    if (rng.uniform01() < p_success) {
      ++got;
      --remaining_successes;
    }
    --remaining;
  }
  return got;
}

std::vector<double> sample_dirichlet(const std::vector<double>& conc, RngState& rng) {
  std::vector<double> out(conc.size());
  double total = 0.0;
  for (std::size_t i = 0; i < conc.size(); ++i) {
    out[i] = rng.gamma(conc[i]);
    total += out[i];
  }
  if (total <= 0.0) {
    // All gammas underflowed (tiny concentrations); fall back to the argmax
    // coordinate carrying the full mass.
    std::size_t winner = rng.uniform_below(conc.size());
    std::fill(out.begin(), out.end(), 0.0);
    out[winner] = 1.0;
    return out;
  }
  for (auto& v : out) v /= total;
  return out;
}

std::vector<long long> sample_multinomial_counts(long long n,
                                                 const std::vector<double>& probs,
                                                 RngState& rng) {
  std::vector<long long> counts(probs.size(), 0);
  long long remaining = n;
  double remaining_p = 1.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    if (remaining == 0) break;
    double p = probs[i] / remaining_p;
    p = std::clamp(p, 0.0, 1.0);
    counts[i] = sample_binomial(remaining, p, rng);
    remaining -= counts[i];
    remaining_p -= probs[i];
    if (remaining_p <= 0.0) remaining_p = std::numeric_limits<double>::min();
  }
  counts.back() = remaining;
  return counts;
}

// ---------------------------------------------------------------------------
// sample

std::vector<double> sample(const DistributionSpec& spec, RngState& rng) {
  spec.validate();
  switch (spec.family) {
    case Family::Normal: {
      const double sigma2 = spec.param("sigma2");
      if (sigma2 == 0.0) return {spec.param("mu")};
      return {spec.param("mu") + std::sqrt(sigma2) * rng.normal()};
    }
    case Family::MultivariateNormalIso: {
      const double mu = spec.param("mu");
      const double sd = std::sqrt(spec.param("sigma2"));
      std::vector<double> out(static_cast<std::size_t>(spec.dim));
      for (auto& v : out) v = mu + sd * rng.normal();
      return out;
    }
    case Family::Poisson:
      return {static_cast<double>(sample_poisson(spec.param("rate"), rng))};
    case Family::NegBinomial: {
      // Gamma-Poisson mixture: rate p/(1-p) gives NegBin(r, p) failures.
      const double r = spec.param("r");
      const double p = spec.param("p");
      const double lambda = rng.gamma(r) * (1.0 - p) / p;
      return {static_cast<double>(sample_poisson(lambda, rng))};
    }
    case Family::Binomial:
      return {static_cast<double>(sample_binomial(
          static_cast<long long>(std::llround(spec.param("r"))), spec.param("p"),
          rng))};
    case Family::Multinomial: {
      const auto probs = spec.indexed("p");
      const auto counts = sample_multinomial_counts(
          static_cast<long long>(std::llround(spec.param("r"))), probs, rng);
      return std::vector<double>(counts.begin(), counts.end());
    }
    case Family::GammaRate:
    case Family::GammaShape:
      return {rng.gamma(spec.param("shape")) / spec.param("rate")};
    case Family::Beta:
      return {rng.beta(spec.param("a"), spec.param("b"))};
    case Family::Weibull:
      return {spec.param("scale") *
              std::pow(rng.exponential(), 1.0 / spec.param("nu"))};
    case Family::Pareto:
      return {spec.param("nu") *
              std::pow(rng.uniform01(), -1.0 / spec.param("shape"))};
    case Family::UniformScale:
      return {spec.param("scale") * rng.uniform01()};
    case Family::ScaledBeta:
      // Beta(alpha, 1) by inversion: U^(1/alpha).
      return {spec.param("scale") *
              std::pow(rng.uniform01(), 1.0 / spec.param("alpha"))};
    case Family::ShiftedExponential:
      return {spec.param("shift") + rng.exponential() / spec.param("rate")};
    case Family::Exponential:
      return {rng.exponential() / spec.param("rate")};
    case Family::Dirichlet:
      return sample_dirichlet(spec.indexed("a"), rng);
    case Family::Hypergeometric:
      return {static_cast<double>(sample_hypergeometric(
          static_cast<long long>(std::llround(spec.param("N"))),
          static_cast<long long>(std::llround(spec.param("K"))),
          static_cast<long long>(std::llround(spec.param("n"))), rng))};
    case Family::DirichletMultinomial: {
      const auto weights = sample_dirichlet(spec.indexed("a"), rng);
      const auto counts = sample_multinomial_counts(
          static_cast<long long>(std::llround(spec.param("n"))), weights, rng);
      return std::vector<double>(counts.begin(), counts.end());
    }
    case Family::Categorical: {
      const auto probs = spec.indexed("p");
      double u = rng.uniform01();
      for (std::size_t i = 0; i < probs.size(); ++i) {
        if (u < probs[i] || i + 1 == probs.size())
          return {static_cast<double>(i)};
        u -= probs[i];
      }
      return {static_cast<double>(probs.size() - 1)};
    }
  }
  fail(errc::invalid_parameter, "sample: unhandled family");
}

// ---------------------------------------------------------------------------
// log_density

double log_density(const DistributionSpec& spec, double x) {
  return log_density(spec, std::vector<double>{x});
}

double log_density(const DistributionSpec& spec, const std::vector<double>& x) {
  spec.validate();
  if (static_cast<int>(x.size()) != spec.dim)
    fail(errc::invalid_parameter, "log_density: dimension mismatch", "x");
  const double v = x[0];
  switch (spec.family) {
    case Family::Normal: {
      const double mu = spec.param("mu");
      const double s2 = spec.param("sigma2");
      if (s2 == 0.0) return v == mu ? 0.0 : kNegInf;
      return -0.5 * std::log(2.0 * 3.14159265358979323846 * s2) -
             0.5 * (v - mu) * (v - mu) / s2;
    }
    case Family::MultivariateNormalIso: {
      const double mu = spec.param("mu");
      const double s2 = spec.param("sigma2");
      double acc = 0.0;
      for (double xi : x)
        acc += -0.5 * std::log(2.0 * 3.14159265358979323846 * s2) -
               0.5 * (xi - mu) * (xi - mu) / s2;
      return acc;
    }
    case Family::Poisson: {
      if (!is_nonneg_integer(v)) return kNegInf;
      const double rate = spec.param("rate");
      return v * std::log(rate) - rate - log_gamma(v + 1.0);
    }
    case Family::NegBinomial: {
      if (!is_nonneg_integer(v)) return kNegInf;
      const double r = spec.param("r");
      const double p = spec.param("p");
      return log_gamma(v + r) - log_gamma(r) - log_gamma(v + 1.0) +
             r * std::log(p) + v * std::log1p(-p);
    }
    case Family::Binomial: {
      const double r = spec.param("r");
      if (!is_nonneg_integer(v) || v > r) return kNegInf;
      const double p = spec.param("p");
      return log_choose(r, v) + v * std::log(p) + (r - v) * std::log1p(-p);
    }
    case Family::Multinomial: {
      const double r = spec.param("r");
      double total = 0.0;
      double acc = log_gamma(r + 1.0);
      for (int i = 0; i < spec.dim; ++i) {
        if (!is_nonneg_integer(x[i])) return kNegInf;
        total += x[i];
        acc += x[i] * std::log(spec.param("p" + std::to_string(i + 1))) -
               log_gamma(x[i] + 1.0);
      }
      if (std::fabs(total - r) > 1e-9) return kNegInf;
      return acc;
    }
    case Family::GammaRate:
    case Family::GammaShape: {
      if (v <= 0.0) return kNegInf;
      const double a = spec.param("shape");
      const double rate = spec.param("rate");
      return a * std::log(rate) - log_gamma(a) + (a - 1.0) * std::log(v) - rate * v;
    }
    case Family::Beta: {
      if (v <= 0.0 || v >= 1.0) return kNegInf;
      const double a = spec.param("a");
      const double b = spec.param("b");
      return (a - 1.0) * std::log(v) + (b - 1.0) * std::log1p(-v) - log_beta(a, b);
    }
    case Family::Weibull: {
      if (v <= 0.0) return kNegInf;
      const double scale = spec.param("scale");
      const double nu = spec.param("nu");
      const double z = v / scale;
      return std::log(nu / scale) + (nu - 1.0) * std::log(z) - std::pow(z, nu);
    }
    case Family::Pareto: {
      const double nu = spec.param("nu");
      const double shape = spec.param("shape");
      if (v < nu) return kNegInf;
      return std::log(shape) + shape * std::log(nu) - (shape + 1.0) * std::log(v);
    }
    case Family::UniformScale: {
      const double scale = spec.param("scale");
      if (v < 0.0 || v > scale) return kNegInf;
      return -std::log(scale);
    }
    case Family::ScaledBeta: {
      const double scale = spec.param("scale");
      const double alpha = spec.param("alpha");
      if (v <= 0.0 || v > scale) return kNegInf;
      return std::log(alpha) - alpha * std::log(scale) + (alpha - 1.0) * std::log(v);
    }
    case Family::ShiftedExponential: {
      const double shift = spec.param("shift");
      const double rate = spec.param("rate");
      if (v < shift) return kNegInf;
      return std::log(rate) - rate * (v - shift);
    }
    case Family::Exponential: {
      if (v < 0.0) return kNegInf;
      const double rate = spec.param("rate");
      return std::log(rate) - rate * v;
    }
    case Family::Dirichlet: {
      const auto conc = spec.indexed("a");
      double total = 0.0;
      double acc = 0.0;
      double conc_sum = 0.0;
      for (int i = 0; i < spec.dim; ++i) {
        if (x[i] <= 0.0 || x[i] >= 1.0) return kNegInf;
        total += x[i];
        acc += (conc[i] - 1.0) * std::log(x[i]) - log_gamma(conc[i]);
        conc_sum += conc[i];
      }
      if (std::fabs(total - 1.0) > 1e-9) return kNegInf;
      return acc + log_gamma(conc_sum);
    }
    case Family::Hypergeometric: {
      const double N = spec.param("N");
      const double K = spec.param("K");
      const double n = spec.param("n");
      if (!is_nonneg_integer(v) || v > K || v > n || n - v > N - K) return kNegInf;
      return log_choose(K, v) + log_choose(N - K, n - v) - log_choose(N, n);
    }
    case Family::DirichletMultinomial: {
      const double n = spec.param("n");
      const auto conc = spec.indexed("a");
      double total = 0.0;
      double conc_sum = 0.0;
      double acc = log_gamma(n + 1.0);
      for (int i = 0; i < spec.dim; ++i) {
        if (!is_nonneg_integer(x[i])) return kNegInf;
        total += x[i];
        conc_sum += conc[i];
        acc += log_gamma(x[i] + conc[i]) - log_gamma(x[i] + 1.0) - log_gamma(conc[i]);
      }
      if (std::fabs(total - n) > 1e-9) return kNegInf;
      return acc + log_gamma(conc_sum) - log_gamma(n + conc_sum);
    }
    case Family::Categorical: {
      if (!is_nonneg_integer(v) || v >= spec.dim) return kNegInf;
      return std::log(
          spec.param("p" + std::to_string(static_cast<int>(std::llround(v)) + 1)));
    }
  }
  fail(errc::invalid_parameter, "log_density: unhandled family");
}

// ---------------------------------------------------------------------------
// cdf

namespace {

// Exact summation of the mass function from 0 to floor(x).
double discrete_cdf_by_summation(const DistributionSpec& spec, double x) {
  if (x < 0.0) return 0.0;
  const long long top = static_cast<long long>(std::floor(x + 1e-9));
  double acc = 0.0;
  for (long long k = 0; k <= top; ++k) {
    acc += std::exp(log_density(spec, static_cast<double>(k)));
    if (acc >= 1.0) return 1.0;
  }
  return std::min(acc, 1.0);
}

}  // namespace

double cdf(const DistributionSpec& spec, double x) {
  spec.validate();
  if (!spec.is_scalar())
    fail(errc::unsupported, "cdf is only defined for scalar families");
  if (std::isnan(x)) fail(errc::domain_error, "cdf: x is NaN");
  switch (spec.family) {
    case Family::Normal: {
      const double s2 = spec.param("sigma2");
      if (s2 == 0.0) return x >= spec.param("mu") ? 1.0 : 0.0;
      return normal_cdf((x - spec.param("mu")) / std::sqrt(s2));
    }
    case Family::Poisson:
    case Family::NegBinomial:
    case Family::Binomial:
    case Family::Hypergeometric:
    case Family::DirichletMultinomial:
    case Family::Categorical:
      return discrete_cdf_by_summation(spec, x);
    case Family::GammaRate:
    case Family::GammaShape:
      if (x <= 0.0) return 0.0;
      return regularized_inc_gamma(spec.param("shape"), spec.param("rate") * x);
    case Family::Beta:
      return regularized_inc_beta(spec.param("a"), spec.param("b"),
                                  std::clamp(x, 0.0, 1.0));
    case Family::Weibull: {
      if (x <= 0.0) return 0.0;
      const double z = x / spec.param("scale");
      return -std::expm1(-std::pow(z, spec.param("nu")));
    }
    case Family::Pareto: {
      const double nu = spec.param("nu");
      if (x <= nu) return 0.0;
      return -std::expm1(spec.param("shape") * std::log(nu / x));
    }
    case Family::UniformScale:
      return std::clamp(x / spec.param("scale"), 0.0, 1.0);
    case Family::ScaledBeta: {
      const double z = x / spec.param("scale");
      if (z <= 0.0) return 0.0;
      if (z >= 1.0) return 1.0;
      return std::pow(z, spec.param("alpha"));
    }
    case Family::ShiftedExponential: {
      const double z = x - spec.param("shift");
      if (z <= 0.0) return 0.0;
      return -std::expm1(-spec.param("rate") * z);
    }
    case Family::Exponential:
      if (x <= 0.0) return 0.0;
      return -std::expm1(-spec.param("rate") * x);
    case Family::MultivariateNormalIso:
    case Family::Multinomial:
    case Family::Dirichlet:
      break;
  }
  fail(errc::unsupported, "cdf: unsupported family");
}

}  // namespace thinning
