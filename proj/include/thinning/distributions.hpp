#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "thinning/rng.hpp"

namespace thinning {

enum class Family {
  Normal,
  MultivariateNormalIso,
  Poisson,
  NegBinomial,
  Binomial,
  Multinomial,
  GammaRate,
  GammaShape,
  Beta,
  Weibull,
  Pareto,
  UniformScale,
  ScaledBeta,
  ShiftedExponential,
  Exponential,
  Dirichlet,
  Hypergeometric,
  DirichletMultinomial,
  Categorical,
};

const char* family_name(Family f);
Family family_from_name(const std::string& name);

// One member of a parametric family: a family tag plus named parameter
// values. Parameter names are stable (documented in the README). Parameters
// listed in `unknown` are the ones a thinner must not read; their stored
// value is only meaningful on the verification side, where the truth is
// known by construction.
//
// Canonical parameter names:
//   Normal                 mu, sigma2        (sigma2 may be 0: point mass)
//   MultivariateNormalIso  mu (common mean per coordinate), sigma2
//   Poisson                rate
//   NegBinomial            r, p              (failures before r-th success)
//   Binomial               r, p
//   Multinomial            r, p1..p<dim>
//   GammaRate/GammaShape   shape, rate       (density prop. to
//                                             x^{shape-1} e^{-rate x})
//   Beta                   a, b
//   Weibull                scale, nu
//   Pareto                 nu, shape         (support [nu, inf),
//                                             density shape*nu^shape*x^{-shape-1})
//   UniformScale           scale             (Uniform(0, scale))
//   ScaledBeta             scale, alpha      (scale * Beta(alpha, 1))
//   ShiftedExponential     shift, rate
//   Exponential            rate
//   Dirichlet              a1..a<dim>
//   Hypergeometric         N, K, n
//   DirichletMultinomial   n, a1..a<dim>
//   Categorical            p1..p<dim>
struct DistributionSpec {
  Family family = Family::Normal;
  std::map<std::string, double> params;
  std::set<std::string> unknown;
  int dim = 1;

  // Parameter access. param() is the unrestricted accessor used for
  // sampling/verification; known() is the thinner-facing accessor and
  // throws UnknownRequiredParameter for parameters marked unknown.
  double param(const std::string& name) const;
  double known(const std::string& name) const;
  bool has(const std::string& name) const;
  // Gathers name1..name<dim> into a vector (probability or concentration
  // vectors are stored as indexed scalar entries).
  std::vector<double> indexed(const std::string& prefix) const;

  // Copy with the unknown parameters' values wiped; what verification hands
  // to the thinner under test.
  DistributionSpec thinning_view() const;

  // Throws InvalidParameter naming the violated constraint.
  void validate() const;

  bool is_scalar() const { return dim == 1; }
};

DistributionSpec make_spec(Family f,
                           std::initializer_list<std::pair<const char*, double>> params,
                           std::initializer_list<const char*> unknown = {},
                           int dim = 1);

// One draw; length dim (length 1 for scalar families).
std::vector<double> sample(const DistributionSpec& spec, RngState& rng);

// Natural log of the density/mass at x; -infinity off support.
double log_density(const DistributionSpec& spec, const std::vector<double>& x);
double log_density(const DistributionSpec& spec, double x);

// P(X <= x) for scalar families; regularized incomplete gamma/beta for the
// continuous ones, exact summation for the discrete ones.
double cdf(const DistributionSpec& spec, double x);

// True when the family takes values on a lattice of integers.
bool is_discrete(Family f);

// Primitive samplers shared by distributions and thinners.
long long sample_poisson(double mean, RngState& rng);
long long sample_binomial(long long n, double p, RngState& rng);
// Successes among `draws` taken without replacement from a population of
// size `total` containing `successes` marked items.
long long sample_hypergeometric(long long total, long long successes,
                                long long draws, RngState& rng);
std::vector<double> sample_dirichlet(const std::vector<double>& conc, RngState& rng);
std::vector<long long> sample_multinomial_counts(long long n,
                                                 const std::vector<double>& probs,
                                                 RngState& rng);

}  // namespace thinning
