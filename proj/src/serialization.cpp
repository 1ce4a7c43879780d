#include "thinning/serialization.hpp"

#include <cmath>
#include <limits>

#include "thinning/errors.hpp"

namespace thinning {

using nlohmann::json;

json to_json(const DistributionSpec& spec) {
  json params = json::object();
  for (const auto& [name, value] : spec.params) {
    if (spec.unknown.count(name)) {
      params[name] = nullptr;
    } else {
      params[name] = value;
    }
  }
  json out = {{"family", family_name(spec.family)}, {"params", params},
              {"dim", spec.dim}};
  if (!spec.unknown.empty()) {
    out["unknown"] = json::array();
    for (const auto& name : spec.unknown) out["unknown"].push_back(name);
  }
  return out;
}

DistributionSpec spec_from_json(const json& j) {
  DistributionSpec spec;
  if (!j.contains("family"))
    fail(errc::config_error, "spec: missing 'family'", "family");
  spec.family = family_from_name(j.at("family").get<std::string>());
  spec.dim = j.value("dim", 1);
  if (j.contains("unknown"))
    for (const auto& name : j.at("unknown"))
      spec.unknown.insert(name.get<std::string>());
  if (j.contains("params")) {
    for (const auto& [name, value] : j.at("params").items()) {
      if (value.is_null()) {
        spec.unknown.insert(name);
        spec.params[name] = std::numeric_limits<double>::quiet_NaN();
      } else {
        spec.params[name] = value.get<double>();
      }
    }
  }
  return spec;
}

json to_json(const ThinningPlan& plan) {
  json out = {{"K", plan.K}, {"mode", thin_mode_name(plan.mode)}};
  if (!plan.weights.empty()) out["eps"] = plan.weights;
  if (!plan.weight_fractions.empty()) {
    json fr = json::array();
    for (const auto& f : plan.weight_fractions)
      fr.push_back({{"num", f.num}, {"den", f.den}});
    out["eps_fractions"] = fr;
  }
  if (!plan.fold_sizes.empty()) out["fold_sizes"] = plan.fold_sizes;
  if (plan.nu > 0.0) out["nu"] = plan.nu;
  return out;
}

ThinningPlan plan_from_json(const json& j) {
  ThinningPlan plan;
  plan.K = j.value("K", 1);
  if (j.contains("mode"))
    plan.mode = thin_mode_from_name(j.at("mode").get<std::string>());
  if (j.contains("eps")) plan.weights = j.at("eps").get<std::vector<double>>();
  if (j.contains("eps_fractions")) {
    for (const auto& f : j.at("eps_fractions"))
      plan.weight_fractions.push_back(
          Fraction{f.at("num").get<long long>(), f.at("den").get<long long>()});
  }
  if (j.contains("fold_sizes"))
    plan.fold_sizes = j.at("fold_sizes").get<std::vector<int>>();
  plan.nu = j.value("nu", 0.0);
  return plan;
}

json to_json(const McmcConfig& cfg) {
  json out = {
      {"burn_in", cfg.burn_in},
      {"thin_every", cfg.thin_every},
      {"proposal", cfg.proposal == ProposalKind::UniformBox ? "UniformBox"
                                                            : "GaussianRandomWalk"},
      {"adapt", cfg.adapt},
      {"target_acceptance", cfg.target_acceptance},
  };
  if (!cfg.scale.empty()) out["scale"] = cfg.scale;
  if (!cfg.lower.empty()) out["lower"] = cfg.lower;
  if (!cfg.upper.empty()) out["upper"] = cfg.upper;
  return out;
}

McmcConfig mcmc_from_json(const json& j) {
  McmcConfig cfg;
  cfg.burn_in = j.value("burn_in", cfg.burn_in);
  cfg.thin_every = j.value("thin_every", cfg.thin_every);
  if (j.contains("proposal")) {
    const auto name = j.at("proposal").get<std::string>();
    if (name == "UniformBox") {
      cfg.proposal = ProposalKind::UniformBox;
    } else if (name == "GaussianRandomWalk") {
      cfg.proposal = ProposalKind::GaussianRandomWalk;
    } else {
      fail(errc::config_error, "mcmc: unknown proposal kind: " + name, "proposal");
    }
  }
  cfg.adapt = j.value("adapt", cfg.adapt);
  cfg.target_acceptance = j.value("target_acceptance", cfg.target_acceptance);
  if (j.contains("scale")) cfg.scale = j.at("scale").get<std::vector<double>>();
  if (j.contains("lower")) cfg.lower = j.at("lower").get<std::vector<double>>();
  if (j.contains("upper")) cfg.upper = j.at("upper").get<std::vector<double>>();
  return cfg;
}

json to_json(const FoldSet& fs) {
  json out;
  out["recombiner"] = recombiner_name(fs.recombiner.id);
  if (fs.recombiner.id == RecombinerId::SumOfPowers ||
      fs.recombiner.id == RecombinerId::ExpOfSum)
    out["nu"] = fs.recombiner.nu;
  out["t_value"] = fs.t_value;
  if (fs.indirect_stat) {
    out["indirect_stat"] = *fs.indirect_stat;
  } else {
    out["indirect_stat"] = nullptr;
  }
  out["folds"] = fs.folds;
  json specs = json::array();
  for (const auto& s : fs.fold_specs) specs.push_back(to_json(s));
  out["fold_specs"] = specs;
  if (fs.degenerate) out["degenerate"] = true;
  return out;
}

FoldSet foldset_from_json(const json& j) {
  FoldSet fs;
  fs.recombiner.id = recombiner_from_name(j.at("recombiner").get<std::string>());
  fs.recombiner.nu = j.value("nu", 0.0);
  fs.t_value = j.at("t_value").get<std::vector<double>>();
  if (j.contains("indirect_stat") && !j.at("indirect_stat").is_null())
    fs.indirect_stat = j.at("indirect_stat").get<std::vector<double>>();
  fs.folds = j.at("folds").get<std::vector<std::vector<double>>>();
  if (j.contains("fold_specs"))
    for (const auto& s : j.at("fold_specs")) fs.fold_specs.push_back(spec_from_json(s));
  fs.degenerate = j.value("degenerate", false);
  return fs;
}

}  // namespace thinning
