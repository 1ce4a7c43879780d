#pragma once

#include <string>

#include <json.hpp>

#include "thinning/distributions.hpp"
#include "thinning/mcmc.hpp"
#include "thinning/thinners.hpp"

namespace thinning {

// DistributionSpec <-> {"family": string, "params": {name: number}, "dim": int}.
// Parameters declared unknown serialize with a null value (the theta
// placeholder) and are listed under "unknown".
nlohmann::json to_json(const DistributionSpec& spec);
DistributionSpec spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ThinningPlan& plan);
ThinningPlan plan_from_json(const nlohmann::json& j);

nlohmann::json to_json(const McmcConfig& cfg);
McmcConfig mcmc_from_json(const nlohmann::json& j);

// FoldSet -> {"recombiner": string, "nu": number (when used),
//             "t_value": [..], "indirect_stat": [..]|null,
//             "folds": [[..]], "fold_specs": [spec, ...]}
nlohmann::json to_json(const FoldSet& fs);
FoldSet foldset_from_json(const nlohmann::json& j);

}  // namespace thinning
