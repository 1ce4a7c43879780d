// Batch CLI: thin data files, run the verification matrix, run the
// changepoint simulations and pipelines. All commands are deterministic
// given the seed; exit codes: 0 ok, 1 verification fail, 2 config error,
// 3 runtime error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thinning/changepoint.hpp"
#include "thinning/distributions.hpp"
#include "thinning/errors.hpp"
#include "thinning/serialization.hpp"
#include "thinning/thinners.hpp"
#include "thinning/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace thinning;

namespace {

void emit_error(const std::string& code, const std::string& message,
                const std::string& field) {
  json err = {{"code", code}, {"message", message},
              {"field", field.empty() ? json(nullptr) : json(field)}};
  std::cerr << err.dump() << "\n";
}

struct RunConfig {
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string family;
  std::string params_text;
  int dim = 1;
  std::vector<std::string> unknown;
  int K = 2;
  std::string eps_text;
  std::string mode;
  double nu = 0.0;
  std::string fold_sizes_text;
  long B = 100000;
  int R = 1;
  double alpha = 0.05;
  double penalty = 10.0;
  int min_segment = 10;
  int threads = 1;
  std::string in_path;
  std::string out_dir = ".";
  std::string regime = "null";
  std::string method = "thinned";
  std::string case_id;
  int n = 2000;
  McmcConfig mcmc;
};

const std::set<std::string> kConfigKeys = {
    "seed",   "family", "params",      "dim",     "unknown", "K",
    "eps",    "mode",   "nu",          "fold_sizes", "B",    "R",
    "alpha",  "penalty", "min_segment", "threads", "in",     "out",
    "regime", "method", "case",        "n",       "mcmc"};

void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) fail(errc::config_error, "cannot open config file: " + path, "config");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(errc::config_error, std::string("config parse error: ") + e.what(),
         "config");
  }
  for (const auto& [key, value] : j.items()) {
    if (!kConfigKeys.count(key))
      fail(errc::config_error, "unknown config key: " + key, key);
    (void)value;
  }
  if (j.contains("seed")) {
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.seed_set = true;
  }
  cfg.family = j.value("family", cfg.family);
  if (j.contains("params")) {
    // Accept both an object {"name": value} and the flag-style string.
    if (j.at("params").is_object()) {
      std::ostringstream text;
      bool first = true;
      for (const auto& [k, v] : j.at("params").items()) {
        if (!first) text << ',';
        text << k << '=' << v.get<double>();
        first = false;
      }
      cfg.params_text = text.str();
    } else {
      cfg.params_text = j.at("params").get<std::string>();
    }
  }
  cfg.dim = j.value("dim", cfg.dim);
  if (j.contains("unknown"))
    cfg.unknown = j.at("unknown").get<std::vector<std::string>>();
  cfg.K = j.value("K", cfg.K);
  if (j.contains("eps")) {
    if (j.at("eps").is_array()) {
      std::ostringstream text;
      bool first = true;
      for (const auto& v : j.at("eps")) {
        if (!first) text << ',';
        text << v.get<double>();
        first = false;
      }
      cfg.eps_text = text.str();
    } else {
      cfg.eps_text = j.at("eps").get<std::string>();
    }
  }
  cfg.mode = j.value("mode", cfg.mode);
  cfg.nu = j.value("nu", cfg.nu);
  cfg.fold_sizes_text = j.value("fold_sizes", cfg.fold_sizes_text);
  cfg.B = j.value("B", cfg.B);
  cfg.R = j.value("R", cfg.R);
  cfg.alpha = j.value("alpha", cfg.alpha);
  cfg.penalty = j.value("penalty", cfg.penalty);
  cfg.min_segment = j.value("min_segment", cfg.min_segment);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.in_path = j.value("in", cfg.in_path);
  cfg.out_dir = j.value("out", cfg.out_dir);
  cfg.regime = j.value("regime", cfg.regime);
  cfg.method = j.value("method", cfg.method);
  cfg.case_id = j.value("case", cfg.case_id);
  cfg.n = j.value("n", cfg.n);
  if (j.contains("mcmc")) cfg.mcmc = mcmc_from_json(j.at("mcmc"));
}

std::vector<std::string> split_text(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

DistributionSpec build_spec(const RunConfig& cfg) {
  if (cfg.family.empty())
    fail(errc::config_error, "a --family is required", "family");
  DistributionSpec spec;
  spec.family = family_from_name(cfg.family);
  spec.dim = cfg.dim;
  for (const auto& kv : split_text(cfg.params_text, ',')) {
    if (kv.empty()) continue;
    const auto pos = kv.find('=');
    if (pos == std::string::npos)
      fail(errc::config_error, "params must be name=value pairs: " + kv, "params");
    spec.params[kv.substr(0, pos)] = std::stod(kv.substr(pos + 1));
  }
  for (const auto& u : cfg.unknown) spec.unknown.insert(u);
  spec.validate();
  return spec;
}

ThinningPlan build_plan(const RunConfig& cfg, const DistributionSpec& spec) {
  ThinningPlan plan;
  plan.K = cfg.K;
  plan.mode = cfg.mode.empty() ? default_mode_for(spec.family)
                               : thin_mode_from_name(cfg.mode);
  plan.nu = cfg.nu;
  if (!cfg.eps_text.empty()) {
    for (const auto& item : split_text(cfg.eps_text, ',')) {
      const auto pos = item.find('/');
      if (pos == std::string::npos) {
        plan.weights.push_back(std::stod(item));
      } else {
        Fraction f{std::stoll(item.substr(0, pos)), std::stoll(item.substr(pos + 1))};
        if (f.den <= 0)
          fail(errc::config_error, "eps fraction denominator must be positive",
               "eps");
        plan.weight_fractions.push_back(f);
        plan.weights.push_back(f.value());
      }
    }
    if (!plan.weight_fractions.empty() &&
        plan.weight_fractions.size() != plan.weights.size())
      fail(errc::config_error, "eps must be all fractions or all decimals", "eps");
    plan.K = static_cast<int>(plan.weights.size());
  }
  if (!cfg.fold_sizes_text.empty()) {
    for (const auto& item : split_text(cfg.fold_sizes_text, ','))
      plan.fold_sizes.push_back(std::stoi(item));
    plan.K = static_cast<int>(plan.fold_sizes.size());
  }
  if (plan.weights.empty() &&
      (plan.mode == ThinMode::Convolution || plan.mode == ThinMode::Transform)) {
    plan.weights.assign(static_cast<std::size_t>(plan.K), 1.0 / plan.K);
  }
  plan.validate();
  return plan;
}

// --- tiny CSV helpers -------------------------------------------------------

std::vector<std::vector<double>> read_csv_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open input file: " + path, "in");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    bool numeric = true;
    for (const auto& cell : split_text(line, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used == 0) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header row
      }
      fail(errc::io_error, "non-numeric cell in " + path, "in");
    }
    first = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(errc::io_error, "cannot write " + path.string(), "out");
  out << contents;
}

// --- commands ---------------------------------------------------------------

int cmd_thin(const RunConfig& cfg) {
  const DistributionSpec spec = build_spec(cfg);
  const ThinningPlan plan = build_plan(cfg, spec);
  require_thinnable(spec, plan.mode);
  if (cfg.in_path.empty())
    fail(errc::config_error, "thin requires --in <csv>", "in");
  const auto rows = read_csv_rows(cfg.in_path);

  fs::create_directories(cfg.out_dir);
  std::ostringstream out;
  out.precision(17);
  for (int k = 0; k < plan.K; ++k) {
    for (int d = 0; d < spec.dim; ++d)
      out << "fold" << (k + 1) << "_x" << (d + 1) << ',';
  }
  out << "residual\n";

  RngState rng(cfg.seed, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<int>(rows[i].size()) != spec.dim)
      fail(errc::io_error,
           "row " + std::to_string(i + 1) + " has " +
               std::to_string(rows[i].size()) + " columns, expected " +
               std::to_string(spec.dim),
           "in");
    RngState row_rng = rng.split(i);
    const FoldSet fs = thin_dispatch(rows[i], spec.thinning_view(), plan, cfg.mcmc,
                                     row_rng);
    for (const auto& fold : fs.folds)
      for (double v : fold) out << v << ',';
    out << reconstruction_error(fs) << '\n';
  }
  write_file(fs::path(cfg.out_dir) / "folds.csv", out.str());
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  std::vector<VerifyCase> cases;
  if (!cfg.case_id.empty() || cfg.family.empty()) {
    for (auto& vc : default_matrix()) {
      if (cfg.case_id.empty() || vc.id == cfg.case_id ||
          vc.id.rfind(cfg.case_id, 0) == 0)
        cases.push_back(std::move(vc));
    }
    if (cases.empty())
      fail(errc::config_error, "no matrix case matches: " + cfg.case_id, "case");
  } else {
    VerifyCase vc;
    const DistributionSpec spec = build_spec(cfg);
    vc.spec = spec;
    vc.plan = build_plan(cfg, spec);
    vc.mcmc = cfg.mcmc;
    vc.id = std::string(family_name(spec.family)) + "-" +
            thin_mode_name(vc.plan.mode);
    vc.series_length = cfg.n;
    cases.push_back(std::move(vc));
  }

  fs::create_directories(cfg.out_dir);
  json reports = json::array();
  std::ostringstream csv;
  csv << report_csv_header();
  bool all_pass = true;
  RngState rng(cfg.seed, 0);
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const VerificationReport report =
        run_verification(cases[c], cfg.B, rng.split(c), cfg.threads);
    all_pass = all_pass && report.pass;
    reports.push_back(report_to_json(report));
    csv << report_to_csv_rows(report);
    std::cout << (report.pass ? "pass " : "FAIL ") << report.thinner_id << "\n";
  }
  write_file(fs::path(cfg.out_dir) / "verification_report.json",
             reports.dump(2) + "\n");
  write_file(fs::path(cfg.out_dir) / "verification_report.csv", csv.str());
  return all_pass ? 0 : 1;
}

int cmd_changepoint_sim(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  std::ostringstream rows;
  rows.precision(10);
  rows << "replicate,method,n_changepoints,n_rejected\n";
  long naive_cps = 0, naive_rej = 0, thinned_cps = 0, thinned_rej = 0;

  RngState rng(cfg.seed, 0);
  for (int r = 0; r < cfg.R; ++r) {
    RngState data_rng = rng.split(static_cast<std::uint64_t>(2 * r));
    RngState thin_rng = rng.split(static_cast<std::uint64_t>(2 * r + 1));
    const std::vector<double> x = cfg.regime == "alternative"
                                      ? simulate_alternative_series(data_rng)
                                      : simulate_null_series(cfg.n, data_rng);
    const auto naive = run_pipeline(x, Method::Naive, cfg.penalty, cfg.min_segment,
                                    cfg.alpha, thin_rng);
    const auto thinned = run_pipeline(x, Method::Thinned, cfg.penalty,
                                      cfg.min_segment, cfg.alpha, thin_rng);
    long nr = 0, tr = 0;
    for (const auto& t : naive.per_cp) nr += t.reject ? 1 : 0;
    for (const auto& t : thinned.per_cp) tr += t.reject ? 1 : 0;
    naive_cps += static_cast<long>(naive.per_cp.size());
    naive_rej += nr;
    thinned_cps += static_cast<long>(thinned.per_cp.size());
    thinned_rej += tr;
    rows << r << ",naive," << naive.per_cp.size() << ',' << nr << '\n';
    rows << r << ",thinned," << thinned.per_cp.size() << ',' << tr << '\n';
  }
  write_file(fs::path(cfg.out_dir) / "sim_replicates.csv", rows.str());

  std::ostringstream agg;
  agg.precision(10);
  agg << "method,total_changepoints,total_rejected,rejection_proportion\n";
  const auto prop = [](long rej, long cps) {
    return cps > 0 ? static_cast<double>(rej) / static_cast<double>(cps) : 0.0;
  };
  if (cfg.R > 0) {
    agg << "naive," << naive_cps << ',' << naive_rej << ','
        << prop(naive_rej, naive_cps) << '\n';
    agg << "thinned," << thinned_cps << ',' << thinned_rej << ','
        << prop(thinned_rej, thinned_cps) << '\n';
  }
  write_file(fs::path(cfg.out_dir) / "sim_aggregate.csv", agg.str());
  return 0;
}

int cmd_changepoint_run(const RunConfig& cfg) {
  if (cfg.in_path.empty())
    fail(errc::config_error, "changepoint-run requires --in <csv>", "in");
  const auto rows = read_csv_rows(cfg.in_path);
  std::vector<double> x;
  x.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.size() != 1)
      fail(errc::io_error, "series csv must have a single column 'x'", "in");
    x.push_back(row[0]);
  }

  fs::create_directories(cfg.out_dir);
  const Method method = cfg.method == "naive" ? Method::Naive : Method::Thinned;
  RngState rng(cfg.seed, 0);
  RngState run_rng = rng.split(0);
  const ChangepointResult result =
      run_pipeline(x, method, cfg.penalty, cfg.min_segment, cfg.alpha, run_rng);
  write_file(fs::path(cfg.out_dir) / "changepoint_result.json",
             changepoint_result_to_json(result).dump(2) + "\n");
  if (cfg.R > 1 && method == Method::Thinned) {
    const auto stability = stability_analysis(x, cfg.R, 10, cfg.penalty,
                                              cfg.min_segment, cfg.alpha, rng);
    write_file(fs::path(cfg.out_dir) / "stability.csv", stability_csv(stability));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized data thinning toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (flags override)");
    cmd->add_option("--seed", cfg.seed, "random seed (required)");
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--threads", cfg.threads, "worker thread bound");
  };

  auto* thin = app.add_subcommand("thin", "thin a CSV of draws into folds");
  add_common(thin);
  thin->add_option("--family", cfg.family, "family name");
  thin->add_option("--params", cfg.params_text, "name=value,name=value");
  thin->add_option("--dim", cfg.dim, "dimension of each draw");
  thin->add_option("--unknown", cfg.unknown, "parameters to treat as unknown");
  thin->add_option("--K", cfg.K, "number of folds");
  thin->add_option("--eps", cfg.eps_text, "weights, decimals or p/q fractions");
  thin->add_option("--mode", cfg.mode, "thinning mode");
  thin->add_option("--nu", cfg.nu, "WeibullPower hyperparameter");
  thin->add_option("--fold-sizes", cfg.fold_sizes_text, "sample split sizes");
  thin->add_option("--in", cfg.in_path, "input CSV, one draw per row");

  auto* verify = app.add_subcommand("verify", "run the verification matrix");
  add_common(verify);
  verify->add_option("--case", cfg.case_id, "matrix case id (prefix match)");
  verify->add_option("--family", cfg.family, "family for an ad-hoc case");
  verify->add_option("--params", cfg.params_text, "name=value,...");
  verify->add_option("--dim", cfg.dim, "dimension");
  verify->add_option("--unknown", cfg.unknown, "unknown parameter names");
  verify->add_option("--K", cfg.K, "number of folds");
  verify->add_option("--eps", cfg.eps_text, "weights");
  verify->add_option("--mode", cfg.mode, "thinning mode");
  verify->add_option("--nu", cfg.nu, "WeibullPower hyperparameter");
  verify->add_option("--B", cfg.B, "replicates per case");
  verify->add_option("--n", cfg.n, "series length for sample-based thinners");

  auto* sim = app.add_subcommand("changepoint-sim", "null/alternative simulations");
  add_common(sim);
  sim->add_option("--regime", cfg.regime, "null | alternative");
  sim->add_option("--R", cfg.R, "number of replicates");
  sim->add_option("--n", cfg.n, "series length for the null regime");
  sim->add_option("--alpha", cfg.alpha, "test level");
  sim->add_option("--penalty", cfg.penalty, "detection penalty");
  sim->add_option("--min-segment", cfg.min_segment, "minimum segment length");

  auto* run = app.add_subcommand("changepoint-run", "run one series");
  add_common(run);
  run->add_option("--in", cfg.in_path, "series CSV with header 'x'");
  run->add_option("--method", cfg.method, "naive | thinned");
  run->add_option("--R", cfg.R, "stability repeats (thinned only)");
  run->add_option("--alpha", cfg.alpha, "test level");
  run->add_option("--penalty", cfg.penalty, "detection penalty");
  run->add_option("--min-segment", cfg.min_segment, "minimum segment length");

  CLI11_PARSE(app, argc, argv);

  // Configuration precedence: defaults, then the config file, then any flag
  // the user passed explicitly.
  try {
    CLI::App* active = app.get_subcommands().front();
    const auto provided = [&](const std::string& name) {
      const CLI::Option* opt = active->get_option_no_throw(name);
      return opt != nullptr && opt->count() > 0;
    };
    const RunConfig flag_values = cfg;  // values as parsed from the flags
    if (!config_path.empty()) {
      load_config_file(config_path, cfg);
      if (provided("--seed")) {
        cfg.seed = flag_values.seed;
        cfg.seed_set = true;
      }
      if (provided("--family")) cfg.family = flag_values.family;
      if (provided("--params")) cfg.params_text = flag_values.params_text;
      if (provided("--dim")) cfg.dim = flag_values.dim;
      if (provided("--unknown")) cfg.unknown = flag_values.unknown;
      if (provided("--K")) cfg.K = flag_values.K;
      if (provided("--eps")) cfg.eps_text = flag_values.eps_text;
      if (provided("--mode")) cfg.mode = flag_values.mode;
      if (provided("--nu")) cfg.nu = flag_values.nu;
      if (provided("--fold-sizes")) cfg.fold_sizes_text = flag_values.fold_sizes_text;
      if (provided("--B")) cfg.B = flag_values.B;
      if (provided("--R")) cfg.R = flag_values.R;
      if (provided("--alpha")) cfg.alpha = flag_values.alpha;
      if (provided("--penalty")) cfg.penalty = flag_values.penalty;
      if (provided("--min-segment")) cfg.min_segment = flag_values.min_segment;
      if (provided("--threads")) cfg.threads = flag_values.threads;
      if (provided("--in")) cfg.in_path = flag_values.in_path;
      if (provided("--out")) cfg.out_dir = flag_values.out_dir;
      if (provided("--regime")) cfg.regime = flag_values.regime;
      if (provided("--method")) cfg.method = flag_values.method;
      if (provided("--case")) cfg.case_id = flag_values.case_id;
      if (provided("--n")) cfg.n = flag_values.n;
    }
    if (provided("--seed")) cfg.seed_set = true;
    if (!cfg.seed_set)
      fail(errc::config_error,
           "--seed is required (no wall-clock default, for reproducibility)",
           "seed");
    if (cfg.regime != "null" && cfg.regime != "alternative")
      fail(errc::config_error, "--regime must be null or alternative", "regime");
    if (cfg.method != "naive" && cfg.method != "thinned")
      fail(errc::config_error, "--method must be naive or thinned", "method");
    if (cfg.threads < 1)
      fail(errc::config_error, "--threads must be >= 1", "threads");
  } catch (const Error& e) {
    emit_error(e.code(), e.what(), e.field());
    return 2;
  } catch (const std::exception& e) {
    emit_error(errc::config_error, e.what(), "");
    return 2;
  }

  try {
    if (app.got_subcommand("thin")) return cmd_thin(cfg);
    if (app.got_subcommand("verify")) return cmd_verify(cfg);
    if (app.got_subcommand("changepoint-sim")) return cmd_changepoint_sim(cfg);
    if (app.got_subcommand("changepoint-run")) return cmd_changepoint_run(cfg);
  } catch (const Error& e) {
    const bool config_side =
        e.code() == errc::config_error || e.code() == errc::invalid_parameter ||
        e.code() == errc::unsupported_family || e.code() == errc::io_error;
    emit_error(e.code(), e.what(), e.field());
    return config_side ? 2 : 3;
  } catch (const std::exception& e) {
    emit_error("Internal", e.what(), "");
    return 3;
  }
  return 0;
}
