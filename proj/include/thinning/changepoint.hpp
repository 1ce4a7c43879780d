#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "thinning/rng.hpp"

namespace thinning {

// z_i = x_i^2; under X_i ~ N(0, theta_i) each z_i ~ Gamma(1/2, 1/(2 theta_i)).
std::vector<double> square_transform(const std::vector<double>& x);

// Per-element gamma thinning of the squared series into two independent
// halves, each Gamma(1/4, 1/(2 theta_i)), with train_i + test_i = x_i^2.
struct ThinnedSeries {
  std::vector<double> train;
  std::vector<double> test;
};
ThinnedSeries thin_series(const std::vector<double>& x, RngState& rng);

// Binary segmentation on a nonnegative series under a gamma cost with known
// shape and per-segment MLE rate. A split is kept when the cost reduction
// exceeds `penalty`; returned indices are first positions of new segments
// and respect min_segment on both sides.
std::vector<int> detect_changepoints(const std::vector<double>& z, double shape,
                                     double penalty, int min_segment);

struct RateChangeTest {
  double lr_stat = 0.0;
  double p = 1.0;
  bool all_zero = false;
};

// Likelihood-ratio test for a change in gamma rate between two segments with
// known shape; chi-square(1) reference.
RateChangeTest test_rate_change(const std::vector<double>& z_left,
                                const std::vector<double>& z_right, double shape);

enum class Method { Naive, Thinned };
const char* method_name(Method m);

struct ChangepointTest {
  int index = 0;
  double lr_stat = 0.0;
  double p = 1.0;
  bool reject = false;
};

struct ChangepointResult {
  std::vector<int> estimated_cps;
  std::vector<ChangepointTest> per_cp;
  Method method = Method::Naive;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  // Checksums of the series each stage consumed; lets tests assert that
  // detection never saw the test fold and vice versa.
  std::uint64_t detect_checksum = 0;
  std::uint64_t test_checksum = 0;
};

// Naive: detect and test on z = x^2 (shape 1/2). Thinned: detect on the
// train fold, test on the test fold at the train-estimated indices
// (shape 1/4). Test segments are bounded by the adjacent changepoints.
ChangepointResult run_pipeline(const std::vector<double>& x, Method method,
                               double penalty, int min_segment, double alpha,
                               RngState& rng);

struct StabilityRow {
  int window_start = 0;
  double detected_freq = 0.0;
  double rejected_freq = 0.0;
};

// Re-thins x `repeats` times; per window of `window` indices, the fraction
// of repeats with at least one estimated changepoint, and with at least one
// estimated changepoint whose test p-value is below alpha.
std::vector<StabilityRow> stability_analysis(const std::vector<double>& x,
                                             int repeats, int window,
                                             double penalty, int min_segment,
                                             double alpha, RngState& rng);

// Synthetic series generators for the bundled simulations.
std::vector<double> simulate_null_series(int n, RngState& rng);
// Variance regimes 4 / 25 / 1 with changes at indices 500 and 1500 (n=2000).
std::vector<double> simulate_alternative_series(RngState& rng);
inline constexpr int kAlternativeChangepoints[2] = {500, 1500};

std::uint64_t series_checksum(const std::vector<double>& v);

nlohmann::json changepoint_result_to_json(const ChangepointResult& r);
std::string stability_csv(const std::vector<StabilityRow>& rows);

}  // namespace thinning
