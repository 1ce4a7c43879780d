#include "thinning/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "thinning/errors.hpp"
#include "thinning/special.hpp"
#include "thinning/thinners.hpp"

namespace thinning {

const char* method_name(Method m) {
  return m == Method::Naive ? "Naive" : "Thinned";
}

std::vector<double> square_transform(const std::vector<double>& x) {
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] * x[i];
  return z;
}

ThinnedSeries thin_series(const std::vector<double>& x, RngState& rng) {
  ThinnedSeries out;
  out.train.resize(x.size());
  out.test.resize(x.size());
  const ThinningPlan plan = ThinningPlan::convolution({0.5, 0.5});
  const Transform square{TransformKind::SquareAboutMu, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const FoldSet fs = thin_transformed(x[i], square, plan, rng);
    out.train[i] = fs.folds[0][0];
    out.test[i] = fs.folds[1][0];
  }
  return out;
}

namespace {

// Segment cost under a gamma likelihood with known shape a and the MLE rate
// a*m/S, dropping the per-point terms that cancel across any comparison of
// segmentations of the same points: cost = -a * m * log(m / S).
double segment_cost(double m, double s) {
  if (s <= 0.0) return 0.0;
  return -m * std::log(m / s);
}

void binary_segment(const std::vector<double>& prefix, int lo, int hi, double shape,
                    double penalty, int min_segment, std::vector<int>& out) {
  const int m = hi - lo;
  if (m < 2 * min_segment) return;
  const double total = prefix[static_cast<std::size_t>(hi)] -
                       prefix[static_cast<std::size_t>(lo)];
  if (total <= 0.0) return;
  const double parent = segment_cost(m, total);

  double best_gain = 0.0;
  int best_split = -1;
  for (int split = lo + min_segment; split <= hi - min_segment; ++split) {
    const double left = prefix[static_cast<std::size_t>(split)] -
                        prefix[static_cast<std::size_t>(lo)];
    const double right = total - left;
    if (left <= 0.0 || right <= 0.0) continue;
    const double gain = parent - segment_cost(split - lo, left) -
                        segment_cost(hi - split, right);
    if (gain > best_gain) {
      best_gain = gain;
      best_split = split;
    }
  }
  // Cost is measured in -2 log-likelihood units (the usual changepoint
  // penalty scale), so a kept split satisfies LR > penalty.
  if (best_split < 0 || 2.0 * shape * best_gain <= penalty) return;
  binary_segment(prefix, lo, best_split, shape, penalty, min_segment, out);
  out.push_back(best_split);
  binary_segment(prefix, best_split, hi, shape, penalty, min_segment, out);
}

}  // namespace

std::vector<int> detect_changepoints(const std::vector<double>& z, double shape,
                                     double penalty, int min_segment) {
  if (min_segment < 1)
    fail(errc::invalid_parameter, "min_segment must be >= 1", "min_segment");
  const int n = static_cast<int>(z.size());
  if (n < 2 * min_segment)
    fail(errc::series_too_short,
         "series of length " + std::to_string(n) + " is shorter than 2*min_segment");
  std::vector<double> prefix(z.size() + 1, 0.0);
  for (std::size_t i = 0; i < z.size(); ++i) prefix[i + 1] = prefix[i] + z[i];
  std::vector<int> out;
  binary_segment(prefix, 0, n, shape, penalty, min_segment, out);
  std::sort(out.begin(), out.end());
  return out;
}

RateChangeTest test_rate_change(const std::vector<double>& z_left,
                                const std::vector<double>& z_right, double shape) {
  if (z_left.empty() || z_right.empty())
    fail(errc::empty_segment, "test_rate_change: empty segment");
  if (z_left.size() < 2 || z_right.size() < 2)
    fail(errc::empty_segment, "test_rate_change: segments must have length >= 2");
  const double ml = static_cast<double>(z_left.size());
  const double mr = static_cast<double>(z_right.size());
  double sl = 0.0, sr = 0.0;
  for (double v : z_left) sl += v;
  for (double v : z_right) sr += v;
  if (sl <= 0.0 || sr <= 0.0) return {0.0, 1.0, true};

  // 2 * [l(rate_L, rate_R) - l(pooled)] with known shape; the linear terms
  // cancel because rate_hat * S = a * m for each fit.
  const double lr = 2.0 * shape *
                    (ml * std::log(ml / sl) + mr * std::log(mr / sr) -
                     (ml + mr) * std::log((ml + mr) / (sl + sr)));
  const double stat = std::max(0.0, lr);
  return {stat, chi_squared_sf(stat, 1.0), false};
}

namespace {

std::vector<ChangepointTest> test_at_changepoints(const std::vector<double>& z,
                                                  const std::vector<int>& cps,
                                                  double shape, double alpha) {
  std::vector<ChangepointTest> out;
  out.reserve(cps.size());
  for (std::size_t j = 0; j < cps.size(); ++j) {
    const int lo = j == 0 ? 0 : cps[j - 1];
    const int hi = j + 1 < cps.size() ? cps[j + 1] : static_cast<int>(z.size());
    const std::vector<double> left(z.begin() + lo, z.begin() + cps[j]);
    const std::vector<double> right(z.begin() + cps[j], z.begin() + hi);
    const RateChangeTest t = test_rate_change(left, right, shape);
    out.push_back({cps[j], t.lr_stat, t.p, t.p < alpha});
  }
  return out;
}

}  // namespace

std::uint64_t series_checksum(const std::vector<double>& v) {
  // FNV-1a over the raw bytes.
  std::uint64_t h = 1469598103934665603ull;
  for (double d : v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &d, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  }
  return h;
}

ChangepointResult run_pipeline(const std::vector<double>& x, Method method,
                               double penalty, int min_segment, double alpha,
                               RngState& rng) {
  ChangepointResult result;
  result.method = method;
  result.seed = rng.seed();
  result.alpha = alpha;

  if (method == Method::Naive) {
    const auto z = square_transform(x);
    result.estimated_cps = detect_changepoints(z, 0.5, penalty, min_segment);
    result.per_cp = test_at_changepoints(z, result.estimated_cps, 0.5, alpha);
    result.detect_checksum = series_checksum(z);
    result.test_checksum = series_checksum(z);
    return result;
  }

  const ThinnedSeries ts = thin_series(x, rng);
  result.estimated_cps = detect_changepoints(ts.train, 0.25, penalty, min_segment);
  result.per_cp = test_at_changepoints(ts.test, result.estimated_cps, 0.25, alpha);
  result.detect_checksum = series_checksum(ts.train);
  result.test_checksum = series_checksum(ts.test);
  return result;
}

std::vector<StabilityRow> stability_analysis(const std::vector<double>& x,
                                             int repeats, int window,
                                             double penalty, int min_segment,
                                             double alpha, RngState& rng) {
  if (window < 1) fail(errc::invalid_parameter, "window must be >= 1", "window");
  const int n = static_cast<int>(x.size());
  const int n_windows = (n + window - 1) / window;
  std::vector<long> detected(static_cast<std::size_t>(n_windows), 0);
  std::vector<long> rejected(static_cast<std::size_t>(n_windows), 0);

  for (int r = 0; r < repeats; ++r) {
    RngState rep_rng = rng.split(static_cast<std::uint64_t>(r));
    const ChangepointResult res =
        run_pipeline(x, Method::Thinned, penalty, min_segment, alpha, rep_rng);
    std::vector<bool> win_detected(static_cast<std::size_t>(n_windows), false);
    std::vector<bool> win_rejected(static_cast<std::size_t>(n_windows), false);
    for (const auto& t : res.per_cp) {
      const int w = t.index / window;
      win_detected[static_cast<std::size_t>(w)] = true;
      if (t.reject) win_rejected[static_cast<std::size_t>(w)] = true;
    }
    for (int w = 0; w < n_windows; ++w) {
      if (win_detected[static_cast<std::size_t>(w)]) ++detected[static_cast<std::size_t>(w)];
      if (win_rejected[static_cast<std::size_t>(w)]) ++rejected[static_cast<std::size_t>(w)];
    }
  }

  std::vector<StabilityRow> rows;
  rows.reserve(static_cast<std::size_t>(n_windows));
  for (int w = 0; w < n_windows; ++w) {
    StabilityRow row;
    row.window_start = w * window;
    if (repeats > 0) {
      row.detected_freq =
          static_cast<double>(detected[static_cast<std::size_t>(w)]) / repeats;
      row.rejected_freq =
          static_cast<double>(rejected[static_cast<std::size_t>(w)]) / repeats;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> simulate_null_series(int n, RngState& rng) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = rng.normal();
  return x;
}

std::vector<double> simulate_alternative_series(RngState& rng) {
  std::vector<double> x(2000);
  for (int i = 0; i < 2000; ++i) {
    double sd;
    if (i < kAlternativeChangepoints[0]) {
      sd = 2.0;  // variance 4
    } else if (i < kAlternativeChangepoints[1]) {
      sd = 5.0;  // variance 25
    } else {
      sd = 1.0;
    }
    x[static_cast<std::size_t>(i)] = sd * rng.normal();
  }
  return x;
}

nlohmann::json changepoint_result_to_json(const ChangepointResult& r) {
  nlohmann::json tests = nlohmann::json::array();
  for (const auto& t : r.per_cp)
    tests.push_back({{"index", t.index},
                     {"lr_statistic", t.lr_stat},
                     {"p_value", t.p},
                     {"reject_at_alpha", t.reject}});
  return {{"method", method_name(r.method)},
          {"seed", r.seed},
          {"alpha", r.alpha},
          {"estimated_cps", r.estimated_cps},
          {"per_cp", tests}};
}

std::string stability_csv(const std::vector<StabilityRow>& rows) {
  std::ostringstream out;
  out.precision(10);
  out << "window,detected_freq,rejected_freq\n";
  for (const auto& r : rows)
    out << r.window_start << ',' << r.detected_freq << ',' << r.rejected_freq
        << '\n';
  return out.str();
}

}  // namespace thinning
