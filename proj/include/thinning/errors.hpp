#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace thinning {

// All library failures carry a stable machine-readable code alongside the
// human-readable message. The CLI surfaces these as JSON on stderr.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(std::move(code)), field_(std::move(field)) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string code_;
  std::string field_;
};

namespace errc {
inline constexpr const char* invalid_parameter = "InvalidParameter";
inline constexpr const char* domain_error = "DomainError";
inline constexpr const char* unsupported = "Unsupported";
inline constexpr const char* unsupported_family = "UnsupportedFamily";
inline constexpr const char* non_integer_allocation = "NonIntegerAllocation";
inline constexpr const char* unknown_required_parameter = "UnknownRequiredParameter";
inline constexpr const char* shape_mismatch = "ShapeMismatch";
inline constexpr const char* invalid_nu = "InvalidNu";
inline constexpr const char* out_of_support = "OutOfSupport";
inline constexpr const char* mcmc_non_convergence = "McmcNonConvergence";
inline constexpr const char* transform_domain_error = "TransformDomainError";
inline constexpr const char* size_mismatch = "SizeMismatch";
inline constexpr const char* empty_folds = "EmptyFolds";
inline constexpr const char* invalid_gamma = "InvalidGamma";
inline constexpr const char* degenerate_input = "DegenerateInput";
inline constexpr const char* bad_init = "BadInit";
inline constexpr const char* non_finite_target = "NonFiniteTarget";
inline constexpr const char* unsorted_input = "UnsortedInput";
inline constexpr const char* degenerate_pits = "DegeneratePits";
inline constexpr const char* series_too_short = "SeriesTooShort";
inline constexpr const char* empty_segment = "EmptySegment";
inline constexpr const char* config_error = "ConfigError";
inline constexpr const char* io_error = "IoError";
}  // namespace errc

[[noreturn]] inline void fail(const char* code, const std::string& message,
                              std::string field = {}) {
  throw Error(code, message, std::move(field));
}

}  // namespace thinning
