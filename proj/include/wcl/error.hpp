#pragma once

#include <stdexcept>
#include <string>

namespace wcl {

enum class ErrorCode {
  invalid_argument,
  zero_distance,
  no_node_above_pmin,
  empty_set,
  degenerate_geometry,
  denominator_not_sign_definite,
  quadrature_failed,
  not_psd,
  degenerate_reduction,
  series_failed,
  isolated_cluster,
  no_active_clusters,
  config,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wcl
