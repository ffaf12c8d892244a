// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace nohis {

enum class Errc {
  invalid_argument,
  empty_cluster,
  degenerate_cluster,
  unnormalized_direction,
  dimension_mismatch,
  unbalanced_split,
  bad_magic,
  version_mismatch,
  truncated,
  corrupt_stream,
  unsupported_format,
  patch_out_of_bounds,
  featureless_query,
  io,
};

/// Library-wide exception; `code()` distinguishes failure classes that
/// callers (and the CLI exit-code mapping) need to tell apart.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace nohis
