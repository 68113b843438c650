#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "vinstruct/types.hpp"

namespace vinstruct {

/// Canonical text encoding of a scene for golden-file diffing: one line per
/// instance sorted by (name, index), every number printed with 9 decimals.
/// Equal scenes give byte-equal snapshots.
std::string snapshot(const SceneState& scene);

/// "%.9f" with negative zero printed as zero.
std::string format_fixed(double value);

/// Differing region after stripping the common prefix and suffix:
/// expected[begin, expected_end) was replaced by actual[begin, actual_end).
struct ByteDiff {
  std::size_t begin = 0;
  std::size_t expected_end = 0;
  std::size_t actual_end = 0;
};

/// nullopt when the two texts are identical.
std::optional<ByteDiff> differing_range(const std::string& expected, const std::string& actual);

}  // namespace vinstruct
