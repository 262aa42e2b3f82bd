#pragma once

// Property suite run by `shockctl validate`: one check per invariant of every
// module, with random fields drawn from a fixed seed.

#include <cstdint>
#include <string>
#include <vector>

namespace shockctl {

struct CheckResult {
  std::string module;
  std::string name;
  bool passed;
  std::string detail;
};

struct ValidateOptions {
  std::uint64_t seed = 20240917;
  /// Fault injection: the round-trip check uses a forward transform with the
  /// gain signs flipped, which must make it fail.
  bool flip_transform_sign = false;
};

std::vector<CheckResult> validate_suite(const ValidateOptions& options = {});

} // namespace shockctl
