#pragma once

#include <optional>
#include <random>

#include "deadcore/errors.hpp"

namespace testing {

template <typename F>
std::optional<deadcore::ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const deadcore::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

}  // namespace testing
