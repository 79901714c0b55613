#pragma once

#include <cmath>
#include <cstdint>

namespace gcagent {

// Round to two decimals, halves away from zero. The nudge absorbs binary
// representation error so that e.g. 4.005 rounds to 4.01.
inline double round_2dp(double value) {
  double scaled = value * 100.0;
  double nudge = 1e-9 * std::fmax(1.0, std::fabs(scaled));
  return std::round(scaled + std::copysign(nudge, scaled)) / 100.0;
}

// Exact num/den rounded half-up to two decimals, for non-negative integers.
// Result is in hundredths.
inline int64_t ratio_hundredths(int64_t num, int64_t den) {
  return (2 * num * 100 + den) / (2 * den);
}

// Exact num/den * 100 rounded half-up to two decimals, in hundredths of a
// percent.
inline int64_t percent_hundredths(int64_t num, int64_t den) {
  return ratio_hundredths(num * 100, den);
}

inline double from_hundredths(int64_t hundredths) {
  return static_cast<double>(hundredths) / 100.0;
}

}  // namespace gcagent
