#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace ocsrbench::mosaic {

/// A percentage held as an exact count of hundredths of a percent, so two-decimal output
/// never depends on floating-point rounding.
struct Percent {
  std::int64_t hundredths = 0;

  /// 100 * numerator / denominator rounded half-up to 2 decimals. denominator must be > 0.
  static Percent of(std::uint64_t numerator, std::uint64_t denominator);

  /// "93.29", "0.00", "100.00".
  std::string to_string() const;
  double value() const { return static_cast<double>(hundredths) / 100.0; }

  auto operator<=>(const Percent&) const = default;
};

}  // namespace ocsrbench::mosaic
