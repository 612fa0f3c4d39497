#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "grl/rng.hpp"

namespace grl {

/// Walker/Vose alias table: O(n) construction, O(1) draws.
class AliasTable {
 public:
  /// Outcomes per table are limited to 2^24 so a slot packs into 64 bits.
  static constexpr std::size_t kMaxOutcomes = std::size_t{1} << 24;

  AliasTable() = default;

  /// From nonnegative weights with a positive sum; normalization is internal.
  explicit AliasTable(std::span<const double> weights);

  /// From a probability vector that must already sum to 1 within 1e-9.
  static AliasTable from_probabilities(std::span<const double> probabilities);

  /// Rebuilds in place, reusing storage.
  void assign(std::span<const double> weights);

  std::size_t size() const { return slots_.size(); }
  bool empty() const { return slots_.empty(); }

  /// One 64-bit draw x: the high word of x * n picks the slot, the low word
  /// is the coin.
  std::uint32_t sample(CounterRng& rng) const {
    const auto m = static_cast<unsigned __int128>(rng()) * slots_.size();
    const auto i = static_cast<std::uint64_t>(m >> 64);
    const std::uint64_t slot = slots_[i];
    return (static_cast<std::uint64_t>(m) >> 24) < (slot & kThresholdMask) ? static_cast<std::uint32_t>(i)
                                                                            : static_cast<std::uint32_t>(slot >> 40);
  }

  /// Probabilities implied by the slots (thresholds are 40-bit fixed point,
  /// within 2^-41 of the input per entry).
  std::vector<double> reconstruct() const;

 private:
  // alias << 40 | threshold, the threshold in units of 2^-40; the own outcome
  // is kept when the coin is below it.  Full slots alias themselves.
  static constexpr std::uint64_t kThresholdMask = (std::uint64_t{1} << 40) - 1;
  std::vector<std::uint64_t> slots_;
};

}  // namespace grl
