#include "grl/alias_table.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "grl/common.hpp"

namespace grl {

namespace {

std::uint64_t make_slot(double threshold, std::uint32_t alias, std::uint32_t self) {
  const double scaled = std::round(threshold * 0x1.0p40);
  if (!(scaled < 0x1.0p40)) return (std::uint64_t{self} << 40) | ((std::uint64_t{1} << 40) - 1);
  return (std::uint64_t{alias} << 40) | static_cast<std::uint64_t>(std::max(scaled, 0.0));
}

}  // namespace

AliasTable::AliasTable(std::span<const double> weights) { assign(weights); }

AliasTable AliasTable::from_probabilities(std::span<const double> probabilities) {
  double total = 0.0;
  for (double p : probabilities) total += p;
  if (std::abs(total - 1.0) > 1e-9) {
    throw UsageError("alias table input sums to " + std::to_string(total) + ", expected 1");
  }
  return AliasTable(probabilities);
}

void AliasTable::assign(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw UsageError("alias table needs at least one outcome");
  if (n > kMaxOutcomes) throw UsageError("alias table supports at most 2^24 outcomes");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw UsageError("alias table weights must be finite and nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw UsageError("alias table weights sum to zero");

  // Construction scratch is per thread so stored tables hold only their slots.
  thread_local std::vector<double> scaled_;
  thread_local std::vector<std::uint32_t> small_;
  thread_local std::vector<std::uint32_t> large_;
  slots_.resize(n);
  slots_.shrink_to_fit();
  scaled_.resize(n);
  small_.clear();
  large_.clear();
  const double scale = static_cast<double>(n) / total;
  for (std::size_t i = 0; i < n; ++i) {
    scaled_[i] = weights[i] * scale;
    (scaled_[i] < 1.0 ? small_ : large_).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small_.empty() && !large_.empty()) {
    const std::uint32_t s = small_.back();
    small_.pop_back();
    const std::uint32_t l = large_.back();
    slots_[s] = make_slot(scaled_[s], l, s);
    scaled_[l] = (scaled_[l] + scaled_[s]) - 1.0;
    if (scaled_[l] < 1.0) {
      large_.pop_back();
      small_.push_back(l);
    }
  }
  // Leftovers carry rounding error only; they keep their own outcome.
  for (std::uint32_t i : large_) slots_[i] = make_slot(1.0, i, i);
  for (std::uint32_t i : small_) slots_[i] = make_slot(1.0, i, i);
}

std::vector<double> AliasTable::reconstruct() const {
  const std::size_t n = slots_.size();
  std::vector<double> p(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto alias = static_cast<std::uint32_t>(slots_[i] >> 40);
    const double keep = alias == i ? 1.0 : static_cast<double>(slots_[i] & kThresholdMask) * 0x1.0p-40;
    p[i] += keep;
    p[alias] += 1.0 - keep;
  }
  for (double& v : p) v /= static_cast<double>(n);
  return p;
}

}  // namespace grl
