#pragma once

#include <bit>
#include <cstdint>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <unordered_map>

#include "edp/tilt_record.hpp"

namespace edp::detail {

// Per-spec cache of tilt records keyed by the bit pattern of t, and of solved
// tilts keyed by the bit pattern of the target mean. Inserts are idempotent:
// the same key always maps to the same (deterministically computed) value.
class TiltMemo {
 public:
  std::optional<TiltRecord> find_record(double t) const {
    std::shared_lock lock(mutex_);
    auto it = records_.find(std::bit_cast<std::uint64_t>(t));
    if (it == records_.end()) return std::nullopt;
    return it->second;
  }
  void store_record(const TiltRecord& record) {
    std::unique_lock lock(mutex_);
    records_.emplace(std::bit_cast<std::uint64_t>(record.t), record);
  }
  std::optional<double> find_tilt(double a) const {
    std::shared_lock lock(mutex_);
    auto it = tilts_.find(std::bit_cast<std::uint64_t>(a));
    if (it == tilts_.end()) return std::nullopt;
    return it->second;
  }
  void store_tilt(double a, double t) {
    std::unique_lock lock(mutex_);
    tilts_.emplace(std::bit_cast<std::uint64_t>(a), t);
  }

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::uint64_t, TiltRecord> records_;
  std::unordered_map<std::uint64_t, double> tilts_;
};

}  // namespace edp::detail
