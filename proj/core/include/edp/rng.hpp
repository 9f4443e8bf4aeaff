#pragma once

// Counter-based random numbers (Philox4x32-10) and a deterministic parallel
// loop. Every draw owns a stream keyed by (seed, experiment, draw index), so
// output never depends on how draws are spread over threads.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace edp {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint32_t experiment, std::uint64_t draw_index);

  std::uint32_t next_u32();
  // Uniform on (0, 1) with 53 random bits; never returns 0 or 1.
  double uniform();

 private:
  PhiloxKey key_;
  PhiloxCounter counter_;
  PhiloxCounter block_{};
  int used_ = 4;
};

// Worker count: EDP_THREADS when set and positive, else the hardware count.
unsigned worker_count();

// Runs body(chunk) for chunk = 0..chunks-1 on up to `threads` workers
// (0 means worker_count()). Exceptions are rethrown on the caller, the one
// from the lowest chunk index first.
void parallel_chunks(std::size_t chunks, const std::function<void(std::size_t)>& body,
                     unsigned threads = 0);

}  // namespace edp
