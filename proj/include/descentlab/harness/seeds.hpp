#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string_view>

namespace descentlab {

/// Generator used everywhere randomness is drawn.
using Rng = std::mt19937_64;

/// Sub-seed for item `index` of the stream `label`:
///   h = fnv1a64(label); s = splitmix(master ^ splitmix(h) ^ splitmix(index + 1 + h))
/// Independent of evaluation order, so trials can run in any order or thread.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index);

std::uint64_t splitmix64(std::uint64_t x);

inline Rng make_rng(std::uint64_t master, std::string_view label, std::uint64_t index) {
  return Rng(derive_seed(master, label, index));
}

/// Calls body(i) for i in [0, count) on up to `threads` workers. Each index is
/// processed exactly once; callers store results by index so the outcome does
/// not depend on the thread count. Exceptions from the body are rethrown.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace descentlab
