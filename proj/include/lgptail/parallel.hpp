#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace lgptail {

/// Calls fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). The first exception thrown by any call is rethrown.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

/// Independent stream seed for task `index` under a base seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace lgptail
