#pragma once

#include <cstddef>
#include <functional>

namespace wienerlab {

/// Process-wide worker cap (CLI --threads). 0 means hardware concurrency.
void set_max_threads(unsigned n) noexcept;
[[nodiscard]] unsigned max_threads() noexcept;

/// Runs fn(i) for i in [begin, end) on up to max_threads() workers.
///
/// Each index is handled exactly once and workers write only to
/// index-owned slots, so results cannot depend on the thread count.
/// Reductions over the results must be done serially by the caller.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

/// Chunked variant for loops that amortize per-task setup.
void parallel_for_chunked(std::size_t begin, std::size_t end,
                          const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace wienerlab
