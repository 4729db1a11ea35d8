#pragma once

#include <cstdint>
#include <functional>

#include "ldr/types.hpp"

namespace ldr {

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
///
/// The index range is split into contiguous chunks, one per worker, so each
/// output slot has exactly one writer and results land in a fixed placement
/// regardless of scheduling. Reductions over the results must still be done
/// by the caller in index order. threads <= 1 runs inline.
void parallel_for(Index n, int threads, const std::function<void(Index)>& fn);

}  // namespace ldr
