#pragma once

#include <cstddef>
#include <functional>

namespace tapered {

/// Thread count: explicit request if positive, else TAPERED_THREADS, else hardware.
unsigned resolve_threads(int requested);

/// Runs body(i) for i in [0, n) on contiguous chunks. Each index is visited once;
/// results must be written to per-index slots so the output does not depend on
/// the thread count.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

} // namespace tapered
