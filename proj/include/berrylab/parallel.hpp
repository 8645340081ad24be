#pragma once

#include <cstddef>
#include <functional>

namespace berrylab {

/// Resolves a requested worker count; 0 means "all hardware threads".
unsigned resolve_threads(unsigned requested);

/// Runs body(begin, end) over [0, count) in fixed-size chunks on up to
/// `threads` workers. Chunk boundaries do not depend on the worker count,
/// so bodies writing disjoint per-index slots give identical results for
/// any number of workers. The first exception thrown by a body is rethrown.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t chunk = 64);

}  // namespace berrylab
