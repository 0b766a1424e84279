#pragma once

#include <cstddef>
#include <functional>

namespace ccmtl {

// Runs fn(i) for i in [0, n) over up to `threads` worker threads, chunked
// contiguously.  Callers must ensure fn writes only to index-i slots so the
// result is identical for any thread count; reductions belong in a sequential
// pass afterwards.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

} // namespace ccmtl
