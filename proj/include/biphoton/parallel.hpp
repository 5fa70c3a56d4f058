#pragma once

#include <cstddef>
#include <functional>

namespace biphoton {

/// Number of worker threads; honors the BIPHOTON_THREADS environment cap.
std::size_t worker_count();

/// Runs body(begin, end) over disjoint chunks of [0, n).  Each index is
/// processed by exactly one worker and inner summation order is up to the
/// body, so results are bit-identical for any thread count.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

} // namespace biphoton
