#pragma once

#include <cstddef>
#include <functional>

namespace kksketch {

/// Number of worker threads to use; 0 selects std::thread::hardware_concurrency().
struct Execution {
  unsigned threads = 0;

  unsigned resolved() const;
};

/// Runs body(i) for i in [0, count) on up to `exec.threads` workers.
/// Indices are claimed dynamically; callers write results into slot i so the
/// outcome never depends on the schedule. The first exception thrown by any
/// body is rethrown on the calling thread.
void parallel_for(std::size_t count, Execution exec,
                  const std::function<void(std::size_t)>& body);

}  // namespace kksketch
