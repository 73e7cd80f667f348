#pragma once

#include <cstddef>

#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

namespace rdbss {

/// Runs `fn(i)` for i in [0, count) on the calling thread.
struct SerialExecutor {
  template <class Fn>
  void for_each(std::size_t count, Fn&& fn) const {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
  }
};

/// Fans work out over a TBB arena limited to `workers` threads.
class ParallelExecutor {
public:
  explicit ParallelExecutor(int workers) : arena_(workers > 0 ? workers : 1) {}

  template <class Fn>
  void for_each(std::size_t count, Fn&& fn) {
    arena_.execute([&] {
      tbb::parallel_for(std::size_t{0}, count, [&](std::size_t i) { fn(i); });
    });
  }

  int workers() const { return arena_.max_concurrency(); }

private:
  tbb::task_arena arena_;
};

} // namespace rdbss
