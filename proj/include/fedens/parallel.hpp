#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace fedens {

//! Splits [0, count) into at most `threads` contiguous chunks and runs
//! body(chunk, begin, end) on each, one thread per chunk. The partition
//! depends only on (count, threads). The first exception thrown by any
//! chunk (lowest chunk id) is rethrown after all workers have joined.
template<typename Body>
void
parallel_chunks(Eigen::Index count, int threads, Body&& body)
{
  const Eigen::Index chunks =
    std::max<Eigen::Index>(1, std::min<Eigen::Index>(threads, count));
  if (chunks == 1) {
    body(Eigen::Index(0), Eigen::Index(0), count);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chunks));
  {
    std::vector<std::jthread> workers;
    workers.reserve(static_cast<std::size_t>(chunks));
    for (Eigen::Index c = 0; c < chunks; ++c) {
      const Eigen::Index begin = count * c / chunks;
      const Eigen::Index end = count * (c + 1) / chunks;
      workers.emplace_back([&, c, begin, end] {
        try {
          body(c, begin, end);
        } catch (...) {
          errors[static_cast<std::size_t>(c)] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

} // namespace fedens
