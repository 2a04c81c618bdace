#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace qmqfc::detail {

/// Splits [0, n) into `workers` contiguous blocks and runs fn(begin, end, block)
/// on its own thread per block. The first exception thrown by a block is
/// rethrown after all threads join.
template <class Fn>
void parallel_blocks(std::uint64_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2) {
    fn(std::uint64_t{0}, n, 0u);
    return;
  }
  const auto blocks = static_cast<unsigned>(std::min<std::uint64_t>(workers, n));
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(blocks);
  threads.reserve(blocks);
  for (unsigned b = 0; b < blocks; ++b) {
    const std::uint64_t begin = n * b / blocks;
    const std::uint64_t end = n * (b + 1) / blocks;
    threads.emplace_back([&, begin, end, b] {
      try {
        fn(begin, end, b);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace qmqfc::detail
