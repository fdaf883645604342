#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace thinshell {

void set_worker_count(int workers);
int worker_count();

inline std::size_t block_count(std::size_t count, std::size_t block) {
  return block == 0 ? 0 : (count + block - 1) / block;
}

// Runs body(block_index, begin, end) over fixed index blocks. Block boundaries
// depend only on (count, block), so callers that combine per-block results in
// block order get the same answer for any worker count.
template <class Body>
void for_each_block(std::size_t count, std::size_t block, Body&& body) {
  const std::size_t blocks = block_count(count, block);
  const auto workers = static_cast<std::size_t>(std::max(1, worker_count()));
  if (workers == 1 || blocks <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) body(b, b * block, std::min(count, (b + 1) * block));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::size_t b = next++; b < blocks; b = next++) {
      try {
        body(b, b * block, std::min(count, (b + 1) * block));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < std::min(workers, blocks); ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace thinshell
