#pragma once

#include <array>
#include <cstdint>

namespace thinshell {

// Fixed sub-stream identifiers. Each consumer of randomness owns one so that
// draws for different purposes never share a counter sequence.
enum class Stream : std::uint64_t {
  base_sample = 0,
  convolution_noise = 1,
  haar = 2,
  directions = 3,
  bootstrap = 4,
  probes = 5,
  pairs = 6,
  subspaces = 7,
  kde = 8,
  corruption = 9,
};

// Philox4x32-10 counter-based generator. The key is derived from (seed,
// stream); the 128-bit counter is (row, draw index). Any row can be generated
// independently of every other row.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, Stream stream, std::uint64_t row = 0);

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double exponential();

  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_{};
  std::uint64_t row_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace thinshell
