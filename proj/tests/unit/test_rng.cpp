#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "thinshell/parallel.hpp"
#include "thinshell/rng.hpp"

namespace thinshell {
namespace {

using Block = std::array<std::uint32_t, 4>;

TEST(Philox, KnownAnswerZero) {
  EXPECT_EQ(CounterRng::philox({0, 0, 0, 0}, {0, 0}), (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerOnes) {
  const std::uint32_t f = 0xffffffffu;
  EXPECT_EQ(CounterRng::philox({f, f, f, f}, {f, f}), (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi) {
  EXPECT_EQ(CounterRng::philox({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterRng, RowsAreReproducibleAndIndependent) {
  CounterRng a(42, Stream::base_sample, 17), b(42, Stream::base_sample, 17), c(42, Stream::base_sample, 18);
  const std::uint64_t a0 = a.next_u64();
  EXPECT_EQ(a0, b.next_u64());
  EXPECT_NE(a0, c.next_u64());
}

TEST(CounterRng, StreamsDiffer) {
  CounterRng a(42, Stream::base_sample), b(42, Stream::haar);
  EXPECT_NE(a.next_u64(), b.next_u64());
}

TEST(CounterRng, UniformIsInOpenUnitInterval) {
  CounterRng rng(1, Stream::base_sample);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(CounterRng, NormalAndExponentialMoments) {
  CounterRng rng(3, Stream::base_sample);
  const int count = 200000;
  double s1 = 0, s2 = 0, e1 = 0;
  for (int i = 0; i < count; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
    e1 += rng.exponential();
  }
  EXPECT_NEAR(s1 / count, 0.0, 5.0 / std::sqrt(count));
  EXPECT_NEAR(s2 / count, 1.0, 5.0 * std::sqrt(2.0 / count));
  EXPECT_NEAR(e1 / count, 1.0, 5.0 / std::sqrt(count));
}

TEST(Parallel, BlocksAreCoveredOnceForAnyWorkerCount) {
  for (int workers : {1, 3}) {
    set_worker_count(workers);
    std::vector<int> hits(1000, 0);
    for_each_block(hits.size(), 64, [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) ++hits[i];
    });
    for (int h : hits) ASSERT_EQ(h, 1);
  }
  set_worker_count(1);
}

TEST(Parallel, ExceptionsPropagate) {
  set_worker_count(2);
  EXPECT_THROW(for_each_block(100, 10,
                              [](std::size_t b, std::size_t, std::size_t) {
                                if (b == 3) throw std::runtime_error("block");
                              }),
               std::runtime_error);
  set_worker_count(1);
}

}  // namespace
}  // namespace thinshell
