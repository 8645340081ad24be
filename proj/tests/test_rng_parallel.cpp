#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "berrylab/parallel.hpp"
#include "berrylab/rng.hpp"

using namespace berrylab;

TEST(Rng, StreamsArePureFunctionsOfKeyLaneAndIndex) {
  GaussianStream a(derive_key(42, 7), 0), b(derive_key(42, 7), 0);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next(), b.next());
  GaussianStream c(derive_key(42, 8), 0);
  GaussianStream d(derive_key(42, 7), 1);
  GaussianStream e(derive_key(42, 7), 0);
  const double first = e.next();
  EXPECT_NE(first, c.next());
  EXPECT_NE(first, d.next());
}

TEST(Rng, DerivedKeysDoNotCollideOnSmallRange) {
  std::set<std::uint64_t> keys;
  for (std::uint64_t s = 0; s < 4; ++s)
    for (std::uint64_t n = 0; n < 20000; ++n) keys.insert(derive_key(s, n));
  EXPECT_EQ(keys.size(), 80000u);
}

TEST(Rng, GaussianMomentsMatchStandardNormal) {
  GaussianStream g(12345, 0);
  const int n = 400000;
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = g.next();
    m1 += z;
    m2 += z * z;
    m3 += z * z * z;
    m4 += z * z * z * z;
  }
  m1 /= n; m2 /= n; m3 /= n; m4 /= n;
  const double tol = 5.0 / std::sqrt(n);
  EXPECT_NEAR(m1, 0.0, tol);
  EXPECT_NEAR(m2, 1.0, tol * std::sqrt(2.0));
  EXPECT_NEAR(m3, 0.0, tol * std::sqrt(15.0));
  EXPECT_NEAR(m4, 3.0, tol * std::sqrt(96.0));
}

TEST(Rng, BoundedIntegersStayInRangeAndCoverIt) {
  UniformStream u(99, 0);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = u.below(7);
    ASSERT_LT(v, 7u);
    ++hist[v];
  }
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    ASSERT_GT(x, 0.0);
    ASSERT_LT(x, 1.0);
  }
}

TEST(Parallel, CoversEveryIndexOnceForAnyWorkerCount) {
  for (unsigned threads : {1u, 2u, 4u, 8u}) {
    std::vector<std::atomic<int>> hits(1001);
    parallel_for(hits.size(), threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) hits[i]++;
    }, 16);
    for (auto& h : hits) ASSERT_EQ(h.load(), 1);
  }
}

TEST(Parallel, RethrowsWorkerException) {
  EXPECT_THROW(parallel_for(100, 4, [](std::size_t b, std::size_t) {
                 if (b >= 50) throw std::runtime_error("boom");
               }, 10),
               std::runtime_error);
}

TEST(Parallel, ZeroCountIsANoOp) {
  bool called = false;
  parallel_for(0, 4, [&](std::size_t, std::size_t) { called = true; });
  EXPECT_FALSE(called);
  EXPECT_GE(resolve_threads(0), 1u);
  EXPECT_EQ(resolve_threads(3), 3u);
}
