#include <doctest.h>

#include <atomic>
#include <set>
#include <stdexcept>

#include "isosim/common.hpp"

using namespace isosim;

TEST_CASE("rng streams are reproducible and seed-sensitive") {
  Rng a(7), b(7), c(8);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.bits();
    CHECK(x == b.bits());
    (void)c;
  }
  CHECK(Rng(7).bits() != Rng(8).bits());
}

TEST_CASE("rng draws stay in range") {
  Rng r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(7) < 7u);
  }
}

TEST_CASE("sample_without_replacement returns distinct indices") {
  Rng r(3);
  for (std::size_t k : {0u, 1u, 5u, 20u}) {
    const auto s = sample_without_replacement(r, 20, k);
    CHECK(s.size() == k);
    CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == k);
    for (auto i : s) CHECK(i < 20u);
  }
  CHECK_THROWS_AS(sample_without_replacement(r, 3, 4), PreconditionError);
}

TEST_CASE("derive_seed separates streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 10; ++a)
    for (std::uint64_t b = 0; b < 10; ++b) seen.insert(derive_seed(42, a, b));
  CHECK(seen.size() == 100);
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
}

TEST_CASE("parallel_for visits each index once and propagates failures") {
  set_thread_count(4);
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);

  CHECK_THROWS_AS(parallel_for(100, [](std::size_t i) {
                    if (i == 37) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);

  std::atomic<int> inner{0};
  parallel_for(4, [&](std::size_t) { parallel_for(5, [&](std::size_t) { inner++; }); });
  CHECK(inner.load() == 20);
  set_thread_count(0);
}

TEST_CASE("euclidean distance of a 3-4-5 triangle") {
  const std::vector<double> a{0.0, 0.0}, b{3.0, 4.0};
  CHECK(l2(a, b) == 5.0);
  CHECK(squared_l2(a, b) == 25.0);
}
