#include <array>
#include <cmath>
#include "doctest.h"
#include "grl/rng.hpp"

using grl::Rng;

TEST_CASE("rng is deterministic per seed") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  bool differs = false;
  Rng a2(42);
  for (int i = 0; i < 10; ++i) differs = differs || a2.uniform() != c.uniform();
  CHECK(differs);
}

TEST_CASE("substreams are independent of draw order and of each other") {
  Rng root(7);
  Rng env1 = root.substream("env");
  root.substream("policy").uniform();  // interleaved use of another stream
  Rng env2 = Rng(7).substream("env");
  for (int i = 0; i < 50; ++i) CHECK(env1.uniform() == env2.uniform());

  Rng p = Rng(7).substream("policy");
  Rng e = Rng(7).substream("env");
  bool differs = false;
  for (int i = 0; i < 10; ++i) differs = differs || p.uniform() != e.uniform();
  CHECK(differs);
}

TEST_CASE("normal draws have sane first moments") {
  Rng r(11);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("uniform_int stays in range and covers it") {
  Rng r(3);
  std::array<int, 12> counts{};
  for (int i = 0; i < 12000; ++i) {
    const int v = r.uniform_int(12);
    REQUIRE(v >= 0);
    REQUIRE(v < 12);
    ++counts[static_cast<std::size_t>(v)];
  }
  for (const int c : counts) CHECK(c > 700);
}
