/* Copyright 2026 The camforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <atomic>
#include <cmath>
#include <limits>
#include <random>

#include "camforge/error.hpp"
#include "camforge/parallel.hpp"
#include "camforge/rng.hpp"
#include "camforge/text.hpp"
#include "doctest.h"

namespace camforge {
namespace {

TEST_CASE("philox4x32-10 known answers") {
  // Published known-answer vectors for Philox4x32 with 10 rounds.
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::generate(C{0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("counter streams are pure functions of key, stream and lane") {
  CounterStream a(42, 7), b(42, 7), c(42, 8), d(42, 7, 1);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 64; ++i) {
    const auto va = a();
    CHECK(va == b());
    differs_c |= va != c();
    differs_d |= va != d();
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("counter stream unit draws are uniform enough") {
  CounterStream s(1, 2);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = s.next_unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // Mean of U(0,1) has sd 1/sqrt(12 n).
  CHECK(std::abs(sum / n - 0.5) < 4.0 / std::sqrt(12.0 * n));
  for (int i = 0; i < 1000; ++i) CHECK(s.next_below(7) < 7);
}

TEST_CASE("fnv1a64 reference values") {
  static_assert(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("shortest double formatting round-trips") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(gen);
    double back = 0.0;
    REQUIRE(text::parse_double(text::format_double(v), back));
    CHECK(back == v);
  }
  CHECK(text::format_double(0.25) == "0.25");
  CHECK(text::format_fixed(0.42, 4) == "0.4200");
}

TEST_CASE("strict number parsing") {
  double d = 0;
  long long i = 0;
  std::uint64_t u = 0;
  CHECK(text::parse_double(" 1.5 ", d));
  CHECK(d == 1.5);
  CHECK_FALSE(text::parse_double("1.5x", d));
  CHECK_FALSE(text::parse_double("", d));
  CHECK(text::parse_int("-3", i));
  CHECK(i == -3);
  CHECK_FALSE(text::parse_int("3.0", i));
  CHECK(text::parse_u64("18446744073709551615", u));
  CHECK(u == std::numeric_limits<std::uint64_t>::max());
  CHECK_FALSE(text::parse_u64("-1", u));
}

TEST_CASE("split, join and trim") {
  CHECK(text::split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
  CHECK(text::join({"x", "y"}, "|") == "x|y");
  CHECK(text::trim("  z \t") == "z");
}

TEST_CASE("parallel_for visits every index and reports the lowest failure") {
  for (int jobs : {1, 4}) {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(hits.size(), jobs, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);

    try {
      parallel_for(50, jobs, [](std::size_t i) {
        if (i == 13 || i == 31) fail(ErrorCode::kInternal, "item " + std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const Error& e) {
      CHECK(std::string(e.what()) == "item 13");
    }
  }
}

}  // namespace
}  // namespace camforge
