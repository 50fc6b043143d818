#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gluenn/sampling.hpp"

using namespace gluenn;

TEST_CASE("linear spacing on a single interval") {
  SampleSpec spec;
  spec.intervals = {{0.1, 1.0}};
  spec.count = 10;
  spec.spacing = Spacing::linear;
  auto set = generate_samples("alpha", spec);
  REQUIRE(set.points.size() == 10);
  for (int i = 0; i < 10; ++i)
    CHECK(set.points[static_cast<std::size_t>(i)] == Catch::Approx(0.1 + 0.1 * i).epsilon(1e-14));
  CHECK(set.points.front() == 0.1);
  CHECK(set.points.back() == 1.0);
}

TEST_CASE("logarithmic spacing has constant neighbor ratios") {
  SampleSpec spec;
  spec.intervals = {{1.0, 1.9}};
  spec.count = 28;
  spec.spacing = Spacing::logarithmic;
  auto set = generate_samples("alpha", spec);
  REQUIRE(set.points.size() == 28);
  CHECK(set.points.front() == 1.0);
  CHECK(set.points.back() == 1.9);
  const double expected_ratio = std::pow(1.9, 1.0 / 27.0);
  for (std::size_t i = 1; i < set.points.size(); ++i) {
    const double r = set.points[i] / set.points[i - 1];
    CHECK(std::abs(r / expected_ratio - 1.0) < 1e-10);
  }
}

TEST_CASE("multi-interval allocation is proportional with preserved total") {
  SampleSpec spec;
  spec.intervals = {{-13.14, -5.09}, {4.03, 13.14}};
  spec.count = 340;
  spec.spacing = Spacing::linear;
  auto set = generate_samples("delta", spec);
  REQUIRE(set.points.size() == 340);
  // lengths 8.05 : 9.11 -> shares 159.4988 / 180.5012 -> 159 / 181
  std::size_t first = 0;
  for (double p : set.points)
    if (p <= -5.09 + 1e-12) ++first;
  CHECK(first == 159);
  CHECK(set.points.front() == -13.14);
  CHECK(set.points.back() == 13.14);
  // endpoints of the interior gap are included
  CHECK(std::count_if(set.points.begin(), set.points.end(),
                      [](double p) { return std::abs(p + 5.09) < 1e-12; }) == 1);
  CHECK(std::count_if(set.points.begin(), set.points.end(),
                      [](double p) { return std::abs(p - 4.03) < 1e-12; }) == 1);
  for (std::size_t i = 1; i < set.points.size(); ++i) CHECK(set.points[i] > set.points[i - 1]);
}

TEST_CASE("sample generation is a pure function of its spec") {
  SampleSpec spec;
  spec.intervals = {{1.0, 124.0}};
  spec.count = 650;
  spec.spacing = Spacing::logarithmic;
  auto a = generate_samples("beta", spec);
  auto b = generate_samples("beta", spec);
  CHECK(a.points == b.points);
}

TEST_CASE("invalid specs are rejected") {
  SampleSpec spec;
  spec.intervals = {{0.0, 1.0}};
  spec.count = 10;
  spec.spacing = Spacing::logarithmic;
  CHECK_THROWS_AS(generate_samples("bad", spec), Error);  // nonpositive lo under log

  spec.intervals = {{1.0, 2.0}};
  spec.count = 1;
  CHECK_THROWS_AS(generate_samples("bad", spec), Error);  // count below 2
}
