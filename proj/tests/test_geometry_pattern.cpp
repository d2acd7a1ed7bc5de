#include <doctest.h>

#include "mgibbs/geometry.hpp"
#include "mgibbs/io.hpp"
#include "mgibbs/pattern.hpp"
#include "mgibbs/rng.hpp"
#include "test_util.hpp"

using namespace mgibbs;

TEST_CASE("window erosion") {
  const Window w(0, 10, 0, 10);
  SUBCASE("zero radius is the identity") {
    const Window e = w.eroded(0.0);
    CHECK(e.x_min == 0.0);
    CHECK(e.x_max == 10.0);
    CHECK(e.area() == doctest::Approx(100.0));
  }
  SUBCASE("30 m buffer on a 1000x500 window") {
    const Window e = Window(0, 1000, 0, 500).eroded(30.0);
    CHECK(e.x_min == doctest::Approx(30.0));
    CHECK(e.x_max == doctest::Approx(970.0));
    CHECK(e.y_min == doctest::Approx(30.0));
    CHECK(e.y_max == doctest::Approx(470.0));
  }
  SUBCASE("collapse is an error") {
    CHECK_THROWS_AS(w.eroded(5.0), degenerate_window_error);
    CHECK_THROWS_AS(w.eroded(6.0), degenerate_window_error);
  }
  SUBCASE("erosion composes additively") {
    RngStream rng(7);
    for (int i = 0; i < 50; ++i) {
      const double a = rng.uniform(0.0, 2.0);
      const double b = rng.uniform(0.0, 2.0);
      const Window lhs = w.eroded(a).eroded(b);
      const Window rhs = w.eroded(a + b);
      CHECK(lhs.x_min == doctest::Approx(rhs.x_min).epsilon(1e-12));
      CHECK(lhs.y_max == doctest::Approx(rhs.y_max).epsilon(1e-12));
    }
  }
}

TEST_CASE("pattern subsetting") {
  const Window w(0, 10, 0, 10);
  RngStream rng(11);
  MultiTypePattern pat = testutil::random_pattern(w, 3, 10, rng);

  SUBCASE("full window keeps everything") {
    const MultiTypePattern sub = pat.subset_in_region(w);
    CHECK(sub.size() == pat.size());
    CHECK(sub.p == pat.p);
  }
  SUBCASE("disjoint region keeps the type count") {
    MultiTypePattern far(w, 3);
    for (std::size_t i = 0; i < pat.size(); ++i) {
      far.add(pat.x[i] * 0.4, pat.y[i] * 0.4, pat.type[i]);  // inside [0,4]
    }
    const MultiTypePattern sub = far.subset_in_region(Window(5, 10, 5, 10));
    CHECK(sub.size() == 0);
    CHECK(sub.p == 3);
  }
  SUBCASE("half-window split preserves the total") {
    const Window left(0, 5, 0, 10), right(5, 10, 0, 10);
    std::size_t on_cut = 0;
    for (double x : pat.x) on_cut += x == 5.0 ? 1 : 0;
    CHECK(pat.subset_in_region(left).size() + pat.subset_in_region(right).size()
          == pat.size() + on_cut);
  }
}

TEST_CASE("pattern csv round trip with string labels") {
  const Window w(0, 10, 0, 10);
  MultiTypePattern pat(w, 2);
  pat.add(1.25, 2.5, 1);
  pat.add(3.0, 4.0, 2);
  pat.add(5.0, 6.0, 1);
  const std::vector<std::string> labels{"", "oak", "pine"};
  const std::string path = "/tmp/mgibbs_pattern_test.csv";
  write_pattern_csv(pat, labels, path);
  const PatternFile back = read_pattern_csv(path, w);
  REQUIRE(back.pattern.size() == 3);
  CHECK(back.pattern.p == 2);
  CHECK(back.labels[1] == "oak");
  CHECK(back.labels[2] == "pine");
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.pattern.x[i] == pat.x[i]);
    CHECK(back.pattern.y[i] == pat.y[i]);
    CHECK(back.pattern.type[i] == pat.type[i]);
  }
}
