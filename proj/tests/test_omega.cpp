#include <doctest.h>

#include <cmath>

#include "mgibbs/omega.hpp"
#include "mgibbs/reference.hpp"
#include "test_util.hpp"

using namespace mgibbs;
using namespace testutil;

TEST_CASE("omega basics") {
  const Window w(0, 10, 0, 10);
  SUBCASE("empty pattern gives zero statistics") {
    MultiTypePattern pat(w, 2);
    ModelSpec spec = ModelSpec::shared_ranges(2, InteractionFamily::saturation,
                                              {0.5, 1.0});
    spec.set_constant_saturations(1);
    const auto v = omega(Point{5, 5}, 1, pat, spec);
    REQUIRE(v.size() == 4);
    for (double x : v) CHECK(x == 0.0);
  }
  SUBCASE("outside the window is an error") {
    MultiTypePattern pat(w, 1);
    ModelSpec spec = ModelSpec::shared_ranges(1, InteractionFamily::strauss,
                                              {1.0});
    CHECK_THROWS_AS(omega(Point{11, 5}, 1, pat, spec), std::invalid_argument);
  }
  SUBCASE("strauss doubles the pair count") {
    MultiTypePattern pat(w, 1);
    pat.add(5.0, 5.0, 1);
    pat.add(5.4, 5.0, 1);
    pat.add(5.0, 5.6, 1);
    ModelSpec spec = ModelSpec::shared_ranges(1, InteractionFamily::strauss,
                                              {1.0});
    const auto v = omega(Point{5.2, 5.2}, 1, pat, spec);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == 6.0);  // 3 neighbours, each pair counted from both ends
  }
  SUBCASE("saturation caps the own-neighbour term") {
    MultiTypePattern pat(w, 1);
    pat.add(5.3, 5.0, 1);  // 0.6 apart from each other: mutually isolated
    pat.add(4.7, 5.0, 1);
    ModelSpec spec = ModelSpec::shared_ranges(1, InteractionFamily::saturation,
                                              {0.5});
    spec.set_constant_saturations(1);
    const auto v = omega(Point{5.0, 5.0}, 1, pat, spec);
    REQUIRE(v.size() == 1);
    // own term min(1, 2) = 1; both isolated neighbours rise from 0 to 1.
    CHECK(v[0] == 3.0);
  }
}

TEST_CASE("omega bounds") {
  RngStream rng(31);
  const Window w(0, 10, 0, 10);
  for (int trial = 0; trial < 30; ++trial) {
    const int p = 2;
    MultiTypePattern pat = random_pattern(w, p, 25, rng);
    ModelSpec spec = random_spec(p, rng, 4.0);
    spec.family = InteractionFamily::saturation;
    const int tau = 1;
    const auto counts = pat.counts_by_type();
    const auto v = omega(Point{rng.uniform(0, 10), rng.uniform(0, 10)}, tau,
                         pat, spec);
    std::size_t slot = 0;
    auto check_block = [&](int j) {
      const auto& c = spec.ordered_saturations(tau, j);
      for (std::size_t k = 0; k < spec.pair_ranges(tau, j).size(); ++k) {
        const double bound =
            static_cast<double>(counts[static_cast<std::size_t>(j)] + 1) *
            c[k];
        CHECK(v[slot] >= -static_cast<double>(c[k]));
        CHECK(v[slot] <= bound);
        ++slot;
      }
    };
    check_block(tau);
    for (int j = 1; j <= p; ++j) {
      if (j != tau) check_block(j);
    }
  }
}

TEST_CASE("strauss equals saturation when the cap never binds") {
  RngStream rng(32);
  const Window w(0, 10, 0, 10);
  for (int trial = 0; trial < 20; ++trial) {
    MultiTypePattern pat = random_pattern(w, 2, 20, rng);
    ModelSpec sat = random_spec(2, rng, 4.0);
    sat.family = InteractionFamily::saturation;
    sat.set_constant_saturations(static_cast<int>(pat.size()) + 1);
    ModelSpec strauss = sat;
    strauss.family = InteractionFamily::strauss;
    const Point u{rng.uniform(0, 10), rng.uniform(0, 10)};
    const int tau = 1 + static_cast<int>(rng.uniform_index(2));
    CHECK(omega(u, tau, pat, sat) == omega(u, tau, pat, strauss));
  }
}

TEST_CASE("exponential family identity against the brute-force density") {
  // exp(log lambda) must equal the unnormalized density ratio
  // f(x u u) / f(x) for both families, to near machine precision.
  RngStream rng(33);
  const Window w(0, 4, 0, 4);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int p = 2 + static_cast<int>(rng.uniform_index(2));
    const int n = static_cast<int>(rng.uniform_index(16));
    MultiTypePattern pat = random_pattern(w, p, n, rng);
    ModelSpec spec = random_spec(p, rng, 1.5, 1);
    const GroupLayout layout = GroupLayout::from_spec(spec);
    const std::vector<double> theta = random_theta(layout, rng);
    const std::vector<CovariateField> covs{dyadic_field(w, 8, rng)};

    const Point u{rng.uniform(0, 4), rng.uniform(0, 4)};
    const int tau = 1 + static_cast<int>(rng.uniform_index(
                            static_cast<std::uint64_t>(p)));
    const double ll =
        log_conditional_intensity(u, tau, pat, spec, layout, theta, covs);
    const double log_ratio =
        reference::log_unnormalized_density(
            [&] {
              MultiTypePattern withu = pat;
              withu.add(u.x, u.y, tau);
              return withu;
            }(),
            spec, layout, theta, covs) -
        reference::log_unnormalized_density(pat, spec, layout, theta, covs);
    CHECK(std::exp(ll) ==
          doctest::Approx(std::exp(log_ratio)).epsilon(1e-10));
    ++checked;
  }
  CHECK(checked == 60);
}

TEST_CASE("points beyond the maximal range do not change the intensity") {
  RngStream rng(34);
  const Window w(0, 20, 0, 20);
  MultiTypePattern pat(w, 2);
  pat.add(5.0, 5.0, 1);
  pat.add(5.5, 5.0, 2);
  ModelSpec spec = ModelSpec::shared_ranges(2, InteractionFamily::saturation,
                                            {0.5, 1.0});
  spec.set_constant_saturations(2);
  const GroupLayout layout = GroupLayout::from_spec(spec);
  std::vector<double> theta(static_cast<std::size_t>(layout.dim), 0.3);
  const Point u{5.2, 5.2};
  const double before =
      log_conditional_intensity(u, 1, pat, spec, layout, theta, {});
  pat.add(15.0, 15.0, 1);  // far beyond max range 1.0
  pat.add(18.0, 3.0, 2);
  const double after =
      log_conditional_intensity(u, 1, pat, spec, layout, theta, {});
  CHECK(before == after);
}

TEST_CASE("independence reduction: constant log intensity") {
  const Window w(0, 10, 0, 10);
  RngStream rng(35);
  MultiTypePattern pat = random_pattern(w, 2, 40, rng);
  ModelSpec spec = ModelSpec::shared_ranges(2, InteractionFamily::saturation,
                                            {0.5, 1.0});
  spec.set_constant_saturations(1);
  const GroupLayout layout = GroupLayout::from_spec(spec);
  std::vector<double> theta(static_cast<std::size_t>(layout.dim), 0.0);
  theta[static_cast<std::size_t>(
      layout.groups[static_cast<std::size_t>(layout.alpha_group(1))].offset)] =
      std::log(2.5);
  for (int q = 0; q < 10; ++q) {
    const Point u{rng.uniform(0, 10), rng.uniform(0, 10)};
    CHECK(log_conditional_intensity(u, 1, pat, spec, layout, theta, {}) ==
          doctest::Approx(std::log(2.5)).epsilon(1e-12));
  }
}
