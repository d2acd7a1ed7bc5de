#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "mgibbs/model.hpp"
#include "mgibbs/rng.hpp"

using namespace mgibbs;

namespace {

// Independent Poisson CDF: F_a(k) = Q(k+1, a) (regularized upper incomplete
// gamma).
double poisson_cdf_oracle(int k, double a) {
  if (k < 0) return 0.0;
  return boost::math::gamma_q(static_cast<double>(k + 1), a);
}

}  // namespace

TEST_CASE("poisson cdf matches the incomplete-gamma oracle") {
  RngStream rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = std::exp(rng.uniform(-3.0, 6.0));
    const int k = static_cast<int>(rng.uniform_index(40)) +
                  static_cast<int>(a);
    CHECK(poisson_cdf(k, a) ==
          doctest::Approx(poisson_cdf_oracle(k, a)).epsilon(1e-10));
  }
  CHECK(poisson_cdf(-1, 2.0) == 0.0);
  CHECK(poisson_cdf(0, 0.0) == 1.0);
}

TEST_CASE("automatic saturation levels") {
  // a = annulus_area * n_j / window_area; pick areas so a comes out exact.
  auto c_for = [](double a) { return saturation_auto(1, a, 1.0, 0.01); };
  SUBCASE("quantile examples") {
    CHECK(c_for(1.0) == 4);
    CHECK(c_for(10.0) == 18);
    // direct check against the oracle for a handful of intensities
    for (double a : {0.5, 1.0, 2.0, 5.0, 10.0}) {
      int c = 0;
      while (poisson_cdf_oracle(c, a) < 0.99) ++c;
      CHECK(c_for(a) == std::max(1, c));
    }
  }
  SUBCASE("zero abundance floors at 1") {
    CHECK(saturation_auto(0, 2.0, 100.0, 0.01) == 1);
  }
  SUBCASE("non-decreasing in abundance") {
    int prev = 0;
    for (int n = 0; n <= 400; n += 7) {
      const int c = saturation_auto(n, 3.0, 100.0, 0.01);
      CHECK(c >= prev);
      prev = c;
    }
  }
  SUBCASE("argument validation") {
    CHECK_THROWS_AS(saturation_auto(-1, 1.0, 1.0, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(saturation_auto(1, 0.0, 1.0, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(saturation_auto(1, 1.0, 1.0, 1.5), std::invalid_argument);
  }
}

TEST_CASE("t function") {
  SUBCASE("c=1, a=1 evaluates to 1") {
    CHECK(t_function(1, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("limit 2a at large c") {
    RngStream rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const double a = std::exp(rng.uniform(-2.0, 3.0));
      const int c = static_cast<int>(a) + 40;
      CHECK(t_function(c, a) == doctest::Approx(2.0 * a).epsilon(1e-9));
    }
  }
  SUBCASE("non-decreasing in c") {
    RngStream rng(6);
    for (int trial = 0; trial < 20; ++trial) {
      const double a = std::exp(rng.uniform(-2.0, 3.0));
      double prev = t_function(1, a);
      for (int c = 2; c <= 30; ++c) {
        const double t = t_function(c, a);
        CHECK(t >= prev - 1e-12);
        prev = t;
      }
    }
  }
}

TEST_CASE("group layout") {
  ModelSpec spec = ModelSpec::shared_ranges(
      3, InteractionFamily::saturation, {1.0, 2.0}, 2);
  spec.set_constant_saturations(1);
  spec.validate();
  const GroupLayout layout = GroupLayout::from_spec(spec);
  // 3 covariate blocks of 3, 3 intra of 2, 3 inter of 2.
  CHECK(layout.dim == 9 + 6 + 6);
  CHECK(layout.unpenalized_dim() == 9);
  CHECK(layout.groups.size() == 9);

  SUBCASE("every index belongs to exactly one group") {
    std::vector<int> hits(static_cast<std::size_t>(layout.dim), 0);
    for (const GroupInfo& g : layout.groups) {
      for (int k = 0; k < g.size; ++k) hits[static_cast<std::size_t>(g.offset + k)]++;
    }
    for (int h : hits) CHECK(h == 1);
  }
  SUBCASE("penalized groups are exactly the interaction groups") {
    for (int i = 1; i <= 3; ++i) {
      CHECK_FALSE(layout.groups[static_cast<std::size_t>(layout.alpha_group(i))].penalized);
      CHECK(layout.groups[static_cast<std::size_t>(layout.intra_group(i))].penalized);
      for (int j = i + 1; j <= 3; ++j) {
        CHECK(layout.groups[static_cast<std::size_t>(layout.inter_group(i, j))].penalized);
      }
    }
  }
  SUBCASE("auto rule gives asymmetric saturations from neighbour abundance") {
    ModelSpec s2 = ModelSpec::shared_ranges(2, InteractionFamily::saturation,
                                            {1.0});
    s2.set_auto_saturations({0, 10, 4000}, 100.0);
    // c_12 uses n_2 = 4000 (a = pi*40 >> 1), c_21 uses n_1 = 10.
    CHECK(s2.ordered_saturations(1, 2)[0] > s2.ordered_saturations(2, 1)[0]);
  }
}

TEST_CASE("spec validation rejects bad inputs") {
  ModelSpec spec = ModelSpec::shared_ranges(2, InteractionFamily::saturation,
                                            {1.0, 0.5});
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  ModelSpec ok = ModelSpec::shared_ranges(2, InteractionFamily::saturation,
                                          {0.5, 1.0});
  ok.set_constant_saturations(1);
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.max_range() == 1.0);
}
