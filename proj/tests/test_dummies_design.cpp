#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>

#include "mgibbs/design.hpp"
#include "mgibbs/reference.hpp"
#include "test_util.hpp"

using namespace mgibbs;
using namespace testutil;

TEST_CASE("dummy generation") {
  const Window w(0, 10, 0, 10);
  SUBCASE("floor of 500 per type") {
    const DummySet d = generate_dummies(w, {0, 100}, DummySpec{}, RngStream(1));
    CHECK(d.points.size() == 500);
    CHECK(d.rho[1] == doctest::Approx(500.0 / 100.0));
  }
  SUBCASE("factor beats the floor at higher counts") {
    const DummySet d = generate_dummies(w, {0, 200}, DummySpec{}, RngStream(1));
    CHECK(d.points.size() == 800);
    CHECK(d.rho[1] == doctest::Approx(8.0));
  }
  SUBCASE("stratification: at most one dummy per tiling cell") {
    const DummySet d = generate_dummies(w, {0, 150}, DummySpec{}, RngStream(2));
    const int m = 600;
    const int cx = static_cast<int>(std::ceil(std::sqrt(m * 1.0)));
    const double wx = 10.0 / cx;
    std::set<std::pair<int, int>> seen;
    for (std::size_t i = 0; i < d.points.size(); ++i) {
      const int gx = std::min(cx - 1, static_cast<int>(d.points.x[i] / wx));
      const int gy = std::min(cx - 1, static_cast<int>(d.points.y[i] / wx));
      CHECK(seen.emplace(gx, gy).second);
    }
  }
  SUBCASE("chi-square uniformity over a coarse grid across 50 seeds") {
    // 640 dummies per seed over a 4x4 grid: expected 40 per cell per seed.
    const int grid = 4;
    std::vector<double> cells(grid * grid, 0.0);
    double total = 0.0;
    for (int seed = 0; seed < 50; ++seed) {
      const DummySet d =
          generate_dummies(w, {0, 160}, DummySpec{}, RngStream(100 + seed));
      for (std::size_t i = 0; i < d.points.size(); ++i) {
        const int gx = std::min(grid - 1, static_cast<int>(d.points.x[i] / 2.5));
        const int gy = std::min(grid - 1, static_cast<int>(d.points.y[i] / 2.5));
        cells[static_cast<std::size_t>(gy * grid + gx)] += 1.0;
        total += 1.0;
      }
    }
    const double expect = total / (grid * grid);
    double chi2 = 0.0;
    for (double c : cells) chi2 += (c - expect) * (c - expect) / expect;
    // chi-square(15) 1% critical value.
    CHECK(chi2 < 30.58);
  }
}

namespace {

struct SmallProblem {
  MultiTypePattern data;
  DummySet dummies;
  ModelSpec spec;
  std::vector<CovariateField> covs;
  GroupLayout layout;
};

SmallProblem make_small(RngStream& rng, int p, int n, double border_frac) {
  SmallProblem s;
  const Window w(0, 6, 0, 6);
  s.data = random_pattern(w, p, n, rng);
  s.spec = random_spec(p, rng, 1.2, 1);
  s.covs = {dyadic_field(w, 6, rng)};
  s.layout = GroupLayout::from_spec(s.spec);
  DummySpec dspec;
  dspec.min_per_type = 12;
  s.dummies = generate_dummies(w, s.data.counts_by_type(), dspec,
                               rng.substream(77));
  (void)border_frac;
  return s;
}

}  // namespace

TEST_CASE("design rows match the brute-force statistic difference") {
  RngStream rng(404);
  for (int trial = 0; trial < 10; ++trial) {
    SmallProblem s = make_small(rng, 2, 12, 0.0);
    const double r_bor = s.spec.max_range();
    const DesignData design =
        build_design(s.data, s.dummies, s.spec, s.covs, r_bor);
    const Window eroded = s.data.window.eroded(r_bor);

    // Check every retained row (data and dummy) against v(x u u) - v(x \ u).
    std::size_t data_rows = 0;
    for (std::size_t r = 0; r < design.row_count(); ++r) {
      const Point u{design.row_x[r], design.row_y[r]};
      const int tau = design.row_type[r];
      MultiTypePattern conditioning = s.data;
      if (design.is_data[r]) {
        ++data_rows;
        // remove u (identify by coordinates) from the conditioning pattern
        MultiTypePattern rest(s.data.window, s.data.p);
        bool removed = false;
        for (std::size_t i = 0; i < s.data.size(); ++i) {
          if (!removed && s.data.x[i] == u.x && s.data.y[i] == u.y &&
              s.data.type[i] == tau) {
            removed = true;
            continue;
          }
          rest.add(s.data.x[i], s.data.y[i], s.data.type[i]);
        }
        REQUIRE(removed);
        conditioning = rest;
      }
      const std::vector<double> expected = reference::statistic_difference(
          u, tau, conditioning, s.spec, s.layout, s.covs);
      // Scatter the sparse row into a dense vector; equality must be exact
      // (counts are integers, covariates dyadic).
      std::vector<double> dense(static_cast<std::size_t>(s.layout.dim), 0.0);
      const auto& cols = design.row_support(r);
      const auto vals = design.row_values(r);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        dense[static_cast<std::size_t>(cols[k])] = vals[k];
      }
      for (std::size_t k = 0; k < dense.size(); ++k) {
        CHECK(dense[k] == expected[k]);
      }
      CHECK(eroded.contains(u));
      CHECK(design.offset[r] ==
            -std::log(design.rho[static_cast<std::size_t>(tau)]));
    }
    CHECK(data_rows <= s.data.size());
  }
}

TEST_CASE("border filtering drops rows but keeps neighbours") {
  RngStream rng(405);
  const Window w(0, 6, 0, 6);
  // One data point inside the eroded window [0.5, 5.5]^2, one outside it but
  // within interaction range of the first: the outside point loses its row
  // yet still counts as a neighbour.
  MultiTypePattern data(w, 1);
  data.add(5.3, 3.0, 1);  // retained
  data.add(5.7, 3.0, 1);  // filtered, 0.4 away
  ModelSpec spec = ModelSpec::shared_ranges(1, InteractionFamily::strauss,
                                            {0.5});
  DummySpec dspec;
  dspec.min_per_type = 30;
  const DummySet dummies =
      generate_dummies(w, data.counts_by_type(), dspec, rng);
  const DesignData design = build_design(data, dummies, spec, {}, 0.5);
  std::size_t data_rows = 0;
  for (std::size_t r = 0; r < design.row_count(); ++r) {
    if (!design.is_data[r]) continue;
    ++data_rows;
    CHECK(design.row_values(r)[1] == 2.0);  // strauss omega = 2 * ne
  }
  CHECK(data_rows == 1);
}

TEST_CASE("no-interaction spec gives covariate-only rows") {
  RngStream rng(406);
  const Window w(0, 6, 0, 6);
  MultiTypePattern data = random_pattern(w, 2, 30, rng);
  ModelSpec spec;
  spec.p = 2;
  spec.family = InteractionFamily::saturation;
  spec.covariate_count = 1;
  spec.ranges.assign(3, {});       // no ranges anywhere
  spec.saturations.assign(4, {});
  const std::vector<CovariateField> covs{dyadic_field(w, 6, rng)};
  DummySpec dspec;
  dspec.min_per_type = 20;
  const DummySet dummies =
      generate_dummies(w, data.counts_by_type(), dspec, rng);
  const DesignData design = build_design(data, dummies, spec, covs, 0.0);
  CHECK(design.layout.dim == 4);  // two covariate blocks only
  for (std::size_t r = 0; r < design.row_count(); ++r) {
    const auto vals = design.row_values(r);
    REQUIRE(vals.size() == 2);
    CHECK(vals[0] == 1.0);
    CHECK(vals[1] == covs[0].value_at(design.row_x[r], design.row_y[r]));
  }
}

TEST_CASE("hand-checked two-point design") {
  const Window w(0, 6, 0, 6);
  MultiTypePattern data(w, 1);
  data.add(3.0, 3.0, 1);
  ModelSpec spec = ModelSpec::shared_ranges(1, InteractionFamily::strauss,
                                            {1.0});
  DummySet dummies;
  dummies.points = MultiTypePattern(w, 1);
  dummies.points.add(3.5, 3.0, 1);  // within range of the data point
  dummies.rho = {0.0, 1.0 / 36.0};
  const DesignData design = build_design(data, dummies, spec, {}, 1.0);
  REQUIRE(design.row_count() == 2);
  // data row: no other data point -> omega 0
  CHECK(design.is_data[0] == 1);
  CHECK(design.row_values(0)[1] == 0.0);
  // dummy row: one data neighbour in (0,1] -> strauss omega = 2
  CHECK(design.is_data[1] == 0);
  CHECK(design.row_values(1)[1] == 2.0);
  CHECK(design.offset[1] == doctest::Approx(std::log(36.0)));
}

TEST_CASE("design validation errors") {
  RngStream rng(407);
  const Window w(0, 6, 0, 6);
  MultiTypePattern data = random_pattern(w, 1, 10, rng);
  ModelSpec spec = ModelSpec::shared_ranges(1, InteractionFamily::strauss,
                                            {1.0});
  const DummySet dummies =
      generate_dummies(w, data.counts_by_type(), DummySpec{1.0, 10}, rng);
  CHECK_THROWS_AS(build_design(data, dummies, spec, {}, 0.5),
                  std::invalid_argument);  // r_bor below max range
  MultiTypePattern sparse(w, 2);
  sparse.add(0.1, 0.1, 1);  // dropped by erosion; type 2 empty
  ModelSpec spec2 = ModelSpec::shared_ranges(2, InteractionFamily::strauss,
                                             {1.0});
  const DummySet dummies2 =
      generate_dummies(w, sparse.counts_by_type(), DummySpec{1.0, 10}, rng);
  const DesignData design2 = build_design(sparse, dummies2, spec2, {}, 1.0);
  CHECK(design2.warnings.size() == 2);  // both types without retained data
}

TEST_CASE("design csv export") {
  RngStream rng(408);
  const Window w(0, 6, 0, 6);
  MultiTypePattern data = random_pattern(w, 2, 10, rng);
  ModelSpec spec = ModelSpec::shared_ranges(2, InteractionFamily::strauss,
                                            {1.0});
  const DummySet dummies = generate_dummies(
      w, data.counts_by_type(), DummySpec{1.0, 5}, rng);
  const DesignData design = build_design(data, dummies, spec, {}, 1.0);
  const std::string path = "/tmp/mgibbs_design_test.csv";
  write_design_csv(design, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "t,type,x,y,offset,alpha_1,alpha_2,beta_1_1,beta_2_2,beta_1_2");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == design.row_count());
}
