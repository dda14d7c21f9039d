#include "morseb/boundarymap.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "morseb/contracting.hpp"
#include "morseb/crossratio.hpp"
#include "morseb/errors.hpp"

using namespace morseb;

namespace {

BoundaryPoint dir(int m, int n) { return make_direction(m, n); }

bool same_dir(const BoundaryPoint& a, const BoundaryPoint& b) {
  return same_boundary_point(a, b);
}

std::string write_temp(const std::string& name, const std::string& body) {
  std::ofstream out(name);
  out << body;
  return name;
}

}  // namespace

TEST_CASE("the swap map reverses one axis ray family and nothing else") {
  const BoundaryMap f = swap_map();
  CHECK(f.name == "swap");
  CHECK(same_dir(f.forward(dir(3, 0)), dir(-3, 0)));
  CHECK(same_dir(f.forward(dir(-7, 0)), dir(7, 0)));
  CHECK(same_dir(f.forward(dir(0, 0)), dir(0, 0)));
  CHECK(same_dir(f.forward(dir(3, 1)), dir(3, 1)));
  CHECK(same_dir(f.forward(dir(-4, -9)), dir(-4, -9)));

  std::vector<BoundaryPoint> window;
  for (int m = -6; m <= 6; ++m)
    for (int n = -6; n <= 6; ++n) window.push_back(dir(m, n));
  CHECK(round_trips(f, window));

  TreeSpace T(4, 8);
  const BoundaryPoint e = T.end({}, word_from_string("a"));
  CHECK_THROWS_AS((void)f.forward(e), incompatible_space_error);
}

TEST_CASE("isometries induce boundary maps with exact inverses") {
  SpikedPlane X(40);

  const BoundaryMap t = induced_map(X, lattice_translation(2, 3));
  CHECK(t.name == "translation(2,3)");
  CHECK(same_dir(t.forward(dir(1, 1)), dir(3, 4)));
  CHECK(same_dir(t.inverse(dir(3, 4)), dir(1, 1)));

  const BoundaryMap s = induced_map(X, lattice_axis_swap());
  CHECK(s.name == "axis_swap");
  CHECK(same_dir(s.forward(dir(2, 5)), dir(5, 2)));
  CHECK(same_dir(s.inverse(dir(5, 2)), dir(2, 5)));

  const BoundaryMap id = induced_map(X, lattice_translation(0, 0));
  CHECK(id.name == "identity");
  CHECK(same_dir(id.forward(dir(4, -1)), dir(4, -1)));

  std::vector<BoundaryPoint> window;
  for (int m = -5; m <= 5; ++m)
    for (int n = -5; n <= 5; ++n) window.push_back(dir(m, n));
  CHECK(round_trips(t, window));
  CHECK(round_trips(s, window));

  LatticeIsometry bad;
  bad.lin = {2, 0, 0, 1};
  CHECK_THROWS_AS((void)induced_map(X, bad), invalid_parameter_error);

  TreeSpace T(4, 8);
  CHECK_THROWS_AS((void)induced_map(T, lattice_translation(1, 0)), incompatible_space_error);
  CHECK_THROWS_AS((void)induced_map(X, TreeTranslation{word_from_string("a"), T.tag()}),
                  incompatible_space_error);

  const BoundaryMap g = induced_map(T, TreeTranslation{word_from_string("ab"), T.tag()});
  CHECK(g.name == "left(ab)");
  const BoundaryPoint e = T.end({}, word_from_string("b"));
  CHECK(same_boundary_point(g.forward(e),
                            T.end(word_from_string("ab"), word_from_string("b"))));
  CHECK(round_trips(g, {e, T.end({}, word_from_string("a")),
                        T.end(word_from_string("ba"), word_from_string("a"))}));
}

TEST_CASE("exception tables act only on their listed directions") {
  const BoundaryMap f = table_map({{dir(1, 0), dir(2, 5)}, {dir(-3, 4), dir(0, -1)}});
  CHECK(f.name == "table");
  CHECK(same_dir(f.forward(dir(1, 0)), dir(2, 5)));
  CHECK(same_dir(f.forward(dir(2, 5)), dir(1, 0)));
  CHECK(same_dir(f.forward(dir(-3, 4)), dir(0, -1)));
  CHECK(same_dir(f.forward(dir(0, -1)), dir(-3, 4)));
  CHECK(same_dir(f.forward(dir(7, 7)), dir(7, 7)));

  std::vector<BoundaryPoint> window;
  for (int m = -4; m <= 4; ++m)
    for (int n = -4; n <= 4; ++n) window.push_back(dir(m, n));
  window.push_back(dir(2, 5));
  CHECK(round_trips(f, window));

  CHECK_THROWS_AS((void)table_map({{dir(1, 0), dir(1, 0)}}), invalid_parameter_error);
  CHECK_THROWS_AS((void)table_map({{dir(1, 0), dir(2, 0)}, {dir(2, 0), dir(3, 0)}}),
                  invalid_parameter_error);
}

TEST_CASE("isometric maps leave every sampled constant unchanged") {
  SpikedPlane X(40);
  const PairSampler pairs = lattice_pair_sampler(7, 8);
  for (const auto& g : {lattice_translation(2, 3), lattice_axis_swap()}) {
    const BoundaryMap f = induced_map(X, g);
    const StabilityProfile p = stability_profile(X, f, pairs, 40, 10.0);
    REQUIRE(p.rows.size() == 40);
    CHECK(p.verdict == StabilityVerdict::stable_within_sample);
    CHECK(p.witness.empty());
    CHECK(p.verdict_bound == 10.0);
    for (const auto& row : p.rows) CHECK(row.D_out == row.D_in);
    for (std::size_t k = 1; k < p.rows.size(); ++k)
      CHECK(p.rows[k - 1].D_in <= p.rows[k].D_in);
  }
}

TEST_CASE("the swap map is caught growing on the unit gap family") {
  SpikedPlane X(80);
  const StabilityProfile p = stability_profile(X, swap_map(), adjacent_pair_family(), 30, 10.0);
  REQUIRE(p.rows.size() == 30);
  CHECK(p.verdict == StabilityVerdict::growth_detected);
  REQUIRE(p.witness.size() == 26);

  for (const auto& row : p.rows) CHECK(row.D_in == 1.0);
  for (std::size_t k = 0; k < p.rows.size(); ++k) {
    const double n = double(k) + 1.0;
    CHECK(p.rows[k].D_out == std::hypot(2.0 * n, 1.0));
  }
  CHECK(p.witness.front().D_out == std::hypot(10.0, 1.0));
  for (const auto& row : p.witness) {
    CHECK(row.D_in <= 10.0);
    CHECK(row.D_out > 10.0);
  }
  CHECK(p.growth_rate > 1.8);
  CHECK(p.growth_rate < 2.2);
}

TEST_CASE("isometric maps sit on the diagonal of the four point profile") {
  SpikedPlane X(40);
  const TupleSampler tuples = lattice_tuple_sampler(X, 11, 10, 4.0);
  for (const auto& g : {lattice_translation(2, 3), lattice_axis_swap()}) {
    const BoundaryMap f = induced_map(X, g);
    const QmProfile p = qm_profile(X, f, 4.0, tuples, 25);
    REQUIRE(p.rows.size() == 25);
    CHECK(p.gauge == 4.0);
    for (const auto& row : p.rows) CHECK(row.cr_out == row.cr_in);
    CHECK(p.slope == 1.0);
    CHECK(p.intercept == 0.0);
  }
}

TEST_CASE("the swap map breaks every linear envelope as the window widens") {
  SpikedPlane X(100);
  const TupleSampler tuples = adjacent_square_family();
  double last_slope = 0;
  for (int window : {5, 10, 20}) {
    const QmProfile p = qm_profile(X, swap_map(), 1.5, tuples, std::size_t(window));
    REQUIRE(p.rows.size() == std::size_t(window));
    const double leg = 2.0 * window + 1.0;
    const double expected = (std::sqrt(leg * leg + 1.0) - 1.0) / (std::sqrt(2.0) - 1.0);
    CHECK(p.slope == expected);
    CHECK(p.slope > 2.0 * window);
    CHECK(p.slope > last_slope);
    CHECK(p.intercept <= 1e-9);
    for (const auto& row : p.rows) CHECK(row.cr_in == std::sqrt(2.0) - 1.0);
    last_slope = p.slope;
  }
}

TEST_CASE("samplers are deterministic and respect their windows") {
  SpikedPlane X(40);

  const PairSampler pairs = lattice_pair_sampler(3, 5);
  for (std::size_t i : {std::size_t(0), std::size_t(4), std::size_t(17)}) {
    const auto [a1, b1] = pairs(i);
    const auto [a2, b2] = pairs(i);
    CHECK(same_dir(a1, a2));
    CHECK(same_dir(b1, b2));
    CHECK_FALSE(same_dir(a1, b1));
    const auto& fa = std::get<SpikeDirection>(a1);
    const auto& fb = std::get<SpikeDirection>(b1);
    for (int c : {fa.m, fa.n, fb.m, fb.n}) {
      CHECK(c >= -5);
      CHECK(c <= 5);
    }
  }

  const TupleSampler tuples = lattice_tuple_sampler(X, 11, 10, 4.0);
  for (std::size_t i = 0; i < 20; ++i) {
    const auto t1 = tuples(i);
    const auto t2 = tuples(i);
    for (int k = 0; k < 4; ++k) CHECK(same_dir(t1[k], t2[k]));
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) {
        CHECK_FALSE(same_dir(t1[a], t1[b]));
        const auto D = contracting_constant_analytic(
            X, X.bi_infinite_geodesic(t1[a], t1[b]));
        CHECK(D <= 4.0 + 1e-9);
      }
  }

  CHECK_THROWS_AS((void)lattice_pair_sampler(3, 0), invalid_parameter_error);
  CHECK_THROWS_AS((void)lattice_tuple_sampler(X, 1, 0, 4.0), invalid_parameter_error);
  CHECK_THROWS_AS((void)lattice_tuple_sampler(X, 1, 10, 1.9), invalid_parameter_error);
  TreeSpace T(4, 8);
  CHECK_THROWS_AS((void)lattice_tuple_sampler(T, 1, 10, 4.0), unsupported_space_error);
}

TEST_CASE("boundary maps load from config files") {
  SpikedPlane X(40);

  const std::string swap_path = write_temp("test_bmap_swap_tmp.txt", "map = swap\n");
  const BoundaryMap f1 = map_from_config(X, swap_path);
  CHECK(f1.name == "swap");
  CHECK(same_dir(f1.forward(dir(4, 0)), dir(-4, 0)));

  const std::string affine_path =
      write_temp("test_bmap_affine_tmp.txt", "map = affine\nlinear = 0 1 1 0\n");
  const BoundaryMap f2 = map_from_config(X, affine_path);
  CHECK(f2.name == "axis_swap");
  CHECK(same_dir(f2.forward(dir(2, 5)), dir(5, 2)));

  const std::string shift_path =
      write_temp("test_bmap_shift_tmp.txt", "map = affine\ntranslate = 2 3\n");
  const BoundaryMap f3 = map_from_config(X, shift_path);
  CHECK(f3.name == "translation(2,3)");
  CHECK(same_dir(f3.forward(dir(0, 0)), dir(2, 3)));

  const std::string table_path = write_temp(
      "test_bmap_table_tmp.txt", "map = table\nswap = 1 0 2 5\nswap = -3 4 0 -1\n");
  const BoundaryMap f4 = map_from_config(X, table_path);
  CHECK(same_dir(f4.forward(dir(1, 0)), dir(2, 5)));
  CHECK(same_dir(f4.forward(dir(0, -1)), dir(-3, 4)));
  CHECK(same_dir(f4.forward(dir(9, 9)), dir(9, 9)));

  const std::string id_path = write_temp("test_bmap_id_tmp.txt", "map = identity\n");
  TreeSpace T(4, 8);
  const BoundaryMap f5 = map_from_config(T, id_path);
  const BoundaryPoint e = T.end({}, word_from_string("a"));
  CHECK(same_boundary_point(f5.forward(e), e));

  const std::string none_path = write_temp("test_bmap_none_tmp.txt", "window = 3\n");
  CHECK_THROWS_AS((void)map_from_config(X, none_path), config_error);
  const std::string odd_path = write_temp("test_bmap_odd_tmp.txt", "map = banana\n");
  CHECK_THROWS_AS((void)map_from_config(X, odd_path), config_error);
  CHECK_THROWS_AS((void)map_from_config(T, swap_path), config_error);
  const std::string short_path =
      write_temp("test_bmap_short_tmp.txt", "map = affine\nlinear = 1 2\n");
  CHECK_THROWS_AS((void)map_from_config(X, short_path), config_error);
  const std::string stretch_path =
      write_temp("test_bmap_stretch_tmp.txt", "map = affine\nlinear = 2 0 0 1\n");
  CHECK_THROWS_AS((void)map_from_config(X, stretch_path), invalid_parameter_error);

  for (const auto& p : {swap_path, affine_path, shift_path, table_path, id_path, none_path,
                        odd_path, short_path, stretch_path})
    std::remove(p.c_str());
}

TEST_CASE("profiles validate their sample plans") {
  SpikedPlane X(40);
  const PairSampler pairs = adjacent_pair_family();
  CHECK_THROWS_AS((void)stability_profile(X, identity_map(), pairs, 0, 10.0),
                  insufficient_samples_error);
  CHECK_THROWS_AS((void)stability_profile(X, identity_map(), pairs, 5, 0.0),
                  invalid_parameter_error);

  const TupleSampler tuples = adjacent_square_family();
  CHECK_THROWS_AS((void)qm_profile(X, identity_map(), 1.5, tuples, 0),
                  insufficient_samples_error);
  CHECK_THROWS_AS((void)qm_profile(X, identity_map(), 0.0, tuples, 5),
                  invalid_parameter_error);

  const TupleSampler wide = [](std::size_t) {
    return std::array<BoundaryPoint, 4>{dir(0, 0), dir(9, 9), dir(0, 1), dir(1, 1)};
  };
  CHECK_THROWS_AS((void)qm_profile(X, identity_map(), 2.0, wide, 1), invalid_parameter_error);
}
