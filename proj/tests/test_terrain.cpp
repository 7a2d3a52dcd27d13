/// Terrain: city map generation and queries, the analytic segment/LOS
/// machinery cross-checked against a brute-force ray-marching oracle, map
/// serialization, and the synthetic nested obstruction fields.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "doctest.h"
#include "uavrelay/rng.hpp"
#include "uavrelay/terrain.hpp"

using namespace uavrelay;

namespace {

/// Brute-force blocker oracle: march the 3D segment at a fixed resolution and
/// count the distinct buildings whose solid any interior sample falls in.
int marched_blockers(const UrbanMap& map, const Point2& a, double ha, const Point2& b, double hb,
                     double step) {
  const double len = std::hypot(distance(a, b), hb - ha);
  const int n = std::max(2, static_cast<int>(std::ceil(len / step)));
  std::set<std::size_t> hit;
  for (int i = 1; i < n; ++i) {
    const double t = static_cast<double>(i) / n;
    const Point2 p = a + (b - a) * t;
    const double z = ha + (hb - ha) * t;
    for (std::size_t j = 0; j < map.buildings.size(); ++j) {
      const Building& bld = map.buildings[j];
      if (bld.contains(p) && z < bld.height) hit.insert(j);
    }
  }
  return static_cast<int>(hit.size());
}

UrbanMap single_building_map() {
  UrbanMap map;
  map.extent = 100.0;
  map.buildings.push_back({40.0, 40.0, 60.0, 60.0, 30.0});
  return map;
}

/// Fixed-answer oracle for composing majority-vote scenarios by hand.
class ConstOracle final : public SegmentOracle {
 public:
  ConstOracle(SegmentId s, int k) : s_(s), k_(k) {}
  SegmentId segment(const Point2&) const override { return s_; }
  int num_segments() const override { return k_; }

 private:
  SegmentId s_;
  int k_;
};

}  // namespace

TEST_SUITE("terrain") {
  TEST_CASE("building containment is strict: wall lines count as street") {
    const Building b{10.0, 10.0, 20.0, 20.0, 5.0};
    CHECK(b.contains({15.0, 15.0}));
    CHECK_FALSE(b.contains({10.0, 15.0}));
    CHECK_FALSE(b.contains({20.0, 20.0}));
    CHECK_FALSE(b.contains({15.0, 9.999}));
  }

  TEST_CASE("generated map is deterministic and matches a frozen layout") {
    const UrbanMap m = generate_map(0, MapLayout{});
    REQUIRE(m.buildings.size() == 49);
    CHECK(m.extent == doctest::Approx(1000.0));
    // Grid geometry follows from extent, block count and street width alone.
    CHECK(m.buildings[0].x_min == doctest::Approx(75.0));
    CHECK(m.buildings[0].x_max == doctest::Approx(132.14285714285714));
    CHECK(m.buildings[48].x_max == doctest::Approx(925.0));
    // Heights are the seeded random part; pin a few draws.
    CHECK(m.buildings[0].height == doctest::Approx(40.694966591062482).epsilon(1e-12));
    CHECK(m.buildings[1].height == doctest::Approx(41.964310237473782).epsilon(1e-12));
    CHECK(m.buildings[48].height == doctest::Approx(27.148569624213859).epsilon(1e-12));
    CHECK(m.max_height() == doctest::Approx(42.719875773397135).epsilon(1e-12));
    // Same seed, same bytes; different seed, different heights.
    CHECK(serialize_map(generate_map(0, MapLayout{})) == serialize_map(m));
    CHECK(serialize_map(generate_map(1, MapLayout{})) != serialize_map(m));
  }

  TEST_CASE("map generation validates its layout") {
    MapLayout bad;
    bad.blocks = 0;
    CHECK_THROWS_AS(generate_map(0, bad), std::invalid_argument);
    MapLayout cramped;
    cramped.extent = 100.0;
    cramped.blocks = 2;
    cramped.street = 40.0;  // 3 streets of 40 m leave no block width
    CHECK_THROWS_AS(generate_map(0, cramped), std::invalid_argument);
    MapLayout heights;
    heights.height_max = 1.0;
    heights.height_min = 2.0;
    CHECK_THROWS_AS(generate_map(0, heights), std::invalid_argument);
  }

  TEST_CASE("blocker count on a hand-built map") {
    const UrbanMap map = single_building_map();
    const Heights h{50.0, 45.0, 0.0};
    // Ground-level path straight through the block.
    CHECK(blocker_count(map, {0.0, 50.0}, 1.0, {100.0, 50.0}, 1.0) == 1);
    // Same path, but both endpoints high enough to clear the 30 m roof.
    CHECK(blocker_count(map, {0.0, 50.0}, 35.0, {100.0, 50.0}, 35.0) == 0);
    // Slant that enters below the roof on the near side.
    CHECK(blocker_count(map, {0.0, 50.0}, 1.0, {100.0, 50.0}, 60.0) == 1);
    // Path that misses the block sideways.
    CHECK(blocker_count(map, {0.0, 10.0}, 1.0, {100.0, 10.0}, 1.0) == 0);
    // A vertical column inside the footprint is solid up to the roof.
    CHECK(blocker_count(map, {50.0, 50.0}, 1.0, {50.0, 50.0}, 50.0) == 1);
    // Endpoint exclusion: a receiver standing exactly on the roof surface is
    // not occluded by its own building...
    CHECK(blocker_count(map, {50.0, 50.0}, 100.0, {50.0, 50.0}, 30.0) == 0);
    // ...but descending any deeper puts the roof in the way.
    CHECK(blocker_count(map, {50.0, 50.0}, 100.0, {50.0, 50.0}, 29.9) == 1);
    // los_blocked is just blocker_count > 0.
    CHECK(los_blocked(map, {0.0, 50.0}, 1.0, {100.0, 50.0}, 1.0));
    CHECK_FALSE(los_blocked(map, {0.0, 10.0}, 1.0, {100.0, 10.0}, 1.0));
    // map_segment saturates at the model's segment count.
    CHECK(map_segment(map, {100.0, 50.0}, {0.0, 50.0}, Heights{2.0, 1.0, 0.5}, 3) == 2);
    // The slant from (100,50) dips to 20 m over the far edge of the 30 m
    // roof, so the relay-user link carries one obstruction.
    CHECK(map_segment(map, {100.0, 50.0}, {0.0, 50.0}, h, 3) == 2);
    // Hovering straight over the user, away from the block, is line of sight.
    CHECK(map_segment(map, {80.0, 80.0}, {80.0, 80.0}, h, 3) == 1);
  }

  TEST_CASE("blocker count agrees with a ray-marching oracle on random pairs") {
    const UrbanMap map = generate_map(11, MapLayout{});
    Rng rng(2024);
    int mismatches = 0;
    for (int i = 0; i < 100; ++i) {
      const Point2 a{rng.uniform(0.0, 1000.0), rng.uniform(0.0, 1000.0)};
      const Point2 b{rng.uniform(0.0, 1000.0), rng.uniform(0.0, 1000.0)};
      const double ha = rng.uniform(0.0, 4.0);
      const double hb = rng.uniform(40.0, 120.0);
      const int analytic = blocker_count(map, a, ha, b, hb);
      // Coarse scan first; a ray grazing a roof edge can carry a blocked
      // window of a few centimetres, so disagreements are retried at 2 mm
      // before they count as real.
      int marched = marched_blockers(map, a, ha, b, hb, 0.1);
      if (analytic != marched) marched = marched_blockers(map, a, ha, b, hb, 0.002);
      if (analytic != marched) ++mismatches;
    }
    CHECK(mismatches == 0);
  }

  TEST_CASE("map serialization round trips byte for byte") {
    const UrbanMap m = generate_map(5, MapLayout{});
    const std::string text = serialize_map(m);
    const UrbanMap parsed = parse_map(text);
    CHECK(serialize_map(parsed) == text);
    CHECK(parsed.buildings.size() == m.buildings.size());

    const std::string path = (std::filesystem::temp_directory_path() / "uavrelay_map_rt.txt")
                                 .string();
    save_map(m, path);
    const UrbanMap loaded = load_map(path);
    CHECK(serialize_map(loaded) == text);
    std::filesystem::remove(path);
  }

  TEST_CASE("map parser rejects malformed input") {
    CHECK_THROWS(parse_map("bogus 1000\nbuildings 0\n"));
    CHECK_THROWS(parse_map("extent 1000\nbuildings 1\n1 1 2 2\n"));      // truncated row
    CHECK_THROWS(parse_map("extent 1000\nbuildings 1\n5 5 2 2 10\n"));   // x_max <= x_min
    CHECK_THROWS(parse_map("extent 1000\nbuildings 1\n1 1 2 2 -3\n"));   // negative height
    CHECK_THROWS_AS(load_map("/nonexistent/uavrelay.map"), std::runtime_error);
  }

  TEST_CASE("street sampling stays on streets inside the extent") {
    const UrbanMap map = generate_map(1, MapLayout{});
    Rng rng(9);
    for (int i = 0; i < 2000; ++i) {
      const Point2 p = random_street_point(map, rng);
      CHECK(map.in_extent(p));
      CHECK(map.on_street(p));
    }
  }

  TEST_CASE("on_street requires the point to be inside the extent") {
    const UrbanMap map = single_building_map();
    CHECK_FALSE(map.on_street({-1.0, 50.0}));
    CHECK_FALSE(map.on_street({50.0, 101.0}));
    CHECK(map.on_street({0.0, 0.0}));
    CHECK_FALSE(map.on_street({50.0, 50.0}));  // inside the building
  }

  TEST_CASE("nested field construction validates and orders its rings") {
    CHECK_THROWS_AS(random_nested_field(1, 0, 90, 40.0, 300.0), std::invalid_argument);
    CHECK_THROWS_AS(random_nested_field(1, 2, 3, 40.0, 300.0), std::invalid_argument);
    CHECK_THROWS_AS(random_nested_field(1, 2, 90, -1.0, 300.0), std::invalid_argument);
    CHECK_THROWS_AS(random_nested_field(1, 2, 90, 300.0, 40.0), std::invalid_argument);

    for (int k = 2; k <= 4; ++k) {
      const NestedBoundaryField f = random_nested_field(33 + k, k, 120, 40.0, 300.0);
      REQUIRE(f.bins() == 120);
      REQUIRE(f.num_segments == k);
      for (const auto& radii : f.radii) {
        REQUIRE(static_cast<int>(radii.size()) == k - 1);
        for (std::size_t i = 0; i < radii.size(); ++i) {
          CHECK(radii[i] >= 40.0);
          if (i > 0) CHECK(radii[i] > radii[i - 1]);
        }
      }
    }
  }

  TEST_CASE("nested segment never increases when shrinking toward the user") {
    Rng rng(77);
    for (int world = 0; world < 20; ++world) {
      const int k = 2 + world % 3;
      const NestedBoundaryField f = random_nested_field(1000 + world, k, 60 + world, 40.0, 300.0);
      const Point2 user{rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0)};
      for (int i = 0; i < 5000; ++i) {
        const double ang = rng.uniform(0.0, 2.0 * M_PI);
        const double r = rng.uniform(0.0, 400.0);
        const Point2 x = user + Point2{std::cos(ang), std::sin(ang)} * r;
        const double scale = rng.uniform01();
        const Point2 closer = user + (x - user) * scale;
        CHECK(nested_segment(f, closer, user) <= nested_segment(f, x, user));
      }
    }
  }

  TEST_CASE("nested segment reads the ring radii of the direction bin") {
    NestedBoundaryField f;
    f.num_segments = 3;
    f.radii.assign(4, {100.0, 200.0});  // 4 bins, uniform rings
    const Point2 user{10.0, -5.0};
    CHECK(nested_segment(f, user, user) == 1);
    CHECK(nested_segment(f, user + Point2{50.0, 0.0}, user) == 1);
    CHECK(nested_segment(f, user + Point2{100.0, 0.0}, user) == 1);  // boundary inclusive below
    CHECK(nested_segment(f, user + Point2{150.0, 0.0}, user) == 2);
    CHECK(nested_segment(f, user + Point2{0.0, 250.0}, user) == 3);

    // A one-segment field answers 1 everywhere.
    NestedBoundaryField one;
    one.num_segments = 1;
    one.radii.assign(4, {});
    CHECK(nested_segment(one, user + Point2{1000.0, 0.0}, user) == 1);
  }

  TEST_CASE("oracles report their segment counts and answers") {
    const UrbanMap map = single_building_map();
    const Heights h{50.0, 45.0, 0.0};
    const MapSegmentOracle oracle(map, {0.0, 50.0}, Heights{2.0, 1.0, 0.5}, 4);
    CHECK(oracle.num_segments() == 4);
    CHECK(oracle.segment({100.0, 50.0}) == 2);
    CHECK(oracle.segment({0.0, 40.0}) == 1);

    const NestedBoundaryField f = random_nested_field(4, 3, 90, 40.0, 300.0);
    const NestedFieldOracle nested(f, {0.0, 0.0});
    CHECK(nested.num_segments() == 3);
    CHECK(nested.segment({1.0, 0.0}) == 1);
    (void)h;
  }

  TEST_CASE("majority vote takes the most common segment, ties to the smaller id") {
    const ConstOracle a(1, 3), b(2, 3), c(2, 3), d(3, 3);
    CHECK(MajorityVoteOracle({&a, &b, &c}).segment({0.0, 0.0}) == 2);
    CHECK(MajorityVoteOracle({&a, &b}).segment({0.0, 0.0}) == 1);  // 1-1 tie -> smaller
    CHECK(MajorityVoteOracle({&b, &d}).segment({0.0, 0.0}) == 2);  // tie among {2,3}
    CHECK(MajorityVoteOracle({&d}).segment({0.0, 0.0}) == 3);
    CHECK(MajorityVoteOracle({&a, &b, &c, &d}).num_segments() == 3);
    CHECK_THROWS_AS(MajorityVoteOracle({}), std::invalid_argument);
    const ConstOracle other(1, 2);
    CHECK_THROWS_AS(MajorityVoteOracle({&a, &other}), std::invalid_argument);
  }
}
