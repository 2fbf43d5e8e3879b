#include <catch2/catch_amalgamated.hpp>

#include "bmolab/cubes.hpp"
#include "bmolab/generators.hpp"

using namespace bmolab;

TEST_CASE("enumerate_candidates: tiling and dense counts") {
  const GridBox q0 = unit_box(2, 3);
  REQUIRE(enumerate_candidates(q0, 1, pow2i(2)).size() == 4); // the 4 quadrants
  REQUIRE(enumerate_candidates(q0, 1, 1).size() == 25);       // (2^m - 2^{m-k} + 1)^2
  const GridBox i0 = unit_box(1, 4);
  REQUIRE(enumerate_candidates(i0, 2, pow2i(2)).size() == 4); // 4 tiling intervals
  REQUIRE_THROWS_AS(enumerate_candidates(q0, 4, 1), std::invalid_argument);    // k > m
  REQUIRE_THROWS_AS(enumerate_candidates(q0, 1, 8), std::invalid_argument);    // stride > side
}

TEST_CASE("enumerate_candidates: full-stride tiling is disjoint and covers the box") {
  const GridBox box = unit_box(2, 4);
  const auto tiles = enumerate_candidates(box, 2, pow2i(2));
  REQUIRE(tiles.size() == 16);
  int64_t covered = 0;
  for (size_t i = 0; i < tiles.size(); ++i) {
    covered += tiles[i].side_cells() * tiles[i].side_cells();
    for (size_t j = i + 1; j < tiles.size(); ++j) REQUIRE(cubes_disjoint(tiles[i], tiles[j]));
  }
  REQUIRE(covered == box.cell_count());
}

TEST_CASE("dilate: identity and concentric doubling") {
  Cube q;
  q.dim = 2;
  q.scale_exp = 3;
  q.resolution_exp = 5;
  q.anchor = {8, 12};
  const Cube same = dilate(q, 1.0);
  REQUIRE(same.side() == q.side());
  REQUIRE(same.anchor[0] == 2 * q.anchor[0]);

  const Cube dbl = dilate(q, 2.0);
  REQUIRE(dbl.side() == Catch::Approx(2.0 * q.side()));
  // same center: anchor + side/2 at the refined lattice
  REQUIRE(dbl.anchor[0] + dbl.side_cells() / 2 == 2 * q.anchor[0] + q.side_cells());
  REQUIRE_THROWS_AS(dilate(q, 0.5), std::invalid_argument);
}

TEST_CASE("group_doubled: two intervals with overlapping doublings split") {
  CubeFamily fam;
  fam.budget = 2;
  for (int64_t a : {4, 10}) { // side 4, doubles [2,10) and [8,16) overlap
    Cube q;
    q.dim = 1;
    q.scale_exp = 2;
    q.resolution_exp = 4;
    q.anchor = {a, 0};
    fam.cubes.push_back(q);
  }
  const Grouping g = group_doubled(fam, GroupMode::rn);
  REQUIRE(g.groups.size() == 2);
  REQUIRE(g.groups[0].size() == 1);
  REQUIRE(g.groups[1].size() == 1);
  std::string why;
  REQUIRE(check_grouping(fam, g, &why));
}

TEST_CASE("group_doubled: shared dyadic parent forces four singleton groups") {
  CubeFamily fam;
  fam.budget = 4;
  for (int dy = 0; dy < 2; ++dy)
    for (int dx = 0; dx < 2; ++dx) {
      Cube q;
      q.dim = 2;
      q.scale_exp = 2;
      q.resolution_exp = 4;
      q.anchor = {dx * 4, dy * 4}; // the four scale-2 cubes of quadrant [0,1/2)^2
      fam.cubes.push_back(q);
    }
  const Grouping g = group_doubled(fam, GroupMode::q0);
  REQUIRE(g.groups.size() == 4);
  for (const auto& grp : g.groups) REQUIRE(grp.size() == 1);
  for (const Cube& d : g.doubled) {
    REQUIRE(d.anchor == std::array<int64_t, 2>{0, 0});
    REQUIRE(d.side_cells() == 8);
  }
  std::string why;
  REQUIRE(check_grouping(fam, g, &why));
}

TEST_CASE("group_doubled: sixteen random disjoint cubes, independent checker concurs") {
  Rng rng(4242);
  CubeFamily fam;
  fam.budget = 16;
  while (fam.cubes.size() < 16) {
    Cube q;
    q.dim = 2;
    q.scale_exp = 4;
    q.resolution_exp = 7;
    q.anchor = {rng.range(0, 120), rng.range(0, 120)};
    bool ok = true;
    for (const Cube& c : fam.cubes)
      if (!cubes_disjoint(c, q)) { ok = false; break; }
    if (ok) fam.cubes.push_back(q);
  }
  const Grouping g = group_doubled(fam, GroupMode::rn);
  std::string why;
  REQUIRE(check_grouping(fam, g, &why));
  for (const auto& grp : g.groups) REQUIRE(grp.size() <= 8); // ceil(16/2)
}

TEST_CASE("group_doubled: rejects bad inputs") {
  CubeFamily overlapping;
  overlapping.budget = 2;
  for (int64_t a : {0, 2}) {
    Cube q;
    q.dim = 2;
    q.scale_exp = 2;
    q.resolution_exp = 4;
    q.anchor = {a, 0};
    overlapping.cubes.push_back(q);
  }
  REQUIRE_THROWS_AS(group_doubled(overlapping, GroupMode::rn), std::invalid_argument);

  CubeFamily non_dyadic;
  non_dyadic.budget = 1;
  Cube q;
  q.dim = 2;
  q.scale_exp = 2;
  q.resolution_exp = 4;
  q.anchor = {1, 0};
  non_dyadic.cubes.push_back(q);
  REQUIRE_THROWS_AS(group_doubled(non_dyadic, GroupMode::q0), std::invalid_argument);
}

TEST_CASE("group_doubled: q0 doubles stay inside the closed unit cube") {
  Rng rng(99);
  for (int t = 0; t < 200; ++t) {
    const CubeFamily fam = random_disjoint_family(rng, 2, GroupMode::q0);
    const Grouping g = group_doubled(fam, GroupMode::q0);
    const int64_t cells = pow2i(fam.cubes[0].resolution_exp);
    for (const Cube& d : g.doubled) {
      REQUIRE(d.anchor[0] >= 0);
      REQUIRE(d.anchor[1] >= 0);
      REQUIRE(d.upper()[0] <= cells);
      REQUIRE(d.upper()[1] <= cells);
    }
  }
}

TEST_CASE("group_doubled: randomized invariants across modes and dimensions") {
  // The acceptance suite runs the full 10^4-trial version.
  for (int t = 0; t < 400; ++t) {
    for (int dim : {1, 2}) {
      for (GroupMode mode : {GroupMode::rn, GroupMode::q0}) {
        Rng rng(100000ull + 7919ull * static_cast<std::uint64_t>(t) + static_cast<std::uint64_t>(dim) +
                (mode == GroupMode::q0 ? 3u : 0u));
        const CubeFamily fam = random_disjoint_family(rng, dim, mode);
        const Grouping g = group_doubled(fam, mode);
        std::string why;
        INFO(why);
        REQUIRE(check_grouping(fam, g, &why));
        REQUIRE(g.groups.size() <= static_cast<size_t>(pow2i(dim)));
      }
    }
  }
}

TEST_CASE("group_doubled: a family whose doubles need five groups is reported infeasible") {
  // 30 disjoint 2^-5 cubes whose doubled conflict graph is not 4-colorable;
  // the grouping bound cannot be met and the call must say so.
  Rng rng(1 + 1315423911ull * 200383ull + 14ull);
  const CubeFamily fam = random_disjoint_family(rng, 2, GroupMode::rn);
  REQUIRE(fam.cubes.size() == 30);
  REQUIRE_THROWS_AS(group_doubled(fam, GroupMode::rn), std::runtime_error);
}
