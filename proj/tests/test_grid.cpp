#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "ihf/grid.hpp"
#include "support.hpp"

using namespace ihf;
using ihf::test::spec2;

namespace {

// Lattice points of max-norm <= m whose coordinates are coprime: one per
// direction class, counted independently of the library.
int primitive_count(int dim, int m) {
  int count = 0;
  for (int a = -m; a <= m; ++a)
    for (int b = -m; b <= m; ++b)
      for (int c = (dim == 3 ? -m : 0); c <= (dim == 3 ? m : 0); ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        if (std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c)) == 1) ++count;
      }
  return count;
}

}  // namespace

TEST_CASE("stencil sizes") {
  CHECK(stencil_directions(2, 1).size() == 8);
  CHECK(stencil_directions(3, 1).size() == 26);
  CHECK(stencil_directions(2, 2).size() == 16);
  for (int dim : {2, 3})
    for (int m = 1; m <= (dim == 2 ? 6 : 3); ++m)
      CHECK(stencil_directions(dim, m).size() == std::size_t(primitive_count(dim, m)));
}

TEST_CASE("stencil symmetry, axes and prefixes") {
  for (int dim : {2, 3}) {
    const int top = dim == 2 ? 5 : 3;
    const auto wide = stencil_directions(dim, top);
    for (int m = 1; m <= top; ++m) {
      const auto st = stencil_directions(dim, m);
      std::set<Lattice> offs(st.offsets.begin(), st.offsets.end());
      CHECK(offs.size() == st.size());
      Lattice sum{};
      for (const auto& o : st.offsets) {
        CHECK(offs.count({-o[0], -o[1], -o[2]}) == 1);
        CHECK(max_abs(o) <= m);
        for (int a = 0; a < 3; ++a) sum[a] += o[a];
      }
      CHECK(sum == Lattice{});
      for (int a = 0; a < dim; ++a) {
        Lattice e{};
        e[a] = 1;
        CHECK(offs.count(e) == 1);
        e[a] = -1;
        CHECK(offs.count(e) == 1);
      }
      REQUIRE(wide.offset_count(m) == int(st.size()));
      for (std::size_t k = 0; k < st.size(); ++k) CHECK(wide.offsets[k] == st.offsets[k]);
    }
  }
}

TEST_CASE("stencil lengths and classes") {
  const auto st = stencil_directions(2, 4);
  for (std::size_t k = 0; k < st.size(); ++k) CHECK(st.lengths[k] == ihf::test::lattice_length(st.offsets[k]));
  for (int c = 0; c < st.class_count(); ++c)
    for (int k = st.class_begin[c]; k < st.class_begin[c + 1]; ++k) CHECK(st.lengths[k] == st.class_length[c]);
  for (int a = 0; a < st.class_count(); ++a)
    for (int b = 0; b < st.class_count(); ++b)
      CHECK(st.pair_weight[a * st.class_count() + b] ==
            doctest::Approx(st.class_length[b] / (st.class_length[a] + st.class_length[b])));
}

TEST_CASE("annular domain") {
  const auto d = build_domain(spec2(0.1, 4.0, 2));
  const auto obs = d.nodes_of(NodeClass::ObstacleBoundary);
  const auto outer = d.nodes_of(NodeClass::OuterBoundary);
  REQUIRE(!obs.empty());
  REQUIRE(!outer.empty());
  for (auto i : obs) {
    CHECK(d.radius(i) > 1.0);
    CHECK(d.radius(i) <= 1.0 + std::sqrt(2.0) * 0.1 + 1e-12);
  }
  for (auto i : outer) {
    CHECK(d.radius(i) <= 4.0 + 1e-12);
    CHECK(d.radius(i) > 4.0 - 1.5 * 0.1);
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.classification(i) == NodeClass::Excluded) CHECK(d.radius(i) <= 1.0 + 1e-12);
    CHECK(d.radius(i) <= 4.0 + 1e-12);
  }
  // The ring |x| = 1 is closed off: every obstacle node sits next to a boundary node.
  CHECK(obs.size() > std::size_t(2 * 3.14159 * 1.0 / 0.1));
}

TEST_CASE("interior stencils land on live nodes") {
  for (const auto& spec : {spec2(0.1, 3.0, 3), spec2(0.2, 2.0, 2, NoObstacle{}, OuterShape::Box),
                           spec2(0.25, 3.0, 4, PointObstacle{{Point{0, 0, 0}}})}) {
    const auto d = build_domain(spec);
    const auto& st = d.stencil();
    for (std::size_t k = 0; k < d.interior().size(); ++k) {
      const std::size_t i = d.interior()[k];
      const auto nbr = d.neighbors(k);
      REQUIRE(int(nbr.size()) == st.offset_count(d.width(k)));
      CHECK(d.width(k) >= 1);
      CHECK(d.width(k) <= spec.stencil_width);
      for (std::size_t o = 0; o < nbr.size(); ++o) {
        const auto& l = d.lattice(i);
        const auto& off = st.offsets[o];
        const auto j = d.find({l[0] + off[0], l[1] + off[1], l[2] + off[2]});
        REQUIRE(j.has_value());
        CHECK(*j == std::size_t(nbr[o]));
        CHECK(d.classification(*j) != NodeClass::Excluded);
      }
    }
  }
}

TEST_CASE("colours are independent sets") {
  const auto d = build_domain(spec2(0.1, 2.5, 3));
  std::vector<int> colour(d.size(), -1);
  std::size_t total = 0;
  for (std::size_t c = 0; c < d.colors().size(); ++c)
    for (auto k : d.colors()[c]) {
      colour[d.interior()[k]] = int(c);
      ++total;
    }
  CHECK(total == d.interior().size());
  for (std::size_t k = 0; k < d.interior().size(); ++k) {
    const int c = colour[d.interior()[k]];
    for (auto j : d.neighbors(k)) CHECK(colour[j] != c);
  }
}

TEST_CASE("point obstacle in a box") {
  const auto d = build_domain(spec2(0.5, 2.0, 1, PointObstacle{{Point{0, 0, 0}}}, OuterShape::Box));
  const auto obs = d.nodes_of(NodeClass::ObstacleBoundary);
  REQUIRE(obs.size() == 1);
  CHECK(d.lattice(obs[0]) == Lattice{0, 0, 0});
  CHECK(d.nodes_of(NodeClass::Excluded).empty());
  CHECK(d.size() == 81);
  CHECK(d.nodes_of(NodeClass::OuterBoundary).size() == 32);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(build_domain(spec2(0.9, 1.05, 1)), EmptyInterior);
  CHECK_THROWS_AS(build_domain(spec2(0.1, 4.0, 2, BallObstacle{1.5})), ObstacleTooLarge);
  CHECK_THROWS_AS(build_domain(spec2(0.1, 4.0, 2, PointObstacle{{Point{2.0, 0, 0}}})), ObstacleTooLarge);
  CHECK_THROWS_AS(build_domain(spec2(-0.1, 4.0, 2)), InvalidArgument);
  CHECK_THROWS_AS(build_domain(spec2(0.1, 0.9, 2)), InvalidArgument);
  CHECK_THROWS_AS(build_domain(spec2(0.1, 4.0, 0)), InvalidArgument);
  CHECK_THROWS_AS(build_domain(spec2(0.5, 2.0, 5)), InvalidArgument);
}

TEST_CASE("rebuild is identical") {
  const auto spec = spec2(0.1, 3.0, 3);
  const auto a = build_domain(spec);
  const auto b = build_domain(spec);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.lattice(i) == b.lattice(i));
    CHECK(a.classification(i) == b.classification(i));
  }
  REQUIRE(a.interior() == b.interior());
  for (std::size_t k = 0; k < a.interior().size(); ++k) {
    const auto na = a.neighbors(k), nb = b.neighbors(k);
    CHECK(std::equal(na.begin(), na.end(), nb.begin(), nb.end()));
  }
  CHECK(a.colors() == b.colors());
}

TEST_CASE("mask obstacle") {
  const auto path = (std::filesystem::temp_directory_path() / "ihf_test_mask.txt").string();
  {
    std::ofstream f(path);
    f << "00000\n01110\n01110\n01110\n00000\n";
  }
  const auto d = build_domain(spec2(0.25, 2.0, 1, MaskObstacle{path}));
  std::size_t excluded = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.classification(i) == NodeClass::Excluded) {
      ++excluded;
      CHECK(max_abs(d.lattice(i)) <= 1);
    }
  CHECK(excluded == 9);
  for (auto i : d.nodes_of(NodeClass::ObstacleBoundary)) CHECK(max_abs(d.lattice(i)) == 2);
  CHECK(d.nodes_of(NodeClass::ObstacleBoundary).size() == 16);
  std::remove(path.c_str());
}

TEST_CASE("matching ball shares interior widths") {
  const auto ref = build_domain(spec2(0.1, 4.0, 3));
  const auto ball = build_matching_ball(ref, 3.0);
  CHECK(!ball.has_obstacle());
  CHECK(ball.nodes_of(NodeClass::ObstacleBoundary).empty());
  for (std::size_t k = 0; k < ball.interior().size(); ++k) {
    const auto j = ref.find(ball.lattice(ball.interior()[k]));
    if (!j || ref.interior_slot(*j) < 0) continue;
    CHECK(ball.width(k) == ref.width(ref.interior_slot(*j)));
  }
}
