#include <cmath>
#include <random>

#include "doctest.h"
#include "gurarij/polytope.hpp"
#include "gurarij/space.hpp"

using namespace gurarij;
using namespace gurarij::polytope;

namespace {

std::vector<HalfSpace> cube(std::size_t dim) {
  std::vector<HalfSpace> h;
  for (std::size_t i = 0; i < dim; ++i) {
    h.push_back({unit_vector(dim, i), 1.0});
    h.push_back({scale(unit_vector(dim, i), -1.0), 1.0});
  }
  return h;
}

bool same_set(std::vector<Vector> a, std::vector<Vector> b, double tol = 1e-9) {
  if (a.size() != b.size()) return false;
  for (const auto& x : a) {
    bool hit = false;
    for (const auto& y : b) hit |= norm_linf(sub(x, y)) <= tol;
    if (!hit) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("cube vertices") {
  CHECK(vertices(cube(2), 2).size() == 4);
  CHECK(vertices(cube(3), 3).size() == 8);
  // a redundant row and a duplicate do not add vertices
  auto h = cube(2);
  h.push_back({{1.0, 1.0}, 5.0});
  h.push_back({{2.0, 0.0}, 2.0});
  CHECK(vertices(h, 2).size() == 4);
}

TEST_CASE("unbounded polyhedron keeps its vertices") {
  // epigraph of |x - 1| in (x, t): t >= x - 1, t >= 1 - x
  std::vector<HalfSpace> h = {{{1.0, -1.0}, 1.0}, {{-1.0, -1.0}, -1.0}};
  auto v = vertices(h, 2);
  REQUIRE(v.size() == 1);
  CHECK(v[0][0] == doctest::Approx(1.0));
  CHECK(v[0][1] == doctest::Approx(0.0));
}

TEST_CASE("parallel and serial enumeration agree") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 2 + trial % 3;
    std::vector<HalfSpace> h;
    for (int k = 0; k < 12; ++k) {
      Vector a(dim);
      for (auto& x : a) x = g(rng);
      h.push_back({a, 1.0});
    }
    for (auto& r : cube(dim)) h.push_back({r.a, 3.0});
    auto p = vertices(h, dim), s = vertices_serial(h, dim);
    CHECK(p == s);
    // every vertex is tight on at least dim rows
    for (const auto& v : p) {
      int tight = 0;
      for (const auto& r : h) tight += std::abs(dot(r.a, v) - r.b) < 1e-7 * (1 + std::abs(r.b));
      CHECK(tight >= static_cast<int>(dim));
    }
  }
}

TEST_CASE("batch norms agree") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vector> gens, pts;
  for (int i = 0; i < 30; ++i) gens.push_back({g(rng), g(rng), g(rng)});
  for (int i = 0; i < 500; ++i) pts.push_back({g(rng), g(rng), g(rng)});
  CHECK(batch_norms(gens, pts) == batch_norms_serial(gens, pts));
}

TEST_CASE("Fourier-Motzkin projects a cube to a square") {
  auto sq = project(cube(3), 3, 2);
  CHECK(sq.size() == 4);
  CHECK(same_set(vertices(sq, 2), vertices(cube(2), 2)));
}

TEST_CASE("projection of a tilted polytope") {
  // {(x, y): |x| <= 1, |y - x| <= 1} projected to x is [-1, 1]; onto y: [-2, 2]
  std::vector<HalfSpace> h = {{{1, 0}, 1}, {{-1, 0}, 1}, {{-1, 1}, 1}, {{1, -1}, 1}};
  auto x = vertices(project(h, 2, 1), 1);
  REQUIRE(x.size() == 2);
  CHECK(x[0][0] == doctest::Approx(-1.0));
  CHECK(x[1][0] == doctest::Approx(1.0));
}

TEST_CASE("dual ball vertices recover generators") {
  auto l1 = space::make_standard(space::StandardKind::l1, 3);
  auto v = dual_ball_vertices(l1->dual_ball());
  CHECK(same_set(v, l1->generators()));

  // pulled-back ball through an oracle copy: same norm as the explicit pullback
  space::SpacePtr oracle = std::make_shared<space::OracleNormedSpace>("o", l1->dual_ball(), space::Provenance{});
  std::vector<Vector> basis = {{1, 1, 0}, {0, 1, -1}};
  auto pulled = space::subspace_pullback(oracle, basis);
  auto gens = dual_ball_vertices(pulled->dual_ball());
  auto direct = space::subspace_pullback(*l1, basis);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 100; ++k) {
    Vector s = {u(rng), u(rng)};
    double m = 0.0;
    for (const auto& g : gens) m = std::max(m, dot(g, s));
    CHECK(m == doctest::Approx(direct->norm(s)).epsilon(1e-9));
  }
}
