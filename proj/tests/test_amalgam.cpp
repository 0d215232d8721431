#include <cmath>
#include <random>

#include "doctest.h"
#include "gurarij/amalgam.hpp"
#include "gurarij/error.hpp"

using namespace gurarij;
using namespace gurarij::amalgam;
using katetov::convexify;
using katetov::point_as_katetov;

namespace {

SpacePtr l1(std::size_t d) { return space::make_standard(space::StandardKind::l1, d); }
SpacePtr linf(std::size_t d) { return space::make_standard(space::StandardKind::linf, d); }

ConvexKatetovEnvelope random_ck(std::mt19937_64& rng, const SpacePtr& s, std::size_t n) {
  auto pts = katetov::sample_ball(*s, n, 2.0, rng);
  return convexify(katetov::sample_katetov(s, pts, 2.0, rng));
}

Vector rvec(std::mt19937_64& rng, std::size_t d, double r = 2.0) {
  std::uniform_real_distribution<double> u(-r, r);
  Vector v(d);
  for (auto& x : v) x = u(rng);
  return v;
}

// sup over a fine grid of the l1 sphere in 2 coefficients
double grid_henson_2(const SpacePtr& e, const std::vector<Vector>& xs, const SpacePtr& f,
                     const std::vector<Vector>& ys) {
  double best = 0.0;
  const int n = 4000;
  for (int k = 0; k < n; ++k) {
    const double th = 4.0 * k / n;  // walk the diamond
    double s0, s1;
    if (th < 1) s0 = 1 - th, s1 = th;
    else if (th < 2) s0 = 1 - th, s1 = 2 - th;
    else if (th < 3) s0 = th - 3, s1 = 2 - th;
    else s0 = th - 3, s1 = th - 4;
    const double ne = e->norm(add(scale(xs[0], s0), scale(xs[1], s1)));
    const double nf = f->norm(add(scale(ys[0], s0), scale(ys[1], s1)));
    best = std::max(best, std::abs(ne - nf));
  }
  return best;
}

}  // namespace

TEST_CASE("amalgam bounds examples") {
  auto s = l1(2);
  const Vector v = {1.0, 0.5}, w = {-0.5, 2.0};
  auto b0 = amalgam_bounds(point_as_katetov(s, v), point_as_katetov(s, v));
  CHECK(b0.r0 == doctest::Approx(0.0));
  CHECK(b0.r1 == doctest::Approx(0.0));
  auto b1 = amalgam_bounds(point_as_katetov(s, v), point_as_katetov(s, w));
  CHECK(b1.r0 == doctest::Approx(s->norm(sub(v, w))));
  CHECK(b1.r1 == doctest::Approx(s->norm(sub(v, w))));
  auto line = l1(1);
  katetov::ConvexKatetovEnvelope one(line, {{0.0}}, {1.0});
  auto b2 = amalgam_bounds(one, one);
  CHECK(b2.r0 == doctest::Approx(0.0));
  CHECK(b2.r1 == doctest::Approx(2.0));
  // grid search over a confirms r1
  double grid = 1e9;
  for (int k = -400; k <= 400; ++k) grid = std::min(grid, 2.0 * one(Vector{k * 0.01}));
  CHECK(grid == doctest::Approx(2.0));
}

TEST_CASE("two-point norm examples") {
  std::mt19937_64 rng(1);
  auto s = l1(2);
  auto ck0 = random_ck(rng, s, 3), ck1 = random_ck(rng, s, 3);
  auto b = amalgam_bounds(ck0, ck1);
  auto tpe = make_two_point(ck0, ck1, b.r0);
  const Vector a = {0.7, -1.1}, zero = {0.0, 0.0};
  CHECK(two_point_norm(tpe, a, 0.0, 0.0) == doctest::Approx(s->norm(a)));
  CHECK(two_point_norm(tpe, zero, 1.0, -1.0) == doctest::Approx(b.r0));
  CHECK_THROWS_AS(make_two_point(ck0, ck1, b.r1 + 1.0), Error);

  const Vector v = {1.0, 1.0}, w = {0.0, -1.0};
  auto pv = point_as_katetov(s, v), pw = point_as_katetov(s, w);
  auto bb = amalgam_bounds(pv, pw);
  auto t2 = make_two_point(pv, pw, 0.5 * (bb.r0 + bb.r1));
  CHECK(two_point_norm(t2, zero, 1.0, -1.0) == doctest::Approx(s->norm(sub(v, w))));
}

TEST_CASE("two-point norm: restriction, distance and triangle inequality") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t d = 1 + trial % 2;
    auto s = trial % 3 == 0 ? linf(d) : l1(d);
    auto ck0 = random_ck(rng, s, 3), ck1 = random_ck(rng, s, 3);
    auto b = amalgam_bounds(ck0, ck1);
    CHECK(b.r0 <= b.r1 + 1e-9);
    for (double r : {b.r0, 0.5 * (b.r0 + b.r1), b.r1}) {
      auto tpe = make_two_point(ck0, ck1, r);
      const Vector zero(d, 0.0);
      CHECK(std::abs(two_point_norm(tpe, zero, 1.0, -1.0) - r) <= 1e-8);
      for (int k = 0; k < 4; ++k) {
        auto a = rvec(rng, d);
        const double al = u(rng);
        CHECK(std::abs(two_point_norm(tpe, a, al, 0.0) - katetov::one_point_norm(ck0, al, scale(a, -1.0))) <= 1e-8);
        CHECK(std::abs(two_point_norm(tpe, a, 0.0, al) - katetov::one_point_norm(ck1, al, scale(a, -1.0))) <= 1e-8);
        auto a2 = rvec(rng, d);
        const double al2 = u(rng), be = u(rng), be2 = u(rng);
        CHECK(two_point_norm(tpe, add(a, a2), al + al2, be + be2) <=
              two_point_norm(tpe, a, al, be) + two_point_norm(tpe, a2, al2, be2) + 1e-8);
      }
    }
  }
}

TEST_CASE("Henson distance examples") {
  auto line = l1(1);
  CHECK(henson_distance(line, {{2.0}}, line, {{3.0}}).value == doctest::Approx(1.0));
  auto e = l1(2), f = linf(2);
  std::vector<Vector> basis = {{1.0, 0.0}, {0.0, 1.0}};
  const double h = henson_distance(e, basis, f, basis).value;
  CHECK(h == doctest::Approx(0.5));
  CHECK(std::abs(h - grid_henson_2(e, basis, f, basis)) <= 1e-6);
  auto ex = henson_distance_exact(e, basis, e, basis);
  CHECK(ex.is_zero);
  CHECK(ex.result.value == 0.0);
  CHECK_FALSE(henson_distance_exact(e, basis, f, basis).is_zero);
  CHECK_THROWS_AS(henson_distance(e, basis, f, {{1.0, 0.0}}), Error);
}

TEST_CASE("Henson distance is symmetric and matches a grid") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 8; ++trial) {
    auto e = trial % 2 ? l1(3) : linf(3);
    auto f = trial % 3 ? linf(2) : l1(2);
    std::vector<Vector> xs = {rvec(rng, 3), rvec(rng, 3)}, ys = {rvec(rng, 2), rvec(rng, 2)};
    const double h1 = henson_distance(e, xs, f, ys).value, h2 = henson_distance(f, ys, e, xs).value;
    CHECK(std::abs(h1 - h2) <= 1e-9);
    CHECK(std::abs(h1 - grid_henson_2(e, xs, f, ys)) <= 1e-2 * (1.0 + h1));
    CHECK(grid_henson_2(e, xs, f, ys) <= h1 + 1e-9);
  }
}

TEST_CASE("tuple amalgam") {
  std::mt19937_64 rng(4);
  auto e = l1(2), f = linf(3);
  std::vector<Vector> xs = {rvec(rng, 2), rvec(rng, 2)}, ys = {rvec(rng, 3), rvec(rng, 3)};
  auto h = henson_distance(e, xs, f, ys);
  TupleAmalgam ta{e, f, xs, ys, h.value};
  auto sp = tuple_amalgam_space(ta);
  for (int k = 0; k < 20; ++k) {
    auto ze = rvec(rng, 2), zf = rvec(rng, 3);
    CHECK(std::abs(tuple_amalgam_norm(ta, ze, Vector(3, 0.0)) - e->norm(ze)) <= 1e-8);
    CHECK(std::abs(tuple_amalgam_norm(ta, Vector(2, 0.0), zf) - f->norm(zf)) <= 1e-8);
    Vector joint = ze;
    joint.insert(joint.end(), zf.begin(), zf.end());
    CHECK(sp->norm(joint) == doctest::Approx(tuple_amalgam_norm(ta, ze, zf)).epsilon(1e-9));
  }
  for (std::size_t i = 0; i < 2; ++i) CHECK(tuple_amalgam_norm(ta, xs[i], scale(ys[i], -1.0)) <= h.value + 1e-8);

  // a smaller r breaks the restriction in the extremal direction
  TupleAmalgam tight{e, f, xs, ys, h.value - 0.01};
  Vector ze(2, 0.0), zf(3, 0.0);
  for (std::size_t i = 0; i < 2; ++i) {
    ze = add(ze, scale(xs[i], h.direction[i]));
    zf = add(zf, scale(ys[i], h.direction[i]));
  }
  const double deficit = h.e_side ? e->norm(ze) - tuple_amalgam_norm(tight, ze, Vector(3, 0.0))
                                  : f->norm(zf) - tuple_amalgam_norm(tight, Vector(2, 0.0), zf);
  CHECK(deficit > 1e-4);

  // identical copies glued with r = 0
  TupleAmalgam same{e, e, xs, xs, 0.0};
  auto v = add(scale(xs[0], 0.3), scale(xs[1], -1.2));
  CHECK(tuple_amalgam_norm(same, v, scale(v, -1.0)) == doctest::Approx(0.0));
}
