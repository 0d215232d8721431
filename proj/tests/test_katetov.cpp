#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "gurarij/error.hpp"
#include "gurarij/katetov.hpp"

using namespace gurarij;
using namespace gurarij::katetov;

namespace {

SpacePtr l1(std::size_t d) { return space::make_standard(space::StandardKind::l1, d); }
SpacePtr linf(std::size_t d) { return space::make_standard(space::StandardKind::linf, d); }

// Equal-weight averages of support points: min over multisets of size
// n <= 6 of mean(values) + ||x - mean(points)||.
double equal_weight_oracle(const FiniteKatetov& fk, std::span<const double> x) {
  const std::size_t m = fk.support.size();
  double best = optim::kInf;
  for (std::size_t n = 1; n <= 6; ++n) {
    std::vector<std::size_t> pick(n, 0);
    while (true) {
      Vector mean(x.size(), 0.0);
      double val = 0.0;
      for (auto j : pick) {
        mean = add(mean, scale(fk.support[j], 1.0 / n));
        val += fk.values[j] / n;
      }
      best = std::min(best, val + fk.space->norm(sub(x, mean)));
      std::size_t i = n;
      while (i > 0 && pick[i - 1] == m - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t k = i; k < n; ++k) pick[k] = pick[i - 1];
    }
  }
  return best;
}

FiniteKatetov random_fk(std::mt19937_64& rng, std::size_t dim, std::size_t n, bool use_linf) {
  auto s = use_linf ? linf(dim) : l1(dim);
  auto pts = sample_ball(*s, n, 2.0, rng);
  return sample_katetov(s, pts, 2.0, rng);
}

Vector rvec(std::mt19937_64& rng, std::size_t d, double r = 3.0) {
  std::uniform_real_distribution<double> u(-r, r);
  Vector v(d);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("Katetov checks") {
  auto s = l1(1);
  CHECK(is_katetov({s, {{0.0}, {1.0}, {-2.0}}, {0.5, 0.5, 2.5}}).empty());  // |x - 0.5|
  auto zero = is_katetov({s, {{0.0}, {1.0}}, {0.0, 0.0}});
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].kind == "lower");
  auto steep = is_katetov({s, {{0.0}, {1.0}}, {0.0, 5.0}});
  REQUIRE(!steep.empty());
  CHECK(steep[0].kind == "upper");
}

TEST_CASE("min-plus extension") {
  auto s = l1(1);
  FiniteKatetov one{s, {{0.0}}, {1.0}};
  CHECK(extend_min_plus(one, Vector{2.0}) == 3.0);
  FiniteKatetov two{s, {{-1.0}, {1.0}}, {1.0, 1.0}};
  CHECK(extend_min_plus(two, Vector{0.0}) == 2.0);
  CHECK(extend_min_plus(two, Vector{1.0}) == 1.0);
  CHECK_THROWS_AS(extend_min_plus(two, Vector{0.0, 1.0}), Error);
}

TEST_CASE("convexify small examples") {
  auto s = l1(1);
  FiniteKatetov two{s, {{-1.0}, {1.0}}, {1.0, 1.0}};
  auto ck = convexify(two);
  CHECK(ck.values()[0] == doctest::Approx(1.0));
  CHECK(ck.values()[1] == doctest::Approx(1.0));
  CHECK(ck(Vector{0.0}) == doctest::Approx(1.0));
  CHECK(equal_weight_oracle(two, Vector{0.0}) == doctest::Approx(1.0));

  FiniteKatetov three{s, {{-1.0}, {0.0}, {1.0}}, {1.0, 3.0, 1.0}};
  auto c3 = convexify(three);
  CHECK(c3.values()[1] == doctest::Approx(1.0));
  CHECK(equal_weight_oracle(three, Vector{0.0}) == doctest::Approx(1.0));

  // a distance function is already convex
  FiniteKatetov dist{s, {{-2.0}, {0.0}, {3.0}}, {2.5, 0.5, 2.5}};
  auto cd = convexify(dist);
  for (std::size_t j = 0; j < 3; ++j) CHECK(cd.values()[j] == doctest::Approx(dist.values[j]));
}

TEST_CASE("envelope agrees with equal-weight averages") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 8; ++trial) {
    auto fk = random_fk(rng, 1 + trial % 3, 3, trial % 2 == 0);
    auto ck = convexify(fk);
    for (int k = 0; k < 5; ++k) {
      auto x = sample_ball(*fk.space, 1, 3.0, rng)[0];
      // restricted weights can only overestimate
      CHECK(ck(x) <= equal_weight_oracle(fk, x) + 1e-9);
    }
  }
  // optimal weights have denominators dividing 6 at these points
  FiniteKatetov fk{l1(1), {{-1.0}, {0.5}, {2.0}}, {1.5, 2.0, 1.0}};
  auto ck = convexify(fk);
  for (double x : {-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0})
    CHECK(ck(Vector{x}) == doctest::Approx(equal_weight_oracle(fk, Vector{x})).epsilon(1e-9));
}

TEST_CASE("envelope evaluation") {
  auto s = l1(2);
  auto pt = point_as_katetov(s, {1.0, -2.0});
  CHECK(pt(Vector{0.0, 0.0}) == doctest::Approx(3.0));
  CHECK(point_as_katetov(s, {0.0, 0.0})(Vector{1.0, 0.0}) == doctest::Approx(1.0));
  std::mt19937_64 rng(2);
  for (int k = 0; k < 10; ++k) {
    auto x = rvec(rng, 2);
    CHECK(pt(x) == doctest::Approx(s->norm(sub(x, Vector{1.0, -2.0}))));
  }
  for (int trial = 0; trial < 10; ++trial) {
    auto ck = convexify(random_fk(rng, 1 + trial % 3, 4, trial % 2 == 0));
    for (std::size_t j = 0; j < ck.size(); ++j) CHECK(ck(ck.points()[j]) == doctest::Approx(ck.values()[j]).epsilon(1e-9));
    for (int k = 0; k < 5; ++k) {
      auto x = rvec(rng, ck.dim());
      auto dual = eval_envelope_dual(ck, x);
      CHECK(eval_envelope_primal(ck, x) == doctest::Approx(dual.value).epsilon(1e-9));
      CHECK(dual.value <= extend_min_plus(restriction(ck), x) + 1e-9);
      // supporting minorant
      auto z = rvec(rng, ck.dim());
      CHECK(ck(z) >= dot(dual.functional, z) - dual.offset - 1e-8);
    }
  }
}

TEST_CASE("conjugate") {
  auto s = l1(1);
  auto pt = point_as_katetov(s, {2.0});
  CHECK(envelope_conjugate(pt, Vector{0.5}) == doctest::Approx(1.0));
  FiniteKatetov two{s, {{-1.0}, {1.0}}, {1.0, 1.0}};
  auto ck = convexify(two);
  CHECK(envelope_conjugate(ck, Vector{0.0}) == doctest::Approx(-1.0));
  CHECK(envelope_conjugate(ck, Vector{1.0}) == doctest::Approx(0.0));
  try {
    envelope_conjugate(ck, Vector{1.5});
    FAIL("expected functional-too-large");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::functional_too_large);
  }
}

TEST_CASE("sup distance") {
  auto s = l1(2);
  auto a = point_as_katetov(s, {0.0, 1.0});
  auto b = point_as_katetov(s, {2.0, 0.0});
  CHECK(sup_distance(a, a) == 0.0);
  CHECK(sup_distance(a, b) == doctest::Approx(3.0));
  auto line = l1(1);
  CHECK(sup_distance(ConvexKatetovEnvelope(line, {{0.0}}, {1.0}), ConvexKatetovEnvelope(line, {{0.0}}, {2.0})) ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(sup_distance(a, point_as_katetov(line, {0.0})), Error);

  // sampled points never beat the generator-union maximum
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 1 + trial % 2;
    auto sp = l1(d);
    auto p = convexify(sample_katetov(sp, sample_ball(*sp, 4, 2.0, rng), 2.0, rng));
    auto q = convexify(sample_katetov(sp, sample_ball(*sp, 4, 2.0, rng), 2.0, rng));
    const double m = sup_distance(p, q);
    for (int k = 0; k < 20; ++k) {
      auto x = rvec(rng, d, 4.0);
      CHECK(std::abs(p(x) - q(x)) <= m + 1e-8);
    }
  }
}

TEST_CASE("one-point norm") {
  auto s = l1(2);
  const Vector v = {1.0, 1.0};
  auto pt = point_as_katetov(s, v);
  const Vector a = {0.5, -3.0};
  CHECK(one_point_norm(pt, 0.0, a) == s->norm(a));
  for (double alpha : {-2.0, -0.5, 1.0, 3.0})
    CHECK(one_point_norm(pt, alpha, a) == doctest::Approx(s->norm(sub(scale(v, alpha), a))));
  CHECK(one_point_norm(pt, 1.0, Vector{0.0, 0.0}) == doctest::Approx(pt(Vector{0.0, 0.0})));
}

TEST_CASE("one-point epigraph matches direct evaluation") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    auto ck = convexify(random_fk(rng, 2, 3, trial % 2 == 1));
    const double alpha = trial % 5 == 0 ? 0.0 : u(rng);
    auto a = rvec(rng, 2);
    optim::LpBuilder lp;
    std::vector<optim::LinExpr> ae(2);
    for (int i = 0; i < 2; ++i) ae[i].constant = a[i];
    auto t = lp.add_variable(0.0, optim::kInf, 1.0);
    append_one_point_epigraph(lp, ck, ae, optim::LinExpr(alpha), optim::LinExpr().add(t, 1.0));
    auto sol = optim::solve(lp, optim::Sense::minimize);
    REQUIRE(sol.status == optim::LpStatus::optimal);
    CHECK(sol.objective == doctest::Approx(one_point_norm(ck, alpha, a)).epsilon(1e-8));
  }
}

TEST_CASE("envelope properties") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t d = 1 + trial % 3;
    auto fk = random_fk(rng, d, 3 + trial % 4, trial % 2 == 0);
    REQUIRE(is_katetov(fk).empty());
    auto ck = convexify(fk);
    CHECK(is_katetov(restriction(ck)).empty());
    const auto& sp = *ck.space();
    for (int k = 0; k < 6; ++k) {
      auto x = rvec(rng, d), y = rvec(rng, d);
      const double fx = ck(x), fy = ck(y), dxy = sp.norm(sub(x, y));
      CHECK(fx <= fy + dxy + 1e-8);  // upper Katetov / 1-Lipschitz
      CHECK(dxy <= fx + fy + 1e-8);  // lower Katetov
      const double t = u01(rng);
      CHECK(ck(add(scale(x, t), scale(y, 1.0 - t))) <= t * fx + (1.0 - t) * fy + 1e-8);
    }
    // idempotence
    auto again = convexify(restriction(ck));
    for (std::size_t j = 0; j < ck.size(); ++j) CHECK(again.values()[j] == doctest::Approx(ck.values()[j]).epsilon(1e-8));
    // extend-then-convexify equals convexify-then-evaluate
    FiniteKatetov bigger = fk;
    for (auto& y : sample_ball(sp, 3, 3.0, rng)) {
      bigger.values.push_back(extend_min_plus(fk, y));
      bigger.support.push_back(y);
    }
    auto ck2 = convexify(bigger);
    for (int k = 0; k < 5; ++k) {
      auto x = rvec(rng, d);
      CHECK(std::abs(ck2(x) - ck(x)) <= 1e-8);
    }
  }
}
