#include <cmath>
#include <random>

#include "doctest.h"
#include "gurarij/aells.hpp"
#include "gurarij/error.hpp"
#include "gurarij/tower.hpp"

using namespace gurarij;
using namespace gurarij::tower;
using katetov::point_as_katetov;

namespace {

SpacePtr l1(std::size_t d) { return space::make_standard(space::StandardKind::l1, d); }
SpacePtr linf(std::size_t d) { return space::make_standard(space::StandardKind::linf, d); }

BuildParams small_params(std::uint64_t seed) {
  BuildParams p;
  p.start = l1(2);
  p.rounds = 1;
  p.envelopes_per_round = 2;
  p.support_size = 3;
  p.radii = {2.0};
  p.seed = seed;
  return p;
}

Vector random_vector(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> nd;
  Vector x(d);
  for (auto& xi : x) xi = nd(rng);
  return x;
}

// min over a fine grid of the R-ball of xi(y) + ||s - y||, in one dimension
// with norm c |s|.
double grid_restricted_1d(const ConvexKatetovEnvelope& xi, double c, double R, double s) {
  double best = 1e300;
  const int steps = 4000;
  const double ymax = R / c;
  for (int i = 0; i <= steps; ++i) {
    const double y = -ymax + 2.0 * ymax * i / steps;
    const Vector yy{y};
    best = std::min(best, xi(yy) + c * std::abs(s - y));
  }
  return best;
}

}  // namespace

TEST_CASE("build: zero envelopes only advances the round counter") {
  auto p = small_params(1);
  p.envelopes_per_round = 0;
  auto s = build(p);
  CHECK(s.chain.size() == 1);
  CHECK(s.round == 1);
  CHECK(s.log.empty());
}

TEST_CASE("build: rounds = 0 is just the start space") {
  auto p = small_params(1);
  p.rounds = 0;
  auto s = build(p);
  CHECK(s.chain.size() == 1);
  CHECK(s.top() == p.start);
}

TEST_CASE("build: parameter validation") {
  auto p = small_params(1);
  p.radii = {1.5};
  CHECK_THROWS_AS(build(p), Error);
  p = small_params(1);
  p.support_size = 0;
  CHECK_THROWS_AS(build(p), Error);
  p = small_params(1);
  p.symmetry = {Matrix::from_rows({{2.0, 0.0}, {0.0, 1.0}})};
  CHECK_THROWS_AS(build(p), Error);
}

TEST_CASE("adjoining point functions keeps the old span isometric") {
  auto e = l1(2);
  std::vector<ConvexKatetovEnvelope> pts{point_as_katetov(e, {1.0, 0.5}), point_as_katetov(e, {-0.3, 2.0})};
  auto ep = aells::adjoin({e, pts});
  BuildState st;
  st.chain = {e, ep};
  CHECK(embedding_defect(st, 200, 3) <= 1e-8);
}

TEST_CASE("one round over l1 dim 2 gives a dimension-4 normed space") {
  auto s = build(small_params(11));
  REQUIRE(s.chain.size() == 2);
  const auto& e1 = *s.top();
  CHECK(e1.dim() == 4);
  CHECK(e1.positive_definite());
  CHECK(s.log[0].size() == 2);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const Vector x = random_vector(rng, 4), y = random_vector(rng, 4);
    const double nx = e1.norm(x), ny = e1.norm(y);
    CHECK(nx > 0.0);
    CHECK(e1.norm(add(x, y)) <= nx + ny + 1e-9);
    CHECK(e1.norm(scale(x, -2.5)) == doctest::Approx(2.5 * nx).epsilon(1e-9));
  }
}

TEST_CASE("build is deterministic and two rounds embed isometrically") {
  auto p = small_params(7);
  p.rounds = 2;
  auto a = build(p);
  auto b = build(p);
  REQUIRE(a.chain.size() == 3);
  REQUIRE(a.log.size() == b.log.size());
  CHECK(a.seed_trace == b.seed_trace);
  for (std::size_t r = 0; r < a.log.size(); ++r) {
    REQUIRE(a.log[r].size() == b.log[r].size());
    for (std::size_t i = 0; i < a.log[r].size(); ++i) {
      CHECK(a.log[r][i].points() == b.log[r][i].points());
      CHECK(a.log[r][i].values() == b.log[r][i].values());
    }
  }
  CHECK(embedding_defect(a, 200, 9) <= 1e-8);

  auto c = build(small_params(8));
  CHECK(c.log[0][0].values() != a.log[0][0].values());
}

TEST_CASE("replay reproduces the chain from the log") {
  auto p = small_params(4);
  p.rounds = 2;
  auto a = build(p);
  auto r = replay(p.start, a.log, a.seed_trace);
  REQUIRE(r.chain.size() == a.chain.size());
  std::mt19937_64 rng(2);
  for (int t = 0; t < 30; ++t) {
    const Vector x = random_vector(rng, a.top()->dim());
    CHECK(r.top()->norm(x) == doctest::Approx(a.top()->norm(x)).epsilon(1e-12));
  }
}

TEST_CASE("symmetrized round: induced sign flip permutes adjoined coordinates isometrically") {
  auto p = small_params(21);
  p.symmetry = {Matrix::from_rows({{-1.0, 0.0}, {0.0, 1.0}})};
  auto s = build(p);
  REQUIRE(s.actions.size() == 2);
  const auto& e1 = *s.top();
  for (const auto& g : s.actions) {
    REQUIRE(g.rows() == e1.dim());
    // adjoined block is a permutation
    for (std::size_t r = 2; r < e1.dim(); ++r) {
      double sum = 0.0;
      for (std::size_t c = 2; c < e1.dim(); ++c) sum += g(r, c);
      CHECK(sum == 1.0);
    }
    std::mt19937_64 rng(13);
    for (int t = 0; t < 200; ++t) {
      const Vector x = random_vector(rng, e1.dim());
      CHECK(std::abs(e1.norm(g.apply(x)) - e1.norm(x)) <= 1e-8);
    }
  }
  // the nontrivial element moves some adjoined coordinate
  const auto& flip = s.actions[1];
  bool moved = false;
  for (std::size_t i = 2; i < e1.dim(); ++i) moved = moved || flip(i, i) == 0.0;
  CHECK(moved);
}

TEST_CASE("induced isometry without symmetrization escapes the orbit") {
  auto s = build(small_params(3));
  const Matrix flip = Matrix::from_rows({{-1.0, 0.0}, {0.0, 1.0}});
  try {
    induced_matrix(s.chain[0], s.log[0], flip);
    FAIL("expected orbit_escape");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::orbit_escape);
  }
  // the identity always extends
  auto id = induced_matrix(s.chain[0], s.log[0], Matrix::identity(2));
  CHECK(id == Matrix::identity(4));
}

TEST_CASE("restriction to the ball agrees with a grid minimization") {
  // F0 = R with norm 2|s|, xi generated by two points
  auto f0 = space::make_standard(space::StandardKind::polytope, 1, {{2.0}});
  ConvexKatetovEnvelope xi(f0, {{0.5}, {-1.0}}, {1.2, 2.0});
  const double R = 2.5;
  auto br = restrict_to_ball(*f0, R, [&](std::span<const double> s) { return katetov::eval_envelope_dual(xi, s); });
  ConvexKatetovEnvelope zeta(f0, br.points, br.values);
  for (double s = -4.0; s <= 4.0; s += 0.37) {
    const Vector ss{s};
    CHECK(zeta(ss) == doctest::Approx(grid_restricted_1d(xi, 2.0, R, s)).epsilon(1e-3));
    if (2.0 * std::abs(s) <= R) CHECK(std::abs(zeta(ss) - xi(ss)) <= 1e-9);
  }
}

TEST_CASE("restriction to the ball: l_inf example where ray projection would be wrong") {
  auto f0 = linf(2);
  auto xi = point_as_katetov(f0, {10.0, 0.0});
  auto br = restrict_to_ball(*f0, 3.0, [&](std::span<const double> s) { return katetov::eval_envelope_dual(xi, s); });
  ConvexKatetovEnvelope zeta(f0, br.points, br.values);
  CHECK(zeta(Vector{3.0, 3.0}) == doctest::Approx(7.0).epsilon(1e-9));
  CHECK(zeta(Vector{5.0, 0.0}) == doctest::Approx(9.0).epsilon(1e-9));
  CHECK(zeta(Vector{0.0, 0.0}) == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("extension test: v already in the space is reproduced exactly") {
  auto e = linf(2);
  std::vector<Vector> basis{{1.0, 0.0}};
  auto f0 = space::subspace_pullback(e, basis);
  auto xi = point_as_katetov(f0, {1.0});
  NetOptions net;
  net.per_pair = 8;
  auto res = gurarij_extension_test(e, basis, xi, 3.0, net);
  CHECK(res.space->dim() == 3);
  CHECK(res.epsilon <= 1e-6);
  CHECK(res.bound == doctest::Approx(1.0));
}

TEST_CASE("extension test: preconditions") {
  auto e = linf(2);
  auto f0 = space::subspace_pullback(e, {{1.0, 0.0}});
  auto xi = point_as_katetov(f0, {2.0});  // xi(0) = 2
  try {
    gurarij_extension_test(e, {{1.0, 0.0}}, xi, 3.0);
    FAIL("expected unnormalized_input");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::unnormalized_input);
  }
  auto f2 = space::subspace_pullback(e, {{1.0, 0.0}, {0.0, 1.0}});
  auto xi2 = point_as_katetov(f2, {1.0, 0.0});
  try {
    gurarij_extension_test(e, {{1.0, 0.0}, {2.0, 0.0}}, xi2, 3.0);
    FAIL("expected dependent_basis");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::dependent_basis);
  }
}

TEST_CASE("extension test: random instances meet 2/(R-1), exact inside the ball") {
  std::mt19937_64 rng(606);
  NetOptions net;
  net.per_pair = 16;
  for (double R : {3.0, 11.0}) {
    for (int trial = 0; trial < 3; ++trial) {
      auto inst = random_extension_instance(rng, 1 + trial % 2);
      auto e = linf(inst.psi.rows());
      std::vector<Vector> basis;
      for (std::size_t i = 0; i < inst.basis.size(); ++i) basis.push_back(inst.psi.column(i));
      auto res = gurarij_extension_test(e, basis, inst.xi, R, net);
      CHECK(res.epsilon <= 2.0 / (R - 1.0) + 1e-6);
      CHECK(res.epsilon_inside <= 1e-6);
    }
  }
}

TEST_CASE("random instance: psi is isometric and xi is the distance to v") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 4; ++trial) {
    auto inst = random_extension_instance(rng, 1 + trial % 3);
    auto e = linf(inst.psi.rows());
    const std::size_t k = inst.basis.size();
    std::normal_distribution<double> nd;
    for (int t = 0; t < 40; ++t) {
      Vector s(k);
      for (auto& x : s) x = nd(rng);
      Vector x = scale(inst.v, -1.0);
      for (std::size_t i = 0; i < k; ++i) x = add(x, scale(inst.basis[i], s[i]));
      CHECK(inst.xi(s) == doctest::Approx(inst.f1->norm(x)).epsilon(1e-9));
      CHECK(e->norm(inst.psi.apply(s)) == doctest::Approx(inst.f0->norm(s)).epsilon(1e-9));
    }
  }
}

TEST_CASE("perturbation constants: examples and properties") {
  auto e = l1(2);
  auto pc = perturbation_constants(e, {{1.0, 0.0}}, {0.0, 1.0});
  CHECK(pc.c == doctest::Approx(1.0));
  CHECK(pc.c_prime == doctest::Approx(1.0));
  CHECK_FALSE(pc.lower_bound);
  PerturbationConstants unit{1.0, 1.0, false};
  CHECK(unit.delta(0.1) == doctest::Approx(0.1 / 7.1));
  CHECK(unit.delta(0.05) < unit.delta(0.1));

  CHECK_THROWS_AS(perturbation_constants(e, {{2.0, 0.0}}, {0.0, 1.0}), Error);
  CHECK_THROWS_AS(perturbation_constants(e, {{1.0, 0.0}}, {-1.0, 0.0}), Error);

  // in l_inf^2 with v = e2: ||x|| / ||x + v|| for x = s e1 is |s| / max(|s|, 1) <= 1
  auto pi = perturbation_constants(linf(2), {{1.0, 0.0}}, {0.0, 1.0});
  CHECK(pi.c == doctest::Approx(1.0));

  // random instances: C, C' >= 1 and they dominate sampled ratios
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 6; ++trial) {
    auto inst = random_extension_instance(rng, 1 + trial % 3);
    auto p = perturbation_constants(inst.f1, inst.basis, inst.v);
    CHECK(p.c >= 1.0 - 1e-12);
    CHECK(p.c_prime >= 1.0 - 1e-12);
    CHECK(p.delta(0.1) < 0.1 / 7.0);
    std::normal_distribution<double> nd;
    const std::size_t k = inst.basis.size();
    double best_c = 0.0, best_cp = 0.0;
    for (int t = 0; t < 3000; ++t) {
      Vector s(k);
      for (auto& x : s) x = nd(rng);
      Vector x(k + 1, 0.0);
      for (std::size_t i = 0; i < k; ++i) x = add(x, scale(inst.basis[i], s[i]));
      const double nx = inst.f1->norm(x);
      best_c = std::max(best_c, nx / inst.f1->norm(add(x, inst.v)));
      best_cp = std::max(best_cp, norm_l1(s) / nx);
    }
    CHECK(best_c <= p.c + 1e-9);
    CHECK(best_cp <= p.c_prime + 1e-9);
    CHECK(best_cp >= 0.9 * p.c_prime);
  }
}

TEST_CASE("epsilon isometry check: identity, scaling, zero") {
  auto e = l1(3);
  CHECK(epsilon_isometry_check(Matrix::identity(3), *e, *e) <= 1e-12);
  Matrix s = Matrix::identity(3);
  for (std::size_t i = 0; i < 3; ++i) s(i, i) = 1.1;
  CHECK(epsilon_isometry_check(s, *e, *e) == doctest::Approx(0.1));
  CHECK(epsilon_isometry_check(Matrix(3, 3, 0.0), *e, *e) == doctest::Approx(1.0));
  CHECK_THROWS_AS(epsilon_isometry_check(Matrix(2, 3, 0.0), *e, *e), Error);
}

TEST_CASE("sphere net points have unit norm") {
  auto e = l1(3);
  auto net = sphere_net(*e, 16);
  CHECK(net.size() == 3 * 16 + 16);
  for (const auto& x : net) CHECK(e->norm(x) == doctest::Approx(1.0));
}

TEST_CASE("delta pipeline stays within epsilon") {
  std::mt19937_64 rng(2024);
  auto inst = random_extension_instance(rng, 1);
  auto res = delta_pipeline(inst, 0.5, rng, 16);
  CHECK(res.noise <= res.delta + 1e-12);
  CHECK(res.henson_r <= res.delta + 1e-9);
  CHECK(res.epsilon_achieved <= 0.5);
}
