#include <cmath>
#include <random>

#include "doctest.h"
#include "gurarij/aells.hpp"
#include "gurarij/error.hpp"

using namespace gurarij;
using namespace gurarij::aells;
using katetov::convexify;
using katetov::point_as_katetov;

namespace {

SpacePtr l1(std::size_t d) { return space::make_standard(space::StandardKind::l1, d); }
SpacePtr linf(std::size_t d) { return space::make_standard(space::StandardKind::linf, d); }

PointedFiniteMetric line_metric() {
  // 0 in the middle of p and q
  return {{"0", "p", "q"}, {{0, 1, 1}, {1, 0, 2}, {1, 2, 0}}, 0};
}

PointedFiniteMetric random_metric(std::mt19937_64& rng, std::size_t n) {
  // points in the plane under l1 give a genuine metric
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Vector> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  PointedFiniteMetric m;
  m.d.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    m.labels.push_back("x" + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) m.d[i][j] = norm_l1(sub(pts[i], pts[j]));
  }
  return m;
}

Molecule random_molecule(std::mt19937_64& rng, const PointedFiniteMetric& m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Molecule mol;
  double sum = 0.0;
  for (std::size_t i = 1; i < m.size(); ++i) {
    const double w = u(rng);
    mol[m.labels[i]] = w;
    sum += w;
  }
  mol[m.labels[0]] = -sum;
  return mol;
}

// Brute force over 1-Lipschitz functions with values on a half-integer grid.
double grid_lipschitz_max(const PointedFiniteMetric& m, const Molecule& mol) {
  const std::size_t n = m.size();
  std::vector<int> k(n, -6);
  double best = -1e300;
  while (true) {
    bool ok = k[m.base] == 0;
    for (std::size_t i = 0; ok && i < n; ++i)
      for (std::size_t j = 0; ok && j < n; ++j) ok = 0.5 * (k[i] - k[j]) <= m.d[i][j] + 1e-12;
    if (ok) {
      double v = 0.0;
      for (const auto& [label, w] : mol) v += w * 0.5 * k[m.index(label)];
      best = std::max(best, v);
    }
    std::size_t i = 0;
    while (i < n && k[i] == 6) k[i++] = -6;
    if (i == n) break;
    ++k[i];
  }
  return best;
}

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

}  // namespace

TEST_CASE("Arens-Eells norm examples") {
  auto m = line_metric();
  validate(m);
  auto r = ae_norm(m, {{"p", 1.0}, {"q", -1.0}});
  CHECK(r.value == doctest::Approx(2.0));
  CHECK(ae_norm(m, {}).value == 0.0);
  auto r3 = ae_norm(m, {{"p", 1.0}, {"q", 1.0}, {"0", -2.0}});
  CHECK(r3.value == doctest::Approx(grid_lipschitz_max(m, {{"p", 1.0}, {"q", 1.0}, {"0", -2.0}})));
  CHECK(r.value == doctest::Approx(grid_lipschitz_max(m, {{"p", 1.0}, {"q", -1.0}})));
  CHECK(r3.dual_value == doctest::Approx(2.0));
  CHECK(r3.witness[1] == doctest::Approx(1.0));
  CHECK(r3.witness[2] == doctest::Approx(1.0));
  try {
    ae_norm(m, {{"p", 1.0}});
    FAIL("expected unbalanced-molecule");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unbalanced_molecule);
  }
  try {
    ae_norm(m, {{"z", 1.0}, {"p", -1.0}});
    FAIL("expected support-mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::support_mismatch);
  }
}

TEST_CASE("metric validation") {
  PointedFiniteMetric bad{{"a", "b", "c"}, {{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}, 0};
  CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("primal-dual agreement and Lipschitz pairing") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    auto m = random_metric(rng, 3 + trial % 6);
    auto mol = random_molecule(rng, m);
    auto r = ae_norm(m, mol);
    CHECK(std::abs(r.value - r.dual_value) <= 1e-9 * (1.0 + r.value));
    // any 1-Lipschitz function pairs below the norm
    std::map<std::string, double> partial = {{m.labels[0], 0.0}};
    auto f = lipschitz_extend(m, partial, 1.0);
    double pairing = 0.0;
    for (const auto& [label, w] : mol) pairing += w * f[m.index(label)];
    CHECK(std::abs(pairing) <= r.value + 1e-9);
  }
}

TEST_CASE("McShane extension") {
  auto m = line_metric();
  auto full = lipschitz_extend(m, {{"0", 0.0}, {"p", 0.5}, {"q", -0.5}}, 1.0);
  CHECK(full == std::vector<double>{0.0, 0.5, -0.5});
  auto dist = lipschitz_extend(m, {{"p", 0.0}}, 1.0);
  CHECK(dist == std::vector<double>{1.0, 0.0, 2.0});
  PointedFiniteMetric two{{"a", "b"}, {{0, 1}, {1, 0}}, 0};
  try {
    lipschitz_extend(two, {{"a", 0.0}, {"b", 2.0}}, 1.0);
    FAIL("expected not-lipschitz-on-domain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_lipschitz_on_domain);
  }
}

TEST_CASE("relative norm examples") {
  auto e = l1(2);
  const Vector v = {0.5, -1.0};
  RelativeSpaceOverE rs{e, {point_as_katetov(e, v)}};
  std::mt19937_64 rng(9);
  for (int k = 0; k < 10; ++k) {
    auto a = rvec(rng, 2);
    CHECK(relative_ae_norm(rs, a, Vector{0.0}) == doctest::Approx(e->norm(a)));
  }
  CHECK(relative_ae_norm(rs, scale(v, -1.0), Vector{1.0}) == doctest::Approx(0.0));
  // adjoining a point function identifies it with v
  auto sp = adjoin(rs);
  CHECK(sp->dim() == 3);
  CHECK_FALSE(sp->positive_definite());
  for (int k = 0; k < 20; ++k) {
    auto a = rvec(rng, 2);
    const double alpha = rvec(rng, 1)[0];
    Vector z = a;
    z.push_back(alpha);
    CHECK(sp->norm(z) == doctest::Approx(e->norm(add(a, scale(v, alpha)))).epsilon(1e-9));
  }
  // empty adjoined set is E itself
  RelativeSpaceOverE none{e, {}};
  CHECK(adjoin(none) == e);

  // a general envelope: element xi - a lies in the stated interval
  auto ck = random_ck(rng, e, 4);
  RelativeSpaceOverE one{e, {ck}};
  double mn = 1e9;
  for (const auto& y : ck.points()) mn = std::min(mn, ck(y));
  for (int k = 0; k < 5; ++k) {
    auto a = rvec(rng, 2);
    const double val = relative_ae_norm(one, scale(a, -1.0), Vector{1.0});
    CHECK(val <= ck(a) + 1e-8);
    CHECK(val >= std::max(std::abs(ck(a)) - 2.0 * mn, 0.0) - 1e-8);
  }
}

TEST_CASE("relative norm: isometric embedding of the adjoined points") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t d = 1 + trial % 3, m = 1 + trial % 3;
    auto e = trial % 2 ? linf(d) : l1(d);
    RelativeSpaceOverE rs{e, {}};
    for (std::size_t i = 0; i < m; ++i) rs.adjoined.push_back(random_ck(rng, e, 2 + (trial + i) % 4));
    auto sp = adjoin(rs);
    auto pts = katetov::sample_ball(*e, 3, 3.0, rng);
    auto embed = [&](const Vector& a, std::size_t which, double coef) {
      Vector z = a;
      z.resize(d + m, 0.0);
      if (which < m) z[d + which] = coef;
      return z;
    };
    for (std::size_t i = 0; i < m; ++i) {
      for (const auto& a : pts)
        CHECK(std::abs(sp->norm(embed(scale(a, -1.0), i, 1.0)) - rs.adjoined[i](a)) <= 1e-8);
      for (std::size_t k = i + 1; k < m; ++k) {
        Vector z(d + m, 0.0);
        z[d + i] = 1.0;
        z[d + k] = -1.0;
        CHECK(std::abs(sp->norm(z) - katetov::sup_distance(rs.adjoined[i], rs.adjoined[k])) <= 1e-8);
      }
    }
    for (const auto& a : pts)
      for (const auto& b : pts) CHECK(std::abs(sp->norm(embed(sub(a, b), m, 0.0)) - e->norm(sub(a, b))) <= 1e-8);
  }
}

TEST_CASE("adjoined space is a norm") {
  std::mt19937_64 rng(12);
  auto e = l1(2);
  RelativeSpaceOverE rs{e, {random_ck(rng, e, 3), random_ck(rng, e, 3)}};
  auto sp = adjoin(rs);
  CHECK(sp->positive_definite());
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 60; ++k) {
    auto x = rvec(rng, 4), y = rvec(rng, 4);
    const double s = u(rng);
    CHECK(sp->norm(add(x, y)) <= sp->norm(x) + sp->norm(y) + 1e-8);
    CHECK(std::abs(sp->norm(scale(x, s)) - std::abs(s) * sp->norm(x)) <= 1e-9 * (1.0 + std::abs(s) * sp->norm(x)));
  }
}

TEST_CASE("primal quotient bound agrees with the dual") {
  std::mt19937_64 rng(13);
  auto e = l1(1);
  for (int trial = 0; trial < 6; ++trial) {
    RelativeSpaceOverE rs{e, {random_ck(rng, e, 2), random_ck(rng, e, 2)}};
    std::vector<Vector> cand;
    for (int k = -12; k <= 12; ++k) cand.push_back({k * 0.25});
    for (const auto& ck : rs.adjoined)
      for (const auto& y : ck.points()) cand.push_back(y);
    for (int k = 0; k < 4; ++k) {
      const Vector a = rvec(rng, 1, 1.0), alpha = rvec(rng, 2, 1.0);
      const double dual = relative_ae_norm(rs, a, alpha);
      const double primal = relative_ae_norm_primal(rs, a, alpha, cand);
      CHECK(primal >= dual - 1e-8);
      CHECK(primal <= dual + 0.1 * (1.0 + dual));
    }
  }
  // point functions: the candidates {0, v} already give the exact value
  const Vector v = {0.75};
  RelativeSpaceOverE pf{e, {point_as_katetov(e, v)}};
  const Vector a = {0.3}, alpha = {-2.0};
  CHECK(relative_ae_norm_primal(pf, a, alpha, {v}) == doctest::Approx(relative_ae_norm(pf, a, alpha)));
}

TEST_CASE("explicit extraction") {
  std::mt19937_64 rng(14);
  auto e = l1(2);
  RelativeSpaceOverE rs{e, {random_ck(rng, e, 3), random_ck(rng, e, 2)}};
  auto sp = adjoin(rs);
  auto ex = extract_explicit(*sp);
  for (int k = 0; k < 50; ++k) {
    auto z = rvec(rng, 4);
    CHECK(ex->norm(z) == doctest::Approx(sp->norm(z)).epsilon(1e-8));
  }
}
