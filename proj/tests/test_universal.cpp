#include <cmath>

#include "doctest.h"
#include "gurarij/error.hpp"
#include "gurarij/universal.hpp"

using namespace gurarij;
using namespace gurarij::universal;

namespace {

tower::BuildState symmetric_build(std::uint64_t seed) {
  tower::BuildParams p;
  p.start = space::make_standard(space::StandardKind::l1, 2);
  p.rounds = 1;
  p.envelopes_per_round = 2;
  p.support_size = 3;
  p.radii = {2.0};
  p.seed = seed;
  p.symmetry = {Matrix::from_rows({{-1.0, 0.0}, {0.0, 1.0}})};
  return tower::build(p);
}

// Floyd-Warshall on the Cayley graph as an independent shortest-path oracle.
std::vector<std::vector<double>> cayley_distances(const FiniteGroupPresentation& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 1e300));
  for (std::size_t a = 0; a < n; ++a) {
    d[a][a] = 0.0;
    for (const auto& [label, w] : g.generators) {
      const std::size_t s = g.index(label);
      const std::size_t b = g.table[a][s];
      d[a][b] = std::min(d[a][b], w);
      d[b][a] = std::min(d[b][a], w);
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

}  // namespace

TEST_CASE("group validation") {
  CHECK_NOTHROW(validate(cyclic_group(5)));
  CHECK_NOTHROW(validate(symmetric_group_3()));
  auto bad = cyclic_group(3);
  bad.table[1][1] = 1;  // g1 g1 = g1 breaks the group
  CHECK_THROWS_AS(validate(bad), Error);
  auto badw = cyclic_group(3);
  badw.generators["g1"] = 0.0;
  CHECK_THROWS_AS(validate(badw), Error);
}

TEST_CASE("left-invariant metric examples") {
  auto z2 = left_invariant_metric(cyclic_group(2));
  CHECK(z2.d[0][1] == 1.0);
  CHECK(z2.d[0][2] == 1.0);
  CHECK(z2.labels[z2.base] == "*");

  auto z4 = left_invariant_metric(cyclic_group(4, 0.4));
  CHECK(z4.d[0][1] == doctest::Approx(0.4));
  CHECK(z4.d[0][2] == doctest::Approx(0.8));
  CHECK(z4.d[0][3] == doctest::Approx(0.4));
  for (std::size_t i = 0; i < z4.size(); ++i) {
    CHECK(z4.d[i][i] == 0.0);
    for (std::size_t j = 0; j < z4.size(); ++j) CHECK(z4.d[i][j] <= 1.0);
  }
  CHECK_NOTHROW(aells::validate(z4));
}

TEST_CASE("left-invariant metric: left invariance and Cayley-graph oracle") {
  for (const auto& g : {cyclic_group(5, 0.3), symmetric_group_3(0.45), cyclic_group(6, 0.2)}) {
    auto m = left_invariant_metric(g);
    auto oracle = cayley_distances(g);
    const std::size_t n = g.size();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        CHECK(m.d[a][b] == doctest::Approx(std::min(1.0, oracle[a][b])));
        for (std::size_t k = 0; k < n; ++k) CHECK(m.d[g.table[k][a]][g.table[k][b]] == m.d[a][b]);
      }
  }
}

TEST_CASE("left-invariant metric: disconnected generators") {
  auto g = cyclic_group(4);
  g.generators.clear();
  g.generators["g2"] = 1.0;
  try {
    left_invariant_metric(g);
    FAIL("expected disconnected_generating_set");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::disconnected_generating_set);
  }
}

TEST_CASE("Teleman embedding: Z2, Z5, S3") {
  for (const auto& g : {cyclic_group(2), cyclic_group(5, 0.3), symmetric_group_3(0.5)}) {
    auto t = teleman_embed(g);
    CHECK(t.rho[g.identity].matrix == Matrix::identity(g.size()));
    auto rep = check_teleman(g, t, 50);
    CHECK(rep.homomorphism);
    CHECK(rep.injective);
    CHECK(rep.isometry_defect <= 1e-9);
    CHECK(rep.orbit_defect <= 1e-9);
    // the oracle space norm agrees with the transport norm
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    for (int s = 0; s < 20; ++s) {
      Vector x(g.size());
      for (auto& xi : x) xi = nd(rng);
      CHECK(t.space->norm(x) == doctest::Approx(teleman_norm(t, x)).epsilon(1e-9));
    }
  }
  auto z2 = teleman_embed(cyclic_group(2));
  CHECK(z2.rho[1].matrix == Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}));
  CHECK(teleman_norm(z2, Vector{1.0, -1.0}) == doctest::Approx(1.0));
}

TEST_CASE("induced isometry: identity, sign flip, orbit escape") {
  auto s = symmetric_build(21);
  const auto& e0 = s.chain[0];
  auto id = induced_isometry(s, {Matrix::identity(2), e0});
  CHECK(id.matrix == Matrix::identity(s.top()->dim()));
  auto flip = induced_isometry(s, {Matrix::from_rows({{-1.0, 0.0}, {0.0, 1.0}}), e0});
  CHECK(isometry_defect(flip) <= 1e-8);

  tower::BuildParams p;
  p.start = e0;
  p.envelopes_per_round = 2;
  p.seed = 3;
  auto plain = tower::build(p);
  try {
    induced_isometry(plain, {Matrix::from_rows({{-1.0, 0.0}, {0.0, 1.0}}), plain.chain[0]});
    FAIL("expected orbit_escape");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::orbit_escape);
  }
  // not an isometry of l1
  CHECK_THROWS_AS(induced_isometry(s, {Matrix::from_rows({{1.0, 1.0}, {0.0, 1.0}}), e0}), Error);
}

TEST_CASE("g-embedding verification") {
  auto s = symmetric_build(21);
  const auto& e0 = s.chain[0];
  const LinearIsometryWitness id{Matrix::identity(2), e0};
  const LinearIsometryWitness flip{Matrix::from_rows({{-1.0, 0.0}, {0.0, 1.0}}), e0};

  CHECK(verify_g_embedding(s, {id}).pass());
  auto rep = verify_g_embedding(s, {id, flip});
  CHECK(rep.pass());
  CHECK(rep.failures.empty());

  // flip alone is not closed under composition
  auto open = verify_g_embedding(s, {flip});
  CHECK_FALSE(open.homomorphism);
  CHECK_FALSE(open.pass());
  REQUIRE_FALSE(open.failures.empty());
  CHECK(open.failures[0].find("(0, 0)") != std::string::npos);
}
