#include "gurarij/universal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <random>

#include "gurarij/error.hpp"

namespace gurarij::universal {

std::size_t FiniteGroupPresentation::index(const std::string& label) const {
  auto it = std::find(elements.begin(), elements.end(), label);
  if (it == elements.end()) throw Error(ErrorCode::invalid_group, "unknown group element '" + label + "'");
  return static_cast<std::size_t>(it - elements.begin());
}

std::size_t FiniteGroupPresentation::inverse(std::size_t a) const {
  for (std::size_t b = 0; b < size(); ++b)
    if (table[a][b] == identity) return b;
  throw Error(ErrorCode::invalid_group, "element '" + elements[a] + "' has no inverse");
}

void validate(const FiniteGroupPresentation& g) {
  const std::size_t n = g.size();
  if (n == 0) throw Error(ErrorCode::invalid_group, "empty group");
  if (g.identity >= n) throw Error(ErrorCode::invalid_group, "identity out of range");
  if (g.table.size() != n) throw Error(ErrorCode::invalid_group, "table has wrong number of rows");
  for (std::size_t a = 0; a < n; ++a) {
    if (g.table[a].size() != n) throw Error(ErrorCode::invalid_group, "table row has wrong length");
    for (std::size_t b = 0; b < n; ++b)
      if (g.table[a][b] >= n) throw Error(ErrorCode::invalid_group, "table entry out of range");
    if (g.table[g.identity][a] != a || g.table[a][g.identity] != a)
      throw Error(ErrorCode::invalid_group, "identity fails at '" + g.elements[a] + "'");
    const std::size_t inv = g.inverse(a);
    if (g.table[inv][a] != g.identity) throw Error(ErrorCode::invalid_group, "inverse is one-sided at '" + g.elements[a] + "'");
  }
  auto assoc = [&](std::size_t a, std::size_t b, std::size_t c) {
    if (g.table[g.table[a][b]][c] != g.table[a][g.table[b][c]])
      throw Error(ErrorCode::invalid_group,
                  "associativity fails at (" + g.elements[a] + "," + g.elements[b] + "," + g.elements[c] + ")");
  };
  if (n <= 24) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c) assoc(a, b, c);
  } else {
    std::mt19937_64 rng(0xa550c);
    std::uniform_int_distribution<std::size_t> u(0, n - 1);
    for (int t = 0; t < 20000; ++t) assoc(u(rng), u(rng), u(rng));
  }
  for (const auto& [label, w] : g.generators) {
    g.index(label);
    if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorCode::invalid_group, "generator weights must be positive");
  }
}

FiniteGroupPresentation cyclic_group(std::size_t n, double weight) {
  if (n == 0) throw Error(ErrorCode::invalid_group, "cyclic group of order 0");
  FiniteGroupPresentation g;
  for (std::size_t i = 0; i < n; ++i) g.elements.push_back(i == 0 ? "e" : "g" + std::to_string(i));
  g.table.assign(n, std::vector<std::size_t>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) g.table[a][b] = (a + b) % n;
  if (n > 1) g.generators["g1"] = weight;
  return g;
}

FiniteGroupPresentation symmetric_group_3(double weight) {
  // permutations as images of (0, 1, 2)
  std::vector<std::array<int, 3>> perms;
  std::array<int, 3> p{0, 1, 2};
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  FiniteGroupPresentation g;
  for (const auto& q : perms) g.elements.push_back(q == std::array<int, 3>{0, 1, 2} ? "e" : std::to_string(q[0]) + std::to_string(q[1]) + std::to_string(q[2]));
  g.table.assign(6, std::vector<std::size_t>(6));
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = 0; b < 6; ++b) {
      std::array<int, 3> c{};
      for (int i = 0; i < 3; ++i) c[i] = perms[a][perms[b][i]];  // (ab)(i) = a(b(i))
      g.table[a][b] = static_cast<std::size_t>(std::find(perms.begin(), perms.end(), c) - perms.begin());
    }
  g.generators["102"] = weight;  // transposition
  g.generators["120"] = weight;  // 3-cycle
  return g;
}

aells::PointedFiniteMetric left_invariant_metric(const FiniteGroupPresentation& g) {
  validate(g);
  const std::size_t n = g.size();
  std::vector<std::pair<std::size_t, double>> steps;
  for (const auto& [label, w] : g.generators) {
    const std::size_t s = g.index(label);
    steps.push_back({s, w});
    steps.push_back({g.inverse(s), w});
  }
  // shortest word length of each element from the identity; d(a, b) = len(a^-1 b)
  std::vector<double> len(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  len[g.identity] = 0.0;
  pq.push({0.0, g.identity});
  while (!pq.empty()) {
    auto [dist, a] = pq.top();
    pq.pop();
    if (dist > len[a]) continue;
    for (auto [s, w] : steps) {
      const std::size_t b = g.table[a][s];
      if (dist + w < len[b]) {
        len[b] = dist + w;
        pq.push({len[b], b});
      }
    }
  }
  for (std::size_t a = 0; a < n; ++a)
    if (!std::isfinite(len[a]))
      throw Error(ErrorCode::disconnected_generating_set, "generators do not reach '" + g.elements[a] + "'");

  aells::PointedFiniteMetric m;
  m.labels = g.elements;
  m.labels.push_back("*");
  m.base = n;
  m.d.assign(n + 1, std::vector<double>(n + 1, 1.0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) m.d[a][b] = a == b ? 0.0 : std::min(1.0, len[g.table[g.inverse(a)][b]]);
  m.d[n][n] = 0.0;
  return m;
}

double isometry_defect(const LinearIsometryWitness& w, std::size_t samples, std::uint64_t seed) {
  const std::size_t d = w.space->dim();
  if (w.matrix.rows() != d || w.matrix.cols() != d)
    throw Error(ErrorCode::dimension_mismatch, "witness matrix does not act on its space");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    Vector x(d);
    for (auto& xi : x) xi = nd(rng);
    const double a = w.space->norm(x);
    worst = std::max(worst, std::abs(w.space->norm(w.matrix.apply(x)) - a) / a);
  }
  return worst;
}

TelemanEmbedding teleman_embed(const FiniteGroupPresentation& g) {
  TelemanEmbedding t;
  t.metric = left_invariant_metric(g);
  const std::size_t n = g.size();

  // 1-Lipschitz functions vanishing at *, as functionals on coordinates.
  space::DualBall ball;
  ball.dim = n;
  for (std::size_t a = 0; a < n; ++a) {
    Vector c(n, 0.0);
    c[a] = 1.0;
    ball.rows.push_back({c, optim::Relation::less_equal, t.metric.d[a][n]});
    c[a] = -1.0;
    ball.rows.push_back({c, optim::Relation::less_equal, t.metric.d[a][n]});
    for (std::size_t b = a + 1; b < n; ++b) {
      Vector r(n, 0.0);
      r[a] = 1.0;
      r[b] = -1.0;
      ball.rows.push_back({r, optim::Relation::less_equal, t.metric.d[a][b]});
      ball.rows.push_back({scale(r, -1.0), optim::Relation::less_equal, t.metric.d[a][b]});
    }
  }
  t.space = std::make_shared<space::OracleNormedSpace>("AE(H*)[" + std::to_string(n) + "]", std::move(ball),
                                                       space::Provenance{"teleman", "left-invariant word metric", 0});
  for (std::size_t h = 0; h < n; ++h) {
    Matrix p(n, n, 0.0);
    for (std::size_t a = 0; a < n; ++a) p(g.table[h][a], a) = 1.0;
    t.rho.push_back({std::move(p), t.space});
  }
  return t;
}

double teleman_norm(const TelemanEmbedding& t, std::span<const double> a) {
  const std::size_t n = t.metric.size() - 1;
  if (a.size() != n) throw Error(ErrorCode::dimension_mismatch, "coordinate vector does not match the group");
  aells::Molecule mol;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != 0.0) mol[t.metric.labels[i]] += a[i];
    sum += a[i];
  }
  if (sum != 0.0) mol["*"] -= sum;
  // rounding in the sum can leave the molecule a hair off balance
  double total = 0.0;
  for (const auto& [k, v] : mol) total += v;
  if (total != 0.0) mol["*"] -= total;
  return aells::ae_norm(t.metric, mol).value;
}

TelemanReport check_teleman(const FiniteGroupPresentation& g, const TelemanEmbedding& t, std::size_t samples) {
  TelemanReport rep;
  const std::size_t n = g.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (!(t.rho[g.table[a][b]].matrix == t.rho[a].matrix * t.rho[b].matrix)) {
        rep.homomorphism = false;
        rep.failures.push_back("rho(" + g.elements[a] + g.elements[b] + ") != rho(" + g.elements[a] + ") rho(" +
                               g.elements[b] + ")");
      }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (t.rho[a].matrix == t.rho[b].matrix) {
        rep.injective = false;
        rep.failures.push_back("rho(" + g.elements[a] + ") = rho(" + g.elements[b] + ")");
      }
  std::mt19937_64 rng(0x7e1e);
  std::normal_distribution<double> nd;
  for (std::size_t s = 0; s < samples; ++s) {
    Vector x(n);
    for (auto& xi : x) xi = nd(rng);
    const double base = teleman_norm(t, x);
    for (std::size_t h = 0; h < n; ++h)
      rep.isometry_defect = std::max(rep.isometry_defect, std::abs(teleman_norm(t, t.rho[h].matrix.apply(x)) - base));
  }
  const Vector de = unit_vector(n, g.identity);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const Vector diff = sub(t.rho[a].matrix.apply(de), t.rho[b].matrix.apply(de));
      rep.orbit_defect = std::max(rep.orbit_defect, std::abs(teleman_norm(t, diff) - t.metric.d[a][b]));
    }
  return rep;
}

namespace {

std::size_t level_of(const tower::BuildState& state, const LinearIsometryWitness& phi) {
  for (std::size_t n = 0; n < state.chain.size(); ++n)
    if (state.chain[n] == phi.space) return n;
  for (std::size_t n = 0; n < state.chain.size(); ++n)
    if (state.chain[n]->dim() == phi.matrix.rows()) return n;
  throw Error(ErrorCode::space_mismatch, "witness does not act on any space of the chain");
}

bool same_matrix(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (std::abs(a(r, c) - b(r, c)) > tol) return false;
  return true;
}

}  // namespace

LinearIsometryWitness induced_isometry(const tower::BuildState& state, const LinearIsometryWitness& phi) {
  const std::size_t n = level_of(state, phi);
  if (n >= state.log.size()) throw Error(ErrorCode::invalid_input, "witness acts on the top of the chain");
  LinearIsometryWitness on_en{phi.matrix, state.chain[n]};
  const double defect = isometry_defect(on_en);
  if (defect > 1e-9) throw Error(ErrorCode::invalid_input, "witness is not an isometry of E_n");
  return {tower::induced_matrix(state.chain[n], state.log[n], phi.matrix), state.chain[n + 1]};
}

GEmbeddingReport verify_g_embedding(const tower::BuildState& state, const std::vector<LinearIsometryWitness>& action) {
  GEmbeddingReport rep;
  std::vector<LinearIsometryWitness> theta;
  for (std::size_t a = 0; a < action.size(); ++a) {
    try {
      theta.push_back(induced_isometry(state, action[a]));
    } catch (const Error& e) {
      rep.failures.push_back("element " + std::to_string(a) + ": " + std::string(to_string(e.code())) + ": " + e.what());
      return rep;
    }
  }
  const std::size_t d = action.empty() ? 0 : action[0].matrix.rows();
  for (std::size_t a = 0; a < action.size(); ++a) {
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c)
        if (theta[a].matrix(r, c) != action[a].matrix(r, c)) rep.extension = false;
    for (std::size_t r = d; r < theta[a].matrix.rows(); ++r)
      for (std::size_t c = 0; c < d; ++c)
        if (theta[a].matrix(r, c) != 0.0 || theta[a].matrix(c, r) != 0.0) rep.extension = false;
    if (!rep.extension) rep.failures.push_back("Theta(" + std::to_string(a) + ") does not extend phi");
    rep.isometry_defect = std::max(rep.isometry_defect, isometry_defect(theta[a]));
  }
  for (std::size_t a = 0; a < action.size(); ++a)
    for (std::size_t b = 0; b < action.size(); ++b) {
      const Matrix prod = action[a].matrix * action[b].matrix;
      std::size_t c = action.size();
      for (std::size_t k = 0; k < action.size() && c == action.size(); ++k)
        if (same_matrix(action[k].matrix, prod, 1e-12)) c = k;
      if (c == action.size()) {
        rep.homomorphism = false;
        rep.failures.push_back("action not closed under composition: (" + std::to_string(a) + ", " +
                               std::to_string(b) + ")");
        continue;
      }
      if (!(theta[c].matrix == theta[a].matrix * theta[b].matrix)) {
        rep.homomorphism = false;
        rep.failures.push_back("Theta(" + std::to_string(a) + std::to_string(b) + ") != Theta(" + std::to_string(a) +
                               ") Theta(" + std::to_string(b) + ")");
      }
    }
  for (std::size_t a = 0; a < action.size(); ++a)
    for (std::size_t b = a + 1; b < action.size(); ++b)
      if (theta[a].matrix == theta[b].matrix) {
        rep.injective = false;
        rep.failures.push_back("Theta(" + std::to_string(a) + ") = Theta(" + std::to_string(b) + ")");
      }

  // Modulus: on each adjoined unit vector u_i the displacement of Theta phi
  // against Theta psi is the sup distance of the transported envelopes.
  if (!action.empty()) {
    const std::size_t n = level_of(state, action[0]);
    const auto& en = state.chain[n];
    const auto& top = state.chain[n + 1];
    const auto& log = state.log[n];
    for (std::size_t a = 0; a < action.size(); ++a)
      for (std::size_t b = a + 1; b < action.size(); ++b)
        for (std::size_t i = 0; i < log.size(); ++i) {
          const double disp = katetov::sup_distance(tower::transport(log[i], action[a].matrix, en),
                                                    tower::transport(log[i], action[b].matrix, en));
          const Vector u = unit_vector(top->dim(), d + i);
          const double moved = top->norm(sub(theta[a].matrix.apply(u), theta[b].matrix.apply(u)));
          if (moved > disp + 1e-8) {
            rep.modulus = false;
            rep.failures.push_back("modulus fails on u_" + std::to_string(i));
          }
        }
  }
  return rep;
}

}  // namespace gurarij::universal
