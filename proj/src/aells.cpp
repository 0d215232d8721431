#include "gurarij/aells.hpp"

#include <algorithm>
#include <cmath>

#include "gurarij/error.hpp"
#include "gurarij/polytope.hpp"

namespace gurarij::aells {

using optim::LinExpr;
using optim::LpBuilder;
using optim::Relation;

std::size_t PointedFiniteMetric::index(const std::string& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw Error(ErrorCode::support_mismatch, "label '" + label + "' is not a point of the metric");
  return static_cast<std::size_t>(it - labels.begin());
}

void validate(const PointedFiniteMetric& m, double tol) {
  const std::size_t n = m.size();
  if (n == 0 || m.base >= n) throw Error(ErrorCode::invalid_input, "metric needs points and a valid base");
  if (m.d.size() != n) throw Error(ErrorCode::invalid_input, "distance matrix has wrong size");
  for (const auto& row : m.d)
    if (row.size() != n) throw Error(ErrorCode::invalid_input, "distance matrix is not square");
  for (std::size_t i = 0; i < n; ++i) {
    if (m.d[i][i] != 0.0) throw Error(ErrorCode::invalid_input, "nonzero diagonal at " + m.labels[i]);
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(m.d[i][j] - m.d[j][i]) > tol)
        throw Error(ErrorCode::invalid_input, "asymmetric distance " + m.labels[i] + "," + m.labels[j]);
      if (i != j && m.d[i][j] <= 0.0)
        throw Error(ErrorCode::invalid_input, "distinct points at distance 0: " + m.labels[i] + "," + m.labels[j]);
      for (std::size_t k = 0; k < n; ++k)
        if (m.d[i][k] > m.d[i][j] + m.d[j][k] + tol)
          throw Error(ErrorCode::invalid_input,
                      "triangle inequality fails at " + m.labels[i] + "," + m.labels[j] + "," + m.labels[k]);
    }
  }
}

AeNormResult ae_norm(const PointedFiniteMetric& m, const Molecule& mol) {
  const std::size_t n = m.size();
  Vector mass(n, 0.0);
  double total = 0.0, scale_sum = 0.0;
  for (const auto& [label, w] : mol) {
    mass[m.index(label)] += w;
    total += w;
    scale_sum += std::abs(w);
  }
  if (std::abs(total) > 1e-9 * (1.0 + scale_sum))
    throw Error(ErrorCode::unbalanced_molecule, "molecule weights sum to " + std::to_string(total));

  AeNormResult res;
  res.witness.assign(n, 0.0);
  if (scale_sum == 0.0) return res;

  // Transport positive mass to negative mass; d is a metric so direct arcs suffice.
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < n; ++i) {
    if (mass[i] > 0.0) pos.push_back(i);
    if (mass[i] < 0.0) neg.push_back(i);
  }
  {
    LpBuilder lp;
    std::vector<std::vector<std::size_t>> x(pos.size());
    for (std::size_t a = 0; a < pos.size(); ++a)
      for (std::size_t b = 0; b < neg.size(); ++b) x[a].push_back(lp.add_variable(0.0, optim::kInf, m.d[pos[a]][neg[b]]));
    for (std::size_t a = 0; a < pos.size(); ++a) {
      LinExpr e;
      for (auto v : x[a]) e.add(v, 1.0);
      lp.add_row(e, Relation::equal, mass[pos[a]]);
    }
    for (std::size_t b = 0; b < neg.size(); ++b) {
      LinExpr e;
      for (std::size_t a = 0; a < pos.size(); ++a) e.add(x[a][b], 1.0);
      lp.add_row(e, Relation::equal, -mass[neg[b]]);
    }
    const auto sol = optim::solve(lp, optim::Sense::minimize);
    if (sol.status != optim::LpStatus::optimal)
      throw Error(ErrorCode::lp_failure, "transport LP is " + optim::to_string(sol.status));
    res.value = sol.objective;
    for (std::size_t a = 0; a < pos.size(); ++a)
      for (std::size_t b = 0; b < neg.size(); ++b)
        if (sol.primal[x[a][b]] > 1e-12) res.plan.push_back({pos[a], neg[b], sol.primal[x[a][b]]});
  }
  {
    LpBuilder lp;
    std::vector<std::size_t> f(n);
    for (std::size_t i = 0; i < n; ++i)
      f[i] = i == m.base ? lp.add_variable(0.0, 0.0, mass[i]) : lp.add_variable(-optim::kInf, optim::kInf, mass[i]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) lp.add_row(LinExpr().add(f[i], 1.0).add(f[j], -1.0), Relation::less_equal, m.d[i][j]);
    const auto sol = optim::solve(lp, optim::Sense::maximize);
    if (sol.status != optim::LpStatus::optimal)
      throw Error(ErrorCode::lp_failure, "Lipschitz LP is " + optim::to_string(sol.status));
    res.dual_value = sol.objective;
    for (std::size_t i = 0; i < n; ++i) res.witness[i] = sol.primal[f[i]];
  }
  return res;
}

std::vector<double> lipschitz_extend(const PointedFiniteMetric& m, const std::map<std::string, double>& partial,
                                     double L) {
  if (!(L > 0.0)) throw Error(ErrorCode::invalid_params, "Lipschitz constant must be positive");
  if (partial.empty()) throw Error(ErrorCode::invalid_input, "empty domain");
  std::vector<std::pair<std::size_t, double>> dom;
  for (const auto& [label, v] : partial) dom.emplace_back(m.index(label), v);
  for (const auto& [i, vi] : dom)
    for (const auto& [j, vj] : dom)
      if (vi - vj > L * m.d[i][j] + 1e-12 * (1.0 + std::abs(vi) + std::abs(vj)))
        throw Error(ErrorCode::not_lipschitz_on_domain, "values at " + m.labels[i] + " and " + m.labels[j] +
                                                            " differ by more than L * distance");
  std::vector<double> out(m.size());
  for (std::size_t x = 0; x < m.size(); ++x) {
    double best = optim::kInf;
    for (const auto& [y, v] : dom) best = std::min(best, v + L * m.d[x][y]);
    out[x] = best;
  }
  return out;
}

void validate(const RelativeSpaceOverE& rs) {
  if (!rs.base) throw Error(ErrorCode::invalid_input, "relative space without a base");
  for (const auto& ck : rs.adjoined)
    if (ck.space() != rs.base &&
        (ck.space()->dim() != rs.base->dim() || ck.space()->label() != rs.base->label()))
      throw Error(ErrorCode::space_mismatch, "adjoined envelope lives over '" + ck.space()->label() + "'");
}

space::DualBall relative_dual_ball(const RelativeSpaceOverE& rs) {
  validate(rs);
  // A functional on a + sum alpha_i xi_i is a pair (lambda, f). It has
  // norm <= 1 iff lambda is in B*_E and the function X -> R it defines is
  // 1-Lipschitz:
  //   |f_i - lambda(a)| <= xi_i(a) for all a in E,
  //   |f_i - f_k| <= d(xi_i, xi_k).
  // The first family is infinite, but it says
  //   sup_a lambda(a) - xi_i(a) <= f_i <= inf_a lambda(a) + xi_i(a),
  // and for a canonical envelope with ||lambda||* <= 1 the conjugate is
  // sup_a lambda(a) - xi(a) = max_j lambda(y_j) - c_j. So it is exactly
  //   lambda(y_ij) - c_ij <= f_i <= lambda(y_ij) + c_ij   for every generator j.
  const auto& eb = rs.base->dual_ball();
  const std::size_t d = eb.dim, m = rs.adjoined.size();
  space::DualBall ball;
  ball.dim = d + m;
  ball.aux = eb.aux;
  ball.aux_nonneg = eb.aux_nonneg;
  const std::size_t width = ball.dim + ball.aux;
  for (const auto& r : eb.rows) {
    optim::Constraint row{Vector(width, 0.0), r.relation, r.bound};
    for (std::size_t i = 0; i < d; ++i) row.coeffs[i] = r.coeffs[i];
    for (std::size_t j = 0; j < eb.aux; ++j) row.coeffs[d + m + j] = r.coeffs[d + j];
    ball.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < m; ++i) {
    const auto& ck = rs.adjoined[i];
    for (std::size_t j = 0; j < ck.size(); ++j) {
      Vector c(width, 0.0);
      c[d + i] = 1.0;
      for (std::size_t r = 0; r < d; ++r) c[r] = -ck.points()[j][r];
      ball.rows.push_back({c, Relation::greater_equal, -ck.values()[j]});
      ball.rows.push_back({c, Relation::less_equal, ck.values()[j]});
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = i + 1; k < m; ++k) {
      const double sd = katetov::sup_distance(rs.adjoined[i], rs.adjoined[k]);
      Vector c(width, 0.0);
      c[d + i] = 1.0;
      c[d + k] = -1.0;
      ball.rows.push_back({c, Relation::less_equal, sd});
      ball.rows.push_back({c, Relation::greater_equal, -sd});
    }
  return ball;
}

double relative_ae_norm(const RelativeSpaceOverE& rs, std::span<const double> a, std::span<const double> alpha) {
  space::check_dim(*rs.base, a, "E component");
  if (alpha.size() != rs.adjoined.size())
    throw Error(ErrorCode::dimension_mismatch, "coefficient list does not match the adjoined points");
  const auto ball = relative_dual_ball(rs);
  LpBuilder lp;
  const auto c = space::append_dual_ball(lp, ball);
  LinExpr obj;
  for (std::size_t i = 0; i < a.size(); ++i) obj.add(c[i], a[i]);
  for (std::size_t i = 0; i < alpha.size(); ++i) obj.add(c[a.size() + i], alpha[i]);
  lp.add_cost(obj);
  const auto sol = optim::solve(lp, optim::Sense::maximize);
  if (sol.status != optim::LpStatus::optimal)
    throw Error(ErrorCode::lp_failure, "relative Arens-Eells LP is " + optim::to_string(sol.status));
  return std::max(0.0, sol.objective);
}

double relative_ae_norm_primal(const RelativeSpaceOverE& rs, std::span<const double> a, std::span<const double> alpha,
                               const std::vector<Vector>& candidates) {
  validate(rs);
  space::check_dim(*rs.base, a, "E component");
  if (alpha.size() != rs.adjoined.size())
    throw Error(ErrorCode::dimension_mismatch, "coefficient list does not match the adjoined points");
  const std::size_t d = rs.base->dim(), m = rs.adjoined.size();
  std::vector<Vector> pts = candidates;
  const Vector zero(d, 0.0);
  if (std::find(pts.begin(), pts.end(), zero) == pts.end()) pts.push_back(zero);
  const std::size_t p = pts.size(), n = p + m;
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) dist[i][j] = dist[j][i] = rs.base->norm(sub(pts[i], pts[j]));
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < p; ++i) dist[i][p + k] = dist[p + k][i] = rs.adjoined[k](pts[i]);
    for (std::size_t l = k + 1; l < m; ++l)
      dist[p + k][p + l] = dist[p + l][p + k] = katetov::sup_distance(rs.adjoined[k], rs.adjoined[l]);
  }
  // Masses: beta_q (free) on E points, alpha_k on adjoined points; the E part
  // must represent a, and the molecule must balance.
  LpBuilder lp;
  const auto beta = lp.add_variables(p);
  std::vector<LinExpr> net(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v) continue;
      const std::size_t x = lp.add_variable(0.0, optim::kInf, dist[u][v]);
      net[u].add(x, 1.0);
      net[v].add(x, -1.0);
    }
  for (std::size_t q = 0; q < p; ++q) lp.add_row(LinExpr(net[q]).add(beta[q], -1.0), Relation::equal, 0.0);
  for (std::size_t k = 0; k < m; ++k) lp.add_row(net[p + k], Relation::equal, alpha[k]);
  for (std::size_t r = 0; r < d; ++r) {
    LinExpr e;
    for (std::size_t q = 0; q < p; ++q) e.add(beta[q], pts[q][r]);
    lp.add_row(e, Relation::equal, a[r]);
  }
  LinExpr bal;
  double asum = 0.0;
  for (std::size_t q = 0; q < p; ++q) bal.add(beta[q], 1.0);
  for (double x : alpha) asum += x;
  lp.add_row(bal, Relation::equal, -asum);
  const auto sol = optim::solve(lp, optim::Sense::minimize);
  if (sol.status == optim::LpStatus::infeasible) return optim::kInf;  // a not in the candidate span
  if (sol.status != optim::LpStatus::optimal)
    throw Error(ErrorCode::lp_failure, "relative primal LP is " + optim::to_string(sol.status));
  return sol.objective;
}

SpacePtr adjoin(const RelativeSpaceOverE& rs, std::size_t round) {
  validate(rs);
  if (rs.adjoined.empty()) return rs.base;
  auto ball = relative_dual_ball(rs);
  const bool definite = space::ball_span_rank(ball) == ball.dim;
  const std::string label = rs.base->label() + "[+" + std::to_string(rs.adjoined.size()) + "]";
  return std::make_shared<space::OracleNormedSpace>(
      label, std::move(ball),
      space::Provenance{"adjoin", std::to_string(rs.adjoined.size()) + " envelopes over " + rs.base->label(), round},
      definite);
}

std::shared_ptr<const space::PolyNormedSpace> extract_explicit(const space::NormedSpace& s) {
  if (const auto* poly = dynamic_cast<const space::PolyNormedSpace*>(&s))
    return std::make_shared<space::PolyNormedSpace>(*poly);
  auto verts = polytope::dual_ball_vertices(s.dual_ball());
  return std::make_shared<space::PolyNormedSpace>(s.label() + "|explicit", s.dim(), std::move(verts), true);
}

}  // namespace gurarij::aells
