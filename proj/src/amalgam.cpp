#include "gurarij/amalgam.hpp"

#include <algorithm>
#include <cmath>

#include "gurarij/error.hpp"
#include "gurarij/polytope.hpp"

namespace gurarij::amalgam {

using optim::LinExpr;
using optim::LpBuilder;
using optim::Relation;

namespace {

std::vector<LinExpr> constant_exprs(std::span<const double> v) {
  std::vector<LinExpr> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i].constant = v[i];
  return out;
}

std::vector<LinExpr> var_exprs(const std::vector<std::size_t>& vars) {
  std::vector<LinExpr> out(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) out[i].add(vars[i], 1.0);
  return out;
}

double solve_min(const LpBuilder& lp, const char* what) {
  const auto sol = optim::solve(lp, optim::Sense::minimize);
  if (sol.status != optim::LpStatus::optimal)
    throw Error(ErrorCode::lp_failure, std::string(what) + " LP is " + optim::to_string(sol.status));
  return std::max(0.0, sol.objective);
}

void check_same_space(const ConvexKatetovEnvelope& a, const ConvexKatetovEnvelope& b) {
  if (a.space() != b.space() &&
      (a.space()->dim() != b.space()->dim() || a.space()->label() != b.space()->label()))
    throw Error(ErrorCode::space_mismatch, "envelopes live over different spaces");
}

// Dual generators of s |-> ||sum s_i basis_i||.
std::vector<Vector> pulled_generators(const SpacePtr& s, const std::vector<Vector>& basis) {
  if (const auto* poly = dynamic_cast<const space::PolyNormedSpace*>(s.get()))
    return space::subspace_pullback(*poly, basis)->generators();
  return polytope::dual_ball_vertices(space::pullback_ball(s->dual_ball(), basis));
}

// max <c, s> - ||sum s y||_F over ||s||_1 <= 1
LpBuilder one_sided(const Vector& c, const SpacePtr& f, const std::vector<Vector>& ys, std::vector<std::size_t>& sp,
                    std::vector<std::size_t>& sn) {
  LpBuilder lp;
  const std::size_t k = ys.size();
  sp = lp.add_variables(k, 0.0, optim::kInf);
  sn = lp.add_variables(k, 0.0, optim::kInf);
  const std::size_t t = lp.add_variable(0.0, optim::kInf, -1.0);
  LinExpr l1;
  for (std::size_t i = 0; i < k; ++i) {
    l1.add(sp[i], 1.0).add(sn[i], 1.0);
    lp.set_cost(sp[i], c[i]);
    lp.set_cost(sn[i], -c[i]);
  }
  lp.add_row(l1, Relation::less_equal, 1.0);
  std::vector<LinExpr> z(f->dim());
  for (std::size_t r = 0; r < f->dim(); ++r)
    for (std::size_t i = 0; i < k; ++i) z[r].add(sp[i], ys[i][r]).add(sn[i], -ys[i][r]);
  space::append_norm_epigraph(lp, *f, z, LinExpr().add(t, 1.0));
  return lp;
}

template <class Solve>
HensonResult henson_impl(const SpacePtr& e, const std::vector<Vector>& xs, const SpacePtr& f,
                         const std::vector<Vector>& ys, Solve solve) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::length_mismatch, "tuples differ in length");
  if (xs.empty()) throw Error(ErrorCode::length_mismatch, "tuples must be non-empty");
  for (const auto& x : xs) space::check_dim(*e, x, "E tuple entry");
  for (const auto& y : ys) space::check_dim(*f, y, "F tuple entry");
  HensonResult best;
  best.value = -optim::kInf;
  // The objective is positively homogeneous, so the sup over the l1 sphere
  // equals the sup over the ball; each fixed dual generator gives a concave
  // program.
  for (int side = 0; side < 2; ++side) {
    const auto& [big, bx, small, sx] =
        side == 0 ? std::tie(e, xs, f, ys) : std::tie(f, ys, e, xs);
    for (const auto& c : pulled_generators(big, bx)) {
      std::vector<std::size_t> sp, sn;
      auto lp = one_sided(c, small, sx, sp, sn);
      const auto sol = solve(lp);
      if (sol.status != optim::LpStatus::optimal)
        throw Error(ErrorCode::lp_failure, "Henson LP is " + optim::to_string(sol.status));
      if (sol.objective > best.value) {
        best.value = sol.objective;
        best.direction.assign(xs.size(), 0.0);
        for (std::size_t i = 0; i < xs.size(); ++i) best.direction[i] = sol.primal[sp[i]] - sol.primal[sn[i]];
        best.e_side = side == 0;
      }
    }
  }
  best.value = std::max(0.0, best.value);
  const double l1 = norm_l1(best.direction);
  if (l1 > 0.0) best.direction = scale(best.direction, 1.0 / l1);
  return best;
}

}  // namespace

Bounds amalgam_bounds(const ConvexKatetovEnvelope& ck0, const ConvexKatetovEnvelope& ck1) {
  check_same_space(ck0, ck1);
  Bounds b;
  b.r0 = katetov::sup_distance(ck0, ck1);
  LpBuilder lp;
  const auto a = var_exprs(lp.add_variables(ck0.dim()));
  const std::size_t t0 = lp.add_variable(0.0, optim::kInf, 1.0);
  const std::size_t t1 = lp.add_variable(0.0, optim::kInf, 1.0);
  katetov::append_perspective_epigraph(lp, ck0, a, LinExpr(1.0), LinExpr().add(t0, 1.0));
  katetov::append_perspective_epigraph(lp, ck1, a, LinExpr(1.0), LinExpr().add(t1, 1.0));
  b.r1 = solve_min(lp, "amalgam bound");
  if (b.r0 > b.r1 + 1e-9)
    throw Error(ErrorCode::invariant_violation,
                "r0 = " + std::to_string(b.r0) + " exceeds r1 = " + std::to_string(b.r1));
  b.r0 = std::min(b.r0, b.r1);
  return b;
}

TwoPointExtension make_two_point(ConvexKatetovEnvelope ck0, ConvexKatetovEnvelope ck1, double r) {
  const auto b = amalgam_bounds(ck0, ck1);
  if (r < b.r0 - 1e-9 || r > b.r1 + 1e-9)
    throw Error(ErrorCode::invariant_violation, "r = " + std::to_string(r) + " outside [" + std::to_string(b.r0) +
                                                    ", " + std::to_string(b.r1) + "]");
  const double t = b.r1 - b.r0 > 0.0 ? std::clamp((b.r1 - r) / (b.r1 - b.r0), 0.0, 1.0) : 1.0;
  return {std::move(ck0), std::move(ck1), b, r, t};
}

double two_point_norm_r1(const TwoPointExtension& tpe, std::span<const double> a, double alpha, double beta) {
  // inf_c ||(a - c) + alpha x0||^0 + ||c + beta x1||^1, where ||b + alpha x|| = ||alpha x - (-b)||
  space::check_dim(*tpe.ck0.space(), a, "vector");
  LpBuilder lp;
  const auto c = lp.add_variables(a.size());
  const std::size_t t0 = lp.add_variable(0.0, optim::kInf, 1.0);
  const std::size_t t1 = lp.add_variable(0.0, optim::kInf, 1.0);
  std::vector<LinExpr> m0(a.size()), m1(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    m0[i].add(c[i], 1.0).constant = -a[i];
    m1[i].add(c[i], -1.0);
  }
  katetov::append_one_point_epigraph(lp, tpe.ck0, m0, LinExpr(alpha), LinExpr().add(t0, 1.0));
  katetov::append_one_point_epigraph(lp, tpe.ck1, m1, LinExpr(beta), LinExpr().add(t1, 1.0));
  return solve_min(lp, "two-point norm");
}

double two_point_norm_r0(const TwoPointExtension& tpe, std::span<const double> a, double alpha, double beta) {
  // inf_{b, g} ||b + (alpha + g) x0||^0 + ||a - b + (beta - g) x1||^1 + |g| r0
  space::check_dim(*tpe.ck0.space(), a, "vector");
  LpBuilder lp;
  const auto b = lp.add_variables(a.size());
  const std::size_t gp = lp.add_variable(0.0, optim::kInf, tpe.bounds.r0);
  const std::size_t gn = lp.add_variable(0.0, optim::kInf, tpe.bounds.r0);
  const std::size_t t0 = lp.add_variable(0.0, optim::kInf, 1.0);
  const std::size_t t1 = lp.add_variable(0.0, optim::kInf, 1.0);
  std::vector<LinExpr> m0(a.size()), m1(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    m0[i].add(b[i], -1.0);
    m1[i].add(b[i], 1.0).constant = -a[i];
  }
  LinExpr c0(alpha), c1(beta);
  c0.add(gp, 1.0).add(gn, -1.0);
  c1.add(gp, -1.0).add(gn, 1.0);
  katetov::append_one_point_epigraph(lp, tpe.ck0, m0, c0, LinExpr().add(t0, 1.0));
  katetov::append_one_point_epigraph(lp, tpe.ck1, m1, c1, LinExpr().add(t1, 1.0));
  return solve_min(lp, "two-point norm");
}

double two_point_norm(const TwoPointExtension& tpe, std::span<const double> a, double alpha, double beta) {
  double v = 0.0;
  if (tpe.t > 0.0) v += tpe.t * two_point_norm_r0(tpe, a, alpha, beta);
  if (tpe.t < 1.0) v += (1.0 - tpe.t) * two_point_norm_r1(tpe, a, alpha, beta);
  return v;
}

HensonResult henson_distance(const SpacePtr& e, const std::vector<Vector>& xs, const SpacePtr& f,
                             const std::vector<Vector>& ys) {
  return henson_impl(e, xs, f, ys, [](const LpBuilder& lp) { return optim::solve(lp, optim::Sense::maximize); });
}

ExactHenson henson_distance_exact(const SpacePtr& e, const std::vector<Vector>& xs, const SpacePtr& f,
                                  const std::vector<Vector>& ys) {
  bool all_nonpositive = true;
  ExactHenson out;
  out.result = henson_impl(e, xs, f, ys, [&](const LpBuilder& lp) {
    auto ex = optim::solve_lp_exact(lp.build(optim::Sense::maximize));
    if (ex.solution.status == optim::LpStatus::optimal && !ex.objective_is_zero && ex.solution.objective > 0.0)
      all_nonpositive = false;
    return ex.solution;
  });
  out.is_zero = all_nonpositive;
  return out;
}

double tuple_amalgam_norm(const TupleAmalgam& ta, std::span<const double> ze, std::span<const double> zf) {
  if (ta.xs.size() != ta.ys.size()) throw Error(ErrorCode::length_mismatch, "tuples differ in length");
  space::check_dim(*ta.e, ze, "E component");
  space::check_dim(*ta.f, zf, "F component");
  const std::size_t k = ta.xs.size();
  LpBuilder lp;
  const auto sp = lp.add_variables(k, 0.0, optim::kInf);
  const auto sn = lp.add_variables(k, 0.0, optim::kInf);
  for (std::size_t i = 0; i < k; ++i) {
    lp.set_cost(sp[i], ta.r);
    lp.set_cost(sn[i], ta.r);
  }
  const std::size_t te = lp.add_variable(0.0, optim::kInf, 1.0);
  const std::size_t tf = lp.add_variable(0.0, optim::kInf, 1.0);
  auto me = constant_exprs(ze), mf = constant_exprs(zf);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t r = 0; r < ze.size(); ++r) me[r].add(sp[i], -ta.xs[i][r]).add(sn[i], ta.xs[i][r]);
    for (std::size_t r = 0; r < zf.size(); ++r) mf[r].add(sp[i], ta.ys[i][r]).add(sn[i], -ta.ys[i][r]);
  }
  space::append_norm_epigraph(lp, *ta.e, me, LinExpr().add(te, 1.0));
  space::append_norm_epigraph(lp, *ta.f, mf, LinExpr().add(tf, 1.0));
  return solve_min(lp, "tuple amalgam");
}

SpacePtr tuple_amalgam_space(const TupleAmalgam& ta) {
  if (ta.xs.size() != ta.ys.size()) throw Error(ErrorCode::length_mismatch, "tuples differ in length");
  // Dual ball: lambda_E in B*_E, lambda_F in B*_F, |<lambda_E, x_i> - <lambda_F, y_i>| <= r.
  const auto& be = ta.e->dual_ball();
  const auto& bf = ta.f->dual_ball();
  space::DualBall ball;
  ball.dim = be.dim + bf.dim;
  ball.aux = be.aux + bf.aux;
  ball.aux_nonneg = be.aux_nonneg;
  ball.aux_nonneg.insert(ball.aux_nonneg.end(), bf.aux_nonneg.begin(), bf.aux_nonneg.end());
  const std::size_t width = ball.dim + ball.aux;
  const std::size_t aux_e = ball.dim, aux_f = ball.dim + be.aux;
  for (const auto& r : be.rows) {
    optim::Constraint row{Vector(width, 0.0), r.relation, r.bound};
    for (std::size_t i = 0; i < be.dim; ++i) row.coeffs[i] = r.coeffs[i];
    for (std::size_t j = 0; j < be.aux; ++j) row.coeffs[aux_e + j] = r.coeffs[be.dim + j];
    ball.rows.push_back(std::move(row));
  }
  for (const auto& r : bf.rows) {
    optim::Constraint row{Vector(width, 0.0), r.relation, r.bound};
    for (std::size_t i = 0; i < bf.dim; ++i) row.coeffs[be.dim + i] = r.coeffs[i];
    for (std::size_t j = 0; j < bf.aux; ++j) row.coeffs[aux_f + j] = r.coeffs[bf.dim + j];
    ball.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < ta.xs.size(); ++i) {
    Vector c(width, 0.0);
    for (std::size_t r = 0; r < be.dim; ++r) c[r] = ta.xs[i][r];
    for (std::size_t r = 0; r < bf.dim; ++r) c[be.dim + r] = -ta.ys[i][r];
    ball.rows.push_back({c, Relation::less_equal, ta.r});
    ball.rows.push_back({c, Relation::greater_equal, -ta.r});
  }
  const bool definite = ta.r > 0.0 && ta.e->positive_definite() && ta.f->positive_definite();
  return std::make_shared<space::OracleNormedSpace>(
      ta.e->label() + "+" + ta.f->label(), std::move(ball),
      space::Provenance{"tuple-amalgam", "glued along " + std::to_string(ta.xs.size()) + " pairs", 0}, definite);
}

}  // namespace gurarij::amalgam
