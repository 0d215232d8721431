#include "gurarij/katetov.hpp"

#include <algorithm>
#include <cmath>

#include "gurarij/error.hpp"

namespace gurarij::katetov {

using optim::LinExpr;
using optim::LpBuilder;
using optim::Relation;

namespace {

void check_support(const FiniteKatetov& fk) {
  if (!fk.space) throw Error(ErrorCode::invalid_input, "Katetov function without a space");
  if (fk.support.size() != fk.values.size())
    throw Error(ErrorCode::length_mismatch, "support and values differ in length");
  for (const auto& y : fk.support) space::check_dim(*fk.space, y, "support point");
}

EnvelopeValue dual_value(const space::NormedSpace& s, const std::vector<Vector>& pts, const Vector& vals,
                         std::span<const double> x) {
  LpBuilder lp;
  const auto f = space::append_dual_ball(lp, s.dual_ball());
  const std::size_t off = lp.add_variable();
  for (std::size_t j = 0; j < pts.size(); ++j) {
    LinExpr row;
    row.add(off, 1.0);
    for (std::size_t i = 0; i < f.size(); ++i) row.add(f[i], -pts[j][i]);
    lp.add_row(row, Relation::greater_equal, -vals[j]);
  }
  LinExpr obj;
  for (std::size_t i = 0; i < f.size(); ++i) obj.add(f[i], x[i]);
  obj.add(off, -1.0);
  lp.add_cost(obj);
  const auto sol = optim::solve(lp, optim::Sense::maximize);
  if (sol.status != optim::LpStatus::optimal)
    throw Error(ErrorCode::lp_failure, "envelope LP is " + optim::to_string(sol.status));
  EnvelopeValue v;
  v.value = sol.objective;
  v.functional.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v.functional[i] = sol.primal[f[i]];
  v.offset = sol.primal[off];
  return v;
}

}  // namespace

std::vector<KatetovViolation> is_katetov(const FiniteKatetov& fk, double tol) {
  check_support(fk);
  std::vector<KatetovViolation> out;
  const std::size_t n = fk.support.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (fk.values[i] < -tol) out.push_back({"lower", i, i, -2.0 * fk.values[i]});
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = fk.space->norm(sub(fk.support[i], fk.support[j]));
      const double s = tol * (1.0 + d);
      if (fk.values[i] > fk.values[j] + d + s) out.push_back({"upper", i, j, fk.values[i] - fk.values[j] - d});
      if (fk.values[j] > fk.values[i] + d + s) out.push_back({"upper", j, i, fk.values[j] - fk.values[i] - d});
      if (d > fk.values[i] + fk.values[j] + s) out.push_back({"lower", i, j, d - fk.values[i] - fk.values[j]});
    }
  }
  return out;
}

double extend_min_plus(const FiniteKatetov& fk, std::span<const double> x) {
  check_support(fk);
  space::check_dim(*fk.space, x, "query point");
  double best = optim::kInf;
  for (std::size_t j = 0; j < fk.support.size(); ++j)
    best = std::min(best, fk.space->norm(sub(x, fk.support[j])) + fk.values[j]);
  return best;
}

ConvexKatetovEnvelope::ConvexKatetovEnvelope(SpacePtr space, std::vector<Vector> points, Vector values)
    : space_(std::move(space)) {
  if (!space_) throw Error(ErrorCode::invalid_input, "envelope without a space");
  if (points.size() != values.size()) throw Error(ErrorCode::length_mismatch, "points and values differ in length");
  if (points.empty()) throw Error(ErrorCode::invalid_input, "envelope needs at least one generator");
  for (std::size_t j = 0; j < points.size(); ++j) {
    space::check_dim(*space_, points[j], "generator point");
    if (!std::isfinite(values[j])) throw Error(ErrorCode::invalid_input, "non-finite generator value");
  }
  // Canonicalize. One pass suffices: the envelope is 1-Lipschitz and lies
  // below every piece, so lowering c_j to env(y_j) leaves the envelope as is.
  Vector canon(values.size());
  for (std::size_t j = 0; j < points.size(); ++j)
    canon[j] = std::min(values[j], dual_value(*space_, points, values, points[j]).value);
  for (std::size_t j = 0; j < points.size(); ++j) {
    bool dup = false;
    for (const auto& p : points_) dup |= p == points[j];
    if (dup) continue;
    points_.push_back(std::move(points[j]));
    values_.push_back(canon[j]);
  }
}

double ConvexKatetovEnvelope::operator()(std::span<const double> x) const { return eval_envelope(*this, x); }

EnvelopeValue eval_envelope_dual(const ConvexKatetovEnvelope& ck, std::span<const double> x) {
  space::check_dim(*ck.space(), x, "query point");
  return dual_value(*ck.space(), ck.points(), ck.values(), x);
}

double eval_envelope(const ConvexKatetovEnvelope& ck, std::span<const double> x) {
  return eval_envelope_dual(ck, x).value;
}

double eval_envelope_primal(const ConvexKatetovEnvelope& ck, std::span<const double> x) {
  space::check_dim(*ck.space(), x, "query point");
  LpBuilder lp;
  std::vector<LinExpr> b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) b[i].constant = x[i];
  const std::size_t t = lp.add_variable(-optim::kInf, optim::kInf, 1.0);
  append_perspective_epigraph(lp, ck, b, LinExpr(1.0), LinExpr().add(t, 1.0));
  const auto sol = optim::solve(lp, optim::Sense::minimize);
  if (sol.status != optim::LpStatus::optimal)
    throw Error(ErrorCode::lp_failure, "envelope LP is " + optim::to_string(sol.status));
  return sol.objective;
}

void append_perspective_epigraph(LpBuilder& lp, const ConvexKatetovEnvelope& ck, const std::vector<LinExpr>& b,
                                 const LinExpr& p, const LinExpr& t) {
  const std::size_t d = ck.dim(), m = ck.size();
  if (b.size() != d) throw Error(ErrorCode::dimension_mismatch, "perspective argument arity");
  std::vector<LinExpr> sum_u(d);
  LinExpr sum_l, total;
  for (std::size_t j = 0; j < m; ++j) {
    const auto u = lp.add_variables(d);
    const std::size_t l = lp.add_variable(0.0, optim::kInf);
    const std::size_t tj = lp.add_variable(0.0, optim::kInf);
    std::vector<LinExpr> z(d);
    for (std::size_t i = 0; i < d; ++i) {
      z[i].add(u[i], 1.0).add(l, -ck.points()[j][i]);
      sum_u[i].add(u[i], 1.0);
    }
    space::append_norm_epigraph(lp, *ck.space(), z, LinExpr().add(tj, 1.0));
    sum_l.add(l, 1.0);
    total.add(tj, 1.0).add(l, ck.values()[j]);
  }
  for (std::size_t i = 0; i < d; ++i) {
    LinExpr e = sum_u[i];
    e.add(b[i], -1.0);
    lp.add_row(e, Relation::equal, 0.0);
  }
  sum_l.add(p, -1.0);
  lp.add_row(sum_l, Relation::equal, 0.0);
  total.add(t, -1.0);
  lp.add_row(total, Relation::less_equal, 0.0);
}

void append_one_point_epigraph(LpBuilder& lp, const ConvexKatetovEnvelope& ck, const std::vector<LinExpr>& a,
                               const LinExpr& alpha, const LinExpr& t) {
  // ||alpha x - a|| is the seminorm whose positive half-space (alpha >= 0) is
  // the perspective of ck; split alpha = p - q and a = a1 + a2 and use
  // subadditivity, which is tight at the obvious split.
  const std::size_t d = ck.dim();
  if (a.size() != d) throw Error(ErrorCode::dimension_mismatch, "one-point argument arity");
  const std::size_t p = lp.add_variable(0.0, optim::kInf);
  const std::size_t q = lp.add_variable(0.0, optim::kInf);
  const std::size_t t1 = lp.add_variable(0.0, optim::kInf);
  const std::size_t t2 = lp.add_variable(0.0, optim::kInf);
  LinExpr split;
  split.add(p, 1.0).add(q, -1.0).add(alpha, -1.0);
  lp.add_row(split, Relation::equal, 0.0);
  const auto a1 = lp.add_variables(d);
  std::vector<LinExpr> pos(d), neg(d);
  for (std::size_t i = 0; i < d; ++i) {
    pos[i].add(a1[i], 1.0);
    // ||-q x - a2|| = q ck(-a2 / q), with a2 = a - a1
    neg[i].add(a[i], -1.0).add(a1[i], 1.0);
  }
  append_perspective_epigraph(lp, ck, pos, LinExpr().add(p, 1.0), LinExpr().add(t1, 1.0));
  append_perspective_epigraph(lp, ck, neg, LinExpr().add(q, 1.0), LinExpr().add(t2, 1.0));
  LinExpr total;
  total.add(t1, 1.0).add(t2, 1.0).add(t, -1.0);
  lp.add_row(total, Relation::less_equal, 0.0);
}

ConvexKatetovEnvelope convexify(const FiniteKatetov& fk) {
  check_support(fk);
  return ConvexKatetovEnvelope(fk.space, fk.support, fk.values);
}

FiniteKatetov restriction(const ConvexKatetovEnvelope& ck) { return {ck.space(), ck.points(), ck.values()}; }

double envelope_conjugate(const ConvexKatetovEnvelope& ck, std::span<const double> f) {
  const double dn = space::dual_norm(*ck.space(), f);
  if (dn > 1.0 + 1e-9)
    throw Error(ErrorCode::functional_too_large, "functional has dual norm " + std::to_string(dn) + " > 1");
  double best = -optim::kInf;
  for (std::size_t j = 0; j < ck.size(); ++j) best = std::max(best, dot(f, ck.points()[j]) - ck.values()[j]);
  return best;
}

double sup_distance(const ConvexKatetovEnvelope& a, const ConvexKatetovEnvelope& b) {
  if (a.space() != b.space() &&
      (a.space()->dim() != b.space()->dim() || a.space()->label() != b.space()->label()))
    throw Error(ErrorCode::space_mismatch, "envelopes live over spaces '" + a.space()->label() + "' and '" +
                                               b.space()->label() + "'");
  double best = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) best = std::max(best, std::abs(a.values()[j] - b(a.points()[j])));
  for (std::size_t j = 0; j < b.size(); ++j) best = std::max(best, std::abs(a(b.points()[j]) - b.values()[j]));
  return best;
}

double one_point_norm(const ConvexKatetovEnvelope& ck, double alpha, std::span<const double> a) {
  space::check_dim(*ck.space(), a, "vector");
  if (alpha == 0.0) return ck.space()->norm(a);
  return std::abs(alpha) * ck(scale(a, 1.0 / alpha));
}

ConvexKatetovEnvelope point_as_katetov(SpacePtr space, const Vector& v) {
  return ConvexKatetovEnvelope(std::move(space), {v}, {0.0});
}

FiniteKatetov sample_katetov(SpacePtr space, std::vector<Vector> support, double R, std::mt19937_64& rng) {
  const std::size_t n = support.size();
  std::uniform_real_distribution<double> u(0.0, 2.0 * R);
  Vector raw(n);
  for (auto& v : raw) v = u(rng);
  std::vector<Vector> d(n, Vector(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = space->norm(sub(support[i], support[j]));
  Vector vals(n);
  for (std::size_t i = 0; i < n; ++i) {
    vals[i] = raw[i];
    for (std::size_t j = 0; j < n; ++j) vals[i] = std::min(vals[i], raw[j] + d[i][j]);
  }
  double lift = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) lift = std::max(lift, 0.5 * (d[i][j] - vals[i] - vals[j]));
  for (auto& v : vals) v += lift;
  return {std::move(space), std::move(support), std::move(vals)};
}

std::vector<Vector> sample_ball(const space::NormedSpace& s, std::size_t count, double R, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vector> out;
  while (out.size() < count) {
    Vector v(s.dim());
    for (auto& x : v) x = g(rng);
    const double n = s.norm(v);
    if (n < 1e-12) continue;
    out.push_back(scale(v, R * u(rng) / n));
  }
  return out;
}

}  // namespace gurarij::katetov
