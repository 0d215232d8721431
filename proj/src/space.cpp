#include "gurarij/space.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "gurarij/error.hpp"

namespace gurarij::space {

using optim::LinExpr;
using optim::LpBuilder;
using optim::Relation;

namespace {

Vector canonical_zero(Vector v) {
  for (double& x : v)
    if (x == 0.0) x = 0.0;  // folds -0.0
  return v;
}

bool contains(const std::vector<Vector>& set, const Vector& v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

Vector negate(const Vector& v) {
  Vector n(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) n[i] = -v[i];
  return canonical_zero(std::move(n));
}

std::size_t generator_rank(const std::vector<Vector>& gens, std::size_t dim) {
  if (gens.empty() || dim == 0) return 0;
  return rank(Matrix::from_rows(gens), 1e-10);
}

DualBall explicit_ball(std::size_t dim, const std::vector<Vector>& gens) {
  DualBall ball;
  ball.dim = dim;
  ball.aux = gens.size();
  ball.aux_nonneg.assign(gens.size(), true);
  const std::size_t width = dim + gens.size();
  for (std::size_t r = 0; r < dim; ++r) {
    optim::Constraint row;
    row.coeffs.assign(width, 0.0);
    row.coeffs[r] = 1.0;
    for (std::size_t g = 0; g < gens.size(); ++g) row.coeffs[dim + g] = -gens[g][r];
    row.relation = Relation::equal;
    row.bound = 0.0;
    ball.rows.push_back(std::move(row));
  }
  optim::Constraint total;
  total.coeffs.assign(width, 0.0);
  for (std::size_t g = 0; g < gens.size(); ++g) total.coeffs[dim + g] = 1.0;
  total.relation = Relation::less_equal;
  total.bound = 1.0;
  ball.rows.push_back(std::move(total));
  return ball;
}

}  // namespace

void check_dim(const NormedSpace& s, std::span<const double> v, const char* what) {
  if (v.size() != s.dim()) {
    std::ostringstream msg;
    msg << what << " has dimension " << v.size() << " but space '" << s.label() << "' has dimension "
        << s.dim();
    throw Error(ErrorCode::dimension_mismatch, msg.str());
  }
}

double NormedSpace::norm(std::span<const double> v) const {
  check_dim(*this, v, "vector");
  return evaluate(v).value;
}

NormWitness NormedSpace::norm_with_functional(std::span<const double> v) const {
  check_dim(*this, v, "vector");
  return evaluate(v);
}

PolyNormedSpace::PolyNormedSpace(std::string label, std::size_t dim, std::vector<Vector> generators,
                                 bool symmetric_closure)
    : NormedSpace(std::move(label), dim, false), symmetric_closure_(symmetric_closure) {
  for (auto& g : generators) {
    if (g.size() != dim) throw Error(ErrorCode::dimension_mismatch, "generator arity does not match dim");
    for (double x : g)
      if (!std::isfinite(x)) throw Error(ErrorCode::invalid_generators, "non-finite generator entry");
    listed_.push_back(canonical_zero(g));
  }
  for (const auto& g : listed_) {
    if (!contains(effective_, g)) effective_.push_back(g);
    if (symmetric_closure_) {
      auto n = negate(g);
      if (!contains(effective_, n)) effective_.push_back(std::move(n));
    }
  }
  positive_definite_ = generator_rank(effective_, dim) == dim;
  ball_ = explicit_ball(dim, effective_);
}

NormWitness PolyNormedSpace::evaluate(std::span<const double> v) const {
  NormWitness w;
  w.functional.assign(dim(), 0.0);
  for (const auto& g : effective_) {
    const double x = dot(g, v);
    if (x > w.value) {
      w.value = x;
      w.functional = g;
    }
  }
  return w;
}

OracleNormedSpace::OracleNormedSpace(std::string label, DualBall ball, Provenance provenance,
                                     bool positive_definite)
    : NormedSpace(std::move(label), ball.dim, positive_definite),
      ball_(std::move(ball)),
      provenance_(std::move(provenance)) {
  for (const auto& r : ball_.rows)
    if (r.coeffs.size() != ball_.dim + ball_.aux)
      throw Error(ErrorCode::invalid_input, "dual ball row arity mismatch");
  if (ball_.aux_nonneg.size() != ball_.aux) throw Error(ErrorCode::invalid_input, "dual ball aux flags mismatch");
}

NormWitness OracleNormedSpace::evaluate(std::span<const double> v) const {
  LpBuilder lp;
  const auto c = append_dual_ball(lp, ball_);
  LinExpr obj;
  for (std::size_t i = 0; i < c.size(); ++i) obj.add(c[i], v[i]);
  lp.add_cost(obj);
  const auto sol = optim::solve(lp, optim::Sense::maximize);
  if (sol.status != optim::LpStatus::optimal)
    throw Error(ErrorCode::lp_failure, "norm oracle LP is " + optim::to_string(sol.status));
  NormWitness w;
  w.value = std::max(0.0, sol.objective);
  w.functional.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) w.functional[i] = sol.primal[c[i]];
  return w;
}

std::vector<std::size_t> append_dual_ball(LpBuilder& lp, const DualBall& ball) {
  std::vector<std::size_t> vars;
  vars.reserve(ball.dim + ball.aux);
  for (std::size_t i = 0; i < ball.dim; ++i) vars.push_back(lp.add_variable());
  for (std::size_t j = 0; j < ball.aux; ++j)
    vars.push_back(lp.add_variable(ball.aux_nonneg[j] ? 0.0 : -optim::kInf));
  for (const auto& r : ball.rows) {
    LinExpr e;
    for (std::size_t k = 0; k < r.coeffs.size(); ++k) e.add(vars[k], r.coeffs[k]);
    lp.add_row(e, r.relation, r.bound);
  }
  vars.resize(ball.dim);
  return vars;
}

void append_norm_epigraph(LpBuilder& lp, const NormedSpace& s, const std::vector<LinExpr>& z,
                          const LinExpr& t) {
  if (z.size() != s.dim()) throw Error(ErrorCode::dimension_mismatch, "epigraph argument arity");
  if (const auto* poly = dynamic_cast<const PolyNormedSpace*>(&s)) {
    for (const auto& g : poly->generators()) {
      LinExpr e;
      for (std::size_t r = 0; r < g.size(); ++r)
        if (g[r] != 0.0) e.add(z[r], g[r]);
      e.add(t, -1.0);
      lp.add_row(e, Relation::less_equal, 0.0);
    }
    return;
  }
  // norm(z) = max{<z,c> : (c,w) rows} = min{<h,y> : A^T y = z, B^T y (>=|=) 0,
  // y signed by row relation}; so norm(z) <= t iff such a y exists.
  const DualBall& ball = s.dual_ball();
  std::vector<std::size_t> y(ball.rows.size());
  for (std::size_t i = 0; i < ball.rows.size(); ++i) {
    switch (ball.rows[i].relation) {
      case Relation::less_equal: y[i] = lp.add_variable(0.0, optim::kInf); break;
      case Relation::greater_equal: y[i] = lp.add_variable(-optim::kInf, 0.0); break;
      case Relation::equal: y[i] = lp.add_variable(); break;
    }
  }
  for (std::size_t k = 0; k < ball.dim + ball.aux; ++k) {
    LinExpr e;
    for (std::size_t i = 0; i < ball.rows.size(); ++i) e.add(y[i], ball.rows[i].coeffs[k]);
    if (k < ball.dim) {
      e.add(z[k], -1.0);
      lp.add_row(e, Relation::equal, 0.0);
    } else {
      lp.add_row(e, ball.aux_nonneg[k - ball.dim] ? Relation::greater_equal : Relation::equal, 0.0);
    }
  }
  LinExpr value;
  for (std::size_t i = 0; i < ball.rows.size(); ++i) value.add(y[i], ball.rows[i].bound);
  value.add(t, -1.0);
  lp.add_row(value, Relation::less_equal, 0.0);
}

std::shared_ptr<const PolyNormedSpace> make_standard(StandardKind kind, std::size_t dim,
                                                     std::vector<Vector> generators,
                                                     bool symmetric_closure) {
  if (dim == 0) throw Error(ErrorCode::invalid_generators, "dimension must be positive");
  switch (kind) {
    case StandardKind::l1: {
      // Dual ball of l1 is the l-infinity cube: vertices (+-1, ..., +-1).
      std::vector<Vector> gens;
      const std::size_t count = std::size_t{1} << dim;
      for (std::size_t mask = 0; mask < count; ++mask) {
        Vector g(dim);
        for (std::size_t i = 0; i < dim; ++i) g[i] = (mask >> i) & 1 ? -1.0 : 1.0;
        gens.push_back(std::move(g));
      }
      return std::make_shared<PolyNormedSpace>("l1:" + std::to_string(dim), dim, std::move(gens), false);
    }
    case StandardKind::linf: {
      std::vector<Vector> gens;
      for (std::size_t i = 0; i < dim; ++i) gens.push_back(unit_vector(dim, i));
      return std::make_shared<PolyNormedSpace>("linf:" + std::to_string(dim), dim, std::move(gens), true);
    }
    case StandardKind::polytope: {
      auto s = std::make_shared<PolyNormedSpace>("polytope:" + std::to_string(dim), dim,
                                                 std::move(generators), symmetric_closure);
      const auto report = validate(*s);
      if (!report.empty()) {
        std::string msg = "invalid generators:";
        for (const auto& v : report) msg += " [" + v.kind + "] " + v.detail;
        throw Error(ErrorCode::invalid_generators, msg);
      }
      return s;
    }
  }
  throw Error(ErrorCode::invalid_generators, "unknown standard kind");
}

std::shared_ptr<const PolyNormedSpace> parse_inline(const std::string& shorthand) {
  const auto colon = shorthand.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::invalid_input, "expected l1:d or linf:d, got " + shorthand);
  const std::string kind = shorthand.substr(0, colon);
  std::size_t dim = 0;
  try {
    dim = std::stoul(shorthand.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_input, "bad dimension in " + shorthand);
  }
  if (kind == "l1") return make_standard(StandardKind::l1, dim);
  if (kind == "linf") return make_standard(StandardKind::linf, dim);
  throw Error(ErrorCode::invalid_input, "unknown inline space kind " + kind);
}

std::vector<Violation> validate(const PolyNormedSpace& s) {
  std::vector<Violation> out;
  if (!s.symmetric_closure()) {
    for (const auto& g : s.generators()) {
      if (!contains(s.generators(), negate(g))) {
        std::ostringstream d;
        d << "negation of generator (";
        for (std::size_t i = 0; i < g.size(); ++i) d << (i ? "," : "") << g[i];
        d << ") is missing";
        out.push_back({"asymmetry", d.str()});
      }
    }
  }
  const std::size_t r = generator_rank(s.generators(), s.dim());
  if (r < s.dim())
    out.push_back({"spanning", "generators span a subspace of dimension " + std::to_string(r) + " < " +
                                   std::to_string(s.dim())});
  return out;
}

double norm(const NormedSpace& s, std::span<const double> v) { return s.norm(v); }

double dual_norm(const NormedSpace& s, std::span<const double> f) {
  check_dim(s, f, "functional");
  bool zero = std::all_of(f.begin(), f.end(), [](double x) { return x == 0.0; });
  if (zero) return 0.0;
  LpBuilder lp;
  if (const auto* poly = dynamic_cast<const PolyNormedSpace*>(&s)) {
    const auto& gens = poly->generators();
    std::vector<std::size_t> mu = lp.add_variables(gens.size(), 0.0, optim::kInf);
    for (std::size_t r = 0; r < s.dim(); ++r) {
      LinExpr e;
      for (std::size_t g = 0; g < gens.size(); ++g) e.add(mu[g], gens[g][r]);
      lp.add_row(e, Relation::equal, f[r]);
    }
    LinExpr cost;
    for (auto m : mu) cost.add(m, 1.0);
    lp.add_cost(cost);
  } else {
    // Homogenize: f in t*B*  iff  A f + B w' (rel) t h for some w'.
    const DualBall& ball = s.dual_ball();
    const std::size_t t = lp.add_variable(0.0, optim::kInf, 1.0);
    std::vector<std::size_t> w(ball.aux);
    for (std::size_t j = 0; j < ball.aux; ++j) w[j] = lp.add_variable(ball.aux_nonneg[j] ? 0.0 : -optim::kInf);
    for (const auto& r : ball.rows) {
      LinExpr e;
      double fixed = 0.0;
      for (std::size_t k = 0; k < ball.dim; ++k) fixed += r.coeffs[k] * f[k];
      for (std::size_t j = 0; j < ball.aux; ++j) e.add(w[j], r.coeffs[ball.dim + j]);
      e.add(t, -r.bound);
      lp.add_row(e, r.relation, -fixed);
    }
  }
  const auto sol = optim::solve(lp, optim::Sense::minimize);
  if (sol.status == optim::LpStatus::infeasible) return optim::kInf;
  if (sol.status != optim::LpStatus::optimal)
    throw Error(ErrorCode::lp_failure, "dual norm LP is " + optim::to_string(sol.status));
  return std::max(0.0, sol.objective);
}

DualBall pullback_ball(const DualBall& ball, const std::vector<Vector>& basis) {
  DualBall out;
  out.dim = basis.size();
  out.aux = ball.dim + ball.aux;
  out.aux_nonneg.assign(ball.dim, false);
  out.aux_nonneg.insert(out.aux_nonneg.end(), ball.aux_nonneg.begin(), ball.aux_nonneg.end());
  const std::size_t width = out.dim + out.aux;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    optim::Constraint row;
    row.coeffs.assign(width, 0.0);
    row.coeffs[i] = 1.0;
    for (std::size_t r = 0; r < ball.dim; ++r) row.coeffs[out.dim + r] = -basis[i][r];
    row.relation = Relation::equal;
    out.rows.push_back(std::move(row));
  }
  for (const auto& r : ball.rows) {
    optim::Constraint row;
    row.coeffs.assign(width, 0.0);
    std::copy(r.coeffs.begin(), r.coeffs.end(), row.coeffs.begin() + static_cast<long>(out.dim));
    row.relation = r.relation;
    row.bound = r.bound;
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::shared_ptr<const PolyNormedSpace> subspace_pullback(const PolyNormedSpace& s,
                                                         const std::vector<Vector>& basis) {
  for (const auto& b : basis) check_dim(s, b, "basis vector");
  std::vector<Vector> gens;
  for (const auto& g : s.listed_generators()) {
    Vector c(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) c[i] = dot(g, basis[i]);
    gens.push_back(std::move(c));
  }
  return std::make_shared<PolyNormedSpace>(s.label() + "|pullback", basis.size(), std::move(gens),
                                           s.symmetric_closure());
}

SpacePtr subspace_pullback(const SpacePtr& s, const std::vector<Vector>& basis) {
  if (const auto* poly = dynamic_cast<const PolyNormedSpace*>(s.get())) return subspace_pullback(*poly, basis);
  for (const auto& b : basis) check_dim(*s, b, "basis vector");
  const bool definite =
      s->positive_definite() && !basis.empty() && rank(Matrix::from_rows(basis), 1e-10) == basis.size();
  return std::make_shared<OracleNormedSpace>(s->label() + "|pullback", pullback_ball(s->dual_ball(), basis),
                                             Provenance{"pullback", "coefficient pullback of " + s->label(), 0},
                                             definite);
}

std::size_t ball_span_rank(const DualBall& ball) {
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vector> basis;  // orthonormal
  while (basis.size() < ball.dim) {
    Vector r(ball.dim);
    for (auto& x : r) x = g(rng);
    for (const auto& b : basis) r = sub(r, scale(b, dot(r, b)));
    const double n = std::sqrt(dot(r, r));
    r = scale(r, 1.0 / n);
    LpBuilder lp;
    const auto c = append_dual_ball(lp, ball);
    LinExpr obj;
    for (std::size_t i = 0; i < c.size(); ++i) obj.add(c[i], r[i]);
    lp.add_cost(obj);
    const auto sol = optim::solve(lp, optim::Sense::maximize);
    if (sol.status != optim::LpStatus::optimal || sol.objective <= 1e-9) break;
    Vector found(ball.dim);
    for (std::size_t i = 0; i < c.size(); ++i) found[i] = sol.primal[c[i]];
    for (const auto& b : basis) found = sub(found, scale(b, dot(found, b)));
    const double fn = std::sqrt(dot(found, found));
    if (fn <= 1e-12) break;
    basis.push_back(scale(found, 1.0 / fn));
  }
  return basis.size();
}

}  // namespace gurarij::space
