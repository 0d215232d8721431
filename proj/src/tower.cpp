#include "gurarij/tower.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gurarij/aells.hpp"
#include "gurarij/amalgam.hpp"
#include "gurarij/error.hpp"
#include "gurarij/polytope.hpp"

namespace gurarij::tower {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Vector pad(std::span<const double> x, std::size_t dim) {
  Vector out(dim, 0.0);
  std::copy(x.begin(), x.end(), out.begin());
  return out;
}

bool near_equal(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (std::abs(a(r, c) - b(r, c)) > tol) return false;
  return true;
}

// Closes a finite set of matrices under composition (identity included).
std::vector<Matrix> close_group(const std::vector<Matrix>& gens, std::size_t dim) {
  std::vector<Matrix> group{Matrix::identity(dim)};
  for (std::size_t i = 0; i < group.size(); ++i) {
    for (const auto& g : gens) {
      Matrix h = g * group[i];
      bool seen = std::any_of(group.begin(), group.end(), [&](const Matrix& m) { return near_equal(m, h, 1e-9); });
      if (!seen) {
        if (group.size() >= 10000) throw Error(ErrorCode::invalid_params, "symmetry group is not finite (or too large)");
        group.push_back(std::move(h));
      }
    }
  }
  return group;
}

void check_isometry(const space::NormedSpace& s, const Matrix& g) {
  if (g.rows() != s.dim() || g.cols() != s.dim())
    throw Error(ErrorCode::dimension_mismatch, "symmetry matrix does not act on the start space");
  std::mt19937_64 rng(0x150);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    Vector x(s.dim());
    for (auto& xi : x) xi = nd(rng);
    const double a = s.norm(x), b = s.norm(g.apply(x));
    if (std::abs(a - b) > 1e-9 * std::max(1.0, a))
      throw Error(ErrorCode::invalid_params, "symmetry matrix is not an isometry of the start space");
  }
}

// Low-discrepancy point in [-1, 1]^dim.
Vector halton(std::size_t index, std::size_t dim) {
  static constexpr unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  Vector out(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const unsigned base = primes[d % 12];
    double f = 1.0, r = 0.0;
    for (std::size_t i = index; i > 0; i /= base) {
      f /= base;
      r += f * static_cast<double>(i % base);
    }
    out[d] = 2.0 * r - 1.0;
  }
  return out;
}

}  // namespace

double BuildParams::radius(std::size_t round) const {
  if (radii.empty()) throw Error(ErrorCode::invalid_params, "no cutoff radii");
  return radii[std::min(round, radii.size() - 1)];
}

void validate(const BuildParams& p) {
  if (!p.start) throw Error(ErrorCode::invalid_params, "missing start space");
  if (p.support_size == 0) throw Error(ErrorCode::invalid_params, "support_size must be positive");
  if (p.radii.empty()) throw Error(ErrorCode::invalid_params, "no cutoff radii");
  for (double r : p.radii)
    if (!(r >= 2.0) || !std::isfinite(r)) throw Error(ErrorCode::invalid_params, "cutoff radii must be >= 2");
  for (const auto& g : p.symmetry) check_isometry(*p.start, g);
}

BuildState initial_state(const BuildParams& p) {
  validate(p);
  BuildState s;
  s.chain.push_back(p.start);
  if (!p.symmetry.empty()) s.actions = close_group(p.symmetry, p.start->dim());
  return s;
}

ConvexKatetovEnvelope transport(const ConvexKatetovEnvelope& ck, const Matrix& phi, const SpacePtr& target) {
  std::vector<Vector> pts;
  pts.reserve(ck.size());
  for (const auto& y : ck.points()) pts.push_back(phi.apply(y));
  return ConvexKatetovEnvelope(target, std::move(pts), ck.values());
}

Matrix induced_matrix(const SpacePtr& en, const std::vector<ConvexKatetovEnvelope>& round_log, const Matrix& phi) {
  const std::size_t d = en->dim(), m = round_log.size();
  if (phi.rows() != d || phi.cols() != d) throw Error(ErrorCode::dimension_mismatch, "isometry does not act on E_n");
  Matrix out(d + m, d + m, 0.0);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) out(r, c) = phi(r, c);
  for (std::size_t i = 0; i < m; ++i) {
    const auto image = transport(round_log[i], phi, en);
    std::size_t hit = m;
    for (std::size_t k = 0; k < m && hit == m; ++k) {
      if (round_log[k].size() != image.size()) continue;
      if (katetov::sup_distance(image, round_log[k]) <= 1e-8) hit = k;
    }
    if (hit == m)
      throw Error(ErrorCode::orbit_escape, "image of adjoined envelope " + std::to_string(i) + " is not in the round log");
    out(d + hit, d + i) = 1.0;
  }
  return out;
}

BuildState build_step(const BuildState& state, const BuildParams& p) {
  BuildState next = state;
  const std::size_t n = state.round;
  const std::uint64_t seed = splitmix(p.seed ^ splitmix(n + 1));
  next.round = n + 1;
  if (p.envelopes_per_round == 0) return next;

  const SpacePtr& en = state.top();
  const double R = p.radius(n);
  std::mt19937_64 rng(seed);
  std::vector<ConvexKatetovEnvelope> round;
  for (std::size_t e = 0; e < p.envelopes_per_round; ++e) {
    auto support = katetov::sample_ball(*en, p.support_size, R, rng);
    auto ck = katetov::convexify(katetov::sample_katetov(en, std::move(support), R, rng));
    if (state.actions.empty()) {
      round.push_back(std::move(ck));
      continue;
    }
    for (const auto& g : state.actions) {
      auto image = transport(ck, g, en);
      bool seen = std::any_of(round.begin(), round.end(), [&](const ConvexKatetovEnvelope& o) {
        return o.size() == image.size() && katetov::sup_distance(o, image) <= 1e-8;
      });
      if (!seen) round.push_back(std::move(image));
    }
  }

  auto next_space = aells::adjoin({en, round}, n + 1);
  if (!state.actions.empty()) {
    next.actions.clear();
    for (const auto& g : state.actions) next.actions.push_back(induced_matrix(en, round, g));
  }
  next.chain.push_back(std::move(next_space));
  next.log.push_back(std::move(round));
  next.seed_trace.push_back(seed);

  // The embedding invariant, checked on a handful of vectors per step.
  BuildState pair;
  pair.chain = {en, next.chain.back()};
  const double defect = embedding_defect(pair, 20, seed);
  if (defect > 1e-8)
    throw Error(ErrorCode::invariant_violation, "E_n does not embed isometrically: defect " + std::to_string(defect));
  return next;
}

BuildState build(const BuildParams& p) {
  BuildState s = initial_state(p);
  for (std::size_t r = 0; r < p.rounds; ++r) s = build_step(s, p);
  return s;
}

BuildState replay(const SpacePtr& start, const std::vector<std::vector<LoggedEnvelope>>& log,
                  const std::vector<std::uint64_t>& seeds, const std::vector<Matrix>& symmetry) {
  BuildState s;
  s.chain.push_back(start);
  if (!symmetry.empty()) s.actions = close_group(symmetry, start->dim());
  for (std::size_t n = 0; n < log.size(); ++n) {
    const SpacePtr en = s.top();
    std::vector<ConvexKatetovEnvelope> round;
    for (const auto& le : log[n]) {
      for (const auto& y : le.points)
        if (y.size() != en->dim())
          throw Error(ErrorCode::space_mismatch, "logged envelope does not live over E_" + std::to_string(n));
      round.emplace_back(en, le.points, le.values);
    }
    auto next = aells::adjoin({en, round}, n + 1);
    if (!s.actions.empty()) {
      std::vector<Matrix> acts;
      for (const auto& g : s.actions) acts.push_back(induced_matrix(en, round, g));
      s.actions = std::move(acts);
    }
    s.chain.push_back(std::move(next));
    s.log.push_back(std::move(round));
    s.seed_trace.push_back(n < seeds.size() ? seeds[n] : 0);
    s.round = n + 1;
  }
  return s;
}

BuildState replay(const SpacePtr& start, const std::vector<std::vector<ConvexKatetovEnvelope>>& log,
                  const std::vector<std::uint64_t>& seeds, const std::vector<Matrix>& symmetry) {
  std::vector<std::vector<LoggedEnvelope>> raw(log.size());
  for (std::size_t n = 0; n < log.size(); ++n)
    for (const auto& ck : log[n]) raw[n].push_back({ck.points(), ck.values()});
  return replay(start, raw, seeds, symmetry);
}

double embedding_defect(const BuildState& state, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (std::size_t n = 0; n + 1 < state.chain.size(); ++n) {
    const auto& small = *state.chain[n];
    const auto& big = *state.chain[n + 1];
    for (std::size_t s = 0; s < samples; ++s) {
      Vector x(small.dim());
      for (auto& xi : x) xi = nd(rng);
      const double a = small.norm(x);
      const double b = big.norm(pad(x, big.dim()));
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, a));
    }
  }
  return worst;
}

BallRestriction restrict_to_ball(const space::NormedSpace& n, double R, const ConvexOracle& f) {
  const std::size_t k = n.dim();
  const std::size_t dim = k + 1;  // (s, t)
  std::vector<polytope::HalfSpace> rows;
  for (std::size_t i = 0; i < k; ++i) {
    const double b = R * space::dual_norm(n, unit_vector(k, i));
    if (!std::isfinite(b)) throw Error(ErrorCode::invalid_input, "coefficient space norm is not definite");
    Vector a(dim, 0.0);
    a[i] = 1.0;
    rows.push_back({a, b});
    a[i] = -1.0;
    rows.push_back({a, b});
  }
  {
    Vector a(dim, 0.0);
    a[k] = -1.0;  // Katetov functions are nonnegative
    rows.push_back({a, 0.0});
  }

  BallRestriction out;
  const double tol = 1e-9;
  for (int iter = 0; iter < 1000; ++iter) {
    const auto verts = polytope::vertices(rows, dim);
    std::size_t added = 0;
    auto add_cut = [&](Vector a, double b) {
      for (const auto& h : rows) {
        double diff = std::abs(h.b - b);
        for (std::size_t j = 0; j < dim; ++j) diff = std::max(diff, std::abs(h.a[j] - a[j]));
        if (diff <= 1e-12) return;
      }
      rows.push_back({std::move(a), b});
      ++added;
    };
    out.points.clear();
    out.values.clear();
    bool clean = true;
    for (const auto& vt : verts) {
      std::span<const double> s(vt.data(), k);
      const double t = vt[k];
      const auto nw = n.norm_with_functional(s);
      if (nw.value > R * (1.0 + tol)) {
        clean = false;
        add_cut(pad(nw.functional, dim), R);
        continue;
      }
      const auto ev = f(s);
      if (ev.value > t + tol * std::max(1.0, std::abs(t))) {
        clean = false;
        Vector a = pad(ev.functional, dim);
        a[k] = -1.0;
        add_cut(std::move(a), ev.offset);
        continue;
      }
      out.points.emplace_back(s.begin(), s.end());
      out.values.push_back(ev.value);
    }
    out.cuts += added;
    if (clean) return out;
    if (added == 0) throw Error(ErrorCode::numerical_failure, "ball restriction stalled: violated vertex with no new cut");
  }
  throw Error(ErrorCode::numerical_failure, "ball restriction did not converge");
}

ConvexOracle affine_norm_oracle(SpacePtr g, std::vector<Vector> cols, Vector z0) {
  return [g = std::move(g), cols = std::move(cols), z0 = std::move(z0)](std::span<const double> s) {
    Vector z = z0;
    for (std::size_t i = 0; i < cols.size(); ++i)
      for (std::size_t j = 0; j < z.size(); ++j) z[j] += s[i] * cols[i][j];
    const auto nw = g->norm_with_functional(z);
    EnvelopeValue ev;
    ev.value = nw.value;
    ev.functional.resize(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) ev.functional[i] = dot(nw.functional, cols[i]);
    ev.offset = -dot(nw.functional, z0);
    return ev;
  };
}

std::vector<Vector> sphere_net(const space::NormedSpace& s, std::size_t per_pair) {
  const std::size_t k = s.dim();
  std::vector<Vector> dirs;
  if (k == 1) {
    dirs = {{1.0}, {-1.0}};
  } else {
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j)
        for (std::size_t a = 0; a < per_pair; ++a) {
          const double th = 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(per_pair);
          Vector x(k, 0.0);
          x[i] = std::cos(th);
          x[j] = std::sin(th);
          dirs.push_back(std::move(x));
        }
    if (k >= 3)
      for (std::size_t a = 1; a <= per_pair; ++a) dirs.push_back(halton(a, k));
  }
  std::vector<Vector> out;
  for (auto& x : dirs) {
    const double nx = s.norm(x);
    if (nx > 1e-12) out.push_back(scale(x, 1.0 / nx));
  }
  return out;
}

ExtensionResult gurarij_extension_test(const SpacePtr& e, const std::vector<Vector>& basis,
                                       const ConvexKatetovEnvelope& xi, double R, const NetOptions& net) {
  return gurarij_extension_test(
      e, basis, xi.space(), [&xi](std::span<const double> s) { return katetov::eval_envelope_dual(xi, s); }, R, net);
}

ExtensionResult gurarij_extension_test(const SpacePtr& e, const std::vector<Vector>& basis, const SpacePtr& coeff,
                                       const ConvexOracle& xi, double R, const NetOptions& net) {
  const std::size_t k = basis.size(), d = e->dim();
  if (!(R > 1.0)) throw Error(ErrorCode::invalid_params, "R must exceed 1");
  if (k == 0 || coeff->dim() != k) throw Error(ErrorCode::dimension_mismatch, "basis size differs from xi's dimension");
  for (const auto& b : basis)
    if (b.size() != d) throw Error(ErrorCode::dimension_mismatch, "basis vector outside the current space");
  if (rank(Matrix::from_rows(basis)) != k) throw Error(ErrorCode::dependent_basis, "F0 basis is dependent");

  const Vector zero(k, 0.0);
  const double xi0 = xi(zero).value;
  if (std::abs(xi0 - 1.0) > 1e-9) throw Error(ErrorCode::unnormalized_input, "xi(0) = ||v|| must be 1");

  auto embed = [&](std::span<const double> s) {
    Vector x(d, 0.0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < d; ++j) x[j] += s[i] * basis[i][j];
    return x;
  };
  for (const auto& s : sphere_net(*coeff, 8)) {
    const double got = e->norm(embed(s));
    if (std::abs(got - 1.0) > 1e-7)
      throw Error(ErrorCode::invalid_input, "basis does not span an isometric copy of xi's space");
  }

  const auto br = restrict_to_ball(*coeff, R, xi);
  std::vector<Vector> mapped;
  for (const auto& s : br.points) mapped.push_back(embed(s));
  ConvexKatetovEnvelope env(e, std::move(mapped), br.values);
  auto ep = aells::adjoin({e, {env}});

  ExtensionResult res{ep, unit_vector(d + 1, d), env};
  res.bound = 2.0 / (R - 1.0);
  for (const auto& dir : sphere_net(*coeff, net.per_pair))
    for (double rho : net.radii)
      for (double t : net.ts) {
        const Vector x = scale(dir, rho);
        const Vector y = scale(x, -1.0 / t);
        const double truth = std::abs(t) * xi(y).value;  // ||x + t v|| = |t| ||y - v||
        Vector z = pad(embed(x), d + 1);
        z[d] = t;
        const double got = ep->norm(z);
        const double eps = std::abs(got - truth) / truth;
        res.epsilon = std::max(res.epsilon, eps);
        if (coeff->norm(y) <= R * (1.0 + 1e-12)) res.epsilon_inside = std::max(res.epsilon_inside, eps);
        ++res.net_points;
      }
  return res;
}

PerturbationConstants perturbation_constants(const SpacePtr& f1, const std::vector<Vector>& basis, const Vector& v,
                                             std::size_t samples) {
  const std::size_t k = basis.size(), d = f1->dim();
  if (k == 0) throw Error(ErrorCode::invalid_input, "empty F0 basis");
  for (const auto& b : basis)
    if (b.size() != d) throw Error(ErrorCode::dimension_mismatch, "basis vector outside the space");
  space::check_dim(*f1, v, "v");
  std::vector<Vector> all = basis;
  all.push_back(v);
  if (rank(Matrix::from_rows(all)) != k + 1) throw Error(ErrorCode::dependent_basis, "basis together with v is dependent");
  for (const auto& x : all)
    if (std::abs(f1->norm(x) - 1.0) > 1e-9) throw Error(ErrorCode::unnormalized_input, "basis vectors and v need norm 1");

  auto combo = [&](std::span<const double> s, double tau) {
    Vector x = scale(v, tau);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < d; ++j) x[j] += s[i] * basis[i][j];
    return x;
  };

  PerturbationConstants pc;
  std::shared_ptr<const space::PolyNormedSpace> poly;
  if (const auto* p = dynamic_cast<const space::PolyNormedSpace*>(f1.get()))
    poly = std::make_shared<space::PolyNormedSpace>(*p);

  if (poly) {
    // C: max ||x|| over {(s, tau) : ||x + tau v|| <= 1, tau >= 0}, attained at a vertex.
    std::vector<polytope::HalfSpace> hc, hp;
    for (const auto& g : poly->generators()) {
      Vector a(k + 1), ap(k);
      for (std::size_t i = 0; i < k; ++i) a[i] = ap[i] = dot(g, basis[i]);
      a[k] = dot(g, v);
      hc.push_back({a, 1.0});
      hp.push_back({ap, 1.0});
    }
    Vector neg(k + 1, 0.0);
    neg[k] = -1.0;
    hc.push_back({neg, 0.0});
    for (const auto& vt : polytope::vertices(hc, k + 1))
      pc.c = std::max(pc.c, f1->norm(combo(std::span<const double>(vt.data(), k), 0.0)));
    for (const auto& vt : polytope::vertices(hp, k)) pc.c_prime = std::max(pc.c_prime, norm_l1(vt));
    return pc;
  }

  // Oracle spaces: sampled lower bounds.
  pc.lower_bound = true;
  std::mt19937_64 rng(0xc0c0);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(-3.0, 3.0);
  for (std::size_t i = 0; i < k; ++i) {
    pc.c = std::max(pc.c, 1.0 / f1->norm(combo(unit_vector(k, i), 1.0)));
    pc.c_prime = 1.0;
  }
  for (std::size_t s = 0; s < samples; ++s) {
    Vector t(k);
    for (auto& ti : t) ti = nd(rng);
    const double scale_ = std::exp(ud(rng));
    const Vector ts = scale(t, scale_);
    const double nx = f1->norm(combo(ts, 0.0));
    pc.c = std::max(pc.c, nx / f1->norm(combo(ts, 1.0)));
    pc.c_prime = std::max(pc.c_prime, norm_l1(t) / f1->norm(combo(t, 0.0)));
  }
  return pc;
}

double epsilon_isometry_check(const Matrix& map, const space::NormedSpace& domain, const space::NormedSpace& codomain,
                              std::size_t per_pair) {
  if (map.cols() != domain.dim() || map.rows() != codomain.dim())
    throw Error(ErrorCode::dimension_mismatch, "map shape does not match domain and codomain");
  double eps = 0.0;
  for (const auto& x : sphere_net(domain, per_pair)) {
    const double r = codomain.norm(map.apply(x));  // ||x|| = 1
    eps = std::max(eps, std::abs(r - 1.0));
  }
  return eps;
}

ExtensionInstance random_extension_instance(std::mt19937_64& rng, std::size_t k, std::size_t extra_functionals) {
  if (k == 0 || k > 3) throw Error(ErrorCode::invalid_params, "instance dimension k must be 1..3");
  const std::size_t d = k + 1;
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.5, 1.5);

  std::vector<Vector> gens;
  for (std::size_t i = 0; i < d; ++i) gens.push_back(unit_vector(d, i));
  for (std::size_t q = 0; q < k + 2; ++q) {
    Vector g(d);
    for (auto& gi : g) gi = nd(rng);
    gens.push_back(scale(g, ud(rng) / norm_linf(g)));
  }
  auto f1 = space::make_standard(space::StandardKind::polytope, d, std::move(gens), true);

  ExtensionInstance inst{f1, {}, {}, nullptr, Matrix(), ConvexKatetovEnvelope(f1, {Vector(d, 0.0)}, {0.0})};
  for (std::size_t i = 0; i < k; ++i) {
    const Vector e = unit_vector(d, i);
    inst.basis.push_back(scale(e, 1.0 / f1->norm(e)));
  }
  inst.v = scale(unit_vector(d, k), 1.0 / f1->norm(unit_vector(d, k)));
  auto f0 = space::subspace_pullback(*f1, inst.basis);
  inst.f0 = f0;

  // psi: one functional per +- pair of extreme points of F0's dual ball,
  // plus a few extra functionals of dual norm < 1.
  std::vector<Vector> rows;
  for (const auto& g : polytope::dual_ball_vertices(f0->dual_ball())) {
    bool dup = std::any_of(rows.begin(), rows.end(), [&](const Vector& r) {
      double a = 0.0, b = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        a = std::max(a, std::abs(r[i] - g[i]));
        b = std::max(b, std::abs(r[i] + g[i]));
      }
      return std::min(a, b) <= 1e-9;
    });
    if (!dup) rows.push_back(g);
  }
  std::uniform_real_distribution<double> shrink(0.3, 0.95);
  for (std::size_t q = 0; q < extra_functionals; ++q) {
    Vector h(k);
    for (auto& hi : h) hi = nd(rng);
    rows.push_back(scale(h, shrink(rng) / space::dual_norm(*f0, h)));
  }
  inst.psi = Matrix::from_rows(rows);

  // xi(s) = ||sum s_i b_i - v||: generators are the vertices of its epigraph.
  std::vector<polytope::HalfSpace> h;
  for (const auto& g : f1->generators()) {
    Vector a(d);
    for (std::size_t i = 0; i < k; ++i) a[i] = dot(g, inst.basis[i]);
    a[k] = -1.0;
    h.push_back({a, dot(g, inst.v)});
  }
  std::vector<Vector> pts;
  Vector vals;
  for (const auto& vt : polytope::vertices(h, d)) {
    pts.emplace_back(vt.begin(), vt.begin() + static_cast<std::ptrdiff_t>(k));
    vals.push_back(vt[k]);
  }
  inst.xi = ConvexKatetovEnvelope(f0, std::move(pts), std::move(vals));
  return inst;
}

DeltaPipelineResult delta_pipeline(const ExtensionInstance& inst, double eps, std::mt19937_64& rng,
                                   std::size_t per_pair) {
  if (!(eps > 0.0)) throw Error(ErrorCode::invalid_params, "epsilon must be positive");
  const std::size_t k = inst.basis.size(), d = inst.f1->dim(), m = inst.psi.rows();
  auto e = space::make_standard(space::StandardKind::linf, m);

  DeltaPipelineResult res;
  res.epsilon = eps;
  res.constants = perturbation_constants(inst.f1, inst.basis, inst.v);
  res.delta = res.constants.delta(eps);

  std::uniform_real_distribution<double> ud(-res.delta, res.delta);
  std::vector<Vector> w;
  for (std::size_t i = 0; i < k; ++i) {
    Vector wi = inst.psi.column(i);
    for (auto& x : wi) x += ud(rng);
    w.push_back(std::move(wi));
    res.noise = std::max(res.noise, e->norm(sub(w.back(), inst.psi.column(i))));
  }
  if (rank(Matrix::from_rows(w)) != k) throw Error(ErrorCode::dependent_basis, "perturbed basis is dependent");

  res.henson_r = amalgam::henson_distance(e, w, inst.f1, inst.basis).value;
  auto glued = amalgam::tuple_amalgam_space({e, inst.f1, w, inst.basis, res.henson_r});

  // xi(s) = ||(sum s_i w_i, 0) - (0, v)|| in the amalgam.
  std::vector<Vector> cols;
  for (const auto& wi : w) cols.push_back(pad(wi, m + d));
  Vector z0(m + d, 0.0);
  for (std::size_t j = 0; j < d; ++j) z0[m + j] = -inst.v[j];
  auto coeff = space::subspace_pullback(SpacePtr(e), w);
  NetOptions none;
  none.radii.clear();
  auto ext = gurarij_extension_test(e, w, coeff, affine_norm_oracle(glued, cols, z0), 1.0 + 2.0 / res.delta, none);
  res.extended = ext.space;

  // F1 coordinates -> E': solve for the images of the unit vectors from
  // b_i -> w_i, v -> u.
  Matrix src(d, d), dst(m + 1, d);
  for (std::size_t j = 0; j < d; ++j) {
    const Vector& col = j < k ? inst.basis[j] : inst.v;
    for (std::size_t r = 0; r < d; ++r) src(r, j) = col[r];
    if (j < k)
      for (std::size_t r = 0; r < m; ++r) dst(r, j) = w[j][r];
    else
      dst(m, j) = 1.0;
  }
  Matrix inv(d, d);
  for (std::size_t c = 0; c < d; ++c) {
    auto col = solve_square(src, unit_vector(d, c));
    if (!col) throw Error(ErrorCode::dependent_basis, "basis together with v is dependent");
    for (std::size_t r = 0; r < d; ++r) inv(r, c) = (*col)[r];
  }
  res.map = dst * inv;
  res.epsilon_achieved = epsilon_isometry_check(res.map, *inst.f1, *res.extended, per_pair);
  return res;
}

}  // namespace gurarij::tower
