#include "gurarij/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "gurarij/aells.hpp"
#include "gurarij/amalgam.hpp"
#include "gurarij/error.hpp"
#include "gurarij/io.hpp"
#include "gurarij/katetov.hpp"
#include "gurarij/tower.hpp"
#include "gurarij/universal.hpp"

namespace gurarij::acceptance {

using json = nlohmann::json;
using katetov::ConvexKatetovEnvelope;
using space::SpacePtr;

namespace {

using Clock = std::chrono::steady_clock;

SpacePtr l1(std::size_t d) { return space::make_standard(space::StandardKind::l1, d); }
SpacePtr linf(std::size_t d) { return space::make_standard(space::StandardKind::linf, d); }

// l1, l_inf, or a random symmetric polytope norm.
SpacePtr random_space(std::mt19937_64& rng, std::size_t d, int kind) {
  if (kind % 3 == 0) return l1(d);
  if (kind % 3 == 1) return linf(d);
  std::normal_distribution<double> nd;
  std::vector<Vector> gens;
  for (std::size_t i = 0; i < d; ++i) gens.push_back(unit_vector(d, i));
  for (std::size_t q = 0; q < d + 1; ++q) {
    Vector g(d);
    for (auto& x : g) x = nd(rng);
    gens.push_back(scale(g, 1.0 / norm_linf(g)));
  }
  return space::make_standard(space::StandardKind::polytope, d, std::move(gens));
}

ConvexKatetovEnvelope random_ck(std::mt19937_64& rng, const SpacePtr& s, std::size_t n, double R = 2.0) {
  auto pts = katetov::sample_ball(*s, n, R, rng);
  return katetov::convexify(katetov::sample_katetov(s, pts, R, rng));
}

Vector rvec(std::mt19937_64& rng, std::size_t d, double r = 2.0) {
  std::uniform_real_distribution<double> u(-r, r);
  Vector v(d);
  for (auto& x : v) x = u(rng);
  return v;
}

const char* const kNames[] = {
    "one-point seminorm triangle inequality",
    "convexification is Katetov and order-independent",
    "two-point amalgam range",
    "Henson distance and tuple amalgam",
    "Arens-Eells duality and relative isometric embedding",
    "one-point extension bound 2/(R-1)",
    "delta-perturbation pipeline",
    "Teleman embedding and g-embedding",
    "deterministic manifests",
    "full run within 20 minutes",
};

CriterionResult named(int id) {
  CriterionResult r;
  r.id = id;
  r.name = kNames[id - 1];
  return r;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// --- 1: triangle inequality of the one-point seminorm, four cases -----------

CriterionResult one_point_triangle(std::uint64_t seed) {
  auto r = named(1);
  r.time_limit = 60.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.2, 2.0), coin(0.0, 1.0);
  std::array<int, 4> hits{};
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t d = 1 + i % 3;
    auto s = random_space(rng, d, i / 4);
    auto ck = random_ck(rng, s, 2 + i % 4);
    const int c = i % 4;
    double alpha = 0.0, beta = 0.0;
    const double sgn = coin(rng) < 0.5 ? -1.0 : 1.0;
    if (c == 1) {  // same sign, both nonzero
      alpha = sgn * mag(rng);
      beta = sgn * mag(rng);
    } else if (c == 2) {  // alpha = -beta
      alpha = sgn * mag(rng);
      beta = -alpha;
    } else if (c == 3) {  // distinct signs and magnitudes, or exactly one zero
      if (coin(rng) < 0.5) {
        alpha = coin(rng) < 0.5 ? sgn * mag(rng) : 0.0;
        beta = alpha == 0.0 ? -sgn * mag(rng) : 0.0;
      } else {
        alpha = sgn * mag(rng);
        do beta = -sgn * mag(rng);
        while (std::abs(std::abs(beta) - std::abs(alpha)) < 1e-3);
      }
    }
    const Vector a = rvec(rng, d), b = rvec(rng, d);
    const double lhs = katetov::one_point_norm(ck, alpha + beta, add(a, b));
    const double rhs = katetov::one_point_norm(ck, alpha, a) + katetov::one_point_norm(ck, beta, b);
    worst = std::max(worst, lhs - rhs);
    ++hits[c];
  }
  r.pass = worst <= 1e-8 && *std::min_element(hits.begin(), hits.end()) >= 100;
  r.metrics = {{"max_excess", worst}, {"case_hits", hits}};
  r.detail = "max excess " + fmt(worst) + ", cases hit " + std::to_string(hits[0]) + "/" + std::to_string(hits[1]) +
             "/" + std::to_string(hits[2]) + "/" + std::to_string(hits[3]);
  return r;
}

// --- 2: convexified envelopes are Katetov; extension commutes ---------------

CriterionResult convexification(std::uint64_t seed) {
  auto r = named(2);
  r.time_limit = 120.0;
  std::mt19937_64 rng(seed);
  double worst_k = 0.0, worst_c = 0.0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t d = 1 + i % 3;
    auto s = random_space(rng, d, i);
    auto ck = random_ck(rng, s, 1 + i % 6);
    for (int k = 0; k < 10; ++k) {
      const Vector x = rvec(rng, d, 3.0), y = rvec(rng, d, 3.0);
      const double fx = ck(x), fy = ck(y), dxy = s->norm(sub(x, y));
      worst_k = std::max({worst_k, fx - fy - dxy, fy - fx - dxy, dxy - fx - fy});
    }
  }
  for (int i = 0; i < 100; ++i) {
    const std::size_t d = 1 + i % 3;
    auto s = random_space(rng, d, i + 1);
    auto pts = katetov::sample_ball(*s, 2 + i % 5, 2.0, rng);
    auto fk = katetov::sample_katetov(s, pts, 2.0, rng);
    auto ck = katetov::convexify(fk);
    auto bigger = fk;
    for (auto& y : katetov::sample_ball(*s, 3, 3.0, rng)) {
      bigger.values.push_back(katetov::extend_min_plus(fk, y));
      bigger.support.push_back(y);
    }
    auto ck2 = katetov::convexify(bigger);
    for (int k = 0; k < 50; ++k) {
      const Vector x = rvec(rng, d, 3.0);
      worst_c = std::max(worst_c, std::abs(ck2(x) - ck(x)));
    }
  }
  r.pass = worst_k <= 1e-8 && worst_c <= 1e-8;
  r.metrics = {{"katetov_excess", worst_k}, {"commutation_gap", worst_c}};
  r.detail = "Katetov excess " + fmt(worst_k) + " (200 envelopes), commutation gap " + fmt(worst_c) + " (100 instances)";
  return r;
}

// --- 3: two-point amalgam range ---------------------------------------------

CriterionResult two_point_range(std::uint64_t seed) {
  auto r = named(3);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double order = 0.0, restr = 0.0, dist = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t d = 1 + i % 3;
    auto s = random_space(rng, d, i);
    auto ck0 = random_ck(rng, s, 2 + i % 3), ck1 = random_ck(rng, s, 2 + (i + 1) % 3);
    auto b = amalgam::amalgam_bounds(ck0, ck1);
    order = std::max(order, b.r0 - b.r1);
    for (double rr : {b.r0, 0.5 * (b.r0 + b.r1), b.r1}) {
      auto tpe = amalgam::make_two_point(ck0, ck1, rr);
      dist = std::max(dist, std::abs(amalgam::two_point_norm(tpe, Vector(d, 0.0), 1.0, -1.0) - rr));
      const Vector a = rvec(rng, d);
      const double al = u(rng);
      restr = std::max(restr, std::abs(amalgam::two_point_norm(tpe, a, al, 0.0) -
                                       katetov::one_point_norm(ck0, al, scale(a, -1.0))));
      restr = std::max(restr, std::abs(amalgam::two_point_norm(tpe, a, 0.0, al) -
                                       katetov::one_point_norm(ck1, al, scale(a, -1.0))));
    }
  }
  r.pass = order <= 1e-9 && restr <= 1e-8 && dist <= 1e-8;
  r.metrics = {{"max_r0_minus_r1", order}, {"restriction_gap", restr}, {"distance_gap", dist}};
  r.detail = "r0 - r1 <= " + fmt(order) + ", restriction gap " + fmt(restr) + ", |x0-x1| gap " + fmt(dist);
  return r;
}

// --- 4: Henson distance and tuple amalgam -----------------------------------

// sup over a fine walk of the l1 sphere in two coefficients
double grid_henson_2(const SpacePtr& e, const std::vector<Vector>& xs, const SpacePtr& f, const std::vector<Vector>& ys) {
  double best = 0.0;
  const int n = 4000;
  for (int k = 0; k < n; ++k) {
    const double th = 4.0 * k / n;
    double s0, s1;
    if (th < 1) s0 = 1 - th, s1 = th;
    else if (th < 2) s0 = 1 - th, s1 = 2 - th;
    else if (th < 3) s0 = th - 3, s1 = 2 - th;
    else s0 = th - 3, s1 = th - 4;
    best = std::max(best, std::abs(e->norm(add(scale(xs[0], s0), scale(xs[1], s1))) -
                                   f->norm(add(scale(ys[0], s0), scale(ys[1], s1)))));
  }
  return best;
}

CriterionResult henson(std::uint64_t seed) {
  auto r = named(4);
  std::mt19937_64 rng(seed);
  bool exact_zero = true;
  for (int i = 0; i < 5; ++i) {
    auto e = random_space(rng, 2, i);
    std::vector<Vector> xs = {rvec(rng, 2), rvec(rng, 2)};
    auto ex = amalgam::henson_distance_exact(e, xs, e, xs);
    exact_zero = exact_zero && ex.is_zero && ex.result.value == 0.0;
  }
  const std::vector<Vector> basis = {{1.0, 0.0}, {0.0, 1.0}};
  const double pair = amalgam::henson_distance(l1(2), basis, linf(2), basis).value;
  const double grid = grid_henson_2(l1(2), basis, linf(2), basis);
  const double grid_gap = std::abs(pair - grid);

  double restr = 0.0, glue = -1e300, deficit = 1e300;
  for (int i = 0; i < 10; ++i) {
    auto e = random_space(rng, 2, i), f = random_space(rng, 3, i + 1);
    std::vector<Vector> xs = {rvec(rng, 2), rvec(rng, 2)}, ys = {rvec(rng, 3), rvec(rng, 3)};
    auto h = amalgam::henson_distance(e, xs, f, ys);
    amalgam::TupleAmalgam ta{e, f, xs, ys, h.value};
    for (int k = 0; k < 10; ++k) {
      const Vector ze = rvec(rng, 2), zf = rvec(rng, 3);
      restr = std::max(restr, std::abs(amalgam::tuple_amalgam_norm(ta, ze, Vector(3, 0.0)) - e->norm(ze)));
      restr = std::max(restr, std::abs(amalgam::tuple_amalgam_norm(ta, Vector(2, 0.0), zf) - f->norm(zf)));
    }
    for (std::size_t j = 0; j < 2; ++j)
      glue = std::max(glue, amalgam::tuple_amalgam_norm(ta, xs[j], scale(ys[j], -1.0)) - h.value);
    amalgam::TupleAmalgam tight{e, f, xs, ys, h.value - 0.01};
    Vector ze(2, 0.0), zf(3, 0.0);
    for (std::size_t j = 0; j < 2; ++j) {
      ze = add(ze, scale(xs[j], h.direction[j]));
      zf = add(zf, scale(ys[j], h.direction[j]));
    }
    const double def = h.e_side ? e->norm(ze) - amalgam::tuple_amalgam_norm(tight, ze, Vector(3, 0.0))
                                : f->norm(zf) - amalgam::tuple_amalgam_norm(tight, Vector(2, 0.0), zf);
    deficit = std::min(deficit, def);
  }
  r.pass = exact_zero && grid_gap <= 1e-6 && restr <= 1e-8 && glue <= 1e-8 && deficit > 1e-4;
  r.metrics = {{"exact_zero", exact_zero}, {"l1_linf_value", pair}, {"grid_value", grid}, {"restriction_gap", restr},
               {"max_glue_excess", glue}, {"min_deficit_at_r_minus_0.01", deficit}};
  r.detail = std::string("self-distance exactly 0: ") + (exact_zero ? "yes" : "no") + ", l1/linf " + fmt(pair) +
             " vs grid " + fmt(grid) + ", restriction gap " + fmt(restr) + ", glue excess " + fmt(glue) +
             ", min deficit " + fmt(deficit);
  return r;
}

// --- 5: Arens-Eells duality and the relative embedding ----------------------

CriterionResult arens_eells(std::uint64_t seed) {
  auto r = named(5);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0), w(-1.0, 1.0);
  double gap = 0.0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 3 + i % 6;
    std::vector<Vector> pts(n);
    for (auto& p : pts) p = {u(rng), u(rng)};
    aells::PointedFiniteMetric m;
    m.d.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a) {
      m.labels.push_back("x" + std::to_string(a));
      for (std::size_t b = 0; b < n; ++b) m.d[a][b] = norm_l1(sub(pts[a], pts[b]));
    }
    aells::Molecule mol;
    double sum = 0.0;
    for (std::size_t a = 1; a < n; ++a) {
      mol[m.labels[a]] = w(rng);
      sum += mol[m.labels[a]];
    }
    mol[m.labels[0]] = -sum;
    auto res = aells::ae_norm(m, mol);
    gap = std::max(gap, std::abs(res.value - res.dual_value));
  }
  double emb = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t d = 1 + i % 3, m = 1 + i % 3;
    auto e = random_space(rng, d, i);
    aells::RelativeSpaceOverE rs{e, {}};
    for (std::size_t j = 0; j < m; ++j) rs.adjoined.push_back(random_ck(rng, e, 2 + (i + j) % 4));
    auto sp = aells::adjoin(rs);
    auto pts = katetov::sample_ball(*e, 3, 3.0, rng);
    for (std::size_t j = 0; j < m; ++j) {
      for (const auto& a : pts) {
        Vector z = scale(a, -1.0);
        z.resize(d + m, 0.0);
        z[d + j] = 1.0;
        emb = std::max(emb, std::abs(sp->norm(z) - rs.adjoined[j](a)));
      }
      for (std::size_t k = j + 1; k < m; ++k) {
        Vector z(d + m, 0.0);
        z[d + j] = 1.0;
        z[d + k] = -1.0;
        emb = std::max(emb, std::abs(sp->norm(z) - katetov::sup_distance(rs.adjoined[j], rs.adjoined[k])));
      }
    }
    for (const auto& a : pts)
      for (const auto& b : pts) {
        Vector z = sub(a, b);
        const double ne = e->norm(z);
        z.resize(d + m, 0.0);
        emb = std::max(emb, std::abs(sp->norm(z) - ne));
      }
  }
  r.pass = gap <= 1e-9 && emb <= 1e-8;
  r.metrics = {{"primal_dual_gap", gap}, {"embedding_defect", emb}};
  r.detail = "primal-dual gap " + fmt(gap) + " (500 molecules), embedding defect " + fmt(emb) + " (100 spaces)";
  return r;
}

// --- 6: quantitative one-point extension ------------------------------------

CriterionResult extension_bound(std::uint64_t seed) {
  auto r = named(6);
  r.time_limit = 600.0;
  std::mt19937_64 rng(seed);
  bool ok = true;
  json per_r = json::array();
  std::ostringstream det;
  for (double R : {3.0, 5.0, 11.0}) {
    double worst = 0.0, inside = 0.0;
    for (int i = 0; i < 20; ++i) {
      const std::size_t k = 1 + i % 3;
      auto inst = tower::random_extension_instance(rng, k);
      const std::size_t m = inst.psi.rows();
      SpacePtr e = linf(m);
      std::size_t dim = m;
      if (i % 4 == 3) {  // a one-round tower over l_inf^m
        tower::BuildParams p;
        p.start = e;
        p.envelopes_per_round = 2;
        p.support_size = 3;
        p.seed = seed + static_cast<std::uint64_t>(i);
        e = tower::build(p).top();
        dim = e->dim();
      }
      std::vector<Vector> basis;
      for (std::size_t j = 0; j < k; ++j) {
        Vector b = inst.psi.column(j);
        b.resize(dim, 0.0);
        basis.push_back(std::move(b));
      }
      auto res = tower::gurarij_extension_test(e, basis, inst.xi, R);
      worst = std::max(worst, res.epsilon);
      inside = std::max(inside, res.epsilon_inside);
    }
    const double bound = 2.0 / (R - 1.0);
    ok = ok && worst <= bound + 1e-6 && inside <= 1e-6;
    per_r.push_back({{"R", R}, {"bound", bound}, {"max_epsilon", worst}, {"max_epsilon_inside", inside}});
    det << "R=" << R << ": eps " << fmt(worst) << " <= " << fmt(bound) << ", inside " << fmt(inside) << "; ";
  }
  r.pass = ok;
  r.metrics = {{"radii", per_r}};
  r.detail = det.str();
  return r;
}

// --- 7: delta-perturbation pipeline -----------------------------------------

CriterionResult delta_pipeline(std::uint64_t seed) {
  auto r = named(7);
  std::mt19937_64 rng(seed);
  bool ok = true;
  json per_eps = json::array();
  std::ostringstream det;
  for (double eps : {0.5, 0.1}) {
    double worst = 0.0, min_delta = 1e300;
    for (int i = 0; i < 10; ++i) {
      auto inst = tower::random_extension_instance(rng, 1 + i % 2);
      auto res = tower::delta_pipeline(inst, eps, rng);
      worst = std::max(worst, res.epsilon_achieved);
      min_delta = std::min(min_delta, res.delta);
    }
    ok = ok && worst <= eps;
    per_eps.push_back({{"epsilon", eps}, {"max_achieved", worst}, {"min_delta", min_delta}});
    det << "eps=" << eps << ": achieved " << fmt(worst) << " (delta >= " << fmt(min_delta) << "); ";
  }
  r.pass = ok;
  r.metrics = {{"epsilons", per_eps}};
  r.detail = det.str();
  return r;
}

// --- 8: universality shadow -------------------------------------------------

CriterionResult universality(std::uint64_t seed) {
  auto r = named(8);
  bool ok = true;
  json groups = json::array();
  std::ostringstream det;
  const std::vector<std::pair<std::string, universal::FiniteGroupPresentation>> gs = {
      {"Z2", universal::cyclic_group(2)}, {"Z5", universal::cyclic_group(5, 0.3)}, {"S3", universal::symmetric_group_3(0.5)}};
  for (const auto& [name, g] : gs) {
    auto t = universal::teleman_embed(g);
    auto rep = universal::check_teleman(g, t);
    ok = ok && rep.pass(1e-9);
    groups.push_back({{"group", name}, {"pass", rep.pass(1e-9)}, {"isometry_defect", rep.isometry_defect},
                      {"orbit_defect", rep.orbit_defect}});
    det << name << (rep.pass(1e-9) ? " ok" : " FAIL") << "; ";
  }
  tower::BuildParams p;
  p.start = l1(2);
  p.envelopes_per_round = 2;
  p.support_size = 3;
  p.seed = seed;
  p.symmetry = {Matrix::from_rows({{-1.0, 0.0}, {0.0, 1.0}})};
  auto st = tower::build(p);
  auto rep = universal::verify_g_embedding(
      st, {{Matrix::identity(2), st.chain[0]}, {Matrix::from_rows({{-1.0, 0.0}, {0.0, 1.0}}), st.chain[0]}});
  ok = ok && rep.pass(1e-8);
  det << "Z2 sign flip on a symmetrized round (" << st.log[0].size() << " adjoined): "
      << (rep.pass(1e-8) ? "ok" : "FAIL") << ", isometry defect " << fmt(rep.isometry_defect);
  r.pass = ok;
  r.metrics = {{"teleman", groups}, {"g_embedding_pass", rep.pass(1e-8)}, {"g_embedding_defect", rep.isometry_defect},
               {"failures", rep.failures}};
  r.detail = det.str();
  return r;
}

// --- 9: determinism ---------------------------------------------------------

CriterionResult determinism(std::uint64_t) {
  auto r = named(9);
  tower::BuildParams p;
  p.start = l1(2);
  p.rounds = 2;
  p.envelopes_per_round = 2;
  p.support_size = 3;
  p.seed = 7;
  const auto a = io::dump(io::manifest_to_json(tower::build(p), p));
  const auto b = io::dump(io::manifest_to_json(tower::build(p), p));
  r.pass = a == b;
  r.metrics = {{"bytes", a.size()}, {"identical", a == b}};
  r.detail = "two builds with seed 7: " + std::string(a == b ? "byte-identical" : "DIFFERENT") + " (" +
             std::to_string(a.size()) + " bytes)";
  return r;
}

}  // namespace

std::vector<CriterionResult> run(const Options& opts, const Callback& on_result) {
  using Fn = CriterionResult (*)(std::uint64_t);
  const std::vector<Fn> fns = {one_point_triangle, convexification, two_point_range, henson, arens_eells,
                               extension_bound,    delta_pipeline,  universality,    determinism};
  auto wanted = [&](int id) { return opts.only.empty() || std::count(opts.only.begin(), opts.only.end(), id) > 0; };
  std::vector<CriterionResult> out;
  const auto start = Clock::now();
  for (std::size_t i = 0; i < fns.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!wanted(id)) continue;
    const auto t0 = Clock::now();
    CriterionResult r;
    try {
      r = fns[i](opts.seed + static_cast<std::uint64_t>(id));
    } catch (const Error& e) {
      r = named(id);
      r.pass = false;
      r.detail = std::string("error ") + std::string(to_string(e.code())) + ": " + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (r.time_limit > 0.0 && r.seconds > r.time_limit) {
      r.pass = false;
      r.detail += " [over time limit " + fmt(r.time_limit) + " s]";
    }
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  if (wanted(10)) {
    auto r = named(10);
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    r.time_limit = 1200.0;
    const bool complete = opts.only.empty();
    r.pass = complete && r.seconds <= r.time_limit;
    r.detail = complete ? "total " + fmt(r.seconds) + " s" : "needs the full suite";
    r.metrics = {{"total_seconds", r.seconds}};
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.1f s): ", r.seconds);
  return std::string(r.pass ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " + r.name + buf + r.detail;
}

}  // namespace gurarij::acceptance
