#include "gurarij/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <omp.h>

#include "gurarij/error.hpp"
#include "gurarij/optim.hpp"

namespace gurarij::polytope {

namespace {

std::size_t choose(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  long double r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / i;
  if (r > 1e18L) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(std::llround(r));
}

// Lexicographic rank -> combination (combinatorial number system).
std::vector<std::size_t> unrank(std::size_t idx, std::size_t n, std::size_t k) {
  std::vector<std::size_t> c(k);
  std::size_t start = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t v = start;; ++v) {
      const std::size_t block = choose(n - v - 1, k - i - 1);
      if (idx < block) {
        c[i] = v;
        start = v + 1;
        break;
      }
      idx -= block;
    }
  }
  return c;
}

bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t k = c.size();
  for (std::size_t i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

struct Normalized {
  std::vector<HalfSpace> rows;
};

Normalized normalize(const std::vector<HalfSpace>& h, std::size_t dim) {
  Normalized out;
  for (const auto& r : h) {
    if (r.a.size() != dim) throw Error(ErrorCode::dimension_mismatch, "halfspace arity");
    double n = 0.0;
    for (double x : r.a) n = std::max(n, std::abs(x));
    if (n == 0.0) {
      if (r.b < 0.0) out.rows.push_back({Vector(dim, 0.0), -1.0});  // infeasible marker
      continue;
    }
    out.rows.push_back({scale(r.a, 1.0 / n), r.b / n});
  }
  return out;
}

bool feasible(const std::vector<HalfSpace>& rows, const Vector& x, double tol) {
  double scale_x = 1.0;
  for (double v : x) scale_x = std::max(scale_x, std::abs(v));
  for (const auto& r : rows)
    if (dot(r.a, x) > r.b + tol * scale_x) return false;
  return true;
}

// Candidate from one subset, or empty.
bool try_subset(const std::vector<HalfSpace>& rows, const std::vector<std::size_t>& c, std::size_t dim,
                double tol, Vector& out) {
  Matrix m(dim, dim);
  Vector rhs(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) m(i, j) = rows[c[i]].a[j];
    rhs[i] = rows[c[i]].b;
  }
  auto x = solve_square(std::move(m), std::move(rhs), 1e-9);
  if (!x || !feasible(rows, *x, tol)) return false;
  out = std::move(*x);
  return true;
}

std::vector<Vector> dedupe(std::vector<Vector> pts, double tol) {
  std::sort(pts.begin(), pts.end());
  std::vector<Vector> kept;
  for (auto& p : pts) {
    bool dup = false;
    for (const auto& k : kept) {
      double d = 0.0, s = 1.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        d = std::max(d, std::abs(p[i] - k[i]));
        s = std::max(s, std::abs(k[i]));
      }
      if (d <= tol * s) {
        dup = true;
        break;
      }
    }
    if (!dup) {
      for (double& v : p)
        if (std::abs(v) < 1e-15) v = 0.0;
      kept.push_back(std::move(p));
    }
  }
  return kept;
}

std::size_t subset_count(std::size_t n, std::size_t dim, const EnumerationOptions& opt) {
  const std::size_t total = choose(n, dim);
  if (total > opt.max_subsets)
    throw Error(ErrorCode::invalid_input, "vertex enumeration over " + std::to_string(n) + " rows in dimension " +
                                              std::to_string(dim) + " exceeds the subset budget");
  return total;
}

}  // namespace

std::vector<Vector> vertices_serial(const std::vector<HalfSpace>& h, std::size_t dim,
                                    const EnumerationOptions& opt) {
  const auto rows = normalize(h, dim).rows;
  if (dim == 0 || rows.size() < dim) return {};
  subset_count(rows.size(), dim, opt);
  std::vector<Vector> cand;
  std::vector<std::size_t> c(dim);
  std::iota(c.begin(), c.end(), 0);
  Vector x;
  do {
    if (try_subset(rows, c, dim, opt.tol, x)) cand.push_back(x);
  } while (next_combination(c, rows.size()));
  return dedupe(std::move(cand), 1e-7);
}

std::vector<Vector> vertices(const std::vector<HalfSpace>& h, std::size_t dim, const EnumerationOptions& opt) {
  const auto rows = normalize(h, dim).rows;
  if (dim == 0 || rows.size() < dim) return {};
  const std::size_t total = subset_count(rows.size(), dim, opt);
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(total, 256));
  std::vector<std::vector<Vector>> found(chunks);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t ch = 0; ch < chunks; ++ch) {
    const std::size_t lo = total * ch / chunks, hi = total * (ch + 1) / chunks;
    if (lo == hi) continue;
    auto c = unrank(lo, rows.size(), dim);
    Vector x;
    for (std::size_t i = lo; i < hi; ++i) {
      if (try_subset(rows, c, dim, opt.tol, x)) found[ch].push_back(x);
      next_combination(c, rows.size());
    }
  }
  std::vector<Vector> cand;
  for (auto& f : found)
    for (auto& x : f) cand.push_back(std::move(x));
  return dedupe(std::move(cand), 1e-7);
}

Vector batch_norms_serial(const std::vector<Vector>& generators, const std::vector<Vector>& points) {
  Vector out(points.size(), 0.0);
  for (std::size_t p = 0; p < points.size(); ++p)
    for (const auto& g : generators) out[p] = std::max(out[p], dot(g, points[p]));
  return out;
}

Vector batch_norms(const std::vector<Vector>& generators, const std::vector<Vector>& points) {
  Vector out(points.size(), 0.0);
  const long n = static_cast<long>(points.size());
#pragma omp parallel for schedule(static)
  for (long p = 0; p < n; ++p) {
    double best = 0.0;
    for (const auto& g : generators) best = std::max(best, dot(g, points[p]));
    out[p] = best;
  }
  return out;
}

std::vector<HalfSpace> prune_redundant(const std::vector<HalfSpace>& h, std::size_t dim, double tol) {
  auto rows = normalize(h, dim).rows;
  // exact duplicates (same normal): keep the tightest
  std::vector<HalfSpace> uniq;
  for (auto& r : rows) {
    bool merged = false;
    for (auto& u : uniq) {
      double d = 0.0;
      for (std::size_t i = 0; i < dim; ++i) d = std::max(d, std::abs(u.a[i] - r.a[i]));
      if (d <= 1e-12) {
        u.b = std::min(u.b, r.b);
        merged = true;
        break;
      }
    }
    if (!merged) uniq.push_back(r);
  }
  std::vector<bool> alive(uniq.size(), true);
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    // max a_i.x over the other live rows, with row i relaxed by 1 to keep it bounded
    optim::LinearProgram lp;
    lp.objective = uniq[i].a;
    lp.sense = optim::Sense::maximize;
    for (std::size_t j = 0; j < uniq.size(); ++j) {
      if (!alive[j]) continue;
      lp.constraints.push_back({uniq[j].a, optim::Relation::less_equal, uniq[j].b + (i == j ? 1.0 : 0.0)});
    }
    optim::LPSolution s;
    try {
      s = optim::solve_lp(lp);
    } catch (const Error&) {
      continue;  // keep the row if the test itself is unreliable
    }
    if (s.status == optim::LpStatus::infeasible) return {{Vector(dim, 0.0), -1.0}};
    if (s.status == optim::LpStatus::optimal && s.objective <= uniq[i].b + tol * (1.0 + std::abs(uniq[i].b)))
      alive[i] = false;
  }
  std::vector<HalfSpace> out;
  for (std::size_t i = 0; i < uniq.size(); ++i)
    if (alive[i]) out.push_back(uniq[i]);
  return out;
}

std::vector<HalfSpace> project(std::vector<HalfSpace> h, std::size_t dim, std::size_t keep) {
  for (std::size_t n = dim; n > keep; --n) {
    const std::size_t v = n - 1;
    std::vector<HalfSpace> pos, neg, zero;
    for (auto& r : h) {
      const double c = r.a[v];
      if (std::abs(c) <= 1e-13) {
        r.a.resize(v);
        zero.push_back(std::move(r));
      } else {
        (c > 0 ? pos : neg).push_back(std::move(r));
      }
    }
    for (const auto& p : pos)
      for (const auto& q : neg) {
        const double wp = -q.a[v], wq = p.a[v];  // both positive
        HalfSpace comb{Vector(v), wp * p.b + wq * q.b};
        for (std::size_t i = 0; i < v; ++i) comb.a[i] = wp * p.a[i] + wq * q.a[i];
        zero.push_back(std::move(comb));
      }
    h = prune_redundant(zero, v);
  }
  return h;
}

std::vector<HalfSpace> ball_halfspaces(const space::DualBall& ball) {
  struct Row {
    Vector a;
    optim::Relation rel;
    double b;
  };
  const std::size_t n = ball.dim + ball.aux;
  std::vector<Row> rows;
  for (const auto& r : ball.rows) rows.push_back({r.coeffs, r.relation, r.bound});
  for (std::size_t j = 0; j < ball.aux; ++j)
    if (ball.aux_nonneg[j]) {
      Vector a(n, 0.0);
      a[ball.dim + j] = 1.0;
      rows.push_back({a, optim::Relation::greater_equal, 0.0});
    }

  // Substitute aux variables out through equality rows.
  std::vector<bool> gone(n, false);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].rel != optim::Relation::equal) continue;
    std::size_t piv = n;
    double best = 1e-12;
    for (std::size_t j = ball.dim; j < n; ++j)
      if (!gone[j] && std::abs(rows[k].a[j]) > best) {
        best = std::abs(rows[k].a[j]);
        piv = j;
      }
    if (piv == n) continue;
    const Row e = rows[k];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == k || rows[i].a[piv] == 0.0) continue;
      const double f = rows[i].a[piv] / e.a[piv];
      for (std::size_t j = 0; j < n; ++j) rows[i].a[j] -= f * e.a[j];
      rows[i].a[piv] = 0.0;
      rows[i].b -= f * e.b;
    }
    gone[piv] = true;
    rows[k].rel = optim::Relation::less_equal;
    rows[k].a.assign(n, 0.0);  // consumed
    rows[k].b = 0.0;
  }

  // Remaining variables: c coordinates then surviving aux.
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < n; ++j)
    if (j < ball.dim || !gone[j]) cols.push_back(j);
  std::vector<HalfSpace> h;
  auto push = [&](const Vector& a, double b, double sign) {
    HalfSpace hs{Vector(cols.size()), sign * b};
    bool any = false;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      hs.a[i] = sign * a[cols[i]];
      any |= hs.a[i] != 0.0;
    }
    if (any || hs.b < 0.0) h.push_back(std::move(hs));
  };
  for (const auto& r : rows) {
    switch (r.rel) {
      case optim::Relation::less_equal: push(r.a, r.b, 1.0); break;
      case optim::Relation::greater_equal: push(r.a, r.b, -1.0); break;
      case optim::Relation::equal:
        push(r.a, r.b, 1.0);
        push(r.a, r.b, -1.0);
        break;
    }
  }
  return project(prune_redundant(h, cols.size()), cols.size(), ball.dim);
}

std::vector<Vector> dual_ball_vertices(const space::DualBall& ball) {
  if (ball.dim > 4) throw Error(ErrorCode::invalid_input, "explicit extraction is limited to dimension <= 4");
  return vertices(ball_halfspaces(ball), ball.dim);
}

}  // namespace gurarij::polytope
