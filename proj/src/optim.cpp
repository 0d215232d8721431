#include "gurarij/optim.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gurarij/error.hpp"

namespace gurarij::optim {

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

// Arithmetic policy of the simplex. Doubles use absolute thresholds on an
// equilibrated tableau; rationals compare exactly.
template <class T>
struct Arith;

template <>
struct Arith<double> {
  static constexpr bool exact = false;
  static double from(double x) { return x; }
  static double to_double(double x) { return x; }
  static bool positive_pivot(double x) { return x > 1e-10; }
  static bool negative_cost(double x) { return x < -1e-10; }
  static bool nonzero(double x) { return std::abs(x) > 1e-10; }
  static bool is_zero_ratio(double x) { return x <= 1e-12; }
  static double abs(double x) { return std::abs(x); }
};

template <>
struct Arith<mpq_class> {
  static constexpr bool exact = true;
  static mpq_class from(double x) { return mpq_class(x); }
  static double to_double(const mpq_class& x) { return x.get_d(); }
  static bool positive_pivot(const mpq_class& x) { return sgn(x) > 0; }
  static bool negative_cost(const mpq_class& x) { return sgn(x) < 0; }
  static bool nonzero(const mpq_class& x) { return sgn(x) != 0; }
  static bool is_zero_ratio(const mpq_class& x) { return sgn(x) == 0; }
  static mpq_class abs(const mpq_class& x) { return ::abs(x); }
};

void validate(const LinearProgram& p) {
  const std::size_t n = p.objective.size();
  for (double c : p.objective)
    if (!std::isfinite(c)) throw Error(ErrorCode::malformed_program, "non-finite objective coefficient");
  if (!p.bounds.empty() && p.bounds.size() != n)
    throw Error(ErrorCode::malformed_program, "bounds arity does not match objective");
  for (std::size_t j = 0; j < p.bounds.size(); ++j) {
    const auto& b = p.bounds[j];
    if (std::isnan(b.lower) || std::isnan(b.upper) || b.lower > b.upper ||
        b.lower == kInf || b.upper == -kInf)
      throw Error(ErrorCode::malformed_program, "ill-ordered bound on variable " + std::to_string(j));
  }
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const auto& c = p.constraints[i];
    if (c.coeffs.size() != n)
      throw Error(ErrorCode::malformed_program,
                  "constraint " + std::to_string(i) + " has arity " + std::to_string(c.coeffs.size()) +
                      ", expected " + std::to_string(n));
    if (!std::isfinite(c.bound))
      throw Error(ErrorCode::malformed_program, "non-finite bound in constraint " + std::to_string(i));
    for (double a : c.coeffs)
      if (!std::isfinite(a))
        throw Error(ErrorCode::malformed_program, "non-finite coefficient in constraint " + std::to_string(i));
  }
}

// x_j = offset + sum over (column, coefficient) of standard-form columns.
struct VarMap {
  double offset = 0.0;
  std::vector<std::pair<std::size_t, double>> cols;
};

struct StdRow {
  long source = -1;  // original constraint index, or -1 for an upper-bound row
  double sign = 1.0;
};

template <class T>
struct StandardForm {
  std::size_t m = 0, n = 0;
  std::vector<std::vector<T>> a;  // m rows of n
  std::vector<T> b;
  std::vector<T> c;
  std::vector<long> initial_basis;  // column index or -1 (needs artificial)
  std::vector<StdRow> rows;
  std::vector<VarMap> vars;
  std::vector<bool> is_slack;
};

template <class T>
StandardForm<T> to_standard(const LinearProgram& p) {
  using A = Arith<T>;
  StandardForm<T> sf;
  const std::size_t n0 = p.objective.size();
  sf.vars.resize(n0);
  std::vector<std::pair<std::size_t, double>> upper_rows;  // (column, u-l)
  std::size_t col = 0;
  for (std::size_t j = 0; j < n0; ++j) {
    const double lo = p.bounds.empty() ? -kInf : p.bounds[j].lower;
    const double hi = p.bounds.empty() ? kInf : p.bounds[j].upper;
    auto& vm = sf.vars[j];
    if (std::isfinite(lo)) {
      vm.offset = lo;
      vm.cols.emplace_back(col, 1.0);
      if (std::isfinite(hi)) upper_rows.emplace_back(col, hi - lo);
      ++col;
    } else if (std::isfinite(hi)) {
      vm.offset = hi;
      vm.cols.emplace_back(col++, -1.0);
    } else {
      vm.cols.emplace_back(col++, 1.0);
      vm.cols.emplace_back(col++, -1.0);
    }
  }
  const std::size_t structural = col;
  std::size_t slacks = upper_rows.size();
  for (const auto& c : p.constraints)
    if (c.relation != Relation::equal) ++slacks;
  sf.n = structural + slacks;
  sf.m = p.constraints.size() + upper_rows.size();
  sf.a.assign(sf.m, std::vector<T>(sf.n, T(0)));
  sf.b.assign(sf.m, T(0));
  sf.c.assign(sf.n, T(0));
  sf.is_slack.assign(sf.n, false);
  sf.initial_basis.assign(sf.m, -1);
  sf.rows.resize(sf.m);

  const double sense = p.sense == Sense::maximize ? -1.0 : 1.0;
  for (std::size_t j = 0; j < n0; ++j)
    for (auto [k, f] : sf.vars[j].cols) sf.c[k] += A::from(sense * p.objective[j] * f);

  std::size_t slack_col = structural;
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const auto& con = p.constraints[i];
    auto& row = sf.a[i];
    // Exact rational accumulation: offsets and coefficients are exact
    // binary values, so the shifted rhs is computed in T.
    T rhs = A::from(con.bound);
    for (std::size_t j = 0; j < n0; ++j) {
      if (con.coeffs[j] == 0.0) continue;
      const T aj = A::from(con.coeffs[j]);
      rhs -= aj * A::from(sf.vars[j].offset);
      for (auto [k, f] : sf.vars[j].cols) row[k] += aj * A::from(f);
    }
    long slack = -1;
    if (con.relation == Relation::less_equal) {
      row[slack_col] = T(1);
      slack = static_cast<long>(slack_col++);
    } else if (con.relation == Relation::greater_equal) {
      row[slack_col] = T(-1);
      slack = static_cast<long>(slack_col++);
    }
    double sign = 1.0;
    if (rhs < T(0)) {
      sign = -1.0;
      rhs = -rhs;
      for (auto& v : row) v = -v;
    }
    sf.b[i] = rhs;
    if (slack >= 0) {
      sf.is_slack[slack] = true;
      if (row[slack] == T(1)) sf.initial_basis[i] = slack;
    }
    sf.rows[i] = {static_cast<long>(i), sign};
  }
  for (std::size_t r = 0; r < upper_rows.size(); ++r) {
    const std::size_t i = p.constraints.size() + r;
    sf.a[i][upper_rows[r].first] = T(1);
    sf.a[i][slack_col] = T(1);
    sf.is_slack[slack_col] = true;
    sf.initial_basis[i] = static_cast<long>(slack_col++);
    sf.b[i] = A::from(upper_rows[r].second);
    sf.rows[i] = {-1, 1.0};
  }
  return sf;
}

template <class T>
class Tableau {
  using A = Arith<T>;

 public:
  // perturb > 0 relaxes each inequality row by a distinct small amount so
  // that no ratio is exactly zero; the caller re-solves the basis against
  // the true right-hand side.
  Tableau(const StandardForm<T>& sf, double perturb = 0.0) : m_(sf.m), n_(sf.n) {
    std::size_t nart = 0;
    for (long b : sf.initial_basis)
      if (b < 0) ++nart;
    cols_ = n_ + nart;
    tab_.assign(m_, std::vector<T>(cols_ + 2, T(0)));  // rhs, then unperturbed rhs
    basis_.resize(m_);
    std::size_t art = n_;
    for (std::size_t i = 0; i < m_; ++i) {
      std::copy(sf.a[i].begin(), sf.a[i].end(), tab_[i].begin());
      tab_[i][cols_] = tab_[i][cols_ + 1] = sf.b[i];
      if (sf.initial_basis[i] >= 0) {
        basis_[i] = static_cast<std::size_t>(sf.initial_basis[i]);
      } else {
        tab_[i][art] = T(1);
        basis_[i] = art++;
      }
    }
    if constexpr (!A::exact) {
      if (perturb > 0.0)
        for (std::size_t i = 0; i < m_; ++i) {
          if (sf.initial_basis[i] < 0) continue;
          const double frac = std::fmod(0.6180339887498949 * static_cast<double>(i + 1), 1.0);
          tab_[i][cols_] += perturb * (1.0 + std::abs(tab_[i][cols_])) * (0.5 + frac);
        }
      equilibrate();
    }
    row_alive_.assign(m_, true);
    start_basis_ = basis_;
    max_iter_ = 200 * (m_ + cols_) + 5000;
  }

  // Returns false when the program is infeasible.
  bool phase_one() {
    if (cols_ == n_) return true;
    std::vector<T> cost(cols_, T(0));
    for (std::size_t k = n_; k < cols_; ++k) cost[k] = T(1);
    set_costs(cost);
    allowed_.assign(cols_, true);
    if (!iterate()) throw Error(ErrorCode::numerical_failure, "phase one unbounded (internal)");
    T infeas(0);
    T scale(1);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= n_) infeas += tab_[i][cols_];
      if constexpr (!A::exact) scale = std::max<double>(scale, std::abs(tab_[i][cols_]));
    }
    if constexpr (A::exact) {
      if (sgn(infeas) > 0) return false;
    } else {
      if (infeas > 1e-9 * scale) return false;
    }
    // Drive remaining artificials out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      std::size_t best = cols_;
      for (std::size_t k = 0; k < n_; ++k) {
        if (!A::nonzero(tab_[i][k])) continue;
        if (best == cols_ || A::abs(tab_[i][k]) > A::abs(tab_[i][best])) best = k;
      }
      if (best == cols_) {
        row_alive_[i] = false;
      } else {
        pivot(i, best);
      }
    }
    return true;
  }

  // Returns false when the objective is unbounded below.
  bool phase_two(const std::vector<T>& c) {
    std::vector<T> cost(cols_, T(0));
    std::copy(c.begin(), c.end(), cost.begin());
    set_costs(cost);
    allowed_.assign(cols_, false);
    std::fill(allowed_.begin(), allowed_.begin() + n_, true);
    return iterate();
  }

  // After a perturbed solve: put back the true rhs and repair primal
  // feasibility with dual simplex pivots (the basis stays dual feasible).
  void restore_rhs() {
    for (std::size_t i = 0; i < m_; ++i) tab_[i][cols_] = tab_[i][cols_ + 1];
    for (std::size_t it = 0; it < max_iter_; ++it) {
      std::size_t r = m_;
      for (std::size_t i = 0; i < m_; ++i) {
        if (!row_alive_[i] || !(tab_[i][cols_] < -1e-10)) continue;
        if (r == m_ || tab_[i][cols_] < tab_[r][cols_]) r = i;
      }
      if (r == m_) {
        for (std::size_t i = 0; i < m_; ++i)
          if (tab_[i][cols_] < 0.0) tab_[i][cols_] = 0.0;
        return;
      }
      std::size_t e = cols_;
      T best(0);
      for (std::size_t k = 0; k < cols_; ++k) {
        if (!allowed_[k] || !(tab_[r][k] < -1e-10)) continue;
        const T q = std::max<T>(d_[k], T(0)) / -tab_[r][k];
        if (e == cols_ || q < best) e = k, best = q;
      }
      if (e == cols_) throw Error(ErrorCode::numerical_failure, "perturbed basis cannot be repaired");
      pivot(r, e);
    }
    throw Error(ErrorCode::numerical_failure, "dual cleanup iteration limit reached");
  }

  std::vector<std::size_t> basis_columns(std::vector<std::size_t>* rows) const {
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < m_; ++i)
      if (row_alive_[i]) {
        cols.push_back(basis_[i]);
        if (rows) rows->push_back(i);
      }
    return cols;
  }

  std::vector<T> primal() const {
    std::vector<T> z(n_, T(0));
    for (std::size_t i = 0; i < m_; ++i)
      if (row_alive_[i] && basis_[i] < n_) z[basis_[i]] = tab_[i][cols_];
    return z;
  }


 private:
  // Rows whose basic column is an artificial can be rescaled freely; slack
  // rows must keep their unit basic coefficient.
  void equilibrate() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      double mx = 0.0;
      for (std::size_t k = 0; k < n_; ++k) mx = std::max(mx, std::abs(A::to_double(tab_[i][k])));
      if (mx > 0.0 && (mx > 4.0 || mx < 0.25)) {
        const double f = 1.0 / mx;
        for (std::size_t k = 0; k <= cols_ + 1; ++k) {
          if (k >= n_ && k < cols_) continue;
          tab_[i][k] *= f;
        }
      }
    }
  }

  void set_costs(const std::vector<T>& cost) {
    d_ = cost;
    d_.push_back(T(0));
    for (std::size_t i = 0; i < m_; ++i) {
      const T cb = cost[basis_[i]];
      if (!A::nonzero(cb)) continue;
      for (std::size_t k = 0; k <= cols_; ++k) d_[k] -= cb * tab_[i][k];
    }
  }

  void pivot(std::size_t r, std::size_t e) {
    const T piv = tab_[r][e];
    auto& prow = tab_[r];
    for (std::size_t k = 0; k <= cols_ + 1; ++k) prow[k] /= piv;
    prow[e] = T(1);
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const T f = tab_[i][e];
      if (f == T(0)) continue;
      auto& row = tab_[i];
      for (std::size_t k = 0; k <= cols_ + 1; ++k) row[k] -= f * prow[k];
      row[e] = T(0);
    }
    const T fd = d_[e];
    if (fd != T(0)) {
      for (std::size_t k = 0; k <= cols_; ++k) d_[k] -= fd * prow[k];
      d_[e] = T(0);
    }
    basis_[r] = e;
  }

  // Lexicographic tie-break on the rows of the starting-basis columns
  // (B^-1 scaled by the pivot column). Terminates on degenerate vertices.
  bool lex_less(std::size_t i, std::size_t l, std::size_t e) const {
    for (std::size_t c : start_basis_) {
      const T a = tab_[i][c] / tab_[i][e];
      const T b = tab_[l][c] / tab_[l][e];
      if constexpr (A::exact) {
        if (a != b) return a < b;
      } else {
        if (a < b - 1e-12) return true;
        if (a > b + 1e-12) return false;
      }
    }
    return basis_[i] < basis_[l];
  }

  bool iterate() {
    std::size_t stalled = 0;
    for (std::size_t it = 0; it < max_iter_; ++it) {
      std::size_t enter = cols_;
      for (std::size_t k = 0; k < cols_; ++k) {
        if (!allowed_[k] || !A::negative_cost(d_[k])) continue;
        if (enter == cols_ || d_[k] < d_[enter]) enter = k;
      }
      if (enter == cols_) return true;
      std::size_t leave = m_;
      T best_ratio(0);
      for (std::size_t i = 0; i < m_; ++i) {
        if (!row_alive_[i] || !A::positive_pivot(tab_[i][enter])) continue;
        const T ratio = tab_[i][cols_] / tab_[i][enter];
        if (leave == m_) {
          leave = i;
          best_ratio = ratio;
          continue;
        }
        bool better;
        if constexpr (A::exact) {
          better = ratio < best_ratio || (ratio == best_ratio && lex_less(i, leave, enter));
        } else {
          const double tol = 1e-12 * (1.0 + std::abs(best_ratio));
          if (ratio < best_ratio - tol) {
            better = true;
          } else if (ratio <= best_ratio + tol) {
            better = lex_less(i, leave, enter);
          } else {
            better = false;
          }
        }
        if (better) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == m_) return false;
      if constexpr (!A::exact) {
        stalled = A::is_zero_ratio(best_ratio) ? stalled + 1 : 0;
        if (stalled > 4 * (m_ + cols_)) throw Error(ErrorCode::numerical_failure, "simplex stalled on a degenerate vertex");
      }
      pivot(leave, enter);
    }
    throw Error(ErrorCode::numerical_failure, "simplex iteration limit reached (cycling or conditioning)");
  }

  std::size_t m_, n_, cols_ = 0;
  std::vector<std::vector<T>> tab_;
  std::vector<T> d_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> start_basis_;
  std::vector<bool> row_alive_;
  std::vector<bool> allowed_;
  std::size_t max_iter_ = 0;
};

// Solves B z = rhs (transpose=false) or B^T y = rhs (transpose=true) for the
// basis submatrix of the standard form.
template <class T>
bool basis_solve(const StandardForm<T>& sf, const std::vector<std::size_t>& rows,
                 const std::vector<std::size_t>& cols, std::vector<T> rhs, bool transpose,
                 std::vector<T>& out) {
  const std::size_t k = rows.size();
  std::vector<std::vector<T>> m(k, std::vector<T>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      m[i][j] = transpose ? sf.a[rows[j]][cols[i]] : sf.a[rows[i]][cols[j]];
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (Arith<T>::abs(m[r][c]) > Arith<T>::abs(m[piv][c])) piv = r;
    if (!Arith<T>::nonzero(m[piv][c])) return false;
    std::swap(m[piv], m[c]);
    std::swap(rhs[piv], rhs[c]);
    for (std::size_t r = c + 1; r < k; ++r) {
      const T f = m[r][c] / m[c][c];
      if (f == T(0)) continue;
      for (std::size_t j = c; j < k; ++j) m[r][j] -= f * m[c][j];
      rhs[r] -= f * rhs[c];
    }
  }
  out.assign(k, T(0));
  for (std::size_t i = k; i-- > 0;) {
    T s = rhs[i];
    for (std::size_t j = i + 1; j < k; ++j) s -= m[i][j] * out[j];
    out[i] = s / m[i][i];
  }
  return true;
}

template <class T>
LPSolution solve_impl(const LinearProgram& p, std::string* exact_obj, bool* exact_zero, double perturb = 0.0) {
  using A = Arith<T>;
  validate(p);
  const auto sf = to_standard<T>(p);
  Tableau<T> tab(sf, perturb);
  LPSolution sol;
  if (!tab.phase_one()) {
    sol.status = LpStatus::infeasible;
    return sol;
  }
  if (!tab.phase_two(sf.c)) {
    sol.status = LpStatus::unbounded;
    return sol;
  }
  if constexpr (!A::exact)
    if (perturb > 0.0) tab.restore_rhs();
  std::vector<std::size_t> rows;
  const auto cols = tab.basis_columns(&rows);
  std::vector<T> z = tab.primal();
  std::vector<T> y_rows(rows.size(), T(0));
  {
    std::vector<T> rhs(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rhs[i] = sf.b[rows[i]];
    std::vector<T> zb;
    if (basis_solve(sf, rows, cols, rhs, false, zb)) {
      std::fill(z.begin(), z.end(), T(0));
      for (std::size_t i = 0; i < cols.size(); ++i) z[cols[i]] = zb[i];
    }
    std::vector<T> cb(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) cb[i] = sf.c[cols[i]];
    if (!basis_solve(sf, rows, cols, cb, true, y_rows))
      throw Error(ErrorCode::numerical_failure, "singular optimal basis");
  }
  sol.status = LpStatus::optimal;
  const std::size_t n0 = p.objective.size();
  sol.primal.assign(n0, 0.0);
  std::vector<T> x_exact(n0);
  for (std::size_t j = 0; j < n0; ++j) {
    T v = A::from(sf.vars[j].offset);
    for (auto [k, f] : sf.vars[j].cols) v += A::from(f) * z[k];
    x_exact[j] = v;
    sol.primal[j] = A::to_double(v);
  }
  const double sense = p.sense == Sense::maximize ? -1.0 : 1.0;
  sol.duals.assign(p.constraints.size(), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& sr = sf.rows[rows[i]];
    if (sr.source < 0) continue;
    sol.duals[static_cast<std::size_t>(sr.source)] = sense * sr.sign * A::to_double(y_rows[i]);
  }
  T obj(0);
  for (std::size_t j = 0; j < n0; ++j) obj += A::from(p.objective[j]) * x_exact[j];
  sol.objective = A::to_double(obj);
  if constexpr (A::exact) {
    if (exact_obj) *exact_obj = obj.get_str();
    if (exact_zero) *exact_zero = sgn(obj) == 0;
  }
  return sol;
}

}  // namespace

LPSolution solve_lp(const LinearProgram& p) {
  LPSolution sol;
  bool perturbed = false;
  try {
    sol = solve_impl<double>(p, nullptr, nullptr);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::numerical_failure) throw;
    // stalled on a degenerate vertex: retry on a perturbed right-hand side
    sol = solve_impl<double>(p, nullptr, nullptr, 1e-7);
    perturbed = true;
  }
  if (sol.status != LpStatus::optimal) return sol;
  auto report = certify(p, sol);
  if (!report.pass && !perturbed) {
    // round-off drift in the tableau; the perturbed path pivots differently
    LPSolution again;
    try {
      again = solve_impl<double>(p, nullptr, nullptr, 1e-7);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::numerical_failure) throw;
    }
    if (again.status == LpStatus::optimal) {
      auto r2 = certify(p, again);
      if (r2.pass) {
        sol = std::move(again);
        report = r2;
      }
    }
  }
  sol.duality_gap = report.gap;
  if (!report.pass) {
    // One exact re-solve before giving up keeps round-off from masquerading
    // as a modelling error on small programs.
    if (p.num_variables() * (p.constraints.size() + 1) <= 4000) {
      auto exact = solve_lp_exact(p);
      auto r2 = certify(p, exact.solution);
      if (r2.pass) {
        exact.solution.duality_gap = r2.gap;
        return exact.solution;
      }
    }
    throw Error(ErrorCode::numerical_failure, "solution failed certification: " + report.message);
  }
  return sol;
}

ExactLPSolution solve_lp_exact(const LinearProgram& p) {
  ExactLPSolution out;
  out.solution = solve_impl<mpq_class>(p, &out.exact_objective, &out.objective_is_zero);
  if (out.solution.status == LpStatus::optimal) out.solution.duality_gap = 0.0;
  return out;
}

CertificateReport certify(const LinearProgram& p, const LPSolution& s, double tol) {
  CertificateReport rep;
  const std::size_t n = p.objective.size();
  if (s.status != LpStatus::optimal) {
    rep.pass = false;
    rep.message = "solution does not claim optimality";
    return rep;
  }
  if (s.primal.size() != n || s.duals.size() != p.constraints.size()) {
    rep.pass = false;
    rep.message = "certificate arity mismatch";
    return rep;
  }
  auto note_primal = [&](double v, long idx) {
    if (v > rep.primal_violation) {
      rep.primal_violation = v;
      rep.worst_row = idx;
    }
  };
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const auto& c = p.constraints[i];
    double lhs = 0.0, mag = std::abs(c.bound);
    for (std::size_t j = 0; j < n; ++j) {
      lhs += c.coeffs[j] * s.primal[j];
      mag = std::max(mag, std::abs(c.coeffs[j] * s.primal[j]));
    }
    const double r = lhs - c.bound;
    double v = 0.0;
    if (c.relation == Relation::less_equal) v = std::max(0.0, r);
    else if (c.relation == Relation::greater_equal) v = std::max(0.0, -r);
    else v = std::abs(r);
    note_primal(v / (1.0 + mag), static_cast<long>(i));
  }
  for (std::size_t j = 0; j < p.bounds.size(); ++j) {
    const auto& b = p.bounds[j];
    const double x = s.primal[j];
    double v = 0.0;
    if (x < b.lower) v = b.lower - x;
    if (x > b.upper) v = std::max(v, x - b.upper);
    note_primal(v / (1.0 + std::abs(x)), -static_cast<long>(j) - 2);
  }

  const bool maximize = p.sense == Sense::maximize;
  auto note_dual = [&](double v, long idx) {
    if (v > rep.dual_violation) {
      rep.dual_violation = v;
      rep.worst_dual = idx;
    }
  };
  double ymag = 1.0;
  for (double y : s.duals) ymag = std::max(ymag, std::abs(y));
  double dual_obj = 0.0;
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const double y = s.duals[i];
    dual_obj += p.constraints[i].bound * y;
    const auto rel = p.constraints[i].relation;
    // Sign conventions: minimize wants y<=0 on <= rows, y>=0 on >= rows.
    double wrong = 0.0;
    if (rel == Relation::less_equal) wrong = maximize ? -y : y;
    if (rel == Relation::greater_equal) wrong = maximize ? y : -y;
    note_dual(std::max(0.0, wrong) / ymag, static_cast<long>(i));
  }
  for (std::size_t j = 0; j < n; ++j) {
    double d = p.objective[j];
    double mag = std::abs(d);
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
      d -= p.constraints[i].coeffs[j] * s.duals[i];
      mag = std::max(mag, std::abs(p.constraints[i].coeffs[j] * s.duals[i]));
    }
    const double lo = p.bounds.empty() ? -kInf : p.bounds[j].lower;
    const double hi = p.bounds.empty() ? kInf : p.bounds[j].upper;
    // For minimize a positive reduced cost pins x at its lower bound; for
    // maximize at its upper bound.
    const double at_pos = maximize ? hi : lo;
    const double at_neg = maximize ? lo : hi;
    if (d > 0.0) {
      if (std::isfinite(at_pos)) dual_obj += at_pos * d;
      else note_dual(d / (1.0 + mag), static_cast<long>(n + j));
    } else if (d < 0.0) {
      if (std::isfinite(at_neg)) dual_obj += at_neg * d;
      else note_dual(-d / (1.0 + mag), static_cast<long>(n + j));
    }
  }
  double primal_obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) primal_obj += p.objective[j] * s.primal[j];
  const double denom = 1.0 + std::abs(s.objective);
  rep.gap = std::max(std::abs(s.objective - dual_obj), std::abs(s.objective - primal_obj));
  const double ptol = tol * 10.0;
  std::ostringstream msg;
  if (rep.primal_violation > ptol) {
    rep.pass = false;
    msg << "primal infeasible at row " << rep.worst_row << " by " << rep.primal_violation << "; ";
  }
  if (rep.dual_violation > ptol) {
    rep.pass = false;
    msg << "dual infeasible at index " << rep.worst_dual << " by " << rep.dual_violation << "; ";
  }
  if (rep.gap > tol * denom) {
    rep.pass = false;
    msg << "duality gap " << rep.gap << " exceeds tolerance; ";
  }
  rep.message = msg.str();
  return rep;
}

LinExpr& LinExpr::add(const LinExpr& other, double factor) {
  for (auto [v, c] : other.terms) add(v, c * factor);
  constant += other.constant * factor;
  return *this;
}

std::size_t LpBuilder::add_variable(double lower, double upper, double cost) {
  costs_.push_back(cost);
  bounds_.push_back({lower, upper});
  return costs_.size() - 1;
}

std::vector<std::size_t> LpBuilder::add_variables(std::size_t n, double lower, double upper) {
  std::vector<std::size_t> ids(n);
  for (auto& id : ids) id = add_variable(lower, upper);
  return ids;
}

void LpBuilder::add_cost(const LinExpr& expr) {
  for (auto [v, c] : expr.terms) costs_.at(v) += c;
  cost_constant_ += expr.constant;
}

void LpBuilder::add_row(const LinExpr& expr, Relation rel, double rhs) {
  rows_.push_back({expr.terms, rel, rhs - expr.constant});
}

LinearProgram LpBuilder::build(Sense sense) const {
  LinearProgram p;
  p.objective = costs_;
  p.sense = sense;
  p.bounds = bounds_;
  p.constraints.reserve(rows_.size());
  for (const auto& r : rows_) {
    Constraint c;
    c.coeffs.assign(costs_.size(), 0.0);
    for (auto [v, coef] : r.terms) c.coeffs.at(v) += coef;
    c.relation = r.rel;
    c.bound = r.rhs;
    p.constraints.push_back(std::move(c));
  }
  return p;
}

LPSolution solve(const LpBuilder& b, Sense sense) {
  LPSolution s = solve_lp(b.build(sense));
  s.objective += b.cost_constant();
  return s;
}

}  // namespace gurarij::optim
