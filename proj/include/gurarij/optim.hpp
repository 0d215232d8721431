#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gurarij/linalg.hpp"

namespace gurarij::optim {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Relative tolerance used to certify optimal solves.
inline constexpr double kCertifyTol = 1e-9;

enum class Sense { minimize, maximize };
enum class Relation { less_equal, equal, greater_equal };
enum class LpStatus { optimal, infeasible, unbounded };

std::string to_string(LpStatus status);

struct Constraint {
  Vector coeffs;
  Relation relation = Relation::less_equal;
  double bound = 0.0;
};

struct VariableBound {
  double lower = -kInf;
  double upper = kInf;
};

/// A dense linear program. Variables without an entry in `bounds` are free.
struct LinearProgram {
  Vector objective;
  Sense sense = Sense::minimize;
  std::vector<Constraint> constraints;
  std::vector<VariableBound> bounds;

  std::size_t num_variables() const { return objective.size(); }
};

/// Result of a solve. `duals` holds one multiplier per constraint in the
/// sense of the original program: with d = c - A^T y the dual objective is
/// b^T y plus the bound contributions of d, and equals `objective` at an
/// optimum.
struct LPSolution {
  LpStatus status = LpStatus::infeasible;
  Vector primal;
  Vector duals;
  double objective = 0.0;
  double duality_gap = 0.0;
};

struct CertificateReport {
  bool pass = true;
  double primal_violation = 0.0;
  long worst_row = -1;  ///< constraint index, or -(var+2) for a bound row
  double dual_violation = 0.0;
  long worst_dual = -1;
  double gap = 0.0;
  std::string message;
};

/// Solves in binary floating point, then certifies the result. Throws
/// Error(malformed_program) for arity/bound problems and
/// Error(numerical_failure) when the simplex cannot finish or its answer
/// does not certify.
LPSolution solve_lp(const LinearProgram& p);

/// Exact rational solve. Input coefficients are converted exactly from
/// their binary values; the returned doubles are the nearest rounding of
/// the exact optimum, `exact_objective` is the canonical fraction.
struct ExactLPSolution {
  LPSolution solution;
  std::string exact_objective;
  bool objective_is_zero = false;
};
ExactLPSolution solve_lp_exact(const LinearProgram& p);

/// Re-checks primal feasibility, dual feasibility and the duality gap from
/// the program data alone.
CertificateReport certify(const LinearProgram& p, const LPSolution& s,
                          double tol = kCertifyTol);

/// Sparse affine expression over builder variables.
struct LinExpr {
  std::vector<std::pair<std::size_t, double>> terms;
  double constant = 0.0;

  LinExpr() = default;
  explicit LinExpr(double c) : constant(c) {}

  LinExpr& add(std::size_t var, double coeff) {
    if (coeff != 0.0) terms.emplace_back(var, coeff);
    return *this;
  }
  LinExpr& add(const LinExpr& other, double factor = 1.0);
};

/// Incremental construction of a LinearProgram from sparse rows.
class LpBuilder {
 public:
  std::size_t add_variable(double lower = -kInf, double upper = kInf, double cost = 0.0);
  std::vector<std::size_t> add_variables(std::size_t n, double lower = -kInf,
                                         double upper = kInf);
  void set_cost(std::size_t var, double cost) { costs_.at(var) = cost; }
  void add_cost(const LinExpr& expr);

  /// Adds expr (relation) rhs; the expression constant is moved to the rhs.
  void add_row(const LinExpr& expr, Relation rel, double rhs);

  std::size_t num_variables() const { return costs_.size(); }
  double cost_constant() const { return cost_constant_; }

  LinearProgram build(Sense sense) const;

 private:
  struct Row {
    std::vector<std::pair<std::size_t, double>> terms;
    Relation rel;
    double rhs;
  };
  std::vector<double> costs_;
  std::vector<VariableBound> bounds_;
  std::vector<Row> rows_;
  double cost_constant_ = 0.0;
};

/// Solves a builder program; the objective includes the builder's constant.
LPSolution solve(const LpBuilder& b, Sense sense);

}  // namespace gurarij::optim
