#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gurarij/linalg.hpp"
#include "gurarij/optim.hpp"

namespace gurarij::space {

/// H-description of a dual unit ball, possibly lifted:
///   B* = { c in R^dim : exists w in R^aux with every row satisfied on (c, w)
///          and w_j >= 0 wherever aux_nonneg[j] }.
/// Row coefficient vectors have length dim + aux. The norm of v is the
/// support function max { <c, v> : c in B* }.
struct DualBall {
  std::size_t dim = 0;
  std::size_t aux = 0;
  std::vector<bool> aux_nonneg;
  std::vector<optim::Constraint> rows;
};

/// Norm value together with a functional of the dual ball attaining it.
struct NormWitness {
  double value = 0.0;
  Vector functional;
};

/// Where an oracle space came from (which construction step produced it).
struct Provenance {
  std::string kind;    ///< e.g. "adjoin", "pullback", "tuple-amalgam"
  std::string detail;  ///< free-form, human readable
  std::size_t round = 0;
};

class NormedSpace {
 public:
  virtual ~NormedSpace() = default;

  std::size_t dim() const { return dim_; }
  const std::string& label() const { return label_; }
  bool positive_definite() const { return positive_definite_; }

  virtual bool is_explicit() const = 0;
  virtual const DualBall& dual_ball() const = 0;

  /// Dimension-checked norm evaluation.
  double norm(std::span<const double> v) const;
  NormWitness norm_with_functional(std::span<const double> v) const;

 protected:
  NormedSpace(std::string label, std::size_t dim, bool positive_definite)
      : label_(std::move(label)), dim_(dim), positive_definite_(positive_definite) {}

  virtual NormWitness evaluate(std::span<const double> v) const = 0;

  std::string label_;
  std::size_t dim_;
  bool positive_definite_;
};

using SpacePtr = std::shared_ptr<const NormedSpace>;

/// Finite-dimensional space whose norm is the max of finitely many linear
/// functionals. With `symmetric_closure` the listed generators are implicitly
/// closed under negation; without it the list must already be symmetric.
class PolyNormedSpace final : public NormedSpace {
 public:
  PolyNormedSpace(std::string label, std::size_t dim, std::vector<Vector> generators,
                  bool symmetric_closure);

  bool is_explicit() const override { return true; }
  const DualBall& dual_ball() const override { return ball_; }

  /// Generators exactly as listed (before implicit closure).
  const std::vector<Vector>& listed_generators() const { return listed_; }
  /// The effective generator set the norm maximizes over.
  const std::vector<Vector>& generators() const { return effective_; }
  bool symmetric_closure() const { return symmetric_closure_; }

 protected:
  NormWitness evaluate(std::span<const double> v) const override;

 private:
  std::vector<Vector> listed_;
  std::vector<Vector> effective_;
  bool symmetric_closure_;
  DualBall ball_;
};

/// Space whose norm is only available through an LP over its (lifted) dual
/// ball, e.g. the output of an adjoin step.
class OracleNormedSpace final : public NormedSpace {
 public:
  OracleNormedSpace(std::string label, DualBall ball, Provenance provenance,
                    bool positive_definite = true);

  bool is_explicit() const override { return false; }
  const DualBall& dual_ball() const override { return ball_; }
  const Provenance& provenance() const { return provenance_; }

 protected:
  NormWitness evaluate(std::span<const double> v) const override;

 private:
  DualBall ball_;
  Provenance provenance_;
};

enum class StandardKind { l1, linf, polytope };

/// Validated fixtures. Throws Error(invalid_generators) when a supplied
/// polytope generator set is asymmetric or does not span.
std::shared_ptr<const PolyNormedSpace> make_standard(StandardKind kind, std::size_t dim,
                                                     std::vector<Vector> generators = {},
                                                     bool symmetric_closure = true);

/// Parses "l1:d" / "linf:d".
std::shared_ptr<const PolyNormedSpace> parse_inline(const std::string& shorthand);

struct Violation {
  std::string kind;  ///< "asymmetry" or "spanning"
  std::string detail;
};

/// Empty iff generators are closed under negation (respecting the closure
/// convention) and span the dual space.
std::vector<Violation> validate(const PolyNormedSpace& s);

double norm(const NormedSpace& s, std::span<const double> v);

/// Least t with f in t * B*; +inf when f is outside the span of B*.
double dual_norm(const NormedSpace& s, std::span<const double> f);

/// Norm on coefficient coordinates: s' |-> norm(s, sum s'_i basis_i).
/// Dependent bases give a seminorm (flagged via positive_definite()).
SpacePtr subspace_pullback(const SpacePtr& s, const std::vector<Vector>& basis);
std::shared_ptr<const PolyNormedSpace> subspace_pullback(const PolyNormedSpace& s,
                                                         const std::vector<Vector>& basis);

/// Lifted dual ball of the pullback (works for any representation).
DualBall pullback_ball(const DualBall& ball, const std::vector<Vector>& basis);

/// Adds the constraint norm(z) <= t to an LP under construction.
void append_norm_epigraph(optim::LpBuilder& lp, const NormedSpace& s,
                          const std::vector<optim::LinExpr>& z, const optim::LinExpr& t);

/// Adds variables (c, w) constrained to the dual ball and returns the c
/// variables.
std::vector<std::size_t> append_dual_ball(optim::LpBuilder& lp, const DualBall& ball);

/// Dimension of the linear span of the dual ball; the norm is definite iff
/// this equals ball.dim. Randomized (fixed seed) LP probing.
std::size_t ball_span_rank(const DualBall& ball);

/// Throws Error(dimension_mismatch) unless v has the space's dimension.
void check_dim(const NormedSpace& s, std::span<const double> v, const char* what);

}  // namespace gurarij::space
