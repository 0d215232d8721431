#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gurarij/linalg.hpp"
#include "gurarij/optim.hpp"
#include "gurarij/space.hpp"

namespace gurarij::katetov {

using space::SpacePtr;

/// Values of a function on finitely many points of a normed space.
struct FiniteKatetov {
  SpacePtr space;
  std::vector<Vector> support;
  Vector values;
};

struct KatetovViolation {
  std::string kind;  ///< "upper": xi(y) <= xi(z) + d fails; "lower": d <= xi(y) + xi(z) fails
  std::size_t i = 0;
  std::size_t j = 0;
  double excess = 0.0;
};

/// Empty iff both Katetov inequalities hold on all support pairs.
std::vector<KatetovViolation> is_katetov(const FiniteKatetov& fk, double tol = 1e-9);

/// min_y ||x - y|| + xi(y)
double extend_min_plus(const FiniteKatetov& fk, std::span<const double> x);

/// Convex envelope of min_j (||x - y_j|| + c_j), stored through its generator
/// (y_j, c_j). Construction canonicalizes: every c_j is replaced by the
/// envelope value at y_j, so values on the generator are exact.
class ConvexKatetovEnvelope {
 public:
  ConvexKatetovEnvelope(SpacePtr space, std::vector<Vector> points, Vector values);

  const SpacePtr& space() const { return space_; }
  std::size_t dim() const { return space_->dim(); }
  std::size_t size() const { return points_.size(); }
  const std::vector<Vector>& points() const { return points_; }
  const Vector& values() const { return values_; }

  double operator()(std::span<const double> x) const;

 private:
  SpacePtr space_;
  std::vector<Vector> points_;
  Vector values_;
};

/// Envelope value with a supporting affine minorant: ck(z) >= <f, z> - offset
/// for every z, with equality at the query point.
struct EnvelopeValue {
  double value = 0.0;
  Vector functional;
  double offset = 0.0;
};

/// Conjugate form: max { <f, x> - max_j (<f, y_j> - c_j) : f in B* }.
EnvelopeValue eval_envelope_dual(const ConvexKatetovEnvelope& ck, std::span<const double> x);
/// Decomposition form: min sum_j ||u_j - l_j y_j|| + l_j c_j over
/// sum u_j = x, sum l_j = 1, l >= 0.
double eval_envelope_primal(const ConvexKatetovEnvelope& ck, std::span<const double> x);
double eval_envelope(const ConvexKatetovEnvelope& ck, std::span<const double> x);

ConvexKatetovEnvelope convexify(const FiniteKatetov& fk);

/// The envelope sampled on its own generator points.
FiniteKatetov restriction(const ConvexKatetovEnvelope& ck);

/// sup_x <f, x> - ck(x) = max_j (<f, y_j> - c_j); requires dual_norm(f) <= 1.
double envelope_conjugate(const ConvexKatetovEnvelope& ck, std::span<const double> f);

/// Supremum distance; attained on the union of the two generator supports.
double sup_distance(const ConvexKatetovEnvelope& a, const ConvexKatetovEnvelope& b);

/// ||alpha x - a|| in E(x): |alpha| ck(a / alpha), or ||a|| when alpha = 0.
double one_point_norm(const ConvexKatetovEnvelope& ck, double alpha, std::span<const double> a);

/// The distance function d(v, .) as an envelope with the single generator (v, 0).
ConvexKatetovEnvelope point_as_katetov(SpacePtr space, const Vector& v);

/// Adds p * ck(b / p) <= t (the perspective; at p = 0 it is ||b|| <= t).
/// The caller guarantees p >= 0.
void append_perspective_epigraph(optim::LpBuilder& lp, const ConvexKatetovEnvelope& ck,
                                 const std::vector<optim::LinExpr>& b, const optim::LinExpr& p,
                                 const optim::LinExpr& t);

/// Adds ||alpha x - a||^ck <= t for affine expressions a, alpha of any sign.
void append_one_point_epigraph(optim::LpBuilder& lp, const ConvexKatetovEnvelope& ck,
                               const std::vector<optim::LinExpr>& a, const optim::LinExpr& alpha,
                               const optim::LinExpr& t);

/// Random finite Katetov function on the given support: raw values in
/// [0, 2R], pushed under the min-plus majorant, then lifted uniformly until
/// the lower inequality holds.
FiniteKatetov sample_katetov(SpacePtr space, std::vector<Vector> support, double R, std::mt19937_64& rng);

/// Points drawn radially in the R-ball of the space: a random direction
/// normalized to the sphere, times R * U(0, 1).
std::vector<Vector> sample_ball(const space::NormedSpace& s, std::size_t count, double R, std::mt19937_64& rng);

}  // namespace gurarij::katetov
