#pragma once

#include <span>
#include <string>
#include <vector>

#include "gurarij/katetov.hpp"
#include "gurarij/space.hpp"

namespace gurarij::amalgam {

using katetov::ConvexKatetovEnvelope;
using space::SpacePtr;

struct Bounds {
  double r0 = 0.0;  ///< sup distance
  double r1 = 0.0;  ///< inf_a ck0(a) + ck1(a)
};

/// Throws invariant_violation if r0 > r1 + 1e-9.
Bounds amalgam_bounds(const ConvexKatetovEnvelope& ck0, const ConvexKatetovEnvelope& ck1);

/// Seminorm on E(x0, x1) with ||x0 - x1|| = r, for r0 <= r <= r1.
struct TwoPointExtension {
  ConvexKatetovEnvelope ck0;
  ConvexKatetovEnvelope ck1;
  Bounds bounds;
  double r = 0.0;
  double t = 1.0;  ///< weight of the r0 norm: r = t r0 + (1 - t) r1
};

/// Computes the bounds and the mixing weight; throws invariant_violation
/// unless r0 - 1e-9 <= r <= r1 + 1e-9.
TwoPointExtension make_two_point(ConvexKatetovEnvelope ck0, ConvexKatetovEnvelope ck1, double r);

/// ||a + alpha x0 + beta x1||_r
double two_point_norm(const TwoPointExtension& tpe, std::span<const double> a, double alpha, double beta);

/// The two extreme seminorms separately (r = r0 and r = r1).
double two_point_norm_r0(const TwoPointExtension& tpe, std::span<const double> a, double alpha, double beta);
double two_point_norm_r1(const TwoPointExtension& tpe, std::span<const double> a, double alpha, double beta);

struct HensonResult {
  double value = 0.0;
  Vector direction;   ///< coefficient tuple s with ||s||_1 = 1 attaining the sup
  bool e_side = true; ///< true when ||sum s x||_E - ||sum s y||_F = value
};

/// sup over ||s||_1 = 1 of | ||sum s_i x_i||_E - ||sum s_i y_i||_F |.
HensonResult henson_distance(const SpacePtr& e, const std::vector<Vector>& xs, const SpacePtr& f,
                             const std::vector<Vector>& ys);

/// Same, with every LP solved in exact rational arithmetic; `is_zero` is an
/// exact statement about the rational data.
struct ExactHenson {
  HensonResult result;
  bool is_zero = false;
};
ExactHenson henson_distance_exact(const SpacePtr& e, const std::vector<Vector>& xs, const SpacePtr& f,
                                  const std::vector<Vector>& ys);

/// E and F glued along x_i ~ y_i with ||x_i - y_i|| <= r. Elements are pairs
/// (zE, zF); the copy of y_i is (0, y_i), so x_i - y_i is (x_i, -y_i).
struct TupleAmalgam {
  SpacePtr e;
  SpacePtr f;
  std::vector<Vector> xs;
  std::vector<Vector> ys;
  double r = 0.0;
};

/// min_s ||zE - sum s x||_E + ||zF + sum s y||_F + r ||s||_1
double tuple_amalgam_norm(const TupleAmalgam& ta, std::span<const double> ze, std::span<const double> zf);

/// The amalgam as a space on the concatenated coordinates (zE, zF).
SpacePtr tuple_amalgam_space(const TupleAmalgam& ta);

}  // namespace gurarij::amalgam
