#pragma once

#include <map>
#include <string>
#include <vector>

#include "gurarij/katetov.hpp"
#include "gurarij/space.hpp"

namespace gurarij::aells {

using katetov::ConvexKatetovEnvelope;
using space::SpacePtr;

/// Finite metric space with a distinguished base point.
struct PointedFiniteMetric {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> d;
  std::size_t base = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t index(const std::string& label) const;  ///< throws support_mismatch
};

/// Throws invalid_input on a broken metric (asymmetry, triangle violation,
/// zero distance between distinct points, bad base).
void validate(const PointedFiniteMetric& m, double tol = 1e-9);

/// Finitely supported weights summing to zero.
using Molecule = std::map<std::string, double>;

struct TransportArc {
  std::size_t from = 0;
  std::size_t to = 0;
  double mass = 0.0;
};

struct AeNormResult {
  double value = 0.0;              ///< primal (transport) optimum
  double dual_value = 0.0;         ///< Lipschitz-side optimum
  std::vector<TransportArc> plan;  ///< optimal transport plan
  Vector witness;                  ///< 1-Lipschitz f with f(base) = 0 attaining the dual
};

/// Arens-Eells norm as a transport cost, with its Lipschitz dual.
AeNormResult ae_norm(const PointedFiniteMetric& m, const Molecule& mol);

/// McShane extension min_y partial(y) + L d(x, y). Throws
/// not_lipschitz_on_domain naming a witnessing pair.
std::vector<double> lipschitz_extend(const PointedFiniteMetric& m, const std::map<std::string, double>& partial,
                                     double L);

/// A normed space E with finitely many convex Katetov functions adjoined as
/// new points; d(xi_i, a) = xi_i(a), d(xi_i, xi_k) = sup distance.
struct RelativeSpaceOverE {
  SpacePtr base;
  std::vector<ConvexKatetovEnvelope> adjoined;
};

/// Checks each envelope lives over the base space.
void validate(const RelativeSpaceOverE& rs);

/// Dual ball of the relative Arens-Eells norm on coordinates (lambda, f):
/// lambda ranges over the dual ball of E, f_i over the values a 1-Lipschitz
/// function linear on E can take at xi_i.
space::DualBall relative_dual_ball(const RelativeSpaceOverE& rs);

/// ||a + sum alpha_i xi_i|| in the relative Arens-Eells space.
double relative_ae_norm(const RelativeSpaceOverE& rs, std::span<const double> a, std::span<const double> alpha);

/// Upper bound from explicit molecules: the transport cost over the points
/// `candidates` of E (plus 0) and the adjoined points, minimized jointly over
/// the ways of writing a as a combination of candidates. Exact once the
/// candidate set is rich enough.
double relative_ae_norm_primal(const RelativeSpaceOverE& rs, std::span<const double> a,
                               std::span<const double> alpha, const std::vector<Vector>& candidates);

/// E[X]: the space of dimension dim(E) + |adjoined| with the relative norm.
SpacePtr adjoin(const RelativeSpaceOverE& rs, std::size_t round = 0);

/// Explicit generators for an adjoined space of total dimension <= 4.
std::shared_ptr<const space::PolyNormedSpace> extract_explicit(const space::NormedSpace& s);

}  // namespace gurarij::aells
