#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gurarij/katetov.hpp"
#include "gurarij/space.hpp"

// The iterated one-point-extension tower E_0 <= E_1 <= ... at finite
// truncation, and the quantitative extension tests built on it.
namespace gurarij::tower {

using katetov::ConvexKatetovEnvelope;
using katetov::EnvelopeValue;
using space::SpacePtr;

struct BuildParams {
  SpacePtr start;
  std::size_t rounds = 1;
  std::size_t envelopes_per_round = 2;
  std::size_t support_size = 3;
  std::vector<double> radii = {2.0};  ///< R_n per round; the last entry repeats
  std::uint64_t seed = 0;
  /// Optional finite isometry group of the start space (matrices on its
  /// coordinates). Each round's adjoined set is closed under the group.
  std::vector<Matrix> symmetry;

  double radius(std::size_t round) const;
};

/// Throws invalid_params on bad counts or radii < 2.
void validate(const BuildParams& p);

struct BuildState {
  std::vector<SpacePtr> chain;                             ///< E_0, E_1, ...
  std::vector<std::vector<ConvexKatetovEnvelope>> log;     ///< envelopes adjoined in round n (over E_n)
  std::vector<std::uint64_t> seed_trace;                   ///< per-round RNG seed
  std::vector<Matrix> actions;                             ///< symmetry group acting on chain.back()
  std::size_t round = 0;

  const SpacePtr& top() const { return chain.back(); }
};

BuildState initial_state(const BuildParams& p);

/// One round: sample envelopes over the top space (closing under the
/// symmetry group if any), adjoin them, and extend the group action.
BuildState build_step(const BuildState& state, const BuildParams& p);

/// Runs all rounds from the start space.
BuildState build(const BuildParams& p);

/// Generator data of a logged envelope, detached from its space.
struct LoggedEnvelope {
  std::vector<Vector> points;
  Vector values;
};

/// Rebuilds the chain from logged envelopes (no sampling).
BuildState replay(const SpacePtr& start, const std::vector<std::vector<LoggedEnvelope>>& log,
                  const std::vector<std::uint64_t>& seeds, const std::vector<Matrix>& symmetry = {});
BuildState replay(const SpacePtr& start, const std::vector<std::vector<ConvexKatetovEnvelope>>& log,
                  const std::vector<std::uint64_t>& seeds, const std::vector<Matrix>& symmetry = {});

/// max over `samples` random vectors of E_n of | ||x||_{E_{n+1}} - ||x||_{E_n} |,
/// over every consecutive pair of the chain.
double embedding_defect(const BuildState& state, std::size_t samples, std::uint64_t seed);

/// Extension of an isometry phi of E_n (matrix on its coordinates) to
/// E_{n+1}: phi on the old coordinates, and the permutation xi -> xi o phi^-1
/// on adjoined coordinates. Throws orbit_escape if some image is not logged.
Matrix induced_matrix(const SpacePtr& en, const std::vector<ConvexKatetovEnvelope>& round_log, const Matrix& phi);

/// Transport of an envelope by a linear isometry: generators (phi y, c).
ConvexKatetovEnvelope transport(const ConvexKatetovEnvelope& ck, const Matrix& phi, const SpacePtr& target);

/// Convex function on a coefficient space evaluated with a supporting
/// affine minorant.
using ConvexOracle = std::function<EnvelopeValue(std::span<const double>)>;

struct BallRestriction {
  std::vector<Vector> points;  ///< vertices of the epigraph of f over the R-ball
  Vector values;
  std::size_t cuts = 0;        ///< cutting planes added
};

/// Exact generator data for (f + indicator of the R-ball) inf-convolved with
/// the norm: the vertices of {(s, t) : ||s|| <= R, t >= f(s)}, found by
/// outer approximation with norming-functional and supporting-piece cuts.
BallRestriction restrict_to_ball(const space::NormedSpace& n, double R, const ConvexOracle& f);

/// s -> || z0 + sum s_i cols_i ||_G, with the supporting piece read off the
/// norming functional.
ConvexOracle affine_norm_oracle(SpacePtr g, std::vector<Vector> cols, Vector z0);

/// Deterministic unit-sphere net of a space: for each coordinate pair,
/// `per_pair` directions in that plane, plus `per_pair` Halton directions,
/// all normalized.
std::vector<Vector> sphere_net(const space::NormedSpace& s, std::size_t per_pair);

struct ExtensionResult {
  SpacePtr space;               ///< E' = E[xi'], the old top space plus one coordinate
  Vector u;                     ///< the new point (last unit vector of E')
  ConvexKatetovEnvelope envelope;  ///< xi' transported into E
  double epsilon = 0.0;         ///< net max of | ||psi x + t u|| - ||x + t v|| | / ||x + t v||
  double epsilon_inside = 0.0;  ///< same, over net points with ||-x / t|| <= R
  double bound = 0.0;           ///< 2 / (R - 1)
  std::size_t net_points = 0;
};

struct NetOptions {
  std::size_t per_pair = 64;
  std::vector<double> radii = {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
  std::vector<double> ts = {1.0, -1.0, 0.5, -0.5, 0.25, -0.25};
};

/// The one-point extension step of the Gurarij property test. `basis` lives
/// in e and spans an isometric copy of xi's space; xi must satisfy xi(0) = 1.
ExtensionResult gurarij_extension_test(const SpacePtr& e, const std::vector<Vector>& basis,
                                       const ConvexKatetovEnvelope& xi, double R, const NetOptions& net = {});

/// Same, with xi given as an oracle over the coefficient space `coeff`.
ExtensionResult gurarij_extension_test(const SpacePtr& e, const std::vector<Vector>& basis, const SpacePtr& coeff,
                                       const ConvexOracle& xi, double R, const NetOptions& net = {});

struct PerturbationConstants {
  double c = 0.0;         ///< sup ||x|| / ||x + v|| over x in F0
  double c_prime = 0.0;   ///< max sum |t_i| over ||sum t_i x_i|| <= 1
  bool lower_bound = false;  ///< true when obtained by sampling (oracle spaces)
  double delta(double eps) const { return eps / (6.0 * c * c_prime + 1.0 + eps); }
};

PerturbationConstants perturbation_constants(const SpacePtr& f1, const std::vector<Vector>& basis, const Vector& v,
                                             std::size_t samples = 4000);

/// max over the sphere net of the domain of | ||map x|| / ||x|| - 1 |.
/// `map` has codomain->dim() rows and domain.dim() columns.
double epsilon_isometry_check(const Matrix& map, const space::NormedSpace& domain, const space::NormedSpace& codomain,
                              std::size_t per_pair = 64);

/// A random finite-dimensional extension problem: F1 on coordinates
/// (b_1..b_k, v), the isometric map psi of F0 into l_inf^m, and the Katetov
/// function xi(s) = ||sum s_i b_i - v||_F1 on F0 coordinates.
struct ExtensionInstance {
  std::shared_ptr<const space::PolyNormedSpace> f1;
  std::vector<Vector> basis;  ///< b_i in F1 coordinates, unit norm
  Vector v;                   ///< unit norm
  SpacePtr f0;                ///< coefficient space of F0
  Matrix psi;                 ///< m x k, isometric into l_inf^m
  ConvexKatetovEnvelope xi;
};

ExtensionInstance random_extension_instance(std::mt19937_64& rng, std::size_t k, std::size_t extra_functionals = 1);

struct DeltaPipelineResult {
  PerturbationConstants constants;
  double epsilon = 0.0;           ///< target
  double delta = 0.0;
  double noise = 0.0;             ///< max_i ||w_i - psi b_i||_E
  double henson_r = 0.0;          ///< gluing distance used for the amalgam
  double epsilon_achieved = 0.0;  ///< net epsilon of the final map F1 -> E'
  SpacePtr extended;              ///< E' = E[xi']
  Matrix map;                     ///< F1 -> E'
};

/// The general extension case: perturb psi by coordinate noise of size at
/// most delta (E = l_inf^m), glue E and F1 along w_i ~ b_i, extend by
/// xi(s) = ||sum s_i w_i - v|| restricted to the ball of radius 1 + 2/delta,
/// and measure how far b_i -> w_i, v -> u is from an isometry.
DeltaPipelineResult delta_pipeline(const ExtensionInstance& inst, double eps, std::mt19937_64& rng,
                                   std::size_t per_pair = 32);

}  // namespace gurarij::tower
